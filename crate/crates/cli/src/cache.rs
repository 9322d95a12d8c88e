//! Optional on-disk cache of discrete spectra, enabled by pointing
//! `BARRIER_SPECTRA_CACHE` at a directory.

use std::path::PathBuf;

use barrier_spectra_core::jacobi::DiscreteEigenpoint;
use sha2::{Digest, Sha256};

use crate::output::write_atomic;

pub const CACHE_ENV: &str = "BARRIER_SPECTRA_CACHE";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumCache {
    dir: PathBuf,
}

impl SpectrumCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV)
            .filter(|v| !v.is_empty())
            .map(Self::new)
    }

    /// Content hash of everything that determines a discrete spectrum.
    pub fn key(n: u32, h: f64, tol: f64) -> String {
        let mut hasher = Sha256::new();
        hasher.update(b"discrete-spectrum\0");
        hasher.update(n.to_le_bytes());
        hasher.update(h.to_bits().to_le_bytes());
        hasher.update(tol.to_bits().to_le_bytes());
        hasher.update(crate::TOOL_VERSION.as_bytes());
        hex::encode(hasher.finalize())
    }

    /// Cached spectrum for `(n, h, tol)`, computed and stored on a miss.
    /// Unreadable or corrupt entries are recomputed; failed writes only cost
    /// the next run a recomputation.
    pub fn discrete<F>(
        &self,
        n: u32,
        h: f64,
        tol: f64,
        compute: F,
    ) -> Result<Vec<DiscreteEigenpoint>, String>
    where
        F: FnOnce() -> Result<Vec<DiscreteEigenpoint>, String>,
    {
        let name = format!("{}.json", Self::key(n, h, tol));
        let path = self.dir.join(&name);
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(points) = serde_json::from_str(&text) {
                return Ok(points);
            }
        }
        let points = compute()?;
        if std::fs::create_dir_all(&self.dir).is_ok() {
            if let Ok(text) = serde_json::to_vec(&points) {
                let _ = write_atomic(&self.dir, &name, &text);
            }
        }
        Ok(points)
    }
}

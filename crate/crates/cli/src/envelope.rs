use barrier_spectra_core::asymptotics::MatchedPrediction;
use barrier_spectra_core::jacobi::{Branch, DiscreteEigenpoint, OracleKind, UpperDiskRoot};
use barrier_spectra_core::schrodinger::{CharRoot, ContinuousEigenpoint};
use barrier_spectra_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{EXIT_FAILURE, EXIT_VALIDATION};

/// Version of the CSV column layouts.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// One verification performed during a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub worst_residual: Option<f64>,
    pub threshold: Option<f64>,
    pub detail: String,
}

impl Check {
    pub fn bound(
        name: impl Into<String>,
        worst: f64,
        threshold: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed: worst <= threshold,
            worst_residual: Some(worst),
            threshold: Some(threshold),
            detail: detail.into(),
        }
    }

    pub fn condition(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            worst_residual: None,
            threshold: None,
            detail: detail.into(),
        }
    }
}

/// A scan row with failed sums as `None`, so the JSON form round-trips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub param: f64,
    pub norm: f64,
    pub raw_sum: Option<f64>,
    pub scaled_sum: Option<f64>,
    pub eigencount: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub n: u32,
    pub radius: f64,
    pub unmatched: usize,
    pub max_error: Option<f64>,
    /// Smallest `dist(λ, [−2,2]) / (n^{−2/3}/2)` over matched eigenvalues.
    pub min_distance_ratio: Option<f64>,
    pub matches: Vec<MatchedPrediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub branch: Branch,
    pub grid: u32,
    pub polylines: usize,
    pub inside_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Discrete {
        n: u32,
        h: f64,
        tol: f64,
        oracle: OracleKind,
        disk_multiplicity: u32,
        eigenpoints: Vec<DiscreteEigenpoint>,
        upper_disk_roots: Vec<UpperDiskRoot>,
        regions: Vec<RegionSummary>,
    },
    Continuous {
        h: f64,
        tol: f64,
        scope: String,
        search_rectangle: [Complex64; 2],
        zero_count: u64,
        roots: Vec<CharRoot>,
        eigenpoints: Vec<ContinuousEigenpoint>,
    },
    Scan {
        rows: Vec<ScanRecord>,
    },
    Asymptotics {
        reports: Vec<AsymptoticsReport>,
        slope: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub config_echo: RunConfig,
    pub tool_version: String,
    pub csv_schema_version: u32,
    pub wall_time_seconds: f64,
    pub result: Option<Payload>,
    pub certification_summary: Vec<Check>,
    pub error: Option<String>,
}

impl ResultEnvelope {
    pub fn succeeded(&self) -> bool {
        self.error.is_none() && self.certification_summary.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.certification_summary.iter().filter(|c| !c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.succeeded() {
            0
        } else {
            EXIT_FAILURE
        }
    }
}

const _: () = assert!(EXIT_VALIDATION != EXIT_FAILURE);

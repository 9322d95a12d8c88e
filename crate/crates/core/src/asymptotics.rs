//! Leading-order eigenvalue positions of the lattice barrier with `h = n^{−2/3}`
//! and their comparison with computed spectra.
//!
//! For `j` in the central window the minus-branch roots sit at
//! `z_j ≈ r e^{iφ_j}` with `φ_j = π(4j − 1)/(2n)` and `r = 1 − (2/3) log n / n`,
//! which gives `λ_j ≈ 2 cos φ_j + i n^{−2/3}` up to `O(log n / n)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jacobi::{Branch, DiscreteEigenpoint};

/// Default trimming of the extended window.
pub const DEFAULT_EPSILON: f64 = 0.05;
/// Largest tolerated share of unmatched predictions.
pub const MAX_UNMATCHED_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("j = {j} outside the window {lo}..={hi} for n = {n}")]
    OutOfWindow { j: u32, n: u32, lo: u32, hi: u32 },
    #[error("{unmatched} of {total} predictions found no eigenvalue")]
    TooManyUnmatched { unmatched: usize, total: usize },
    #[error("regression needs at least 3 positive samples with distinct scales")]
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "window", rename_all = "snake_case")]
pub enum PredictionWindow {
    /// `(n+2)/8 ≤ j ≤ (3n+2)/8`.
    Central,
    /// `(2nε+1)/4 ≤ j ≤ (2n(1−ε)+1)/4`.
    Extended { epsilon: f64 },
}

/// Inclusive index range of a window, empty when `lo > hi`.
pub fn window_range(n: u32, window: PredictionWindow) -> (u32, u32) {
    let n = f64::from(n);
    let (lo, hi) = match window {
        PredictionWindow::Central => ((n + 2.0) / 8.0, (3.0 * n + 2.0) / 8.0),
        PredictionWindow::Extended { epsilon } => (
            (2.0 * n * epsilon + 1.0) / 4.0,
            (2.0 * n * (1.0 - epsilon) + 1.0) / 4.0,
        ),
    };
    (lo.ceil().max(1.0) as u32, hi.floor().max(0.0) as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub n: u32,
    pub j: u32,
    pub phi: f64,
    pub r: f64,
    pub lambda_approx: Complex64,
}

pub fn predict_discrete(
    j: u32,
    n: u32,
    window: PredictionWindow,
) -> Result<AsymptoticPrediction, AsymptoticsError> {
    if n < 2 {
        return Err(AsymptoticsError::InvalidArgument(format!(
            "n must be >= 2, got {n}"
        )));
    }
    if let PredictionWindow::Extended { epsilon } = window {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(AsymptoticsError::InvalidArgument(format!(
                "epsilon must lie in (0, 1/2), got {epsilon}"
            )));
        }
    }
    let (lo, hi) = window_range(n, window);
    if j < lo || j > hi {
        return Err(AsymptoticsError::OutOfWindow { j, n, lo, hi });
    }
    let nf = f64::from(n);
    let phi = PI * (4.0 * f64::from(j) - 1.0) / (2.0 * nf);
    let r = 1.0 - (2.0 / 3.0) * nf.ln() / nf;
    let lambda_approx = Complex64::new(2.0 * phi.cos(), nf.powf(-2.0 / 3.0));
    Ok(AsymptoticPrediction {
        n,
        j,
        phi,
        r,
        lambda_approx,
    })
}

/// Predictions for every `j` of the window.
pub fn predict_window(
    n: u32,
    window: PredictionWindow,
) -> Result<Vec<AsymptoticPrediction>, AsymptoticsError> {
    let (lo, hi) = window_range(n, window);
    (lo..=hi).map(|j| predict_discrete(j, n, window)).collect()
}

/// Matching radius `2 log n / n`, twice the order of the expansion error.
pub fn default_match_radius(n: u32) -> f64 {
    let n = f64::from(n);
    2.0 * n.ln() / n
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPrediction {
    pub j: u32,
    pub lambda_approx: Complex64,
    pub matched_lambda: Option<Complex64>,
    pub matched_k: Option<Complex64>,
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub n: u32,
    pub radius: f64,
    pub matches: Vec<MatchedPrediction>,
}

impl MatchReport {
    pub fn unmatched(&self) -> impl Iterator<Item = &MatchedPrediction> {
        self.matches.iter().filter(|m| m.matched_lambda.is_none())
    }

    pub fn unmatched_fraction(&self) -> f64 {
        if self.matches.is_empty() {
            return 0.0;
        }
        self.unmatched().count() as f64 / self.matches.len() as f64
    }

    /// Largest error over matched predictions, `None` when nothing matched.
    pub fn max_error(&self) -> Option<f64> {
        self.matches.iter().filter_map(|m| m.error).reduce(f64::max)
    }
}

/// Greedy nearest-neighbour pairing in `λ` of predictions with minus-branch
/// eigenvalues within `radius`; each eigenvalue is used at most once.
///
/// Only the minus branch is searched: the predicted angles belong to its
/// roots, and plus-branch eigenvalues interleave at distance `O(1/n)`, close
/// enough to be picked up in place of a missing minus-branch eigenvalue.
pub fn match_with_radius(
    predictions: &[AsymptoticPrediction],
    spectrum: &[DiscreteEigenpoint],
    radius: f64,
) -> MatchReport {
    let candidates: Vec<&DiscreteEigenpoint> = spectrum
        .iter()
        .filter(|e| e.branch == Branch::Minus)
        .collect();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (pi, p) in predictions.iter().enumerate() {
        for (ei, e) in candidates.iter().enumerate() {
            let d = (e.lambda - p.lambda_approx).norm();
            if d <= radius {
                pairs.push((d, pi, ei));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut matches: Vec<MatchedPrediction> = predictions
        .iter()
        .map(|p| MatchedPrediction {
            j: p.j,
            lambda_approx: p.lambda_approx,
            matched_lambda: None,
            matched_k: None,
            error: None,
        })
        .collect();
    let mut used = vec![false; candidates.len()];
    for (d, pi, ei) in pairs {
        if used[ei] || matches[pi].matched_lambda.is_some() {
            continue;
        }
        used[ei] = true;
        matches[pi].matched_lambda = Some(candidates[ei].lambda);
        matches[pi].matched_k = Some(candidates[ei].k);
        matches[pi].error = Some(d);
    }
    MatchReport {
        n: predictions.first().map_or(0, |p| p.n),
        radius,
        matches,
    }
}

/// [`match_with_radius`] at [`default_match_radius`], failing when more than
/// [`MAX_UNMATCHED_FRACTION`] of the predictions stay unmatched.
pub fn match_and_measure(
    predictions: &[AsymptoticPrediction],
    spectrum: &[DiscreteEigenpoint],
) -> Result<MatchReport, AsymptoticsError> {
    let n = predictions.first().map_or(2, |p| p.n);
    let report = match_with_radius(predictions, spectrum, default_match_radius(n));
    let unmatched = report.unmatched().count();
    if unmatched as f64 > MAX_UNMATCHED_FRACTION * predictions.len() as f64 {
        return Err(AsymptoticsError::TooManyUnmatched {
            unmatched,
            total: predictions.len(),
        });
    }
    Ok(report)
}

/// Least-squares slope of `log error` against `log scale`.
pub fn rate_regress(samples: &[(f64, f64)]) -> Result<f64, AsymptoticsError> {
    if samples.len() < 3 || samples.iter().any(|&(s, e)| !(s > 0.0 && e > 0.0)) {
        return Err(AsymptoticsError::Degenerate);
    }
    let m = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 1e-12 * m {
        return Err(AsymptoticsError::Degenerate);
    }
    Ok(sxy / sxx)
}

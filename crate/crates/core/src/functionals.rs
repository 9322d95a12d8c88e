//! Distances to the essential spectrum, Lieb–Thirring type eigenvalue sums,
//! and scans of their normalized values along parameter ladders.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jacobi::{default_tolerance, discrete_spectrum, DiscreteBarrier};
use crate::schrodinger::{continuous_spectrum, ContinuousBarrier, SeedWindow};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctionalError {
    #[error("invalid exponents: {0}")]
    InvalidExponents(String),
    #[error("eigenvalue {lambda} sits on a zero of the weight")]
    SingularWeight { lambda: Complex64 },
}

/// Distance from `λ` to the segment `[−2, 2]`.
pub fn dist_to_band(lambda: Complex64) -> f64 {
    let x = lambda.re.abs();
    if x <= 2.0 {
        lambda.im.abs()
    } else {
        (lambda - Complex64::new(2.0 * lambda.re.signum(), 0.0)).norm()
    }
}

/// Distance from `λ` to the half-line `[0, ∞)`.
pub fn dist_to_halfline(lambda: Complex64) -> f64 {
    if lambda.re >= 0.0 {
        lambda.im.abs()
    } else {
        lambda.norm()
    }
}

fn check_nonnegative(name: &str, value: f64) -> Result<(), FunctionalError> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(FunctionalError::InvalidExponents(format!(
            "{name} must be finite and >= 0, got {value}"
        )))
    }
}

/// `|λ² − 4|`, rejecting the band edges.
fn edge_weight(lambda: Complex64) -> Result<f64, FunctionalError> {
    let w = (lambda * lambda - 4.0).norm();
    if w == 0.0 {
        return Err(FunctionalError::SingularWeight { lambda });
    }
    Ok(w)
}

/// `Σ dist(λ, [−2,2])^ω`.
pub fn sum_theorem1(spectrum: &[Complex64], omega: f64) -> Result<f64, FunctionalError> {
    check_nonnegative("omega", omega)?;
    Ok(spectrum
        .iter()
        .fold(0.0, |acc, &l| acc + dist_to_band(l).powf(omega)))
}

/// `Σ dist(λ, [−2,2])^p / |λ² − 4|^σ`.
///
/// Only non-negativity of the exponents is enforced here; the ranges in which
/// the sum is a meaningful test quantity are checked by [`SumSpec`].
pub fn sum_theorem2(spectrum: &[Complex64], p: f64, sigma: f64) -> Result<f64, FunctionalError> {
    check_nonnegative("p", p)?;
    check_nonnegative("sigma", sigma)?;
    spectrum
        .iter()
        .map(|&l| Ok(dist_to_band(l).powf(p) / edge_weight(l)?.powf(sigma)))
        .try_fold(0.0, |acc, term| term.map(|t| acc + t))
}

/// For `p > 1`: `Σ dist^{p+τ} / |λ² − 4|^{1/2}`; for `p = 1`:
/// `Σ dist^{1+τ} / |λ² − 4|^{1/2+τ/4}`.
pub fn sum_hk(spectrum: &[Complex64], p: f64, tau: f64) -> Result<f64, FunctionalError> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(FunctionalError::InvalidExponents(format!(
            "need p >= 1, got {p}"
        )));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(FunctionalError::InvalidExponents(format!(
            "need 0 < tau < 1, got {tau}"
        )));
    }
    let (power, sigma) = if p == 1.0 {
        (1.0 + tau, 0.5 + tau / 4.0)
    } else {
        (p + tau, 0.5)
    };
    spectrum
        .iter()
        .map(|&l| Ok(dist_to_band(l).powf(power) / edge_weight(l)?.powf(sigma)))
        .try_fold(0.0, |acc, term| term.map(|t| acc + t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SumMode {
    /// `Σ dist^ω`.
    Theorem1 { omega: f64 },
    /// `Σ dist^p / |λ²−4|^σ`.
    Theorem2 { sigma: f64 },
    /// The functional bounded by `‖b‖_p^p` in the lattice setting.
    Hk { tau: f64 },
}

/// The exponent `p` of the potential norm together with one sum mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumSpec {
    p: f64,
    mode: SumMode,
}

impl SumSpec {
    /// Exactly one of `omega`, `sigma`, `tau` must be given.
    pub fn new(
        p: f64,
        omega: Option<f64>,
        sigma: Option<f64>,
        tau: Option<f64>,
    ) -> Result<Self, FunctionalError> {
        let mode = match (omega, sigma, tau) {
            (Some(omega), None, None) => SumMode::Theorem1 { omega },
            (None, Some(sigma), None) => SumMode::Theorem2 { sigma },
            (None, None, Some(tau)) => SumMode::Hk { tau },
            _ => {
                return Err(FunctionalError::InvalidExponents(
                    "exactly one of omega, sigma, tau must be set".into(),
                ))
            }
        };
        Self::with_mode(p, mode)
    }

    pub fn with_mode(p: f64, mode: SumMode) -> Result<Self, FunctionalError> {
        let bad = |m: String| Err(FunctionalError::InvalidExponents(m));
        match mode {
            SumMode::Theorem1 { omega } => {
                if !(p >= 0.0 && p.is_finite()) {
                    return bad(format!("need p >= 0, got {p}"));
                }
                check_nonnegative("omega", omega)?;
            }
            SumMode::Theorem2 { sigma } => {
                if !(p >= 1.0 && p.is_finite()) || !(sigma >= 0.5 && sigma.is_finite()) {
                    return bad(format!(
                        "need p >= 1 and sigma >= 1/2, got p={p}, sigma={sigma}"
                    ));
                }
            }
            SumMode::Hk { tau } => {
                if !(p >= 1.0 && p.is_finite()) || !(tau > 0.0 && tau < 1.0) {
                    return bad(format!("need p >= 1 and 0 < tau < 1, got p={p}, tau={tau}"));
                }
            }
        }
        Ok(Self { p, mode })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mode(&self) -> SumMode {
        self.mode
    }

    pub fn evaluate(&self, spectrum: &[Complex64]) -> Result<f64, FunctionalError> {
        match self.mode {
            SumMode::Theorem1 { omega } => sum_theorem1(spectrum, omega),
            SumMode::Theorem2 { sigma } => sum_theorem2(spectrum, self.p, sigma),
            SumMode::Hk { tau } => sum_hk(spectrum, self.p, tau),
        }
    }
}

/// One point of a scan. Failed rows keep their parameter and norm, carry the
/// error message and have `NaN` sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub param: f64,
    pub norm_p: f64,
    pub raw_sum: f64,
    pub scaled_sum: f64,
    pub eigencount: usize,
    pub error: Option<String>,
}

impl ScanRow {
    fn failed(param: f64, norm_p: f64, error: String) -> Self {
        Self {
            param,
            norm_p,
            raw_sum: f64::NAN,
            scaled_sum: f64::NAN,
            eigencount: 0,
            error: Some(error),
        }
    }
}

/// Coupling of the lattice ladder: `h = n^{−2/3}`.
pub fn discrete_coupling(n: u32) -> f64 {
    f64::from(n).powf(-2.0 / 3.0)
}

/// `‖b‖_{ℓ^p} = n^{1/p − 2/3}` for `b_k = i n^{−2/3}` on `n` sites.
pub fn discrete_norm(n: u32, p: f64) -> f64 {
    f64::from(n).powf(1.0 / p - 2.0 / 3.0)
}

/// Certified eigenvalues of `T` at `(n, n^{−2/3})`.
pub fn ladder_spectrum(n: u32) -> Result<Vec<Complex64>, String> {
    let op = DiscreteBarrier::new(n, discrete_coupling(n)).map_err(|e| e.to_string())?;
    let spectrum = discrete_spectrum(&op, default_tolerance(n)).map_err(|e| e.to_string())?;
    Ok(spectrum.into_iter().map(|e| e.lambda).collect())
}

/// Scan over `n` with the spectra computed afresh.
pub fn scan_discrete(spec: &SumSpec, n_list: &[u32]) -> Vec<ScanRow> {
    scan_discrete_with(spec, n_list, ladder_spectrum)
}

/// Scan over `n` with spectra supplied by `provider` (for caching). Rows are
/// computed in parallel and returned in input order.
pub fn scan_discrete_with<F>(spec: &SumSpec, n_list: &[u32], provider: F) -> Vec<ScanRow>
where
    F: Fn(u32) -> Result<Vec<Complex64>, String> + Sync,
{
    n_list
        .par_iter()
        .map(|&n| {
            let param = f64::from(n);
            let norm_p = discrete_norm(n, spec.p);
            if n < 2 {
                return ScanRow::failed(param, norm_p, format!("n must be >= 2, got {n}"));
            }
            let spectrum = match provider(n) {
                Ok(s) => s,
                Err(e) => return ScanRow::failed(param, norm_p, e),
            };
            match spec.evaluate(&spectrum) {
                Ok(raw_sum) => ScanRow {
                    param,
                    norm_p,
                    raw_sum,
                    scaled_sum: raw_sum / norm_p.powf(spec.p),
                    eigencount: spectrum.len(),
                    error: None,
                },
                Err(e) => ScanRow::failed(param, norm_p, e.to_string()),
            }
        })
        .collect()
}

/// `Σ (Im λ)^p / |λ|^σ`.
pub fn continuous_sum(spectrum: &[Complex64], p: f64, sigma: f64) -> Result<f64, FunctionalError> {
    spectrum
        .iter()
        .map(|&l| {
            let m = l.norm();
            if m == 0.0 {
                return Err(FunctionalError::SingularWeight { lambda: l });
            }
            Ok(l.im.powf(p) / m.powf(sigma))
        })
        .try_fold(0.0, |acc, term| term.map(|t| acc + t))
}

/// Scan over `h` of `h^{2σ−p−1} Σ (Im λ)^p/|λ|^σ` on the window spectrum; the
/// norm column is `‖Ṽ_h‖_p = (2h^{1−p})^{1/p}`.
pub fn scan_continuous(
    p: f64,
    sigma: f64,
    h_list: &[f64],
    w: &SeedWindow,
    tol: f64,
) -> Vec<ScanRow> {
    h_list
        .par_iter()
        .map(|&h| {
            let norm_p = (2.0 * h.powf(1.0 - p)).powf(1.0 / p);
            if !(p >= 1.0 && sigma >= 0.5) {
                return ScanRow::failed(
                    h,
                    norm_p,
                    format!("need p >= 1 and sigma >= 1/2, got p={p}, sigma={sigma}"),
                );
            }
            let spectrum = ContinuousBarrier::new(h)
                .and_then(|op| continuous_spectrum(&op, w, tol))
                .map(|s| {
                    s.eigenpoints
                        .into_iter()
                        .map(|e| e.lambda)
                        .collect::<Vec<_>>()
                });
            let spectrum = match spectrum {
                Ok(s) => s,
                Err(e) => return ScanRow::failed(h, norm_p, e.to_string()),
            };
            match continuous_sum(&spectrum, p, sigma) {
                Ok(raw_sum) => ScanRow {
                    param: h,
                    norm_p,
                    raw_sum,
                    scaled_sum: h.powf(2.0 * sigma - p - 1.0) * raw_sum,
                    eigencount: spectrum.len(),
                    error: None,
                },
                Err(e) => ScanRow::failed(h, norm_p, e.to_string()),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn band_distances() {
        assert_eq!(dist_to_band(c(3.0, 0.0)), 1.0);
        assert_eq!(dist_to_band(c(1.0, 2.0)), 2.0);
        assert!((dist_to_band(c(-3.0, -4.0)) - 17f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn halfline_distances() {
        assert_eq!(dist_to_halfline(c(-1.0, 0.0)), 1.0);
        assert_eq!(dist_to_halfline(c(4.0, 3.0)), 3.0);
        assert_eq!(dist_to_halfline(c(-3.0, 4.0)), 5.0);
    }

    #[test]
    fn sums_at_two_plus_i() {
        let s = [c(2.0, 1.0)];
        assert_eq!(sum_theorem1(&s, 2.0).unwrap(), 1.0);
        assert_eq!(sum_theorem1(&[], 2.0).unwrap(), 0.0);
        let expected = 17f64.powf(-0.25);
        assert!((sum_theorem2(&s, 1.0, 0.5).unwrap() - expected).abs() < 1e-15);
        assert!((sum_hk(&s, 2.0, 0.5).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn band_edges_are_singular() {
        assert!(matches!(
            sum_theorem2(&[c(2.0, 0.0)], 1.0, 0.5),
            Err(FunctionalError::SingularWeight { .. })
        ));
        assert!(sum_hk(&[c(-2.0, 0.0)], 1.0, 0.5).is_err());
    }

    #[test]
    fn spec_modes_are_exclusive() {
        assert!(SumSpec::new(1.0, Some(0.5), Some(0.5), None).is_err());
        assert!(SumSpec::new(1.0, None, None, None).is_err());
        assert!(SumSpec::new(0.5, None, Some(0.5), None).is_err());
        assert!(SumSpec::new(1.0, None, Some(0.25), None).is_err());
        assert!(SumSpec::new(1.0, None, None, Some(1.0)).is_err());
        assert!(SumSpec::new(0.0, Some(0.0), None, None).is_ok());
    }

    #[test]
    fn norm_column() {
        assert!((discrete_norm(1000, 1.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn failing_provider_annotates_row() {
        let spec = SumSpec::new(1.0, Some(0.5), None, None).unwrap();
        let rows = scan_discrete_with(&spec, &[4, 8], |n| {
            if n == 4 {
                Err("boom".to_string())
            } else {
                Ok(vec![c(0.0, 1.0)])
            }
        });
        assert_eq!(rows[0].error.as_deref(), Some("boom"));
        assert!(rows[0].raw_sum.is_nan());
        assert_eq!(rows[1].param, 8.0);
        assert_eq!(rows[1].eigencount, 1);
    }
}

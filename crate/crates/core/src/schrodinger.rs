//! The continuum operator `H_h = −d²/dx² + ih χ_[−1,1]` on `L²(R)`.
//!
//! Even eigenfunctions `cos(μx)` inside the barrier and `cos(μ) e^{ik(|x|−1)}`
//! outside lead to `k² = μ² + ih`, `k = iμ tan μ`, i.e. to
//! `μ² + ih cos²μ = 0`, which factors as
//! `(μ + e^{−iπ/4}√h cos μ)(μ − e^{−iπ/4}√h cos μ)`. The first factor carries
//! the roots whose leading-order positions are given by [`seed_mu`]; the
//! second factor interleaves with it, shifted by `−π` in the real part.
//! Only roots with `Re μ < 0` are kept (the equation is even in `μ`).

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::functionals::dist_to_halfline;
use crate::numeric::{count_zeros, newton_refine, Evaluation, NumericError, Rectangle};

const POLE_GUARD: f64 = 1e-14;
/// Relative residual targeted by the Newton refinement.
const REFINE_TOL: f64 = 1e-13;
/// A stalled Newton run is still accepted below this relative residual.
const STALL_ACCEPT: f64 = 1e-11;
const REFINE_MAX_ITER: usize = 80;
/// Roots closer than this are the same root.
pub const DEDUPE_RADIUS: f64 = 1e-6;
/// Largest tolerated share of window seeds whose refinement fails.
pub const MAX_FAILURE_RATE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchrodingerError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cos(mu) vanishes near mu = {mu}")]
    PoleProximity { mu: Complex64 },
    #[error("admissibility forms disagree at mu = {mu}")]
    AdmissibilityDisagreement { mu: Complex64 },
    #[error("the seed window for h = {h} is empty")]
    EmptyWindow { h: f64 },
    #[error("Newton refinement failed for {failures} of {total} seeds")]
    RefinementFailures { failures: usize, total: usize },
    #[error("argument principle counts {counted} zeros, the solver found {found}")]
    CountMismatch { counted: u64, found: usize },
    #[error("root mu = {mu} fails certification (relative residual {residual:e})")]
    Uncertified { mu: Complex64, residual: f64 },
    #[error("eigenvalue {lambda} lies outside the strip [0,inf) + i(0,h]")]
    StripViolation { lambda: Complex64 },
    #[error("spectrum contains lambda = 0")]
    SingularWeight,
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// `H_h` with barrier height `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousBarrier {
    h: f64,
}

impl ContinuousBarrier {
    pub fn new(h: f64) -> Result<Self, SchrodingerError> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(SchrodingerError::InvalidArgument(format!(
                "h must be positive, got {h}"
            )));
        }
        Ok(Self { h })
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

/// Exponents of the window `α log h ≤ Im μ ≤ β log h` and of the seed error `O(h^{−γ})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedWindow {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl SeedWindow {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, SchrodingerError> {
        let ordered = 0.0 < gamma && gamma < 2.0 * alpha && alpha < beta && 2.0 * beta < 1.0;
        if !ordered {
            return Err(SchrodingerError::InvalidArgument(format!(
                "need 0 < gamma < 2 alpha < 2 beta < 1, got alpha={alpha}, beta={beta}, gamma={gamma}"
            )));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Default for SeedWindow {
    /// A narrow window just above `Im μ ≈ log(j/√h)`: wider choices such as
    /// `α = 0.15, β = 0.4` select roots whose eigenvalues all violate
    /// `Re(μ tan μ) > 0` unless `h` is far beyond `10⁴`.
    fn default() -> Self {
        Self {
            alpha: 0.01,
            beta: 0.03,
            gamma: 0.015,
        }
    }
}

/// Which factor of the characteristic equation a root solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `μ + e^{−iπ/4}√h cos μ = 0`.
    Reduced,
    /// `μ − e^{−iπ/4}√h cos μ = 0`.
    Companion,
    /// Found from a grid seed without a family label.
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousEigenpoint {
    /// Seed index; 0 for roots found only from the coarse grid.
    pub j: u32,
    pub family: Family,
    pub mu: Complex64,
    pub k: Complex64,
    pub lambda: Complex64,
    pub residual: f64,
}

/// A distinct root of the characteristic equation with `Re μ < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharRoot {
    pub j: u32,
    pub family: Family,
    pub mu: Complex64,
    pub admissible: bool,
    pub residual: f64,
}

fn rotation() -> Complex64 {
    Complex64::from_polar(1.0, -FRAC_PI_4)
}

/// `μ² + ih cos²μ`.
pub fn char_residual(mu: Complex64, h: f64) -> Complex64 {
    let c = mu.cos();
    mu * mu + Complex64::new(0.0, h) * c * c
}

fn char_scale(mu: Complex64, h: f64) -> f64 {
    mu.norm_sqr().max(h * mu.cos().norm_sqr())
}

/// `|μ² + ih cos²μ| / max(|μ|², h|cos μ|²)`.
pub fn char_relative_residual(mu: Complex64, h: f64) -> f64 {
    char_residual(mu, h).norm() / char_scale(mu, h)
}

pub fn char_evaluation(mu: Complex64, h: f64) -> Evaluation {
    Evaluation {
        value: char_residual(mu, h),
        derivative: 2.0 * mu - Complex64::new(0.0, h) * (2.0 * mu).sin(),
        scale: char_scale(mu, h),
    }
}

/// `μ + e^{−iπ/4}√h cos μ`.
pub fn reduced_residual(mu: Complex64, h: f64) -> Complex64 {
    mu + rotation() * h.sqrt() * mu.cos()
}

/// `μ − e^{−iπ/4}√h cos μ`.
pub fn companion_residual(mu: Complex64, h: f64) -> Complex64 {
    mu - rotation() * h.sqrt() * mu.cos()
}

fn factor_evaluation(mu: Complex64, h: f64, family: Family) -> Evaluation {
    let sign = if family == Family::Companion {
        -1.0
    } else {
        1.0
    };
    let a = sign * rotation() * h.sqrt();
    Evaluation {
        value: mu + a * mu.cos(),
        derivative: 1.0 - a * mu.sin(),
        scale: mu.norm().max(h.sqrt() * mu.cos().norm()),
    }
}

/// `Re(μ tan μ)` up to the positive factor `2|cos μ|²`: `x sin 2x − y sinh 2y`.
pub fn admissibility_margin(mu: Complex64) -> Result<f64, SchrodingerError> {
    let c = mu.cos();
    if c.norm() <= POLE_GUARD {
        return Err(SchrodingerError::PoleProximity { mu });
    }
    let (x, y) = (mu.re, mu.im);
    let closed = x * (2.0 * x).sin() - y * (2.0 * y).sinh();
    let direct = (mu * mu.sin() / c).re;
    let magnitude = (x * (2.0 * x).sin()).abs() + (y * (2.0 * y).sinh()).abs();
    let resolvable = closed.abs() > 1e-10 * magnitude;
    if resolvable && direct.is_finite() && (direct > 0.0) != (closed > 0.0) {
        return Err(SchrodingerError::AdmissibilityDisagreement { mu });
    }
    Ok(closed)
}

/// `Re(μ tan μ) > 0`: the exterior factor `e^{ik|x|}` decays.
pub fn admissible(mu: Complex64) -> Result<bool, SchrodingerError> {
    Ok(admissibility_margin(mu)? > 0.0)
}

/// Leading-order root of the reduced equation:
/// `(π/4)(7 − 8j) + i log(π(8j − 7)/(2√h))`.
pub fn seed_mu(j: u32, h: f64) -> Complex64 {
    let m = 8.0 * f64::from(j) - 7.0;
    Complex64::new(-FRAC_PI_4 * m, (PI * m / (2.0 * h.sqrt())).ln())
}

/// Leading-order root of the companion factor, `π` to the left of [`seed_mu`]:
/// `(π/4)(3 − 8j) + i log(π(8j − 3)/(2√h))`.
pub fn companion_seed_mu(j: u32, h: f64) -> Complex64 {
    let m = 8.0 * f64::from(j) - 3.0;
    Complex64::new(-FRAC_PI_4 * m, (PI * m / (2.0 * h.sqrt())).ln())
}

/// `(⌈h^{α+1/2}⌉, ⌊h^{β+1/2}⌋)`, or `None` when empty.
pub fn window_j_range(h: f64, w: &SeedWindow) -> Option<(u32, u32)> {
    let lo = h.powf(w.alpha + 0.5).ceil().max(1.0);
    let hi = h.powf(w.beta + 0.5).floor();
    if hi < lo || hi > f64::from(u32::MAX) {
        return None;
    }
    Some((lo as u32, hi as u32))
}

fn refine(seed: Complex64, h: f64, family: Family) -> Result<Complex64, NumericError> {
    let f = |mu: Complex64| match family {
        Family::Grid => char_evaluation(mu, h),
        _ => factor_evaluation(mu, h, family),
    };
    match newton_refine(&f, seed, REFINE_TOL, REFINE_MAX_ITER) {
        Ok(mu) => Ok(mu),
        Err(NumericError::NewtonStalled { last, residual }) if residual <= STALL_ACCEPT => Ok(last),
        Err(e) => Err(e),
    }
}

/// Newton refinement of [`seed_mu`] against the reduced equation.
pub fn refine_seed(j: u32, h: f64) -> Result<Complex64, SchrodingerError> {
    Ok(refine(seed_mu(j, h), h, Family::Reduced)?)
}

/// Newton refinement of [`companion_seed_mu`] against the companion factor.
pub fn refine_companion_seed(j: u32, h: f64) -> Result<Complex64, SchrodingerError> {
    Ok(refine(companion_seed_mu(j, h), h, Family::Companion)?)
}

/// `|ik cos μ + μ sin μ|` with `k = iμ tan μ`: the mismatch of the logarithmic
/// derivatives of the interior and exterior pieces at `x = 1`.
pub fn eigenfunction_matching(mu: Complex64) -> Result<f64, SchrodingerError> {
    let c = mu.cos();
    if c.norm() <= POLE_GUARD {
        return Err(SchrodingerError::PoleProximity { mu });
    }
    let k = Complex64::i() * mu * mu.sin() / c;
    Ok((Complex64::i() * k * c + mu * mu.sin()).norm())
}

fn certify(root: &CharRoot, h: f64, tol: f64) -> Result<ContinuousEigenpoint, SchrodingerError> {
    let mu = root.mu;
    if root.residual > tol {
        return Err(SchrodingerError::Uncertified {
            mu,
            residual: root.residual,
        });
    }
    let k = Complex64::i() * mu * mu.sin() / mu.cos();
    let lambda = mu * mu + Complex64::new(0.0, h);
    if (k * k - lambda).norm() > 1e-8 * lambda.norm() || !(k.im > 0.0) {
        return Err(SchrodingerError::Uncertified {
            mu,
            residual: (k * k - lambda).norm() / lambda.norm(),
        });
    }
    if !(lambda.im > 0.0 && lambda.im <= h) {
        return Err(SchrodingerError::StripViolation { lambda });
    }
    Ok(ContinuousEigenpoint {
        j: root.j,
        family: root.family,
        mu,
        k,
        lambda,
        residual: root.residual,
    })
}

fn char_root(j: u32, family: Family, mu: Complex64, h: f64) -> Result<CharRoot, SchrodingerError> {
    if !(mu.re < -1e-8) {
        return Err(SchrodingerError::InvalidArgument(format!(
            "root {mu} is not in the half-plane Re mu < 0"
        )));
    }
    Ok(CharRoot {
        j,
        family,
        mu,
        admissible: admissible(mu)?,
        residual: char_relative_residual(mu, h),
    })
}

/// Removes roots within [`DEDUPE_RADIUS`] of an earlier one.
fn dedupe(roots: Vec<CharRoot>) -> Vec<CharRoot> {
    let mut kept: Vec<CharRoot> = Vec::with_capacity(roots.len());
    for r in roots {
        if kept.iter().all(|k| (k.mu - r.mu).norm() >= DEDUPE_RADIUS) {
            kept.push(r);
        }
    }
    kept
}

fn zero_count(h: f64, region: &Rectangle) -> Result<u64, SchrodingerError> {
    let f = |mu: Complex64| char_evaluation(mu, h);
    let width = region.upper_right().re - region.lower_left().re;
    let samples = ((8.0 * width) as usize).max(64);
    Ok(count_zeros(&f, region, samples)?)
}

/// The window spectrum together with what was needed to certify it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSpectrum {
    pub h: f64,
    pub window: SeedWindow,
    pub j_range: (u32, u32),
    /// Distinct roots inside the counting rectangle, both factors.
    pub roots: Vec<CharRoot>,
    /// Admissible roots of the reduced factor for `j` in the window.
    pub eigenpoints: Vec<ContinuousEigenpoint>,
    pub search_rectangle: Rectangle,
    pub zero_count: u64,
    pub refinement_failures: usize,
}

impl WindowSpectrum {
    pub fn worst_residual(&self) -> f64 {
        self.roots.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Roots of the reduced equation seeded from every `j` of the window, checked
/// by the argument principle on a rectangle that holds exactly those roots and
/// the companion roots between them.
pub fn continuous_spectrum(
    op: &ContinuousBarrier,
    w: &SeedWindow,
    tol: f64,
) -> Result<WindowSpectrum, SchrodingerError> {
    if !(tol > 0.0) {
        return Err(SchrodingerError::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let h = op.h;
    let (j_min, j_max) = window_j_range(h, w).ok_or(SchrodingerError::EmptyWindow { h })?;

    let reduced: Vec<(u32, Result<Complex64, SchrodingerError>)> = (j_min..=j_max)
        .into_par_iter()
        .map(|j| (j, refine_seed(j, h)))
        .collect();
    let companion: Vec<(u32, Result<Complex64, SchrodingerError>)> = (j_min..j_max)
        .into_par_iter()
        .map(|j| (j, refine_companion_seed(j, h)))
        .collect();
    let total = reduced.len() + companion.len();
    let mut failures = 0;
    let mut candidates = Vec::with_capacity(total);
    for (family, list) in [(Family::Reduced, reduced), (Family::Companion, companion)] {
        for (j, r) in list {
            match r {
                Ok(mu) if mu.re < -1e-8 => candidates.push(char_root(j, family, mu, h)?),
                _ => failures += 1,
            }
        }
    }
    if failures as f64 > MAX_FAILURE_RATE * total as f64 {
        return Err(SchrodingerError::RefinementFailures { failures, total });
    }

    // Vertical sides halfway between the extreme reduced roots and their
    // outer companion neighbours; horizontal sides half a unit beyond the
    // root band.
    let outer = |j: u32| {
        candidates
            .iter()
            .find(|r| r.j == j && r.family == Family::Reduced)
            .map(|r| r.mu)
            .unwrap_or_else(|| seed_mu(j, h))
    };
    let left = outer(j_max).re - PI / 2.0;
    let right = (outer(j_min).re + PI / 2.0).min(-1e-3);
    let bottom = candidates
        .iter()
        .map(|r| r.mu.im)
        .fold(f64::INFINITY, f64::min)
        - 0.5;
    let top = candidates
        .iter()
        .map(|r| r.mu.im)
        .fold(f64::NEG_INFINITY, f64::max)
        + 0.5;
    let region = Rectangle::new(Complex64::new(left, bottom), Complex64::new(right, top))?;
    let roots: Vec<CharRoot> = dedupe(candidates)
        .into_iter()
        .filter(|r| region.contains(r.mu))
        .collect();

    let counted = zero_count(h, &region)?;
    if counted != roots.len() as u64 {
        return Err(SchrodingerError::CountMismatch {
            counted,
            found: roots.len(),
        });
    }

    let mut eigenpoints = Vec::new();
    for r in &roots {
        if r.residual > tol {
            return Err(SchrodingerError::Uncertified {
                mu: r.mu,
                residual: r.residual,
            });
        }
        if r.family == Family::Reduced && r.admissible {
            eigenpoints.push(certify(r, h, tol)?);
        }
    }
    eigenpoints.sort_by_key(|e| e.j);

    Ok(WindowSpectrum {
        h,
        window: *w,
        j_range: (j_min, j_max),
        roots,
        eigenpoints,
        search_rectangle: region,
        zero_count: counted,
        refinement_failures: failures,
    })
}

/// All roots in the upper-left quadrant up to the last admissible one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullSpectrum {
    pub h: f64,
    pub roots: Vec<CharRoot>,
    pub eigenpoints: Vec<ContinuousEigenpoint>,
    pub search_rectangle: Rectangle,
    pub zero_count: u64,
}

impl FullSpectrum {
    pub fn worst_residual(&self) -> f64 {
        self.roots.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Consecutive seed indices without an admissible root that end the search.
const TRAILING_INADMISSIBLE: u32 = 3;
/// Hard cap on the seed index for [`full_spectrum`].
pub const MAX_SEED_INDEX: u32 = 1_000_000;

/// Every root of `μ² + ih cos²μ` with `Re μ < 0`, `Im μ > 0` up to the last
/// admissible one, from the seeds of both factors plus a coarse grid of
/// Newton starts on the full equation, checked by the argument principle.
pub fn full_spectrum(op: &ContinuousBarrier, tol: f64) -> Result<FullSpectrum, SchrodingerError> {
    if !(tol > 0.0) {
        return Err(SchrodingerError::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let h = op.h;
    let mut candidates = Vec::new();
    let mut quiet = 0;
    let mut j = 1;
    let mut last_reduced = seed_mu(1, h);
    while quiet < TRAILING_INADMISSIBLE {
        if j > MAX_SEED_INDEX {
            return Err(SchrodingerError::InvalidArgument(format!(
                "no end of the admissible band below j = {MAX_SEED_INDEX}"
            )));
        }
        let a = refine_seed(j, h)?;
        let b = refine_companion_seed(j, h)?;
        let ra = char_root(j, Family::Reduced, a, h)?;
        let rb = char_root(j, Family::Companion, b, h)?;
        quiet = if ra.admissible || rb.admissible {
            0
        } else {
            quiet + 1
        };
        last_reduced = a;
        candidates.push(ra);
        candidates.push(rb);
        j += 1;
    }

    let left = last_reduced.re - PI / 2.0;
    let right = -0.05;
    let top = candidates.iter().map(|r| r.mu.im).fold(0.0, f64::max) + 0.5;
    let region = Rectangle::new(Complex64::new(left, 0.0), Complex64::new(right, top))?;

    let grid: Vec<Complex64> = {
        let columns = ((right - left) / (PI / 4.0)).ceil() as usize;
        let rows = 4;
        (0..columns)
            .flat_map(|c| {
                (0..rows).map(move |r| {
                    Complex64::new(
                        left + (c as f64 + 0.5) * (right - left) / columns as f64,
                        (r as f64 + 0.5) * top / rows as f64,
                    )
                })
            })
            .collect()
    };
    let from_grid: Vec<Complex64> = grid
        .into_par_iter()
        .filter_map(|s| refine(s, h, Family::Grid).ok())
        .collect();
    for mu in from_grid {
        if region.contains(mu)
            && candidates
                .iter()
                .all(|r| (r.mu - mu).norm() >= DEDUPE_RADIUS)
        {
            candidates.push(char_root(0, Family::Grid, mu, h)?);
        }
    }
    let roots: Vec<CharRoot> = dedupe(candidates)
        .into_iter()
        .filter(|r| region.contains(r.mu))
        .collect();

    let counted = zero_count(h, &region)?;
    if counted != roots.len() as u64 {
        return Err(SchrodingerError::CountMismatch {
            counted,
            found: roots.len(),
        });
    }
    let mut eigenpoints = Vec::new();
    for r in roots.iter().filter(|r| r.admissible) {
        eigenpoints.push(certify(r, h, tol)?);
    }
    eigenpoints.sort_by(|a, b| b.mu.re.total_cmp(&a.mu.re));

    Ok(FullSpectrum {
        h,
        roots,
        eigenpoints,
        search_rectangle: region,
        zero_count: counted,
    })
}

/// `‖Ṽ_h‖_p^p = 2h^{1−p}` for the rescaled potential `Ṽ_h = (i/h) χ_[−h,h]`.
pub fn tilde_norm_pp(h: f64, p: f64) -> f64 {
    2.0 * h.powf(1.0 - p)
}

/// Both sides of the identity relating sums over `H_h` to sums over the
/// rescaled operator `H̃_h` with spectrum `λ/h²`:
///
/// `lhs = (1/‖Ṽ_h‖_p^p) Σ dist(λ/h², [0,∞))^p / |λ/h²|^σ`,
/// `rhs = ½ h^{2σ−p−1} Σ (Im λ)^p / |λ|^σ`.
pub fn rescale_to_tilde(
    op: &ContinuousBarrier,
    spectrum: &[Complex64],
    p: f64,
    sigma: f64,
) -> Result<(f64, f64), SchrodingerError> {
    if !(p >= 1.0 && sigma >= 0.5) {
        return Err(SchrodingerError::InvalidArgument(format!(
            "need p >= 1 and sigma >= 1/2, got p={p}, sigma={sigma}"
        )));
    }
    if spectrum.iter().any(|l| l.norm() == 0.0) {
        return Err(SchrodingerError::SingularWeight);
    }
    let h = op.h;
    let h2 = h * h;
    let tilde: f64 = spectrum
        .iter()
        .map(|&l| {
            let t = l / h2;
            dist_to_halfline(t).powf(p) / t.norm().powf(sigma)
        })
        .fold(0.0, |acc, t| acc + t);
    let lhs = tilde / tilde_norm_pp(h, p);
    let raw: f64 = spectrum
        .iter()
        .map(|l| l.im.powf(p) / l.norm().powf(sigma))
        .fold(0.0, |acc, t| acc + t);
    let rhs = 0.5 * h.powf(2.0 * sigma - p - 1.0) * raw;
    Ok((lhs, rhs))
}

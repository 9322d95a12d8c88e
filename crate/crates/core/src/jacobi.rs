//! The lattice operator `T = J_0 + β P_n` with `β = ih`: a constant imaginary
//! potential on the sites `1..=n` of the free discrete Laplacian on `ℓ²(Z)`.
//!
//! Eigenvalues are computed from the two degree-`2n` characteristic
//! polynomials in the auxiliary variable `z` (one per sign branch), filtered
//! by `|z| < 1`, `Im z > 0` and `|k(z)| < 1`, and then certified against the
//! Birman–Schwinger determinant evaluated in the spectral variable `k`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{
    chebyshev_u_tail, newton_refine, powu, solve_polynomial_with, Evaluation, NumericError,
    RootSet, SolveOptions, SparsePolynomial,
};

/// Largest support handled by the dense determinant.
pub const DENSE_DET_MAX_N: u32 = 2000;
/// Up to this support length the spectrum pipeline certifies with the dense
/// determinant; above it the Chebyshev closed form is used.
pub const DENSE_ORACLE_MAX_N: u32 = 128;
/// Normalized determinant residual above which a root is not an eigenvalue.
pub const ORACLE_GATE: f64 = 1e-6;
/// `||k| − 1|` below this is not classified.
pub const ADMISSIBILITY_MARGIN: f64 = 1e-10;
/// Roots with `|z| >= 1 − DISK_MARGIN` are treated as lying on or outside the circle.
pub const DISK_MARGIN: f64 = 1e-8;

const LIMIT_RADIUS: f64 = 1e-8;
/// Largest change of `k` accepted from the Newton polish.
const POLISH_RADIUS: f64 = 1e-3;
const SINGULAR_DENOMINATOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JacobiError {
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("k(z) is singular at z = {z}")]
    Singular { z: Complex64 },
    #[error("dense determinant limited to n <= {DENSE_DET_MAX_N}, got {n}")]
    SizeLimit { n: u32 },
    #[error("root finder failed on the {branch} branch: {source}")]
    RootFinder {
        branch: Branch,
        #[source]
        source: NumericError,
    },
    #[error("{} root(s) failed the determinant oracle: {}", offenders.len(), describe(offenders))]
    OracleDisagreement { offenders: Vec<OracleOffender> },
    #[error("eigenvalue {lambda} violates the enclosure -2<=Re<=2, 0<Im<=h")]
    EnclosureViolation { lambda: Complex64 },
}

fn describe(offenders: &[OracleOffender]) -> String {
    offenders
        .iter()
        .map(|o| format!("z={} ({}) residual={:e}", o.z, o.branch, o.residual))
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOffender {
    pub z: Complex64,
    pub branch: Branch,
    pub residual: f64,
}

/// `T_{ih,n}`: barrier of length `n` and height `ih`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteBarrier {
    n: u32,
    h: f64,
}

impl DiscreteBarrier {
    pub fn new(n: u32, h: f64) -> Result<Self, JacobiError> {
        if n < 2 {
            return Err(JacobiError::InvalidOperator(format!(
                "n must be >= 2, got {n}"
            )));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(JacobiError::InvalidOperator(format!(
                "h must be positive, got {h}"
            )));
        }
        Ok(Self { n, h })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn beta(&self) -> Complex64 {
        Complex64::new(0.0, self.h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `k = (z^{n+1} − 1)/(z^n − z)`.
    Minus,
    /// `k = (z^{n+1} + 1)/(z^n + z)`.
    Plus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Minus, Branch::Plus];

    /// The sign `s` with `k = (z^{n+1} + s)/(z^n + s z)`.
    pub fn sign(self) -> f64 {
        match self {
            Branch::Minus => -1.0,
            Branch::Plus => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Minus => "minus",
            Branch::Plus => "plus",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Branch {
    type Err = JacobiError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "minus" => Ok(Branch::Minus),
            "plus" => Ok(Branch::Plus),
            other => Err(JacobiError::InvalidArgument(format!(
                "unknown branch {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteEigenpoint {
    pub z: Complex64,
    pub k: Complex64,
    pub lambda: Complex64,
    pub branch: Branch,
    pub bs_residual: f64,
}

/// Characteristic polynomial in `z` for an arbitrary coupling `β`:
///
/// `β(z^{n+1} + s)(z^{n−1} + s) + s z^{n−2}(z² − 1)²`, `s = ∓1`.
pub fn char_poly_for_coupling(n: u32, beta: Complex64, branch: Branch) -> SparsePolynomial {
    assert!(n >= 2, "characteristic polynomial needs n >= 2");
    let s = branch.sign();
    let one = Complex64::new(1.0, 0.0);
    SparsePolynomial::new([
        (2 * n, beta),
        (n + 2, s * one),
        (n + 1, s * beta),
        (n, -2.0 * s * one),
        (n - 1, s * beta),
        (n - 2, s * one),
        (0, beta),
    ])
    .expect("leading coefficient beta is nonzero")
}

pub fn char_poly(op: &DiscreteBarrier, branch: Branch) -> SparsePolynomial {
    char_poly_for_coupling(op.n, op.beta(), branch)
}

/// The spectral variable `k` belonging to a root `z` of the branch polynomial.
///
/// At `z = ±1`, where numerator and denominator vanish together, the
/// L'Hôpital limit `(n+1) t^n / (n t^{n−1} + s)` is returned.
pub fn k_from_z(z: Complex64, n: u32, branch: Branch) -> Result<Complex64, JacobiError> {
    let s = branch.sign();
    for t in [1.0f64, -1.0] {
        let numerator_at_t = t.powi(n as i32 + 1) + s;
        if (z - t).norm() <= LIMIT_RADIUS && numerator_at_t == 0.0 {
            let num = f64::from(n + 1) * t.powi(n as i32);
            let den = f64::from(n) * t.powi(n as i32 - 1) + s;
            return Ok(Complex64::new(num / den, 0.0));
        }
    }
    let zn = powu(z, n);
    let numerator = zn * z + s;
    let denominator = zn + s * z;
    if denominator.norm() <= SINGULAR_DENOMINATOR {
        return Err(JacobiError::Singular { z });
    }
    Ok(numerator / denominator)
}

fn check_k(k: Complex64) -> Result<(), JacobiError> {
    if !(k.norm() > 0.0 && k.norm() < 1.0) {
        return Err(JacobiError::InvalidArgument(format!(
            "need 0 < |k| < 1, got |k| = {}",
            k.norm()
        )));
    }
    if (k * k - 1.0).norm() <= SINGULAR_DENOMINATOR {
        return Err(JacobiError::InvalidArgument(format!(
            "k = {k} too close to ±1"
        )));
    }
    Ok(())
}

/// Dense `n×n` matrix `I + (kβ/(k²−1)) Q_n(k)`, `Q_n(k)_{ij} = k^{|i−j|}`.
fn birman_schwinger_matrix(n: u32, beta: Complex64, k: Complex64) -> nalgebra::DMatrix<Complex64> {
    let n = n as usize;
    let coupling = k * beta / (k * k - 1.0);
    let mut powers = Vec::with_capacity(n);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        powers.push(p);
        p *= k;
    }
    nalgebra::DMatrix::from_fn(n, n, |i, j| {
        let entry = coupling * powers[i.abs_diff(j)];
        if i == j {
            entry + 1.0
        } else {
            entry
        }
    })
}

/// Log-modulus of the determinant and of its Hadamard bound `Π ‖row_i‖₂`.
struct DenseDeterminant {
    value: Complex64,
    log_modulus: f64,
    log_hadamard: f64,
}

fn dense_determinant(
    n: u32,
    beta: Complex64,
    k: Complex64,
) -> Result<DenseDeterminant, JacobiError> {
    if n > DENSE_DET_MAX_N {
        return Err(JacobiError::SizeLimit { n });
    }
    check_k(k)?;
    let m = birman_schwinger_matrix(n, beta, k);
    let log_hadamard: f64 = m.row_iter().map(|row| row.norm().ln()).sum();
    let lu = m.lu();
    let diagonal = lu.u().diagonal();
    let value = lu.determinant();
    let log_modulus = diagonal.iter().map(|d| d.norm().ln()).sum();
    Ok(DenseDeterminant {
        value,
        log_modulus,
        log_hadamard,
    })
}

/// `det(I + βP_n(J_0 − λ)^{-1}P_n)` at `λ = k + 1/k`, via LU with partial pivoting.
pub fn birman_schwinger_det(op: &DiscreteBarrier, k: Complex64) -> Result<Complex64, JacobiError> {
    birman_schwinger_det_for(op.n, op.beta(), k)
}

pub fn birman_schwinger_det_for(
    n: u32,
    beta: Complex64,
    k: Complex64,
) -> Result<Complex64, JacobiError> {
    Ok(dense_determinant(n, beta, k)?.value)
}

/// `|det M| / Π ‖row_i(M)‖₂ ∈ [0, 1]`; vanishes exactly when `M` is singular.
pub fn birman_schwinger_residual(
    n: u32,
    beta: Complex64,
    k: Complex64,
) -> Result<f64, JacobiError> {
    let d = dense_determinant(n, beta, k)?;
    Ok((d.log_modulus - d.log_hadamard).exp())
}

/// The determinant through Chebyshev polynomials of the second kind:
/// `(kⁿ/(1−k²)) [U_n(ξ) − 2kU_{n−1}(ξ) + k²U_{n−2}(ξ)]`, `ξ = (k + 1/k − β)/2`.
pub fn chebyshev_det_form(op: &DiscreteBarrier, k: Complex64) -> Result<Complex64, JacobiError> {
    chebyshev_det_form_for(op.n, op.beta(), k)
}

pub fn chebyshev_det_form_for(
    n: u32,
    beta: Complex64,
    k: Complex64,
) -> Result<Complex64, JacobiError> {
    Ok(chebyshev_terms(n, beta, k)?.0)
}

/// Value of the closed form divided by the sum of its term magnitudes.
pub fn chebyshev_residual(n: u32, beta: Complex64, k: Complex64) -> Result<f64, JacobiError> {
    let (value, magnitude) = chebyshev_terms(n, beta, k)?;
    Ok(if magnitude > 0.0 {
        value.norm() / magnitude
    } else {
        0.0
    })
}

fn chebyshev_terms(n: u32, beta: Complex64, k: Complex64) -> Result<(Complex64, f64), JacobiError> {
    if n < 2 {
        return Err(JacobiError::InvalidArgument(
            "closed form needs n >= 2".into(),
        ));
    }
    check_k(k)?;
    let xi = (k + k.inv() - beta) / 2.0;
    let [u2, u1, u0] = chebyshev_u_tail(n, xi);
    let prefactor = powu(k, n) / (1.0 - k * k);
    let bracket = u0 - 2.0 * k * u1 + k * k * u2;
    let magnitude =
        prefactor.norm() * (u0.norm() + 2.0 * k.norm() * u1.norm() + k.norm_sqr() * u2.norm());
    Ok((prefactor * bracket, magnitude))
}

/// `G(k) = U_n(ξ) − 2kU_{n−1}(ξ) + k²U_{n−2}(ξ)` and `G'(k)`, `ξ = (k + 1/k − β)/2`.
fn chebyshev_bracket(n: u32, beta: Complex64, k: Complex64) -> Evaluation {
    let xi = (k + k.inv() - beta) / 2.0;
    let dxi = (1.0 - (k * k).inv()) / 2.0;
    let zero = Complex64::new(0.0, 0.0);
    // (U_{m−2}, U_{m−1}, U_m) and their ξ-derivatives, from m = 0; n >= 2
    // makes the initial U_{−2} irrelevant.
    let (mut u_prev2, mut u_prev, mut u) = (zero, zero, Complex64::new(1.0, 0.0));
    let (mut d_prev2, mut d_prev, mut d) = (zero, zero, zero);
    for _ in 0..n {
        let next = 2.0 * xi * u - u_prev;
        let d_next = 2.0 * u + 2.0 * xi * d - d_prev;
        u_prev2 = u_prev;
        u_prev = u;
        u = next;
        d_prev2 = d_prev;
        d_prev = d;
        d = d_next;
    }
    let value = u - 2.0 * k * u_prev + k * k * u_prev2;
    let derivative =
        (d - 2.0 * k * d_prev + k * k * d_prev2) * dxi - 2.0 * u_prev + 2.0 * k * u_prev2;
    let scale = u.norm() + 2.0 * k.norm() * u_prev.norm() + k.norm_sqr() * u_prev2.norm();
    Evaluation {
        value,
        derivative,
        scale,
    }
}

/// Newton polish of `k` on the closed-form determinant. Roots of the branch
/// polynomials near `z = ±1` come in close pairs that binary64 only separates
/// to a few digits, and the quotient defining `k` amplifies that error.
fn polish_k(op: &DiscreteBarrier, k: Complex64) -> Option<Complex64> {
    let f = |k: Complex64| chebyshev_bracket(op.n, op.beta(), k);
    let polished = match newton_refine(&f, k, 1e-15, 60) {
        Ok(k) => k,
        // Below the rounding floor of the recurrence the last iterate is as
        // good as it gets.
        Err(NumericError::NewtonStalled { last, .. }) => last,
        Err(_) => return None,
    };
    let moved = (polished - k).norm() <= POLISH_RADIUS;
    (moved && polished.norm() < 1.0 - ADMISSIBILITY_MARGIN).then_some(polished)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Admissibility {
    Admissible,
    Inadmissible,
    /// `|k|` within [`ADMISSIBILITY_MARGIN`] of 1.
    Indeterminate,
}

pub fn classify_k(k: Complex64) -> Admissibility {
    let m = k.norm();
    if m < 1.0 - ADMISSIBILITY_MARGIN {
        Admissibility::Admissible
    } else if m > 1.0 + ADMISSIBILITY_MARGIN {
        Admissibility::Inadmissible
    } else {
        Admissibility::Indeterminate
    }
}

/// The admissibility inequality written directly in `z`:
/// `|z^{n+1} + s| < |z^n + s z|`.
pub fn satisfies_constraint(z: Complex64, n: u32, branch: Branch) -> bool {
    let s = branch.sign();
    let zn = powu(z, n);
    (zn * z + s).norm() < (zn + s * z).norm()
}

/// A root of a branch polynomial in the open upper half disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperDiskRoot {
    pub z: Complex64,
    pub multiplicity: u32,
    pub branch: Branch,
    pub k: Complex64,
    pub admissibility: Admissibility,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Dense,
    Chebyshev,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRoots {
    pub branch: Branch,
    pub roots: RootSet,
}

/// Everything computed on the way to the spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteAnalysis {
    pub operator: DiscreteBarrier,
    pub branches: Vec<BranchRoots>,
    pub upper_disk_roots: Vec<UpperDiskRoot>,
    pub eigenpoints: Vec<DiscreteEigenpoint>,
    pub oracle: OracleKind,
}

impl DiscreteAnalysis {
    /// Total multiplicity of roots in the open unit disk over both branches.
    pub fn disk_multiplicity(&self) -> u32 {
        self.branches
            .iter()
            .flat_map(|b| b.roots.roots.iter())
            .filter(|r| r.value.norm() < 1.0 - DISK_MARGIN)
            .map(|r| r.multiplicity)
            .sum()
    }

    pub fn indeterminate(&self) -> impl Iterator<Item = &UpperDiskRoot> {
        self.upper_disk_roots
            .iter()
            .filter(|r| r.admissibility == Admissibility::Indeterminate)
    }

    pub fn worst_backward_error(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| b.roots.certified_backward_error)
            .fold(0.0, f64::max)
    }

    pub fn worst_bs_residual(&self) -> f64 {
        self.eigenpoints
            .iter()
            .map(|e| e.bs_residual)
            .fold(0.0, f64::max)
    }
}

/// Guesses start on the circle where the relevant roots accumulate.
fn initial_radius(n: u32) -> f64 {
    let n = f64::from(n);
    1.0 - (2.0 / 3.0) * n.ln() / n
}

pub fn branch_roots(
    op: &DiscreteBarrier,
    branch: Branch,
    tol: f64,
) -> Result<RootSet, JacobiError> {
    let options = SolveOptions {
        initial_radius: Some(initial_radius(op.n)),
        ..SolveOptions::default()
    };
    solve_polynomial_with(&char_poly(op, branch), tol, &options)
        .map_err(|source| JacobiError::RootFinder { branch, source })
}

pub fn oracle_for(n: u32) -> OracleKind {
    if n <= DENSE_ORACLE_MAX_N {
        OracleKind::Dense
    } else {
        OracleKind::Chebyshev
    }
}

/// Normalized Birman–Schwinger residual at `k` with the chosen evaluation route.
pub fn oracle_residual(
    op: &DiscreteBarrier,
    k: Complex64,
    oracle: OracleKind,
) -> Result<f64, JacobiError> {
    match oracle {
        OracleKind::Dense => birman_schwinger_residual(op.n, op.beta(), k),
        OracleKind::Chebyshev => chebyshev_residual(op.n, op.beta(), k),
    }
}

pub fn analyze_discrete(op: &DiscreteBarrier, tol: f64) -> Result<DiscreteAnalysis, JacobiError> {
    analyze_discrete_with(op, tol, oracle_for(op.n))
}

pub fn analyze_discrete_with(
    op: &DiscreteBarrier,
    tol: f64,
    oracle: OracleKind,
) -> Result<DiscreteAnalysis, JacobiError> {
    if !(tol > 0.0) {
        return Err(JacobiError::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let (minus, plus) = rayon::join(
        || branch_roots(op, Branch::Minus, tol),
        || branch_roots(op, Branch::Plus, tol),
    );
    let branches = vec![
        BranchRoots {
            branch: Branch::Minus,
            roots: minus?,
        },
        BranchRoots {
            branch: Branch::Plus,
            roots: plus?,
        },
    ];

    let mut upper_disk_roots = Vec::new();
    for b in &branches {
        for r in &b.roots.roots {
            // Circle roots (the double roots at ±1) never reach this point.
            if r.value.norm() >= 1.0 - DISK_MARGIN || r.value.im <= 0.0 {
                continue;
            }
            let k = k_from_z(r.value, op.n, b.branch)?;
            upper_disk_roots.push(UpperDiskRoot {
                z: r.value,
                multiplicity: r.multiplicity,
                branch: b.branch,
                k,
                admissibility: classify_k(k),
            });
        }
    }

    let certified: Vec<Result<DiscreteEigenpoint, OracleOffender>> = upper_disk_roots
        .par_iter()
        .filter(|r| r.admissibility == Admissibility::Admissible)
        .map(|r| {
            let mut k = r.k;
            let mut lambda = op.beta() + r.z + r.z.inv();
            let mut residual = oracle_residual(op, k, oracle).unwrap_or(f64::INFINITY);
            if !(residual <= ORACLE_GATE) {
                if let Some(polished) = polish_k(op, k) {
                    let polished_residual =
                        oracle_residual(op, polished, oracle).unwrap_or(f64::INFINITY);
                    if polished_residual < residual {
                        k = polished;
                        lambda = k + k.inv();
                        residual = polished_residual;
                    }
                }
            }
            if !(residual <= ORACLE_GATE) {
                return Err(OracleOffender {
                    z: r.z,
                    branch: r.branch,
                    residual,
                });
            }
            Ok(DiscreteEigenpoint {
                z: r.z,
                k,
                lambda,
                branch: r.branch,
                bs_residual: residual,
            })
        })
        .collect();

    let mut eigenpoints = Vec::new();
    let mut offenders = Vec::new();
    for c in certified {
        match c {
            Ok(e) => eigenpoints.push(e),
            Err(o) => offenders.push(o),
        }
    }
    if !offenders.is_empty() {
        return Err(JacobiError::OracleDisagreement { offenders });
    }
    let slack = 1e-12;
    for e in &eigenpoints {
        let l = e.lambda;
        if l.re.abs() > 2.0 + slack || l.im <= 0.0 || l.im > op.h + slack {
            return Err(JacobiError::EnclosureViolation { lambda: l });
        }
    }
    eigenpoints.sort_by(|a, b| {
        a.lambda
            .re
            .total_cmp(&b.lambda.re)
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });

    Ok(DiscreteAnalysis {
        operator: *op,
        branches,
        upper_disk_roots,
        eigenpoints,
        oracle,
    })
}

/// Certified discrete spectrum, sorted by real part then imaginary part.
pub fn discrete_spectrum(
    op: &DiscreteBarrier,
    tol: f64,
) -> Result<Vec<DiscreteEigenpoint>, JacobiError> {
    Ok(analyze_discrete(op, tol)?.eigenpoints)
}

/// Default backward-error tolerance for the branch polynomials: the floor of
/// binary64 evaluation grows with the degree `2n`.
pub fn default_tolerance(n: u32) -> f64 {
    (1e-13 * f64::from(n)).max(1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn operator_validation() {
        assert!(DiscreteBarrier::new(1, 1.0).is_err());
        assert!(DiscreteBarrier::new(3, 0.0).is_err());
        assert!(DiscreteBarrier::new(3, f64::NAN).is_err());
        assert_eq!(DiscreteBarrier::new(3, 0.5).unwrap().beta(), c(0.0, 0.5));
    }

    #[test]
    fn n_two_minus_branch_coefficients() {
        let op = DiscreteBarrier::new(2, 1.0).unwrap();
        let p = char_poly(&op, Branch::Minus);
        let dense = p.to_dense();
        let expected = [
            c(-1.0, 1.0),
            c(0.0, -1.0),
            c(2.0, 0.0),
            c(0.0, -1.0),
            c(-1.0, 1.0),
        ];
        assert_eq!(dense, expected);
    }

    #[test]
    fn n_two_minus_branch_vanishes_at_one() {
        let op = DiscreteBarrier::new(2, 1.0).unwrap();
        let (v, _) = char_poly(&op, Branch::Minus).evaluate(c(1.0, 0.0));
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn seven_terms_and_degree_two_n() {
        let op = DiscreteBarrier::new(3, 0.7).unwrap();
        let p = char_poly(&op, Branch::Minus);
        let degrees: Vec<u32> = p.terms().iter().map(|t| t.0).collect();
        assert_eq!(degrees, vec![0, 1, 2, 3, 4, 5, 6]);
        for n in [2, 5, 40, 1600] {
            let op = DiscreteBarrier::new(n, 0.1).unwrap();
            for b in Branch::BOTH {
                assert_eq!(char_poly(&op, b).degree(), 2 * n);
            }
        }
    }

    #[test]
    fn k_at_one_half() {
        let k = k_from_z(c(0.5, 0.0), 2, Branch::Minus).unwrap();
        assert!((k - c(3.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn k_limits_on_circle() {
        for n in 3..20u32 {
            let expected = f64::from(n + 1) / f64::from(n - 1);
            let k = k_from_z(c(1.0, 0.0), n, Branch::Minus).unwrap();
            assert!((k.norm() - expected).abs() < 1e-12);
            let t = if n % 2 == 1 {
                Branch::Minus
            } else {
                Branch::Plus
            };
            let k = k_from_z(c(-1.0, 0.0), n, t).unwrap();
            assert!((k.norm() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_k_away_from_circle() {
        // z^n − z vanishes at z = 0.
        assert!(matches!(
            k_from_z(c(0.0, 0.0), 4, Branch::Minus),
            Err(JacobiError::Singular { .. })
        ));
    }

    #[test]
    fn zero_coupling_determinant_is_one() {
        let k = c(0.3, 0.4);
        let d = birman_schwinger_det_for(7, c(0.0, 0.0), k).unwrap();
        assert!((d - 1.0).norm() < 1e-14);
        let ch = chebyshev_det_form_for(2, c(0.0, 0.0), k).unwrap();
        assert!((ch - 1.0).norm() < 1e-14);
    }

    #[test]
    fn determinant_preconditions() {
        let beta = c(0.0, 1.0);
        assert!(matches!(
            birman_schwinger_det_for(2001, beta, c(0.5, 0.0)),
            Err(JacobiError::SizeLimit { n: 2001 })
        ));
        assert!(birman_schwinger_det_for(5, beta, c(1.2, 0.0)).is_err());
        assert!(birman_schwinger_det_for(5, beta, c(0.0, 0.0)).is_err());
        assert!(chebyshev_det_form_for(5, beta, c(0.0, 1.0)).is_err());
    }

    #[test]
    fn classification_respects_margin() {
        assert_eq!(classify_k(c(0.5, 0.0)), Admissibility::Admissible);
        assert_eq!(classify_k(c(1.5, 0.0)), Admissibility::Inadmissible);
        assert_eq!(
            classify_k(c(1.0 + 1e-12, 0.0)),
            Admissibility::Indeterminate
        );
    }

    #[test]
    fn small_spectrum_is_enclosed() {
        let op = DiscreteBarrier::new(10, 1.0).unwrap();
        let spec = discrete_spectrum(&op, 1e-12).unwrap();
        assert!(!spec.is_empty());
        for e in &spec {
            assert!(e.lambda.re.abs() <= 2.0 && e.lambda.im > 0.0 && e.lambda.im <= 1.0);
            assert!(e.z.norm() < 1.0 && e.z.im > 0.0 && e.k.norm() < 1.0);
            assert!((e.k + e.k.inv() - e.lambda).norm() < 1e-8);
            assert!(e.bs_residual <= ORACLE_GATE);
        }
        for w in spec.windows(2) {
            assert!(w[0].lambda.re <= w[1].lambda.re);
        }
    }

    #[test]
    fn branch_parsing() {
        assert_eq!("minus".parse::<Branch>().unwrap(), Branch::Minus);
        assert!("both".parse::<Branch>().is_err());
    }
}

//! Simultaneous (Aberth–Ehrlich) root extraction for sparse polynomials.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::polynomial::SparsePolynomial;
use super::NumericError;

/// Above this many roots the correction sweep runs on the rayon pool.
const PARALLEL_THRESHOLD: usize = 256;
/// Sweeps between checks for approximations stuck far from any root.
const RESEED_PERIOD: usize = 40;
const RESEED_BACKWARD_ERROR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// Largest `|p(r)| / Σ|c_d||r|^d` over the returned roots.
    pub certified_backward_error: f64,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> u32 {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Roots repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity as usize))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Radius of the circle carrying the initial guesses. `None` uses the
    /// geometric mean of the root moduli, `|c_0 / c_N|^{1/N}`.
    pub initial_radius: Option<f64>,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            initial_radius: None,
            max_iterations: 600,
        }
    }
}

/// Distance below which approximations are merged into one multiple root.
///
/// A root of multiplicity `m` found to backward error `tol` is only located to
/// about `tol^{1/m}`, so double roots need the square-root radius.
pub fn cluster_radius(tol: f64) -> f64 {
    10.0 * tol.sqrt()
}

pub fn solve_polynomial(p: &SparsePolynomial, tol: f64) -> Result<RootSet, NumericError> {
    solve_polynomial_with(p, tol, &SolveOptions::default())
}

pub fn solve_polynomial_with(
    p: &SparsePolynomial,
    tol: f64,
    options: &SolveOptions,
) -> Result<RootSet, NumericError> {
    if !(tol > 0.0) {
        return Err(NumericError::InvalidArgument(format!(
            "root tolerance must be positive, got {tol}"
        )));
    }
    if p.degree() == 0 {
        return Err(NumericError::InvalidArgument(
            "polynomial degree must be at least 1".into(),
        ));
    }

    let zero_multiplicity = p.low_degree();
    let reduced = p.shifted_down(zero_multiplicity);
    let mut approximations = match reduced.degree() {
        0 => Vec::new(),
        1 => {
            let c0 = reduced.coefficient(0);
            let c1 = reduced.coefficient(1);
            vec![-c0 / c1]
        }
        _ => aberth(&reduced, tol, options)?,
    };

    let mut roots = cluster(&mut approximations, cluster_radius(tol), |z| {
        reduced.eval_full(z).backward_error() <= tol
    });
    if zero_multiplicity > 0 {
        roots.push(Root {
            value: Complex64::new(0.0, 0.0),
            multiplicity: zero_multiplicity,
        });
    }

    let mut worst = 0.0f64;
    for r in &roots {
        worst = worst.max(p.eval_full(r.value).backward_error());
    }
    if worst > tol {
        return Err(NumericError::NoConvergence {
            worst_residual: worst,
        });
    }
    debug_assert_eq!(
        roots.iter().map(|r| r.multiplicity).sum::<u32>(),
        p.degree()
    );
    Ok(RootSet {
        roots,
        certified_backward_error: worst,
    })
}

/// Newton quotient `p/p'` and backward error, evaluated through the reversed
/// polynomial outside the unit disk so that `|z|^N` never overflows.
fn newton_quotient(
    p: &SparsePolynomial,
    reversed: &SparsePolynomial,
    z: Complex64,
) -> (Complex64, f64) {
    if z.norm() <= 1.0 {
        let e = p.eval_full(z);
        (e.value / e.derivative, e.backward_error())
    } else {
        let w = z.inv();
        let e = reversed.eval_full(w);
        let n = f64::from(p.degree());
        // p'/p = w (N − w q'(w)/q(w)) for p(z) = z^N q(1/z)
        let log_derivative = w * (n - w * e.derivative / e.value);
        (log_derivative.inv(), e.backward_error())
    }
}

fn aberth(
    p: &SparsePolynomial,
    tol: f64,
    options: &SolveOptions,
) -> Result<Vec<Complex64>, NumericError> {
    let degree = p.degree() as usize;
    let reversed = p.reversed();
    let radius = options.initial_radius.unwrap_or_else(|| {
        let c0 = p.coefficient(0).norm();
        let cn = p.coefficient(p.degree()).norm();
        (c0 / cn).powf(1.0 / degree as f64)
    });
    // Offset keeps the starting configuration off any symmetry axis of the
    // polynomial, where Aberth iterations can stall.
    let offset = 0.4 / degree as f64 + 0.07;
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / degree as f64 + offset))
        .collect();
    let mut done = vec![false; degree];
    let mut last_step = vec![f64::INFINITY; degree];
    let mut last_berr = vec![f64::INFINITY; degree];
    let stop = tol * 1e-2;

    for iteration in 0..options.max_iterations {
        if iteration % RESEED_PERIOD == RESEED_PERIOD - 1 {
            for i in 0..degree {
                if !done[i] && last_berr[i] > RESEED_BACKWARD_ERROR {
                    z[i] = reseed(p, &z, i, radius);
                }
            }
        }
        let step = |i: usize| -> (Complex64, bool, f64, f64) {
            if done[i] {
                return (z[i], true, 0.0, 0.0);
            }
            let zi = z[i];
            let (ratio, berr) = newton_quotient(p, &reversed, zi);
            // Within tolerance and already moving by less than 1e-8 relative:
            // the cubic rate leaves nothing but rounding noise to chase.
            if berr <= stop || (berr <= 0.1 * tol && last_step[i] <= 1e-8 * zi.norm()) {
                return (zi, true, 0.0, berr);
            }
            if !ratio.is_finite() {
                // Stationary point of p: nudge and retry next sweep.
                return (
                    zi * Complex64::new(1.0, 1e-7) + 1e-10,
                    false,
                    f64::INFINITY,
                    berr,
                );
            }
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    let d = zi - zj;
                    if d != Complex64::new(0.0, 0.0) {
                        repulsion += d.inv();
                    }
                }
            }
            let correction = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            let next = zi - correction;
            let settled = correction.norm() <= 4.0 * f64::EPSILON * zi.norm();
            (next, settled, correction.norm(), berr)
        };
        let updates: Vec<(Complex64, bool, f64, f64)> = if degree >= PARALLEL_THRESHOLD {
            (0..degree).into_par_iter().map(step).collect()
        } else {
            (0..degree).map(step).collect()
        };
        for (i, (next, settled, moved, berr)) in updates.into_iter().enumerate() {
            z[i] = next;
            done[i] = settled;
            last_step[i] = moved;
            last_berr[i] = berr;
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }

    let worst = z
        .iter()
        .map(|&zi| newton_quotient(p, &reversed, zi).1)
        .fold(0.0, f64::max);
    if worst <= tol {
        Ok(z)
    } else {
        Err(NumericError::NoConvergence {
            worst_residual: worst,
        })
    }
}

/// Moves a trapped approximation to the point of the starting circle where
/// the deflated function `p(c) / Π_{j≠i}(c − z_j)` is smallest.
///
/// An approximation that ends up well inside a ring of others sees an almost
/// constant deflated function and creeps; the missing root is then found in a
/// gap of the ring.
fn reseed(p: &SparsePolynomial, z: &[Complex64], i: usize, radius: f64) -> Complex64 {
    let candidates = 4 * z.len();
    let objective = |c: Complex64| -> f64 {
        let e = p.eval_full(c);
        let mut log_value = e.value.norm().ln();
        for (j, &zj) in z.iter().enumerate() {
            if j != i {
                log_value -= (c - zj).norm().ln();
            }
        }
        log_value
    };
    (0..candidates)
        .into_par_iter()
        .map(|k| {
            let c = Complex64::from_polar(radius, 2.0 * PI * (k as f64 + 0.5) / candidates as f64);
            (objective(c), c)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c)
        .unwrap_or(z[i])
}

/// Single-linkage grouping of approximations closer than `radius`.
///
/// A group whose mean fails `accept` is a pair of close simple roots rather
/// than a multiple root, and its members are kept apart.
fn cluster(points: &mut [Complex64], radius: f64, accept: impl Fn(Complex64) -> bool) -> Vec<Root> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    // Sort by real part so only a narrow band of neighbours is compared.
    points.sort_by(|a, b| a.re.total_cmp(&b.re));
    for i in 0..n {
        for j in i + 1..n {
            if points[j].re - points[i].re > radius {
                break;
            }
            if (points[j] - points[i]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Complex64>> = Default::default();
    for (i, &z) in points.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(z);
    }
    let mut roots = Vec::with_capacity(groups.len());
    for members in groups.into_values() {
        let mean = members.iter().sum::<Complex64>() / members.len() as f64;
        if members.len() == 1 || accept(mean) {
            roots.push(Root {
                value: mean,
                multiplicity: members.len() as u32,
            });
        } else {
            roots.extend(members.into_iter().map(|value| Root {
                value,
                multiplicity: 1,
            }));
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Root>) -> Vec<Root> {
        v.sort_by(|a, b| a.value.im.total_cmp(&b.value.im));
        v
    }

    #[test]
    fn z_squared_plus_one() {
        let p = SparsePolynomial::new([(2, c(1.0, 0.0)), (0, c(1.0, 0.0))]).unwrap();
        let rs = sorted(solve_polynomial(&p, 1e-12).unwrap().roots);
        assert_eq!(rs.len(), 2);
        assert!((rs[0].value - c(0.0, -1.0)).norm() < 1e-12);
        assert!((rs[1].value - c(0.0, 1.0)).norm() < 1e-12);
        assert!(rs.iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn double_root_is_merged() {
        let p = SparsePolynomial::from_dense(&[c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)]).unwrap();
        let rs = solve_polynomial(&p, 1e-12).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert_eq!(rs.roots[0].multiplicity, 2);
        assert!((rs.roots[0].value - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn zero_roots_are_factored_out() {
        let p = SparsePolynomial::new([(3, c(1.0, 0.0)), (5, c(1.0, 0.0))]).unwrap();
        let rs = solve_polynomial(&p, 1e-12).unwrap();
        assert_eq!(rs.total_multiplicity(), 5);
        let zero = rs.roots.iter().find(|r| r.value.norm() == 0.0).unwrap();
        assert_eq!(zero.multiplicity, 3);
    }

    #[test]
    fn linear_polynomial() {
        let p = SparsePolynomial::from_dense(&[c(2.0, 1.0), c(0.0, 1.0)]).unwrap();
        let rs = solve_polynomial(&p, 1e-14).unwrap();
        assert!((rs.roots[0].value - c(-1.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        let constant = SparsePolynomial::new([(0, c(1.0, 0.0))]).unwrap();
        assert!(matches!(
            solve_polynomial(&constant, 1e-12),
            Err(NumericError::InvalidArgument(_))
        ));
        let p = SparsePolynomial::from_dense(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(solve_polynomial(&p, 0.0).is_err());
    }

    #[test]
    fn exhausted_budget_reports_worst_residual() {
        let p = SparsePolynomial::new([(0, c(-1.0, 0.0)), (40, c(1.0, 0.0))]).unwrap();
        let options = SolveOptions {
            initial_radius: Some(3.0),
            max_iterations: 1,
        };
        match solve_polynomial_with(&p, 1e-14, &options) {
            Err(NumericError::NoConvergence { worst_residual }) => assert!(worst_residual > 1e-14),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn roots_of_unity_high_degree() {
        let n = 1000u32;
        let p = SparsePolynomial::new([(0, c(-1.0, 0.0)), (n, c(1.0, 0.0))]).unwrap();
        let rs = solve_polynomial(&p, 1e-12).unwrap();
        assert_eq!(rs.roots.len(), n as usize);
        for r in &rs.roots {
            assert!((r.value.norm() - 1.0).abs() < 1e-12);
        }
    }
}

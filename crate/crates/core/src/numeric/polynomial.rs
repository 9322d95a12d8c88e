use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NumericError;

/// Integer power by repeated squaring.
pub fn powu(z: Complex64, mut exp: u32) -> Complex64 {
    let mut base = z;
    let mut acc = Complex64::new(1.0, 0.0);
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        exp >>= 1;
        if exp > 0 {
            base *= base;
        }
    }
    acc
}

/// Value, derivative and term-magnitude scale of a polynomial at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyEval {
    pub value: Complex64,
    pub derivative: Complex64,
    /// `Σ |c_d| |z|^d`, the natural normalizer for backward errors.
    pub scale: f64,
}

impl PolyEval {
    pub fn backward_error(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.value.norm() / self.scale
        }
    }
}

/// A polynomial stored as its nonzero terms only.
///
/// Degrees are strictly increasing and every coefficient is nonzero, so the
/// characteristic polynomials of the barrier problem (seven terms at degree
/// `2n`) are evaluated in `O(log n)` instead of `O(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsePolynomial {
    terms: Vec<(u32, Complex64)>,
}

impl SparsePolynomial {
    /// Builds a polynomial from arbitrary `(degree, coefficient)` pairs.
    /// Repeated degrees are summed and vanishing coefficients dropped.
    pub fn new(terms: impl IntoIterator<Item = (u32, Complex64)>) -> Result<Self, NumericError> {
        let mut raw: Vec<(u32, Complex64)> = terms.into_iter().collect();
        if raw.iter().any(|(_, c)| !c.is_finite()) {
            return Err(NumericError::InvalidArgument(
                "polynomial coefficients must be finite".into(),
            ));
        }
        raw.sort_by_key(|&(d, _)| d);
        let mut merged: Vec<(u32, Complex64)> = Vec::with_capacity(raw.len());
        for (d, c) in raw {
            match merged.last_mut() {
                Some((last, acc)) if *last == d => *acc += c,
                _ => merged.push((d, c)),
            }
        }
        merged.retain(|(_, c)| *c != Complex64::new(0.0, 0.0));
        if merged.is_empty() {
            return Err(NumericError::ZeroPolynomial);
        }
        Ok(Self { terms: merged })
    }

    /// Dense constructor, coefficients in increasing degree order.
    pub fn from_dense(coefficients: &[Complex64]) -> Result<Self, NumericError> {
        Self::new(coefficients.iter().enumerate().map(|(d, &c)| (d as u32, c)))
    }

    /// Expands `lead · Π (z − r)`.
    pub fn from_roots(lead: Complex64, roots: &[Complex64]) -> Result<Self, NumericError> {
        let mut dense = vec![lead];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); dense.len() + 1];
            for (d, &c) in dense.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= c * r;
            }
            dense = next;
        }
        Self::from_dense(&dense)
    }

    pub fn terms(&self) -> &[(u32, Complex64)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.last().map(|t| t.0).unwrap_or(0)
    }

    /// Lowest degree carrying a nonzero coefficient (multiplicity of the root at 0).
    pub fn low_degree(&self) -> u32 {
        self.terms.first().map(|t| t.0).unwrap_or(0)
    }

    pub fn coefficient(&self, degree: u32) -> Complex64 {
        self.terms
            .binary_search_by_key(&degree, |t| t.0)
            .map(|i| self.terms[i].1)
            .unwrap_or_default()
    }

    /// Dense coefficient vector, increasing degree.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut dense = vec![Complex64::new(0.0, 0.0); self.degree() as usize + 1];
        for &(d, c) in &self.terms {
            dense[d as usize] = c;
        }
        dense
    }

    /// `z^N p(1/z)`: the coefficient list read backwards.
    pub fn reversed(&self) -> Self {
        let n = self.degree();
        let mut terms: Vec<_> = self.terms.iter().map(|&(d, c)| (n - d, c)).collect();
        terms.reverse();
        Self { terms }
    }

    /// Divides by `z^shift`; every degree must be at least `shift`.
    pub(crate) fn shifted_down(&self, shift: u32) -> Self {
        Self {
            terms: self.terms.iter().map(|&(d, c)| (d - shift, c)).collect(),
        }
    }

    /// Value and derivative, each sparse term raised by binary exponentiation.
    pub fn evaluate(&self, z: Complex64) -> (Complex64, Complex64) {
        let e = self.eval_full(z);
        (e.value, e.derivative)
    }

    pub fn eval_full(&self, z: Complex64) -> PolyEval {
        let mut value = Complex64::new(0.0, 0.0);
        let mut derivative = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        let modulus = z.norm();
        for &(d, c) in &self.terms {
            if d == 0 {
                value += c;
                scale += c.norm();
                continue;
            }
            let below = powu(z, d - 1);
            let full = below * z;
            value += c * full;
            derivative += c * below * f64::from(d);
            scale += c.norm() * modulus.powi(d as i32);
        }
        PolyEval {
            value,
            derivative,
            scale,
        }
    }
}

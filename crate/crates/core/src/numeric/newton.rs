use num_complex::Complex64;

use super::NumericError;

/// Value and derivative of a holomorphic map at one point, together with the
/// magnitude of its largest additive term (used to normalize residuals).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub derivative: Complex64,
    pub scale: f64,
}

impl Evaluation {
    pub fn relative_residual(&self) -> f64 {
        if self.scale > 0.0 {
            self.value.norm() / self.scale
        } else {
            self.value.norm()
        }
    }
}

pub trait HolomorphicMap {
    fn evaluate(&self, z: Complex64) -> Evaluation;
}

impl<F> HolomorphicMap for F
where
    F: Fn(Complex64) -> Evaluation,
{
    fn evaluate(&self, z: Complex64) -> Evaluation {
        self(z)
    }
}

const MIN_DERIVATIVE: f64 = 1e-300;
const MAX_HALVINGS: usize = 40;

/// Damped Newton iteration. Returns a point with `|f| <= tol * scale`.
///
/// When a full step fails to reduce `|f|` the step is halved until it does
/// (or the halving budget runs out, in which case the short step is taken).
pub fn newton_refine<F: HolomorphicMap + ?Sized>(
    f: &F,
    seed: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<Complex64, NumericError> {
    if !(tol > 0.0) {
        return Err(NumericError::InvalidArgument(format!(
            "Newton tolerance must be positive, got {tol}"
        )));
    }
    let mut z = seed;
    let mut current = f.evaluate(z);
    for _ in 0..max_iter {
        if !current.value.is_finite() {
            return Err(NumericError::Diverged { last: z });
        }
        if current.value.norm() <= tol * current.scale {
            return Ok(z);
        }
        if current.derivative.norm() < MIN_DERIVATIVE {
            return Err(NumericError::FlatDerivative { last: z });
        }
        let full_step = current.value / current.derivative;
        let mut step = full_step;
        let mut candidate = z - step;
        let mut next = f.evaluate(candidate);
        let mut halvings = 0;
        while !(next.value.norm() < current.value.norm()) && halvings < MAX_HALVINGS {
            step *= 0.5;
            candidate = z - step;
            next = f.evaluate(candidate);
            halvings += 1;
        }
        if candidate == z {
            // The step has fallen below the spacing of floating-point numbers.
            break;
        }
        z = candidate;
        current = next;
    }
    if current.value.is_finite() && current.value.norm() <= tol * current.scale {
        Ok(z)
    } else if !current.value.is_finite() {
        Err(NumericError::Diverged { last: z })
    } else {
        Err(NumericError::NewtonStalled {
            last: z,
            residual: current.relative_residual(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cosine(z: Complex64) -> Evaluation {
        Evaluation {
            value: z.cos(),
            derivative: -z.sin(),
            scale: 1.0,
        }
    }

    #[test]
    fn cosine_from_one_and_a_half() {
        let root = newton_refine(&cosine, Complex64::new(1.5, 0.0), 1e-14, 50).unwrap();
        assert!((root.re - FRAC_PI_2).abs() < 1e-12);
        assert!(root.im.abs() < 1e-12);
    }

    #[test]
    fn square_root_of_two() {
        let f = |z: Complex64| Evaluation {
            value: z * z - 2.0,
            derivative: 2.0 * z,
            scale: (z * z).norm().max(2.0),
        };
        let root = newton_refine(&f, Complex64::new(1.0, 0.0), 1e-15, 50).unwrap();
        assert!((root.re - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn flat_derivative_is_reported() {
        let f = |z: Complex64| Evaluation {
            value: z * z + 1.0,
            derivative: 2.0 * z,
            scale: 1.0,
        };
        match newton_refine(&f, Complex64::new(0.0, 0.0), 1e-12, 10) {
            Err(NumericError::FlatDerivative { last }) => {
                assert_eq!(last, Complex64::new(0.0, 0.0))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn exhausted_budget_keeps_last_iterate() {
        let root = newton_refine(&cosine, Complex64::new(0.3 * PI, 0.0), 1e-15, 1);
        assert!(matches!(root, Err(NumericError::NewtonStalled { .. })));
    }
}

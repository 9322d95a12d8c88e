//! Argument-principle zero counting on axis-aligned rectangles.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::newton::HolomorphicMap;
use super::NumericError;

const MAX_BISECTION_DEPTH: u32 = 48;
const MIN_SAMPLES_PER_SIDE: usize = 64;
/// A boundary sample with `|f| < BOUNDARY_RATIO * scale` is treated as a zero.
const BOUNDARY_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    lower_left: Complex64,
    upper_right: Complex64,
}

impl Rectangle {
    pub fn new(lower_left: Complex64, upper_right: Complex64) -> Result<Self, NumericError> {
        if !(upper_right.re > lower_left.re && upper_right.im > lower_left.im) {
            return Err(NumericError::InvalidArgument(format!(
                "degenerate rectangle {lower_left} .. {upper_right}"
            )));
        }
        Ok(Self {
            lower_left,
            upper_right,
        })
    }

    pub fn lower_left(&self) -> Complex64 {
        self.lower_left
    }

    pub fn upper_right(&self) -> Complex64 {
        self.upper_right
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.lower_left.re
            && z.re < self.upper_right.re
            && z.im > self.lower_left.im
            && z.im < self.upper_right.im
    }

    /// Corners in counter-clockwise order starting at the lower left.
    fn corners(&self) -> [Complex64; 4] {
        let (a, b) = (self.lower_left, self.upper_right);
        [a, Complex64::new(b.re, a.im), b, Complex64::new(a.re, b.im)]
    }
}

struct Walk {
    total_phase: f64,
}

fn sample<F: HolomorphicMap + ?Sized>(f: &F, z: Complex64) -> Result<Complex64, NumericError> {
    let e = f.evaluate(z);
    let m = e.value.norm();
    if !e.value.is_finite() || m == 0.0 || m < BOUNDARY_RATIO * e.scale {
        return Err(NumericError::BoundaryProximity {
            near: z,
            min_modulus: m,
        });
    }
    Ok(e.value)
}

impl Walk {
    /// Adds the phase change along `[a, b]`, bisecting until each increment is
    /// at most π/2.
    fn segment<F: HolomorphicMap + ?Sized>(
        &mut self,
        f: &F,
        a: Complex64,
        fa: Complex64,
        b: Complex64,
        fb: Complex64,
        depth: u32,
    ) -> Result<(), NumericError> {
        let increment = (fb / fa).arg();
        if increment.abs() <= PI / 2.0 {
            self.total_phase += increment;
            return Ok(());
        }
        if depth >= MAX_BISECTION_DEPTH {
            return Err(NumericError::BoundaryProximity {
                near: a,
                min_modulus: fa.norm().min(fb.norm()),
            });
        }
        let mid = 0.5 * (a + b);
        let fm = sample(f, mid)?;
        self.segment(f, a, fa, mid, fm, depth + 1)?;
        self.segment(f, mid, fm, b, fb, depth + 1)
    }
}

/// Number of zeros of `f` inside `region`, counted with multiplicity, from the
/// winding number of `f` along the boundary.
pub fn count_zeros<F: HolomorphicMap + ?Sized>(
    f: &F,
    region: &Rectangle,
    samples_per_side: usize,
) -> Result<u64, NumericError> {
    if samples_per_side < MIN_SAMPLES_PER_SIDE {
        return Err(NumericError::InvalidArgument(format!(
            "need at least {MIN_SAMPLES_PER_SIDE} samples per side, got {samples_per_side}"
        )));
    }
    let corners = region.corners();
    let mut walk = Walk { total_phase: 0.0 };
    for side in 0..4 {
        let (start, end) = (corners[side], corners[(side + 1) % 4]);
        let mut prev = start;
        let mut f_prev = sample(f, prev)?;
        for s in 1..=samples_per_side {
            let t = s as f64 / samples_per_side as f64;
            let point = start + (end - start) * t;
            let f_point = sample(f, point)?;
            walk.segment(f, prev, f_prev, point, f_point, 0)?;
            prev = point;
            f_prev = f_point;
        }
    }
    let turns = walk.total_phase / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-6 || rounded < 0.0 {
        return Err(NumericError::WindingNotIntegral { turns });
    }
    Ok(rounded as u64)
}

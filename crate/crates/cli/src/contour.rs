//! Boundary of the admissibility region `|z^{n+1} + s| < |z^n + sz|` in the
//! upper half of the unit disk, traced by marching squares.

use std::collections::HashMap;

use barrier_spectra_core::jacobi::Branch;
use barrier_spectra_core::numeric::powu;
use barrier_spectra_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::MIN_CONTOUR_GRID;
use crate::error::{invalid, CliError};

/// Margin around `[−1,1]×[0,1]`; the field is positive there, so every
/// traced polyline closes.
const PAD: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionContour {
    pub n: u32,
    pub branch: Branch,
    pub grid: u32,
    /// Closed polylines; the first point is not repeated at the end.
    pub polylines: Vec<Vec<Complex64>>,
    /// Grid nodes inside the region.
    pub inside_nodes: usize,
}

impl RegionContour {
    /// Even–odd test against all polylines.
    pub fn contains(&self, z: Complex64) -> bool {
        let mut inside = false;
        for line in &self.polylines {
            let m = line.len();
            for i in 0..m {
                let a = line[i];
                let b = line[(i + 1) % m];
                if (a.im > z.im) != (b.im > z.im) {
                    let x = a.re + (z.im - a.im) / (b.im - a.im) * (b.re - a.re);
                    if z.re < x {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }
}

/// `|z^{n+1} + s| − |z^n + sz|` inside the open upper half disk, `+1` elsewhere.
fn field(z: Complex64, n: u32, s: f64) -> f64 {
    if z.norm() >= 1.0 || z.im <= 0.0 {
        return 1.0;
    }
    let zn = powu(z, n);
    (zn * z + s).norm() - (zn + s * z).norm()
}

/// Crossing point on the grid edge from node `a` to node `b`.
type EdgeKey = (u32, u32, u8);

pub fn emit_region_contour(n: u32, branch: Branch, grid: u32) -> Result<RegionContour, CliError> {
    if grid < MIN_CONTOUR_GRID {
        return invalid(format!("grid must be >= {MIN_CONTOUR_GRID}, got {grid}"));
    }
    if n < 2 {
        return invalid(format!("n must be >= 2, got {n}"));
    }
    let s = branch.sign();
    let x0 = -1.0 - PAD;
    let y0 = -PAD;
    let step = (2.0 + 2.0 * PAD) / f64::from(grid);
    let nx = grid + 1;
    let ny = ((1.0 + 2.0 * PAD) / step).ceil() as u32 + 1;
    let node = |i: u32, j: u32| Complex64::new(x0 + f64::from(i) * step, y0 + f64::from(j) * step);
    let values: Vec<f64> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| field(node(i, j), n, s))
        .collect();
    let value = |i: u32, j: u32| values[(j * nx + i) as usize];
    let inside_nodes = values.iter().filter(|&&v| v < 0.0).count();

    // Horizontal edge (i,j)→(i+1,j) is kind 0, vertical (i,j)→(i,j+1) kind 1.
    let crossing = |key: EdgeKey| -> Complex64 {
        let (i, j, kind) = key;
        let (a, b) = if kind == 0 {
            ((i, j), (i + 1, j))
        } else {
            ((i, j), (i, j + 1))
        };
        let (va, vb) = (value(a.0, a.1), value(b.0, b.1));
        let t = va / (va - vb);
        let (za, zb) = (node(a.0, a.1), node(b.0, b.1));
        za + (zb - za) * t
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let corners = [
                value(i, j) < 0.0,
                value(i + 1, j) < 0.0,
                value(i + 1, j + 1) < 0.0,
                value(i, j + 1) < 0.0,
            ];
            let bottom = (i, j, 0);
            let right = (i + 1, j, 1);
            let top = (i, j + 1, 0);
            let left = (i, j, 1);
            let case = corners
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &c)| acc | (u8::from(c) << k));
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((left, top)),
                5 | 10 => {
                    let centre =
                        (value(i, j) + value(i + 1, j) + value(i + 1, j + 1) + value(i, j + 1))
                            / 4.0;
                    let centre_inside = centre < 0.0;
                    // Case 5 has the bottom-left and top-right corners inside.
                    if (case == 5) == centre_inside {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    Ok(RegionContour {
        n,
        branch,
        grid,
        polylines: chain(&segments)
            .into_iter()
            .map(|keys| keys.into_iter().map(crossing).collect())
            .collect(),
        inside_nodes,
    })
}

/// Joins segments sharing an edge crossing into closed loops.
fn chain(segments: &[(EdgeKey, EdgeKey)]) -> Vec<Vec<EdgeKey>> {
    let mut incident: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        incident.entry(a).or_default().push(k);
        incident.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut loops = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (first, mut current) = segments[start];
        let mut line = vec![first];
        while current != first {
            line.push(current);
            let next = incident[&current].iter().copied().find(|&k| !used[k]);
            let Some(k) = next else { break };
            used[k] = true;
            let (a, b) = segments[k];
            current = if a == current { b } else { a };
        }
        loops.push(line);
    }
    loops
}

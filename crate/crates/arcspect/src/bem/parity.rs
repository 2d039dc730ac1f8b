//! Reflection-symmetry bookkeeping for the elliptical boundary.
//!
//! With nodes at equal-arclength midpoints measured from the positive
//! major-axis vertex and `4 | N`, the node set is closed under both axis
//! reflections and no node sits on an axis, so every node belongs to an
//! orbit of size four. Boundary functions then split into four parity
//! classes; restricting the boundary operator to one class both quarters
//! the singular-value problem and separates the quasi-degenerate
//! cosine/sine mode families that coexist on near-circular shapes.

use crate::linalg::CMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Parity under x- and y-axis reflection; `Even` means the boundary
/// function returns to itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityClass {
    pub x_even: bool,
    pub y_even: bool,
}

impl ParityClass {
    pub const ALL: [ParityClass; 4] = [
        ParityClass { x_even: true, y_even: true },
        ParityClass { x_even: true, y_even: false },
        ParityClass { x_even: false, y_even: true },
        ParityClass { x_even: false, y_even: false },
    ];

    /// Two-letter label, x parity first: `ee`, `eo`, `oe`, `oo`.
    pub fn label(&self) -> &'static str {
        match (self.x_even, self.y_even) {
            (true, true) => "ee",
            (true, false) => "eo",
            (false, true) => "oe",
            (false, false) => "oo",
        }
    }

    /// Parity of the angular factor `cos(m theta)` or `sin(m theta)`.
    pub fn of_angular(m: u32, cosine: bool) -> ParityClass {
        let m_even = m % 2 == 0;
        if cosine {
            ParityClass { x_even: true, y_even: m_even }
        } else {
            ParityClass { x_even: false, y_even: !m_even }
        }
    }
}

/// Node index under x-reflection (`s -> L - s`).
#[inline]
pub fn reflect_x(i: usize, n: usize) -> usize {
    n - 1 - i
}

/// Node index under y-reflection (`s -> L/2 - s`).
#[inline]
pub fn reflect_y(i: usize, n: usize) -> usize {
    (3 * n / 2 - 1 - i) % n
}

/// Orthonormal basis of one parity class of boundary functions.
#[derive(Debug, Clone)]
pub struct ParityBasis {
    pub class: ParityClass,
    /// Node orbits `[i, x-image, y-image, xy-image]`, one per basis vector.
    pub orbits: Vec<[usize; 4]>,
    /// Signs attached to the four orbit slots (each `+-1/2`).
    pub signs: [f64; 4],
    pub nodes: usize,
}

impl ParityBasis {
    pub fn new(class: ParityClass, n: usize) -> Self {
        assert!(n % 4 == 0, "parity reduction requires 4 | N");
        let sx = if class.x_even { 1.0 } else { -1.0 };
        let sy = if class.y_even { 1.0 } else { -1.0 };
        let mut seen = vec![false; n];
        let mut orbits = Vec::with_capacity(n / 4);
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let orbit = [i, reflect_x(i, n), reflect_y(i, n), reflect_x(reflect_y(i, n), n)];
            for &j in &orbit {
                seen[j] = true;
            }
            orbits.push(orbit);
        }
        ParityBasis {
            class,
            orbits,
            signs: [0.5, 0.5 * sx, 0.5 * sy, 0.5 * sx * sy],
            nodes: n,
        }
    }

    /// Dimension of the class (per unknown block).
    pub fn dim(&self) -> usize {
        self.orbits.len()
    }

    /// Restrict `m` (whose column space is `blocks` stacked copies of the
    /// node space) to this class: returns `m * B` with `B` the block-diagonal
    /// basis matrix.
    pub fn restrict(&self, m: &CMatrix, blocks: usize) -> CMatrix {
        let n = self.nodes;
        assert_eq!(m.ncols(), blocks * n);
        let dim = self.dim();
        let mut out = CMatrix::zeros(m.nrows(), blocks * dim);
        for i in 0..m.nrows() {
            for b in 0..blocks {
                for (o, orbit) in self.orbits.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for slot in 0..4 {
                        acc += self.signs[slot] * m.get(i, b * n + orbit[slot]);
                    }
                    out.set(i, b * dim + o, acc);
                }
            }
        }
        out
    }

    /// Expand class coordinates back to nodal values (`B * v`).
    pub fn expand(&self, reduced: &[Complex64], blocks: usize) -> Vec<Complex64> {
        let dim = self.dim();
        assert_eq!(reduced.len(), blocks * dim);
        let mut out = vec![Complex64::new(0.0, 0.0); blocks * self.nodes];
        for b in 0..blocks {
            for (o, orbit) in self.orbits.iter().enumerate() {
                let c = reduced[b * dim + o];
                for slot in 0..4 {
                    out[b * self.nodes + orbit[slot]] += self.signs[slot] * c;
                }
            }
        }
        out
    }

    /// Project nodal values onto the class (`B B^T v`).
    pub fn project(&self, full: &[Complex64], blocks: usize) -> Vec<Complex64> {
        let dim = self.dim();
        let n = self.nodes;
        assert_eq!(full.len(), blocks * n);
        let mut reduced = vec![Complex64::new(0.0, 0.0); blocks * dim];
        for b in 0..blocks {
            for (o, orbit) in self.orbits.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for slot in 0..4 {
                    acc += self.signs[slot] * full[b * n + orbit[slot]];
                }
                reduced[b * dim + o] = acc;
            }
        }
        self.expand(&reduced, blocks)
    }
}

/// Classify a (unit-norm) boundary vector by its projection residuals onto
/// the four parity classes. Returns `None` when no class leaves a residual
/// below 0.1 (for example in an exactly degenerate circle subspace).
pub fn classify_parity(vector: &[Complex64], nodes: usize, blocks: usize) -> Option<ParityClass> {
    if nodes % 4 != 0 || vector.len() != nodes * blocks {
        return None;
    }
    let norm: f64 = vector.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let mut best: Option<(f64, ParityClass)> = None;
    for class in ParityClass::ALL {
        let basis = ParityBasis::new(class, nodes);
        let projected = basis.project(vector, blocks);
        let residual: f64 = vector
            .iter()
            .zip(&projected)
            .map(|(v, p)| (v - p).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / norm;
        if best.map_or(true, |(r, _)| residual < r) {
            best = Some((residual, class));
        }
    }
    best.and_then(|(r, c)| (r < 0.1).then_some(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbits_partition_nodes() {
        let basis = ParityBasis::new(ParityClass { x_even: true, y_even: false }, 16);
        assert_eq!(basis.dim(), 4);
        let mut all: Vec<usize> = basis.orbits.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn expand_project_roundtrip() {
        let n = 16;
        let basis = ParityBasis::new(ParityClass { x_even: false, y_even: true }, n);
        let reduced: Vec<Complex64> = (0..basis.dim())
            .map(|i| Complex64::new(i as f64 + 0.5, -(i as f64)))
            .collect();
        let full = basis.expand(&reduced, 1);
        let projected = basis.project(&full, 1);
        for (a, b) in full.iter().zip(&projected) {
            assert!((a - b).norm() < 1e-14);
        }
        // expanded vectors respect the reflection signs
        for i in 0..n {
            let xi = reflect_x(i, n);
            assert!((full[i] + full[xi]).norm() < 1e-14); // x-odd
            let yi = reflect_y(i, n);
            assert!((full[i] - full[yi]).norm() < 1e-14); // y-even
        }
    }

    #[test]
    fn classify_cosine_family() {
        let n = 32;
        // cos(3 theta) sampled at midpoint angles: x-even, y-odd
        let vec: Vec<Complex64> = (0..n)
            .map(|i| {
                let theta = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
                Complex64::new((3.0 * theta).cos(), 0.0)
            })
            .collect();
        let class = classify_parity(&vec, n, 1).unwrap();
        assert_eq!(class.label(), "eo");
        assert_eq!(ParityClass::of_angular(3, true).label(), "eo");
        assert_eq!(ParityClass::of_angular(7, true).label(), "eo");
        assert_eq!(ParityClass::of_angular(4, true).label(), "ee");
        assert_eq!(ParityClass::of_angular(3, false).label(), "oe");
    }
}

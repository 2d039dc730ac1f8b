//! Field reconstruction from boundary data: the interior representation at
//! wavenumber `n k` and the outgoing exterior representation at `k`.
//!
//! Evaluation points closer than half an element to the boundary sit in the
//! near-singular band and are masked out. For points within a few elements
//! of the boundary the midpoint rule under-resolves the peaked kernel, so
//! the affected elements are subdivided with Gauss nodes on a local
//! quadratic reconstruction of the curve and linear density interpolation.

use super::kernels::green_pair;
use super::{BemError, ProblemKind, Resonance, Result};
use crate::geometry::BoundaryMesh;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Uniform Cartesian evaluation grid (cell centers).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub nx: usize,
    pub ny: usize,
}

impl FieldGrid {
    /// Grid covering `scale` times the ellipse bounding box.
    pub fn covering(mesh: &BoundaryMesh, resolution: usize, scale: f64) -> FieldGrid {
        let a = mesh.shape.semi_major * scale;
        let b = mesh.shape.semi_minor * scale;
        FieldGrid {
            x0: -a,
            y0: -b,
            dx: 2.0 * a / resolution as f64,
            dy: 2.0 * b / resolution as f64,
            nx: resolution,
            ny: resolution,
        }
    }

    #[inline]
    pub fn cell_center(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            self.x0 + (ix as f64 + 0.5) * self.dx,
            self.y0 + (iy as f64 + 0.5) * self.dy,
        ]
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Classification of a grid cell relative to the cavity boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellKind {
    Interior,
    Exterior,
    /// Within half an element of the boundary; excluded from quadrature.
    BoundaryBand,
}

/// Complex field sampled on a Cartesian grid, with an inside/outside mask.
/// Values are scaled so the interior L2 norm is one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldMap {
    pub grid: FieldGrid,
    pub values: Vec<Complex64>,
    pub mask: Vec<CellKind>,
}

impl FieldMap {
    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[iy * self.grid.nx + ix]
    }

    #[inline]
    pub fn kind_at(&self, ix: usize, iy: usize) -> CellKind {
        self.mask[iy * self.grid.nx + ix]
    }
}

const GAUSS8_X: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GAUSS8_W: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Single- and double-layer sums at one point, with near-element refinement.
fn representation(
    mesh: &BoundaryMesh,
    k: Complex64,
    point: [f64; 2],
    psi: &[Complex64],
    dpsi: &[Complex64],
) -> (Complex64, Complex64) {
    let n = mesh.len();
    let ds = mesh.perimeter / n as f64;
    let near = 4.0 * ds;
    let mut single = Complex64::new(0.0, 0.0);
    let mut double = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let node = &mesh.nodes[j];
        let dx = node.position[0] - point[0];
        let dy = node.position[1] - point[1];
        let rho = (dx * dx + dy * dy).sqrt();
        if rho > near {
            let cosf = (dx * node.outward_normal[0] + dy * node.outward_normal[1]) / rho;
            let (g, dg) = green_pair(k, rho, cosf);
            single += g * ds * dpsi[j];
            double += dg * ds * psi[j];
            continue;
        }
        // subdivide: local quadratic curve model around the node, linear
        // density interpolation toward the neighbor on each side
        let nv = node.outward_normal;
        let tv = [-nv[1], nv[0]];
        let kappa = node.curvature;
        let prev = (j + n - 1) % n;
        let next = (j + 1) % n;
        for (gx, gw) in GAUSS8_X.iter().zip(GAUSS8_W.iter()) {
            let delta = 0.5 * ds * gx;
            let w = 0.5 * ds * gw;
            let pos = [
                node.position[0] + tv[0] * delta - 0.5 * nv[0] * kappa * delta * delta,
                node.position[1] + tv[1] * delta - 0.5 * nv[1] * kappa * delta * delta,
            ];
            let mut nn = [nv[0] + kappa * delta * tv[0], nv[1] + kappa * delta * tv[1]];
            let nn_len = (nn[0] * nn[0] + nn[1] * nn[1]).sqrt();
            nn[0] /= nn_len;
            nn[1] /= nn_len;
            let frac = delta / ds;
            let (u, q) = if delta >= 0.0 {
                (
                    psi[j] * (1.0 - frac) + psi[next] * frac,
                    dpsi[j] * (1.0 - frac) + dpsi[next] * frac,
                )
            } else {
                (
                    psi[j] * (1.0 + frac) - psi[prev] * frac,
                    dpsi[j] * (1.0 + frac) - dpsi[prev] * frac,
                )
            };
            let ddx = pos[0] - point[0];
            let ddy = pos[1] - point[1];
            let r = (ddx * ddx + ddy * ddy).sqrt();
            let cosf = (ddx * nn[0] + ddy * nn[1]) / r;
            let (g, dg) = green_pair(k, r, cosf);
            single += g * w * q;
            double += dg * w * u;
        }
    }
    (single, double)
}

/// Raw (un-normalized) representation value at a point, or `None` inside the
/// boundary exclusion band.
pub fn field_value_at(
    mesh: &BoundaryMesh,
    kind: ProblemKind,
    resonance: &Resonance,
    point: [f64; 2],
) -> Result<Option<Complex64>> {
    kind.validate()?;
    let n = mesh.len();
    if resonance.boundary_psi.len() != n || resonance.boundary_dpsi.len() != n {
        return Err(BemError::Domain(
            "resonance boundary data does not match mesh".into(),
        ));
    }
    let ds = mesh.perimeter / n as f64;
    let dist = mesh.shape.boundary_distance(point[0], point[1]);
    if dist.abs() < 0.5 * ds {
        return Ok(None);
    }
    let k = resonance.kr / mesh.shape.scale;
    let value = match kind {
        ProblemKind::OpenDielectricTm { refractive_index } => {
            if dist < 0.0 {
                let (s, d) = representation(
                    mesh,
                    refractive_index * k,
                    point,
                    &resonance.boundary_psi,
                    &resonance.boundary_dpsi,
                );
                s - d
            } else {
                let (s, d) = representation(
                    mesh,
                    k,
                    point,
                    &resonance.boundary_psi,
                    &resonance.boundary_dpsi,
                );
                d - s
            }
        }
        ProblemKind::ClosedDirichlet => {
            if dist < 0.0 {
                let (s, _) = representation(
                    mesh,
                    k,
                    point,
                    &resonance.boundary_psi,
                    &resonance.boundary_dpsi,
                );
                s
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
    };
    Ok(Some(value))
}

/// Evaluate the field on a grid. Interior cells use the interior
/// representation, exterior cells the outgoing one (skipped entirely when
/// `include_exterior` is false). The result is scaled to unit interior L2
/// norm.
pub fn evaluate_field(
    mesh: &BoundaryMesh,
    kind: ProblemKind,
    resonance: &Resonance,
    grid: FieldGrid,
    include_exterior: bool,
) -> Result<FieldMap> {
    kind.validate()?;
    let n = mesh.len();
    if resonance.boundary_psi.len() != n || resonance.boundary_dpsi.len() != n {
        return Err(BemError::Domain(
            "resonance boundary data does not match mesh".into(),
        ));
    }
    let ds = mesh.perimeter / n as f64;
    let k = resonance.kr / mesh.shape.scale;
    let cells: Vec<(Complex64, CellKind)> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let ix = idx % grid.nx;
            let iy = idx / grid.nx;
            let p = grid.cell_center(ix, iy);
            let dist = mesh.shape.boundary_distance(p[0], p[1]);
            if dist.abs() < 0.5 * ds {
                return (Complex64::new(0.0, 0.0), CellKind::BoundaryBand);
            }
            if dist < 0.0 {
                let kind_k = match kind {
                    ProblemKind::OpenDielectricTm { refractive_index } => refractive_index * k,
                    ProblemKind::ClosedDirichlet => k,
                };
                let (s, d) = representation(
                    mesh,
                    kind_k,
                    p,
                    &resonance.boundary_psi,
                    &resonance.boundary_dpsi,
                );
                let v = match kind {
                    ProblemKind::OpenDielectricTm { .. } => s - d,
                    ProblemKind::ClosedDirichlet => s,
                };
                (v, CellKind::Interior)
            } else {
                if !include_exterior || matches!(kind, ProblemKind::ClosedDirichlet) {
                    return (Complex64::new(0.0, 0.0), CellKind::Exterior);
                }
                let (s, d) = representation(
                    mesh,
                    k,
                    p,
                    &resonance.boundary_psi,
                    &resonance.boundary_dpsi,
                );
                (d - s, CellKind::Exterior)
            }
        })
        .collect();

    let area = grid.cell_area();
    let interior_sq: f64 = cells
        .iter()
        .filter(|(_, kind)| *kind == CellKind::Interior)
        .map(|(v, _)| v.norm_sqr() * area)
        .sum();
    if interior_sq <= 0.0 {
        return Err(BemError::Domain(
            "interior norm vanished; boundary data is degenerate".into(),
        ));
    }
    let scale = 1.0 / interior_sq.sqrt();
    let mut values = Vec::with_capacity(cells.len());
    let mut mask = Vec::with_capacity(cells.len());
    for (v, kind) in cells {
        values.push(v * scale);
        mask.push(kind);
    }
    Ok(FieldMap { grid, values, mask })
}

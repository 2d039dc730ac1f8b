//! Assembly of the frequency-dependent boundary operator.
//!
//! `OpenDielectricTm` builds the 2N x 2N transmission system for the
//! boundary field `u` and its outward normal derivative `q`,
//!
//! ```text
//! [ I/2 + D_int   -S_int ] [u]   [0]
//! [ I/2 - D_ext   +S_ext ] [q] = [0]
//! ```
//!
//! where the interior layer potentials use wavenumber `n k` and the exterior
//! ones the outgoing kernel at `k`. `ClosedDirichlet` builds the N x N
//! single-layer matrix whose null space encodes `u = 0` on the wall.

use super::kernels;
use super::parity::ParityBasis;
use super::{BemError, ProblemKind, Result, KR_IM_WINDOW};
use crate::geometry::BoundaryMesh;
use crate::linalg::CMatrix;
use crate::specfun;
use num_complex::Complex64;
use std::f64::consts::PI;

fn check_kr(kr: Complex64) -> Result<()> {
    if kr.norm_sqr() == 0.0 {
        return Err(BemError::Domain("k = 0".into()));
    }
    if kr.im < KR_IM_WINDOW.0 || kr.im > KR_IM_WINDOW.1 {
        return Err(BemError::Domain(format!(
            "Im(kR) = {} outside [{}, {}]",
            kr.im, KR_IM_WINDOW.0, KR_IM_WINDOW.1
        )));
    }
    Ok(())
}

struct LayerMatrices {
    single: CMatrix,
    double: CMatrix,
}

/// Chord geometry of all node pairs, shared between the interior and
/// exterior assemblies at one `kr`.
struct PairData {
    /// `|x_i - x_j|`, row-major.
    rho: Vec<f64>,
    /// `(x_j - x_i) . normal_j / rho`, row-major (asymmetric).
    cos_factor: Vec<f64>,
}

fn pair_data(mesh: &BoundaryMesh) -> PairData {
    let n = mesh.len();
    let mut rho = vec![0.0; n * n];
    let mut cos_factor = vec![0.0; n * n];
    for i in 0..n {
        let xi = mesh.nodes[i].position;
        for j in 0..n {
            if i == j {
                continue;
            }
            let yj = mesh.nodes[j].position;
            let nj = mesh.nodes[j].outward_normal;
            let dx = yj[0] - xi[0];
            let dy = yj[1] - xi[1];
            let r = (dx * dx + dy * dy).sqrt();
            rho[i * n + j] = r;
            cos_factor[i * n + j] = (dx * nj[0] + dy * nj[1]) / r;
        }
    }
    PairData { rho, cos_factor }
}

/// Both layer-operator matrices at one wavenumber (mesh units). The cylinder
/// functions depend only on the chord length, so each unordered pair is
/// evaluated once.
fn layer_matrices(
    mesh: &BoundaryMesh,
    k: Complex64,
    pairs: &PairData,
    log_w: &[f64],
    log_d: &[f64],
) -> LayerMatrices {
    let n = mesh.len();
    let speed = mesh.perimeter / (2.0 * PI);
    let node_w = 2.0 * PI / n as f64;
    let mut single = CMatrix::zeros(n, n);
    let mut double = CMatrix::zeros(n, n);
    for i in 0..n {
        let split = kernels::split_diag(k, speed, mesh.nodes[i].curvature);
        single.set(i, i, log_w[0] * split.single_log + node_w * split.single_smooth);
        double.set(i, i, log_w[0] * split.double_log + node_w * split.double_smooth);
        for j in (i + 1)..n {
            let rho = pairs.rho[i * n + j];
            let m = (i + n - j) % n;
            let cyl = specfun::cyl01(k * rho);
            for (a, b) in [(i, j), (j, i)] {
                let cosf = pairs.cos_factor[a * n + b];
                let split = kernels::split_offdiag(k, cosf, speed, log_d[m], &cyl);
                single.set(a, b, log_w[m] * split.single_log + node_w * split.single_smooth);
                double.set(a, b, log_w[m] * split.double_log + node_w * split.double_smooth);
            }
        }
    }
    LayerMatrices { single, double }
}

/// Assemble the boundary operator at dimensionless wavenumber `kr`.
pub fn assemble(mesh: &BoundaryMesh, kind: ProblemKind, kr: Complex64) -> Result<CMatrix> {
    kind.validate()?;
    check_kr(kr)?;
    let n = mesh.len();
    let k = kr / mesh.shape.scale;
    let log_w = kernels::log_weights(n);
    let log_d = kernels::log_diag_terms(n);
    let pairs = pair_data(mesh);
    match kind {
        ProblemKind::ClosedDirichlet => {
            Ok(layer_matrices(mesh, k, &pairs, &log_w, &log_d).single)
        }
        ProblemKind::OpenDielectricTm { refractive_index } => {
            let interior = layer_matrices(mesh, refractive_index * k, &pairs, &log_w, &log_d);
            let exterior = layer_matrices(mesh, k, &pairs, &log_w, &log_d);
            let mut m = CMatrix::zeros(2 * n, 2 * n);
            let half = Complex64::new(0.5, 0.0);
            for i in 0..n {
                for j in 0..n {
                    let delta = if i == j { half } else { Complex64::new(0.0, 0.0) };
                    m.set(i, j, delta + interior.double.get(i, j));
                    m.set(i, n + j, -interior.single.get(i, j));
                    m.set(n + i, j, delta - exterior.double.get(i, j));
                    m.set(n + i, n + j, exterior.single.get(i, j));
                }
            }
            Ok(m)
        }
    }
}

/// Assemble restricted to one reflection-parity class: returns `A * B` with
/// `B` the block-diagonal orthonormal class basis. The restricted operator
/// is what the tracking solver minimizes; it keeps the quasi-degenerate
/// partner family out of the null space.
pub fn assemble_projected(
    mesh: &BoundaryMesh,
    kind: ProblemKind,
    kr: Complex64,
    basis: &ParityBasis,
) -> Result<CMatrix> {
    let full = assemble(mesh, kind, kr)?;
    Ok(basis.restrict(&full, kind.unknowns_per_node()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{discretize, make_ellipse};

    #[test]
    fn rejects_zero_and_out_of_window_k() {
        let mesh = discretize(&make_ellipse(0.0, 1.0).unwrap(), 64).unwrap();
        assert!(assemble(&mesh, ProblemKind::ClosedDirichlet, Complex64::new(0.0, 0.0)).is_err());
        assert!(assemble(&mesh, ProblemKind::ClosedDirichlet, Complex64::new(5.0, -3.0)).is_err());
        assert!(assemble(
            &mesh,
            ProblemKind::OpenDielectricTm { refractive_index: 0.5 },
            Complex64::new(5.0, 0.0)
        )
        .is_err());
    }

    /// On the circle the angular index is cyclic, so each block must commute
    /// with the rotation by one node after reindexing (circulant structure).
    #[test]
    fn circle_blocks_are_circulant() {
        let mesh = discretize(&make_ellipse(0.0, 1.0).unwrap(), 64).unwrap();
        let kr = Complex64::new(5.3, -0.1);
        let m = assemble(
            &mesh,
            ProblemKind::OpenDielectricTm { refractive_index: 3.3 },
            kr,
        )
        .unwrap();
        let n = 64;
        let mut max_dev = 0.0f64;
        let mut max_mag = 0.0f64;
        for bi in 0..2 {
            for bj in 0..2 {
                for i in 0..n {
                    for j in 0..n {
                        let a = m.get(bi * n + i, bj * n + j);
                        let b = m.get(bi * n + (i + 1) % n, bj * n + (j + 1) % n);
                        max_dev = max_dev.max((a - b).norm());
                        max_mag = max_mag.max(a.norm());
                    }
                }
            }
        }
        assert!(max_dev < 1e-8 * max_mag, "dev {max_dev}, scale {max_mag}");
    }

    /// Reflection conjugation must commute with the operator on a symmetric
    /// mesh.
    #[test]
    fn reflection_commutes() {
        use super::super::parity::{reflect_x, reflect_y};
        let mesh = discretize(&make_ellipse(0.6, 1.0).unwrap(), 64).unwrap();
        let kr = Complex64::new(4.0, -0.05);
        let m = assemble(
            &mesh,
            ProblemKind::OpenDielectricTm { refractive_index: 3.3 },
            kr,
        )
        .unwrap();
        let n = 64;
        let mut max_dev = 0.0f64;
        let mut max_mag = 0.0f64;
        for (name, refl) in [
            ("x", reflect_x as fn(usize, usize) -> usize),
            ("y", reflect_y as fn(usize, usize) -> usize),
        ] {
            for bi in 0..2 {
                for bj in 0..2 {
                    for i in 0..n {
                        for j in 0..n {
                            let a = m.get(bi * n + i, bj * n + j);
                            let b = m.get(bi * n + refl(i, n), bj * n + refl(j, n));
                            max_dev = max_dev.max((a - b).norm());
                            max_mag = max_mag.max(a.norm());
                        }
                    }
                }
            }
            assert!(max_dev < 1e-8 * max_mag, "{name}: dev {max_dev}");
        }
    }
}

//! The 2x2 symmetric non-Hermitian effective Hamiltonian
//!
//! ```text
//! H = [ eps_1 + gamma_11      gamma'          ]
//!     [ gamma'                eps_2 + gamma_22 ]
//! ```
//!
//! with real closed-system levels `eps_j`, complex self-energies
//! `gamma_jj`, and one complex off-diagonal coupling `gamma'`. Direct
//! diagonalization gives
//!
//! ```text
//! nu_pm = (nu_1^D + nu_2^D)/2 +- (1/2) sqrt((nu_1^D - nu_2^D)^2 + 4 gamma'^2)
//! ```
//!
//! with `nu_j^D = eps_j + gamma_jj`. Because the matrix is symmetric, left
//! eigenvectors equal right eigenvectors without conjugation, and the
//! eigenvector c-norms vanish as an exceptional point is approached.

use crate::spectrum::{ArcSummary, LambCurve, Trajectory};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ToyModelError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("no avoided crossing in the supplied data: {0}")]
    NoArc(String),
    #[error(transparent)]
    Spectrum(#[from] crate::spectrum::SpectrumError),
}

pub type Result<T> = std::result::Result<T, ToyModelError>;

/// Discriminant magnitude below which the model is flagged as sitting on an
/// exceptional point.
pub const EP_DISCRIMINANT_TOL: f64 = 1e-10;

/// Parameters of the 2x2 effective Hamiltonian.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ToyModel {
    pub eps1: f64,
    pub eps2: f64,
    pub gamma11: Complex64,
    pub gamma22: Complex64,
    pub gamma_prime: Complex64,
}

impl ToyModel {
    /// Diagonal eigenvalues `nu_j^D = eps_j + gamma_jj`.
    pub fn diagonal(&self) -> (Complex64, Complex64) {
        (self.eps1 + self.gamma11, self.eps2 + self.gamma22)
    }

    pub fn trace(&self) -> Complex64 {
        let (d1, d2) = self.diagonal();
        d1 + d2
    }

    pub fn det(&self) -> Complex64 {
        let (d1, d2) = self.diagonal();
        d1 * d2 - self.gamma_prime * self.gamma_prime
    }
}

/// Exact eigensystem of a [`ToyModel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToySpectrum {
    pub nu_plus: Complex64,
    pub nu_minus: Complex64,
    /// Unit-Euclidean-norm right eigenvectors `[plus, minus]`.
    pub right_vectors: [[Complex64; 2]; 2],
    /// Left eigenvectors; for the symmetric matrix these equal the right
    /// vectors componentwise (no conjugation).
    pub left_vectors: [[Complex64; 2]; 2],
    /// `v^T v` of each unit-norm eigenvector; the magnitude drops to zero at
    /// an exceptional point.
    pub c_norms: [Complex64; 2],
    /// Discriminant magnitude fell below [`EP_DISCRIMINANT_TOL`].
    pub at_exceptional_point: bool,
}

impl ToySpectrum {
    /// Right eigenvector rescaled to unit c-norm, unless the c-norm is too
    /// close to zero to divide by.
    pub fn c_normalized_right(&self, j: usize) -> Option<[Complex64; 2]> {
        let c = self.c_norms[j];
        if c.norm() < 1e-12 {
            return None;
        }
        let s = c.sqrt();
        Some([self.right_vectors[j][0] / s, self.right_vectors[j][1] / s])
    }
}

fn unit(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Diagonalize the model exactly.
pub fn eigensystem(m: &ToyModel) -> ToySpectrum {
    let (d1, d2) = m.diagonal();
    let g = m.gamma_prime;
    let mean = 0.5 * (d1 + d2);
    let disc = (d1 - d2) * (d1 - d2) + 4.0 * g * g;
    let z = 0.5 * disc.sqrt();
    let nu_plus = mean + z;
    let nu_minus = mean - z;
    let at_ep = disc.norm() < EP_DISCRIMINANT_TOL;

    let vector_for = |nu: Complex64, other: Complex64| -> [Complex64; 2] {
        if g.norm_sqr() == 0.0 {
            // diagonal matrix: basis vectors, matched by eigenvalue
            if (nu - d1).norm() <= (nu - d2).norm() {
                return [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
            }
            return [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        }
        // rows of (H - nu) give two parallel candidates; take the larger
        let va = [g, nu - d1];
        let vb = [nu - d2, g];
        let _ = other;
        if va[0].norm_sqr() + va[1].norm_sqr() >= vb[0].norm_sqr() + vb[1].norm_sqr() {
            unit(va)
        } else {
            unit(vb)
        }
    };
    let v_plus = vector_for(nu_plus, nu_minus);
    let v_minus = vector_for(nu_minus, nu_plus);
    let c = |v: [Complex64; 2]| v[0] * v[0] + v[1] * v[1];
    ToySpectrum {
        nu_plus,
        nu_minus,
        right_vectors: [v_plus, v_minus],
        left_vectors: [v_plus, v_minus],
        c_norms: [c(v_plus), c(v_minus)],
        at_exceptional_point: at_ep,
    }
}

/// Interaction taxonomy by the phase of the coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CouplingRegime {
    /// Real coupling: real parts repel, imaginary parts cross.
    RealCoupling,
    /// Imaginary coupling: imaginary parts repel, real parts cross.
    ImaginaryCoupling,
    /// Complex coupling: both parts repel.
    ComplexCoupling,
}

/// Classify the coupling regime of `gamma'`.
pub fn classify_regime(gamma_prime: Complex64, tol: f64) -> Result<CouplingRegime> {
    if !(tol > 0.0) {
        return Err(ToyModelError::Domain("tolerance must be positive".into()));
    }
    let mag = gamma_prime.norm();
    if mag == 0.0 {
        return Err(ToyModelError::Domain(
            "gamma' = 0 has no coupling regime".into(),
        ));
    }
    if gamma_prime.im.abs() <= tol * mag {
        Ok(CouplingRegime::RealCoupling)
    } else if gamma_prime.re.abs() <= tol * mag {
        Ok(CouplingRegime::ImaginaryCoupling)
    } else {
        Ok(CouplingRegime::ComplexCoupling)
    }
}

/// Real-part repulsion `|Re nu_+ - Re nu_-|`.
///
/// With `assume_im_equal` the caller asserts the paper's strong-coupling
/// regime `|Im gamma_11 - Im gamma_22| < 0.05 |gamma'|`, under which (for
/// real coupling) the gap equals
/// `sqrt((eps_1 - eps_2 + Re gamma_11 - Re gamma_22)^2 + 4 Re(gamma')^2)`.
pub fn gap(m: &ToyModel, assume_im_equal: bool) -> Result<f64> {
    if assume_im_equal {
        let im_diff = (m.gamma11.im - m.gamma22.im).abs();
        if im_diff >= 0.05 * m.gamma_prime.norm() {
            return Err(ToyModelError::AssumptionViolated(format!(
                "|Im gamma_11 - Im gamma_22| = {im_diff:.3e} vs 0.05 |gamma'| = {:.3e}",
                0.05 * m.gamma_prime.norm()
            )));
        }
    }
    let s = eigensystem(m);
    Ok((s.nu_plus.re - s.nu_minus.re).abs())
}

/// Toy-model parameters extracted from a swept avoided crossing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToyFit {
    pub e: Vec<f64>,
    /// `Re gamma_jj(e) = L_j(e)` for the two paired modes.
    pub re_self_energy: [Vec<f64>; 2],
    /// `Im gamma_jj(e) = -omega_j(e)/2`.
    pub im_self_energy: [Vec<f64>; 2],
    /// Constant coupling estimate `gap_min / 2`.
    pub gamma_prime_est: f64,
    /// rms of (observed - modeled) real gap over the fit window.
    pub residual: f64,
    /// Fitted linear diagonal difference `alpha (e - e_0)` behind the model
    /// gap `sqrt(alpha^2 (e - e_0)^2 + 4 gamma'^2)`.
    pub diag_slope: f64,
    pub diag_zero_e: f64,
    /// Window `[e_c - h, e_c + h]` the residual was evaluated on.
    pub window: (f64, f64),
}

/// Half-width of the default fit window around the crossing center.
pub const FIT_WINDOW_HALFWIDTH: f64 = 0.015;

/// Extract toy-model parameters from Lamb curves and the open trajectory
/// pair around a detected avoided crossing.
///
/// The coupling is fit as a constant, `gamma' = gap_min/2` (the corrected
/// gap formula at the center, where the real diagonal difference vanishes).
/// The diagonal difference is modeled as linear in `e`; its slope and zero
/// come from a least-squares fit of `sqrt(max(gap^2 - 4 gamma'^2, 0))` with
/// the sign flipping at the center. The residual is the rms misfit of the
/// modeled gap over the window.
pub fn fit_from_data(
    l1: &LambCurve,
    l2: &LambCurve,
    t1: &Trajectory,
    t2: &Trajectory,
    arc: &ArcSummary,
    window_halfwidth: f64,
) -> Result<ToyFit> {
    let n = l1.e.len();
    if l2.e.len() != n || t1.points.len() != n || t2.points.len() != n {
        return Err(ToyModelError::Spectrum(
            crate::spectrum::SpectrumError::GridMismatch,
        ));
    }
    if !t1.same_grid(t2) {
        return Err(ToyModelError::Spectrum(
            crate::spectrum::SpectrumError::GridMismatch,
        ));
    }
    let e = l1.e.clone();
    if !(arc.e_c >= e[0] && arc.e_c <= e[n - 1]) || !arc.gap_min.is_finite() {
        return Err(ToyModelError::NoArc(format!(
            "crossing center {} outside the grid [{}, {}]",
            arc.e_c,
            e[0],
            e[n - 1]
        )));
    }
    let gamma_prime_est = 0.5 * arc.gap_min;
    let lo = arc.e_c - window_halfwidth;
    let hi = arc.e_c + window_halfwidth;
    let idx: Vec<usize> = (0..n).filter(|&i| e[i] >= lo && e[i] <= hi).collect();
    if idx.len() < 3 {
        return Err(ToyModelError::NoArc(format!(
            "only {} grid points inside the fit window [{lo}, {hi}]",
            idx.len()
        )));
    }

    let observed: Vec<f64> = idx
        .iter()
        .map(|&i| (t1.points[i].resonance.mu() - t2.points[i].resonance.mu()).abs())
        .collect();
    // linearize: y = sign(e - e_c) sqrt(gap^2 - 4 gamma'^2) ~ alpha (e - e_0)
    let y: Vec<f64> = idx
        .iter()
        .zip(&observed)
        .map(|(&i, &g)| {
            let mag = (g * g - 4.0 * gamma_prime_est * gamma_prime_est).max(0.0).sqrt();
            mag * (e[i] - arc.e_c).signum()
        })
        .collect();
    let xs: Vec<f64> = idx.iter().map(|&i| e[i]).collect();
    let m = xs.len() as f64;
    let sx = xs.iter().sum::<f64>();
    let sy = y.iter().sum::<f64>();
    let sxx = xs.iter().map(|x| x * x).sum::<f64>();
    let sxy = xs.iter().zip(&y).map(|(x, v)| x * v).sum::<f64>();
    let denom = m * sxx - sx * sx;
    let (diag_slope, diag_zero_e) = if denom.abs() < 1e-30 {
        (0.0, arc.e_c)
    } else {
        let c1 = (m * sxy - sx * sy) / denom;
        let c0 = (sy - c1 * sx) / m;
        if c1.abs() < 1e-14 {
            (0.0, arc.e_c)
        } else {
            (c1, -c0 / c1)
        }
    };
    let mut sq_sum = 0.0;
    for (&x, &g_obs) in xs.iter().zip(&observed) {
        let d = diag_slope * (x - diag_zero_e);
        let modeled = (d * d + 4.0 * gamma_prime_est * gamma_prime_est).sqrt();
        sq_sum += (g_obs - modeled) * (g_obs - modeled);
    }
    let residual = (sq_sum / m).sqrt();

    let im1: Vec<f64> = t1.points.iter().map(|p| p.resonance.kr.im).collect();
    let im2: Vec<f64> = t2.points.iter().map(|p| p.resonance.kr.im).collect();
    Ok(ToyFit {
        e,
        re_self_energy: [l1.shift.clone(), l2.shift.clone()],
        im_self_energy: [im1, im2],
        gamma_prime_est,
        residual,
        diag_slope,
        diag_zero_e,
        window: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn uncoupled_hermitian_limit() {
        let m = ToyModel {
            eps1: 1.5,
            eps2: -0.5,
            gamma11: c(0.0, 0.0),
            gamma22: c(0.0, 0.0),
            gamma_prime: c(0.0, 0.0),
        };
        let s = eigensystem(&m);
        assert!((s.nu_plus - c(1.5, 0.0)).norm() < 1e-14);
        assert!((s.nu_minus - c(-0.5, 0.0)).norm() < 1e-14);
        assert!((s.right_vectors[0][0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((s.right_vectors[1][1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pure_coupling_gives_symmetric_pair() {
        let m = ToyModel {
            eps1: 0.0,
            eps2: 0.0,
            gamma11: c(0.0, 0.0),
            gamma22: c(0.0, 0.0),
            gamma_prime: c(1.0, 0.0),
        };
        let s = eigensystem(&m);
        assert!((s.nu_plus - c(1.0, 0.0)).norm() < 1e-14);
        assert!((s.nu_minus - c(-1.0, 0.0)).norm() < 1e-14);
        // eigenvectors (1, +-1)/sqrt(2) up to phase
        let v = s.right_vectors[0];
        assert!((v[0].norm() - v[1].norm()).abs() < 1e-14);
        let ratio = v[1] / v[0];
        assert!((ratio - c(1.0, 0.0)).norm() < 1e-12);
        let w = s.right_vectors[1];
        let ratio_w = w[1] / w[0];
        assert!((ratio_w + c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn trace_and_determinant_conserved() {
        let m = ToyModel {
            eps1: 5.42,
            eps2: 4.81,
            gamma11: c(-0.12, -0.03),
            gamma22: c(-0.09, -0.025),
            gamma_prime: c(0.02, 0.004),
        };
        let s = eigensystem(&m);
        assert!((s.nu_plus + s.nu_minus - m.trace()).norm() < 1e-12);
        assert!((s.nu_plus * s.nu_minus - m.det()).norm() < 1e-12);
    }

    #[test]
    fn bi_orthogonality_after_c_normalization() {
        let m = ToyModel {
            eps1: 1.0,
            eps2: 0.7,
            gamma11: c(-0.1, -0.05),
            gamma22: c(-0.02, -0.01),
            gamma_prime: c(0.08, 0.02),
        };
        let s = eigensystem(&m);
        let vp = s.c_normalized_right(0).unwrap();
        let vm = s.c_normalized_right(1).unwrap();
        let diag = vp[0] * vp[0] + vp[1] * vp[1];
        let off = vp[0] * vm[0] + vp[1] * vm[1];
        assert!((diag - c(1.0, 0.0)).norm() < 1e-10);
        assert!(off.norm() < 1e-10);
    }

    #[test]
    fn regime_taxonomy() {
        assert_eq!(
            classify_regime(c(0.3, 0.0), 1e-9).unwrap(),
            CouplingRegime::RealCoupling
        );
        assert_eq!(
            classify_regime(c(0.0, 0.3), 1e-9).unwrap(),
            CouplingRegime::ImaginaryCoupling
        );
        assert_eq!(
            classify_regime(c(0.2, 0.2), 1e-9).unwrap(),
            CouplingRegime::ComplexCoupling
        );
        assert!(classify_regime(c(0.0, 0.0), 1e-9).is_err());
    }

    #[test]
    fn gap_closed_forms() {
        // zero diagonal difference: gap = 2 g
        let m = ToyModel {
            eps1: 3.0,
            eps2: 3.0,
            gamma11: c(0.0, -0.02),
            gamma22: c(0.0, -0.02),
            gamma_prime: c(0.15, 0.0),
        };
        assert!((gap(&m, true).unwrap() - 0.3).abs() < 1e-12);
        // zero coupling: gap = |d|
        let m2 = ToyModel {
            eps1: 3.0,
            eps2: 2.4,
            gamma11: c(0.0, 0.0),
            gamma22: c(0.0, 0.0),
            gamma_prime: c(0.0, 0.0),
        };
        assert!((gap(&m2, false).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn assumption_violation_detected() {
        let m = ToyModel {
            eps1: 0.0,
            eps2: 0.0,
            gamma11: c(0.0, -0.5),
            gamma22: c(0.0, -0.1),
            gamma_prime: c(0.1, 0.0),
        };
        assert!(matches!(
            gap(&m, true),
            Err(ToyModelError::AssumptionViolated(_))
        ));
        assert!(gap(&m, false).is_ok());
    }

    #[test]
    fn c_norm_shrinks_toward_exceptional_point() {
        // EP at gamma' = i d/2 for d = eps1 - eps2 real, equal self-energies:
        // walk toward it and watch |c| fall monotonically
        let d = 1.0;
        let mut last = f64::INFINITY;
        for step in 1..=20 {
            let f = step as f64 / 20.0;
            let m = ToyModel {
                eps1: 0.5,
                eps2: -0.5,
                gamma11: c(0.0, 0.0),
                gamma22: c(0.0, 0.0),
                gamma_prime: Complex64::new(0.0, 0.5 * d * f),
            };
            let s = eigensystem(&m);
            let cmag = s.c_norms[0].norm();
            assert!(
                cmag < last + 1e-12,
                "|c| must fall monotonically: step {step}, {cmag} vs {last}"
            );
            last = cmag;
        }
        assert!(last < 0.05, "near the EP |c| should be tiny, got {last}");
    }
}

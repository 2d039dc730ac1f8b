//! Analytic circle solutions: the transcendental TM matching condition for
//! the open cavity and closed-form boundary data used to seed eccentricity
//! sweeps at `e = 0`.
//!
//! For angular order `m`, a TM resonance of the dielectric circle satisfies
//!
//! ```text
//! n J'_m(n kR) / J_m(n kR) = H^(1)'_m(kR) / H^(1)_m(kR)
//! ```
//!
//! and the closed billiard levels are the Bessel zeros `kR = j_{m,l}`.

use super::parity::ParityClass;
use super::{BemError, Resonance, Result};
use crate::geometry::BoundaryMesh;
use crate::linalg;
use crate::specfun::{self, BesselKind};
use num_complex::Complex64;

/// Angular dependence of a degenerate circle mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularFamily {
    Cosine,
    Sine,
    /// `exp(+i m theta)`.
    TravelingPlus,
    /// `exp(-i m theta)`.
    TravelingMinus,
}

impl AngularFamily {
    fn eval(&self, m: u32, theta: f64) -> Complex64 {
        let arg = f64::from(m) * theta;
        match self {
            AngularFamily::Cosine => Complex64::new(arg.cos(), 0.0),
            AngularFamily::Sine => Complex64::new(arg.sin(), 0.0),
            AngularFamily::TravelingPlus => Complex64::from_polar(1.0, arg),
            AngularFamily::TravelingMinus => Complex64::from_polar(1.0, -arg),
        }
    }

    fn parity(&self, m: u32) -> Option<ParityClass> {
        match self {
            AngularFamily::Cosine => Some(ParityClass::of_angular(m, true)),
            AngularFamily::Sine => Some(ParityClass::of_angular(m, false)),
            _ => None,
        }
    }
}

/// Matching-condition value in cleared-denominator form together with the
/// magnitudes needed for a scale-free residual.
fn matching(n: f64, m: u32, kr: Complex64) -> Result<(Complex64, f64)> {
    let zin = n * kr;
    let j = specfun::cyl_bessel_eval(BesselKind::J, m, zin)?;
    let (h, dh) = specfun::hankel1(m, kr)?;
    let f = n * j.derivative * h - j.value * dh;
    let scale = (n * j.derivative * h).norm() + (j.value * dh).norm();
    Ok((f, scale))
}

fn matching_derivative(n: f64, m: u32, kr: Complex64) -> Result<Complex64> {
    // f' = n^2 J'' H - J H'' with the second derivatives from the Bessel ODE.
    let zin = n * kr;
    let j = specfun::cyl_bessel_eval(BesselKind::J, m, zin)?;
    let (h, dh) = specfun::hankel1(m, kr)?;
    let m2 = f64::from(m) * f64::from(m);
    let jpp = -j.derivative / zin - (1.0 - m2 / (zin * zin)) * j.value;
    let hpp = -dh / kr - (1.0 - m2 / (kr * kr)) * h;
    Ok(n * n * jpp * h - j.value * hpp)
}

/// The `branch_index`-th TM resonance of the dielectric circle with
/// refractive index `n` and angular order `m`, as dimensionless `kR`.
pub fn circle_resonance(n: f64, m: u32, branch_index: u32) -> Result<Complex64> {
    if !(n > 1.0) {
        return Err(BemError::Domain(format!("refractive index {n} must exceed 1")));
    }
    if branch_index == 0 {
        return Err(BemError::Domain("branch index starts at 1".into()));
    }
    let seed_re = specfun::bessel_j_zero(m, branch_index)? / n;
    let mut kr = Complex64::new(seed_re, -0.02);
    let mut converged = false;
    for _ in 0..100 {
        let (f, _) = matching(n, m, kr)?;
        let df = matching_derivative(n, m, kr)?;
        if df.norm_sqr() == 0.0 {
            break;
        }
        let step = f / df;
        kr -= step;
        if step.norm() < 1e-13 * (1.0 + kr.norm()) {
            converged = true;
            break;
        }
    }
    let (f, scale) = matching(n, m, kr)?;
    let residual = f.norm() / scale.max(1e-300);
    if !converged || residual > 1e-10 {
        return Err(BemError::Convergence(format!(
            "circle matching residual {residual:.2e} at kR = {kr} (m = {m}, branch {branch_index})"
        )));
    }
    Ok(kr)
}

/// Scale-free residual of the matching condition at `kr`; exposed so callers
/// can report or re-verify oracle roots.
pub fn circle_matching_residual(n: f64, m: u32, kr: Complex64) -> Result<f64> {
    let (f, scale) = matching(n, m, kr)?;
    Ok(f.norm() / scale.max(1e-300))
}

fn node_angle(mesh: &BoundaryMesh, i: usize) -> f64 {
    let p = mesh.nodes[i].position;
    p[1].atan2(p[0])
}

/// Synthetic open-circle resonance used to seed sweeps at `e = 0`, where the
/// two members of each degenerate pair are not separable by the solver. The
/// boundary data is the analytic mode `J_m(n k r) x angular` evaluated at the
/// mesh nodes.
pub fn circle_open_seed(
    mesh: &BoundaryMesh,
    n: f64,
    m: u32,
    branch_index: u32,
    family: AngularFamily,
) -> Result<Resonance> {
    if mesh.shape.eccentricity != 0.0 {
        return Err(BemError::Domain(
            "circle seed requires an e = 0 mesh".into(),
        ));
    }
    let kr = circle_resonance(n, m, branch_index)?;
    let k = kr / mesh.shape.scale;
    let zin = n * kr;
    let j = specfun::cyl_bessel_eval(BesselKind::J, m, zin)?;
    let dpsi_amp = n * k * j.derivative;
    let mut psi = Vec::with_capacity(mesh.len());
    let mut dpsi = Vec::with_capacity(mesh.len());
    for i in 0..mesh.len() {
        let ang = family.eval(m, node_angle(mesh, i));
        psi.push(j.value * ang);
        dpsi.push(dpsi_amp * ang);
    }
    let mut joint = psi.clone();
    joint.extend_from_slice(&dpsi);
    linalg::apply_phase_convention(&mut joint);
    let nn = mesh.len();
    Ok(Resonance {
        kr,
        boundary_psi: joint[..nn].to_vec(),
        boundary_dpsi: joint[nn..].to_vec(),
        sigma_min: 0.0,
        sigma_median: 1.0,
        parity: family.parity(m),
    })
}

/// Synthetic closed-circle level (`kR = j_{m,l}`) for seeding billiard
/// sweeps; the boundary unknown is the normal derivative alone.
pub fn circle_closed_seed(
    mesh: &BoundaryMesh,
    m: u32,
    radial_index: u32,
    family: AngularFamily,
) -> Result<Resonance> {
    if mesh.shape.eccentricity != 0.0 {
        return Err(BemError::Domain(
            "circle seed requires an e = 0 mesh".into(),
        ));
    }
    let kr = Complex64::new(specfun::bessel_j_zero(m, radial_index)?, 0.0);
    let mut dpsi: Vec<Complex64> = (0..mesh.len())
        .map(|i| family.eval(m, node_angle(mesh, i)))
        .collect();
    linalg::apply_phase_convention(&mut dpsi);
    Ok(Resonance {
        kr,
        boundary_psi: vec![Complex64::new(0.0, 0.0); mesh.len()],
        boundary_dpsi: dpsi,
        sigma_min: 0.0,
        sigma_median: 1.0,
        parity: family.parity(m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_satisfy_matching_and_decay() {
        for (m, branch) in [(0u32, 1u32), (3, 2), (7, 3)] {
            let kr = circle_resonance(3.3, m, branch).unwrap();
            assert!(kr.im < 0.0, "Im(kR) = {} for m={m}", kr.im);
            let resid = circle_matching_residual(3.3, m, kr).unwrap();
            assert!(resid < 1e-10, "residual {resid:.2e}");
        }
    }

    #[test]
    fn branches_are_ordered_in_re() {
        let r1 = circle_resonance(3.3, 5, 1).unwrap();
        let r2 = circle_resonance(3.3, 5, 2).unwrap();
        let r3 = circle_resonance(3.3, 5, 3).unwrap();
        assert!(r1.re < r2.re && r2.re < r3.re);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(circle_resonance(0.9, 3, 1).is_err());
        assert!(circle_resonance(3.3, 3, 0).is_err());
    }
}

//! Cylinder Bessel and Hankel functions of integer order for complex
//! arguments, plus real Bessel zeros.
//!
//! These are the kernels of the boundary-element Green's functions and of the
//! analytic circle oracles. Algorithm layout:
//!
//! * ascending power series for `|z| <= 12` (orders 0 and 1),
//! * Hankel asymptotic expansion for `|z| > 12` (orders 0 and 1),
//! * Miller downward recurrence for `J_m`, `m >= 2`, normalized against the
//!   directly computed order-0/1 values,
//! * upward recurrence for `Y_m`, `m >= 2` (the dominant direction),
//! * `H_m^(1) = J_m + iY_m` in the closed upper half-plane; in the lower
//!   half-plane via `H^(1)_m(z) = conj(J_m(z*) - i Y_m(z*))`, which avoids
//!   the exponential cancellation of the direct sum there.
//!
//! Everything is pure and stateless; accuracy is checked in the test suite
//! against an independent 30-digit series oracle rather than asserted here.

use num_complex::Complex64;
use thiserror::Error;

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Series/asymptotic switchover radius for orders 0 and 1.
const SERIES_CUT: f64 = 12.0;

/// Largest argument magnitude accepted.
const MAX_ABS_Z: f64 = 1.0e4;

/// Largest order accepted.
pub const MAX_ORDER: u32 = 200;

#[derive(Debug, Error)]
pub enum SpecFunError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, SpecFunError>;

/// Cylinder function family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y,
}

/// A cylinder function evaluated together with its argument derivative.
#[derive(Debug, Clone, Copy)]
pub struct CylinderEval {
    pub order: u32,
    pub argument: Complex64,
    pub value: Complex64,
    pub derivative: Complex64,
}

/// `J_0, J_1, Y_0, Y_1` evaluated at one argument.
///
/// The boundary-element kernels need all four at every collocation distance,
/// so they are computed in one pass sharing the power series terms.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Cyl01 {
    pub j0: Complex64,
    pub j1: Complex64,
    pub y0: Complex64,
    pub y1: Complex64,
}

impl Cyl01 {
    #[inline]
    pub fn h0(&self) -> Complex64 {
        self.j0 + Complex64::i() * self.y0
    }

    #[inline]
    pub fn h1(&self) -> Complex64 {
        self.j1 + Complex64::i() * self.y1
    }
}

fn check_argument(z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(SpecFunError::Domain("non-finite argument".into()));
    }
    if z.norm() >= MAX_ABS_Z {
        return Err(SpecFunError::Domain(format!(
            "|z| = {:.3e} outside supported range |z| < {MAX_ABS_Z:.0e}",
            z.norm()
        )));
    }
    Ok(())
}

fn check_order(order: u32) -> Result<()> {
    if order > MAX_ORDER {
        return Err(SpecFunError::Domain(format!(
            "order {order} exceeds maximum {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// Power series for `J_0, J_1` and the log-series for `Y_0, Y_1`.
///
/// Valid (and used) only for `|z| <= SERIES_CUT`; loses at most ~5 of the 16
/// carried digits to alternating-series cancellation at the cut.
fn cyl01_series(z: Complex64) -> Cyl01 {
    let q = 0.25 * z * z; // (z/2)^2
    let zh = 0.5 * z;

    // J0 = sum_k (-q)^k/(k!)^2, J1 = (z/2) sum_k (-q)^k/(k!(k+1)!)
    // Y-series companions carry harmonic-number weights.
    let mut term0 = Complex64::new(1.0, 0.0);
    let mut term1 = Complex64::new(1.0, 0.0);
    let mut j0 = term0;
    let mut j1s = term1;
    let mut h = 0.0f64; // H_k
    let mut y0s = Complex64::new(0.0, 0.0); // sum (-1)^k H_k q^k/(k!)^2
    let mut y1s = Complex64::new(1.0, 0.0); // sum (-1)^k (H_k+H_{k+1}) q^k/(k!(k+1)!)
    for k in 1..=40u32 {
        let kf = f64::from(k);
        term0 *= -q / (kf * kf);
        term1 *= -q / (kf * (kf + 1.0));
        h += 1.0 / kf;
        j0 += term0;
        j1s += term1;
        y0s += term0 * h;
        y1s += term1 * (2.0 * h + 1.0 / (kf + 1.0));
        if term0.norm_sqr() < 1e-36 * j0.norm_sqr() && k > 4 {
            break;
        }
    }
    let j1 = zh * j1s;
    let lg = (0.5 * z).ln() + EULER_GAMMA;
    let y0 = std::f64::consts::FRAC_2_PI * (lg * j0 - y0s);
    let y1 = std::f64::consts::FRAC_2_PI * (lg * j1 - 1.0 / z) - zh / std::f64::consts::PI * y1s;
    Cyl01 { j0, j1, y0, y1 }
}

/// Hankel asymptotic expansion of `H^(1)_nu(z)` for `nu` in {0, 1}.
///
/// Truncated at the smallest term; usable for `|z| > SERIES_CUT` where the
/// optimal-truncation error is below ~4e-11 and falls off rapidly.
fn hankel1_asym(nu: u32, z: Complex64) -> Complex64 {
    let mu = 4.0 * f64::from(nu * nu);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev_mag = f64::INFINITY;
    for k in 0..40u32 {
        let kf = f64::from(k);
        let num = mu - (2.0 * kf + 1.0) * (2.0 * kf + 1.0);
        term *= Complex64::i() * num / (8.0 * (kf + 1.0)) / z;
        let mag = term.norm_sqr();
        if mag >= prev_mag {
            break; // asymptotic tail started growing
        }
        sum += term;
        prev_mag = mag;
        if mag < 1e-34 * sum.norm_sqr() {
            break;
        }
    }
    let phase = z - (f64::from(nu) * 0.5 + 0.25) * std::f64::consts::PI;
    let amp = (Complex64::new(std::f64::consts::FRAC_2_PI, 0.0) / z).sqrt();
    amp * (Complex64::i() * phase).exp() * sum
}

/// `J, Y` at orders 0 and 1 via the asymptotic Hankel pair.
fn cyl01_asym(z: Complex64) -> Cyl01 {
    // H^(2)_nu(z) = conj(H^(1)_nu(conj z)) for real order.
    let h1_0 = hankel1_asym(0, z);
    let h1_1 = hankel1_asym(1, z);
    let h2_0 = hankel1_asym(0, z.conj()).conj();
    let h2_1 = hankel1_asym(1, z.conj()).conj();
    let half = Complex64::new(0.5, 0.0);
    let half_i = Complex64::new(0.0, 0.5);
    Cyl01 {
        j0: half * (h1_0 + h2_0),
        j1: half * (h1_1 + h2_1),
        y0: -half_i * (h1_0 - h2_0),
        y1: -half_i * (h1_1 - h2_1),
    }
}

#[inline]
pub(crate) fn cyl01(z: Complex64) -> Cyl01 {
    if z.norm_sqr() <= SERIES_CUT * SERIES_CUT {
        cyl01_series(z)
    } else {
        cyl01_asym(z)
    }
}

/// `J_m(z)` for all `m` in `0..=mmax` by Miller's downward recurrence.
///
/// The trial sequence is normalized against whichever of the directly
/// computed `J_0`, `J_1` has the larger magnitude (they cannot both vanish).
fn bessel_j_seq(mmax: u32, z: Complex64, base: &Cyl01) -> Vec<Complex64> {
    if mmax == 0 {
        return vec![base.j0];
    }
    if mmax == 1 {
        return vec![base.j0, base.j1];
    }
    let start = mmax + 16 + (1.2 * z.norm()) as u32;
    // invariant entering iteration k: fk = f_{k+1}, fk1 = f_{k+2}
    let mut fk1 = Complex64::new(0.0, 0.0);
    let mut fk = Complex64::new(1e-280, 0.0);
    let mut out = vec![Complex64::new(0.0, 0.0); mmax as usize + 1];
    for k in (0..start).rev() {
        let fkm1 = 2.0 * f64::from(k + 1) / z * fk - fk1;
        fk1 = fk;
        fk = fkm1; // now fk = f_k
        if k <= mmax {
            out[k as usize] = fk;
        }
        // keep trial magnitudes representable
        if fk.norm_sqr() > 1e120 {
            let scale = 1e-60;
            fk *= scale;
            fk1 *= scale;
            for v in out.iter_mut() {
                *v *= scale;
            }
        }
    }
    let ratio = if base.j0.norm_sqr() >= base.j1.norm_sqr() {
        base.j0 / out[0]
    } else {
        base.j1 / out[1]
    };
    for v in out.iter_mut() {
        *v *= ratio;
    }
    out
}

/// `Y_m(z)` for all `m` in `0..=mmax` by upward recurrence (dominant
/// direction, hence stable).
fn bessel_y_seq(mmax: u32, z: Complex64, base: &Cyl01) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(mmax as usize + 1);
    out.push(base.y0);
    if mmax >= 1 {
        out.push(base.y1);
    }
    for m in 1..mmax {
        let next = 2.0 * f64::from(m) / z * out[m as usize] - out[m as usize - 1];
        out.push(next);
    }
    out
}

fn j_and_y(order: u32, z: Complex64) -> (Complex64, Complex64) {
    let base = cyl01(z);
    let j = bessel_j_seq(order, z, &base)[order as usize];
    let y = bessel_y_seq(order, z, &base)[order as usize];
    (j, y)
}

/// Cylinder function of the first (`J`) or second (`Y`) kind at integer
/// order for a complex argument.
pub fn cyl_bessel(kind: BesselKind, order: u32, z: Complex64) -> Result<Complex64> {
    Ok(cyl_bessel_eval(kind, order, z)?.value)
}

/// Like [`cyl_bessel`] but also returns the argument derivative.
pub fn cyl_bessel_eval(kind: BesselKind, order: u32, z: Complex64) -> Result<CylinderEval> {
    check_order(order)?;
    check_argument(z)?;
    if z.norm_sqr() == 0.0 {
        return match kind {
            BesselKind::J => Ok(CylinderEval {
                order,
                argument: z,
                value: Complex64::new(f64::from(order == 0), 0.0),
                // J0' = -J1 = 0 at the origin; J1'(0) = 1/2; higher orders 0.
                derivative: Complex64::new(if order == 1 { 0.5 } else { 0.0 }, 0.0),
            }),
            BesselKind::Y => Err(SpecFunError::Domain("Y_m is singular at z = 0".into())),
        };
    }
    let base = cyl01(z);
    let seq = match kind {
        BesselKind::J => bessel_j_seq(order + 1, z, &base),
        BesselKind::Y => bessel_y_seq(order + 1, z, &base),
    };
    let value = seq[order as usize];
    let derivative = if order == 0 {
        -seq[1]
    } else {
        seq[order as usize - 1] - f64::from(order) / z * value
    };
    if !value.is_finite() || !derivative.is_finite() {
        return Err(SpecFunError::Overflow(format!(
            "cylinder function overflow at order {order}, z = {z}"
        )));
    }
    Ok(CylinderEval {
        order,
        argument: z,
        value,
        derivative,
    })
}

/// Outgoing Hankel function `H^(1)_m(z)` and its argument derivative.
pub fn hankel1(order: u32, z: Complex64) -> Result<(Complex64, Complex64)> {
    check_order(order)?;
    check_argument(z)?;
    if z.norm_sqr() == 0.0 {
        return Err(SpecFunError::Domain("H^(1)_m is singular at z = 0".into()));
    }
    if z.im < -50.0 {
        return Err(SpecFunError::Domain(format!(
            "Im z = {} below supported window Im z >= -50",
            z.im
        )));
    }
    let h = |m: u32, w: Complex64| -> Complex64 {
        if w.im >= 0.0 {
            let (j, y) = j_and_y(m, w);
            j + Complex64::i() * y
        } else {
            // H^(1)(z) = conj(H^(2)(z*)) = conj(J(z*) - i Y(z*)); in the upper
            // half-plane that difference is the dominant combination, so no
            // cancellation occurs.
            let (j, y) = j_and_y(m, w.conj());
            (j - Complex64::i() * y).conj()
        }
    };
    let value = h(order, z);
    let prev = if order == 0 { h(1, z) } else { h(order - 1, z) };
    let derivative = if order == 0 {
        -prev
    } else {
        prev - f64::from(order) / z * value
    };
    if !value.is_finite() || !derivative.is_finite() {
        return Err(SpecFunError::Overflow(format!(
            "H^(1)_{order} overflow at z = {z}"
        )));
    }
    Ok((value, derivative))
}

fn bessel_j_real(order: u32, x: f64) -> f64 {
    let z = Complex64::new(x, 0.0);
    let base = cyl01(z);
    bessel_j_seq(order, z, &base)[order as usize].re
}

fn bessel_j_real_deriv(order: u32, x: f64) -> f64 {
    let z = Complex64::new(x, 0.0);
    let base = cyl01(z);
    let seq = bessel_j_seq(order + 1, z, &base);
    if order == 0 {
        -seq[1].re
    } else {
        seq[order as usize - 1].re - f64::from(order) / x * seq[order as usize].re
    }
}

/// The `index`-th positive zero `j_{order,index}` of `J_order`.
pub fn bessel_j_zero(order: u32, index: u32) -> Result<f64> {
    check_order(order)?;
    if index == 0 || index > 50 {
        return Err(SpecFunError::Domain(format!(
            "zero index {index} outside 1..=50"
        )));
    }
    // J_m > 0 on (0, j_{m,1}); scan forward with a step that cannot skip a
    // sign-change pair (zero spacing exceeds 3.1).
    let m = f64::from(order);
    let mut x = if order == 0 { 0.5 } else { m + 1e-3 };
    let step = 1.2;
    let mut count = 0u32;
    let mut fx = bessel_j_real(order, x);
    let mut bracket = None;
    for _ in 0..20_000 {
        let x_next = x + step;
        let f_next = bessel_j_real(order, x_next);
        if fx == 0.0 {
            count += 1;
            if count == index {
                return Ok(x);
            }
        } else if fx.signum() != f_next.signum() {
            count += 1;
            if count == index {
                bracket = Some((x, x_next));
                break;
            }
        }
        x = x_next;
        fx = f_next;
    }
    let (mut lo, mut hi) =
        bracket.ok_or_else(|| SpecFunError::Convergence("zero bracketing failed".into()))?;
    let mut flo = bessel_j_real(order, lo);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let fm = bessel_j_real(order, mid);
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if flo.signum() == fm.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi.max(1.0) {
            break;
        }
    }
    let mut root = 0.5 * (lo + hi);
    for _ in 0..3 {
        let f = bessel_j_real(order, root);
        let df = bessel_j_real_deriv(order, root);
        if df != 0.0 {
            root -= f / df;
        }
    }
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    #[test]
    fn dbg_miller() {
        let z = Complex64::new(1.0, 0.0);
        let base = cyl01(z);
        println!("j0={:?} j1={:?}", base.j0, base.j1);
        let seq = bessel_j_seq(2, z, &base);
        println!("seq = {:?}", seq);
    }

    #[test]
    fn j_at_origin() {
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(
            cyl_bessel(BesselKind::J, 0, z).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(
            cyl_bessel(BesselKind::J, 3, z).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn y_at_origin_is_domain_error() {
        let z = Complex64::new(0.0, 0.0);
        assert!(matches!(
            cyl_bessel(BesselKind::Y, 0, z),
            Err(SpecFunError::Domain(_))
        ));
        assert!(matches!(hankel1(0, z), Err(SpecFunError::Domain(_))));
    }

    #[test]
    fn hankel_real_part_is_j_on_positive_axis() {
        for &x in &[0.7, 3.3, 9.1, 17.0, 44.0] {
            let z = Complex64::new(x, 0.0);
            let (h, _) = hankel1(0, z).unwrap();
            let j = cyl_bessel(BesselKind::J, 0, z).unwrap();
            assert!((h.re - j.re).abs() < 1e-10 * (1.0 + j.re.abs()), "x = {x}");
        }
    }

    #[test]
    fn h0_derivative_is_minus_h1() {
        let z = Complex64::new(2.3, 0.4);
        let (_, d0) = hankel1(0, z).unwrap();
        let (h1v, _) = hankel1(1, z).unwrap();
        assert!((d0 + h1v).norm() < 1e-12 * h1v.norm());
    }

    #[test]
    fn series_asymptotic_agree_at_cut() {
        for &arg in &[0.0, 0.4, -0.4, 1.2, -1.2] {
            let z = Complex64::from_polar(SERIES_CUT, arg);
            let s = cyl01_series(z);
            let a = cyl01_asym(z);
            for (u, v) in [(s.j0, a.j0), (s.j1, a.j1), (s.y0, a.y0), (s.y1, a.y1)] {
                assert!(
                    (u - v).norm() < 2e-10 * v.norm().max(1e-3),
                    "arg {arg}: {u} vs {v}"
                );
            }
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let z = Complex64::new(4.2, 1.7);
        for m in [0u32, 1, 5, 11] {
            let a = cyl_bessel(BesselKind::J, m, z.conj()).unwrap();
            let b = cyl_bessel(BesselKind::J, m, z).unwrap().conj();
            assert!((a - b).norm() <= 1e-12 * b.norm());
        }
    }

    #[test]
    fn zeros_increase_and_annihilate_j() {
        let mut prev = 0.0;
        for idx in 1..=6 {
            let z = bessel_j_zero(4, idx).unwrap();
            assert!(z > prev);
            prev = z;
            let val = bessel_j_real(4, z);
            assert!(val.abs() < 1e-11, "J_4({z}) = {val}");
        }
    }

    #[test]
    fn first_zero_of_j0() {
        let z = bessel_j_zero(0, 1).unwrap();
        assert!((z - 2.404_825_557_695_773).abs() < 1e-10);
    }

    #[test]
    fn order_and_argument_limits() {
        assert!(matches!(
            cyl_bessel(BesselKind::J, MAX_ORDER + 1, Complex64::new(1.0, 0.0)),
            Err(SpecFunError::Domain(_))
        ));
        assert!(matches!(
            cyl_bessel(BesselKind::J, 0, Complex64::new(2e4, 0.0)),
            Err(SpecFunError::Domain(_))
        ));
    }
}

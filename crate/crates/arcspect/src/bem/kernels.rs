//! Helmholtz layer-potential kernels on a closed boundary, split for the
//! trigonometric product quadrature of the periodic logarithmic singularity.
//!
//! With the boundary parametrized by scaled arclength `t in [0, 2pi)` (speed
//! `L/2pi`), each kernel is written as
//!
//! ```text
//! K(t, tau) = K1(t, tau) * ln(4 sin^2((t - tau)/2)) + K2(t, tau)
//! ```
//!
//! with `K1`, `K2` smooth and periodic. The log factor is integrated exactly
//! against trigonometric interpolants (Martensen–Kussmaul weights), the
//! smooth remainder by the plain midpoint rule, which is spectrally accurate
//! for periodic integrands. The diagonal values of `K2` come from the
//! small-argument expansions of `H_0^(1)` and `H_1^(1)`:  the logarithmic
//! kernel leaves `i/4 - (1/2pi)(gamma + ln(k L / 4pi))` on the single layer,
//! and the double layer tends to `-kappa/(4pi)` (local curvature).

use crate::specfun::{self, Cyl01};
use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Quadrature weights for `f -> \int_0^{2pi} ln(4 sin^2((t-tau)/2)) f(tau) dtau`
/// on `n` equispaced nodes; `weights[m]` applies to node offset `m = i - j mod n`.
pub fn log_weights(n: usize) -> Vec<f64> {
    assert!(n % 2 == 0 && n >= 4);
    let half = n / 2;
    let mut weights = Vec::with_capacity(n);
    for m in 0..n {
        let mut sum = 0.0;
        for p in 1..half {
            sum += (2.0 * PI * (p * m) as f64 / n as f64).cos() / p as f64;
        }
        let endpoint = if m % 2 == 0 { 1.0 } else { -1.0 };
        weights.push(-4.0 * PI / n as f64 * sum - 4.0 * PI / (n as f64 * n as f64) * endpoint);
    }
    weights
}

/// `ln(4 sin^2(pi m / n))` for offsets `m = 1..n-1`; index 0 is unused.
pub fn log_diag_terms(n: usize) -> Vec<f64> {
    (0..n)
        .map(|m| {
            if m == 0 {
                0.0
            } else {
                let s = (PI * m as f64 / n as f64).sin();
                (4.0 * s * s).ln()
            }
        })
        .collect()
}

/// Single- and double-layer kernel split values for one wavenumber at one
/// off-diagonal pair. All values are densities with respect to the scaled
/// arclength parameter `tau` (factor `L/2pi` included).
#[derive(Clone, Copy)]
pub struct KernelSplit {
    pub single_log: Complex64,
    pub single_smooth: Complex64,
    pub double_log: Complex64,
    pub double_smooth: Complex64,
}

/// Evaluate the kernel split at an off-diagonal pair.
///
/// `k` is the wavenumber in mesh units, `speed = L/2pi`, `log_term` is
/// `ln(4 sin^2((t_i - t_j)/2))`.
pub fn split_offdiag(
    k: Complex64,
    cos_factor: f64,
    speed: f64,
    log_term: f64,
    cyl: &Cyl01,
) -> KernelSplit {
    let quarter_i = Complex64::new(0.0, 0.25);
    let single_full = speed * quarter_i * cyl.h0();
    let single_log = -speed / (4.0 * PI) * cyl.j0;
    let single_smooth = single_full - single_log * log_term;

    let dir = cos_factor;
    let double_full = -speed * quarter_i * k * cyl.h1() * dir;
    let double_log = speed / (4.0 * PI) * k * cyl.j1 * dir;
    let double_smooth = double_full - double_log * log_term;

    KernelSplit {
        single_log,
        single_smooth,
        double_log,
        double_smooth,
    }
}

/// Diagonal (self) kernel values.
pub fn split_diag(k: Complex64, speed: f64, curvature: f64) -> KernelSplit {
    let single_log = Complex64::new(-speed / (4.0 * PI), 0.0);
    let single_smooth = speed
        * (Complex64::new(0.0, 0.25)
            - (EULER_GAMMA + (0.5 * k * speed).ln()) / (2.0 * PI));
    KernelSplit {
        single_log,
        single_smooth,
        double_log: Complex64::new(0.0, 0.0),
        double_smooth: Complex64::new(-speed * curvature / (4.0 * PI), 0.0),
    }
}

/// Free-space outgoing Green's function `(i/4) H_0^(1)(k rho)` and its
/// normal-direction derivative kernel, for field evaluation away from the
/// boundary.
pub fn green_pair(k: Complex64, rho: f64, cos_factor: f64) -> (Complex64, Complex64) {
    let cyl = specfun::cyl01(k * rho);
    let quarter_i = Complex64::new(0.0, 0.25);
    let g = quarter_i * cyl.h0();
    let dg = -quarter_i * k * cyl.h1() * cos_factor;
    (g, dg)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The weights must integrate `ln(4 sin^2((t-tau)/2)) e^{i m tau}`
    /// to `-(2pi/|m|) e^{i m t}` exactly for `|m| < n/2`.
    #[test]
    fn log_weights_integrate_trig_modes() {
        let n = 32;
        let w = log_weights(n);
        for m in 1..(n / 2) {
            for i in [0usize, 5, 17] {
                let t_i = 2.0 * PI * (i as f64 + 0.5) / n as f64;
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    let t_j = 2.0 * PI * (j as f64 + 0.5) / n as f64;
                    let offset = (i + n - j) % n;
                    acc += w[offset] * Complex64::from_polar(1.0, m as f64 * t_j);
                }
                let exact = -(2.0 * PI / m as f64) * Complex64::from_polar(1.0, m as f64 * t_i);
                assert!(
                    (acc - exact).norm() < 1e-11,
                    "m = {m}, i = {i}: {acc} vs {exact}"
                );
            }
        }
    }

    /// Constant densities integrate to zero against the periodic log kernel.
    #[test]
    fn log_weights_annihilate_constants() {
        let n = 64;
        let w = log_weights(n);
        let total: f64 = w.iter().sum();
        assert!(total.abs() < 1e-11, "sum = {total}");
    }

    /// Compare against a brute-force integration of the log kernel times a
    /// smooth non-polynomial density.
    #[test]
    fn log_weights_match_brute_force() {
        let n = 64;
        let w = log_weights(n);
        let f = |t: f64| (2.0 * t.cos() + 0.3).exp();
        let i = 11usize;
        let t_i = 2.0 * PI * (i as f64 + 0.5) / n as f64;
        let mut rule = 0.0;
        for j in 0..n {
            let t_j = 2.0 * PI * (j as f64 + 0.5) / n as f64;
            rule += w[(i + n - j) % n] * f(t_j);
        }
        // brute force: singularity-subtracted fine midpoint rule
        let fine = 400_000;
        let mut exact = 0.0;
        for q in 0..fine {
            let tau = 2.0 * PI * (q as f64 + 0.5) / fine as f64;
            let d = 0.5 * (t_i - tau);
            let val = (4.0 * d.sin() * d.sin()).max(1e-300).ln();
            exact += val * f(tau);
        }
        exact *= 2.0 * PI / fine as f64;
        assert!((rule - exact).abs() < 1e-5, "{rule} vs {exact}");
    }
}

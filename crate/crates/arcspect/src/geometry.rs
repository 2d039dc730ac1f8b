//! Elliptical boundary parametrization and equal-arclength discretization.
//!
//! The deformation convention is constant area: for eccentricity `e` and
//! scale `R`, the semi-axes are `a = R (1-e^2)^(-1/4)` and
//! `b = R (1-e^2)^(1/4)`, so `a*b = R^2` and `e = sqrt(1-(b/a)^2)`. All
//! lengths are reported in units of `R`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

pub const MAX_ECCENTRICITY: f64 = 0.95;
pub const MIN_BOUNDARY_NODES: usize = 64;

/// An ellipse with the constant-area scaling convention.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EllipseShape {
    pub eccentricity: f64,
    pub scale: f64,
    pub semi_major: f64,
    pub semi_minor: f64,
}

/// Construct an ellipse from eccentricity and scale.
pub fn make_ellipse(eccentricity: f64, scale: f64) -> Result<EllipseShape> {
    if !(0.0..=MAX_ECCENTRICITY).contains(&eccentricity) {
        return Err(GeometryError::Domain(format!(
            "eccentricity {eccentricity} outside [0, {MAX_ECCENTRICITY}]"
        )));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(GeometryError::Domain(format!(
            "scale {scale} must be positive and finite"
        )));
    }
    let ratio = (1.0 - eccentricity * eccentricity).powf(0.25);
    Ok(EllipseShape {
        eccentricity,
        scale,
        semi_major: scale / ratio,
        semi_minor: scale * ratio,
    })
}

impl EllipseShape {
    /// Position on the boundary at elliptic parameter `t` (not arclength).
    #[inline]
    pub fn position(&self, t: f64) -> [f64; 2] {
        [self.semi_major * t.cos(), self.semi_minor * t.sin()]
    }

    /// `|d position / dt|`.
    #[inline]
    pub fn speed(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        (self.semi_major * self.semi_major * s * s + self.semi_minor * self.semi_minor * c * c)
            .sqrt()
    }

    /// Outward unit normal at parameter `t`.
    #[inline]
    pub fn normal(&self, t: f64) -> [f64; 2] {
        let (s, c) = t.sin_cos();
        let nx = self.semi_minor * c;
        let ny = self.semi_major * s;
        let norm = (nx * nx + ny * ny).sqrt();
        [nx / norm, ny / norm]
    }

    /// Curvature at parameter `t`.
    #[inline]
    pub fn curvature(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        let g2 = self.semi_major * self.semi_major * s * s
            + self.semi_minor * self.semi_minor * c * c;
        self.semi_major * self.semi_minor / g2.powf(1.5)
    }

    /// Signed point classification: > 0 outside, < 0 inside.
    #[inline]
    pub fn level(&self, x: f64, y: f64) -> f64 {
        let u = x / self.semi_major;
        let v = y / self.semi_minor;
        u * u + v * v - 1.0
    }

    /// Approximate signed distance from `(x, y)` to the boundary
    /// (exact near the boundary to first order, which is all the masking
    /// logic needs).
    pub fn boundary_distance(&self, x: f64, y: f64) -> f64 {
        let u = x / self.semi_major;
        let v = y / self.semi_minor;
        let rho = (u * u + v * v).sqrt();
        if rho == 0.0 {
            return -self.semi_minor;
        }
        let gx = u / self.semi_major;
        let gy = v / self.semi_minor;
        let grad = (gx * gx + gy * gy).sqrt();
        (rho - 1.0) * rho / grad
    }

    /// Perimeter via adaptive quadrature of the speed function.
    pub fn perimeter(&self) -> f64 {
        // quarter ellipse suffices by symmetry
        4.0 * adaptive_simpson(
            &|t| self.speed(t),
            0.0,
            std::f64::consts::FRAC_PI_2,
            1e-13,
            24,
        )
    }

    /// Arclength from `t = 0` to `t`.
    pub fn arclength(&self, t: f64) -> f64 {
        adaptive_simpson(&|u| self.speed(u), 0.0, t, 1e-13, 26)
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, depth: u32) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, b, fa, fm, fb);
    let tol = rel_tol * whole.abs().max(1e-300);
    adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth)
}

/// One collocation node of a boundary mesh.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundaryNode {
    pub position: [f64; 2],
    pub outward_normal: [f64; 2],
    pub curvature: f64,
    /// Arclength weight of the element the node sits in the middle of.
    pub arclength_weight: f64,
    /// Cumulative arclength of the node (element midpoint).
    pub arclength: f64,
}

/// Equal-arclength midpoint discretization of an ellipse boundary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryMesh {
    pub shape: EllipseShape,
    pub nodes: Vec<BoundaryNode>,
    pub perimeter: f64,
}

impl BoundaryMesh {
    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Discretize a shape into `n` equal-arclength midpoint nodes.
///
/// Node `i` sits at cumulative arclength `(i + 1/2) L / n`, measured from the
/// positive major-axis vertex, so that the node set is symmetric under both
/// axis reflections whenever `4 | n`.
pub fn discretize(shape: &EllipseShape, n: usize) -> Result<BoundaryMesh> {
    if n < MIN_BOUNDARY_NODES {
        return Err(GeometryError::Domain(format!(
            "node count {n} below minimum {MIN_BOUNDARY_NODES}"
        )));
    }
    if n % 2 != 0 {
        return Err(GeometryError::Domain(format!(
            "node count {n} must be even"
        )));
    }
    let perimeter = shape.perimeter();
    let ds = perimeter / n as f64;

    // Invert s(t) for the quarter 0 <= t <= pi/2 on a refined grid, then
    // exploit the four-fold symmetry of the speed function.
    let quarter = perimeter / 4.0;
    let nodes_per_quarter = n / 2; // target midpoints falling in each quarter vary; invert generically
    let _ = nodes_per_quarter;

    let fine = 32 * n.max(256);
    let mut cum = Vec::with_capacity(fine + 1);
    cum.push(0.0);
    let dt = std::f64::consts::FRAC_PI_2 / fine as f64;
    // composite Simpson increments on the fine grid
    let mut acc = 0.0;
    for i in 0..fine {
        let t0 = i as f64 * dt;
        let t1 = t0 + dt;
        let tm = t0 + 0.5 * dt;
        acc += dt / 6.0 * (shape.speed(t0) + 4.0 * shape.speed(tm) + shape.speed(t1));
        cum.push(acc);
    }
    let quarter_len = acc;

    // map target arclength in [0, quarter] to parameter t by monotone lookup
    // plus Newton refinement
    let invert_quarter = |target: f64| -> f64 {
        let clamped = target.clamp(0.0, quarter_len);
        let mut lo = 0usize;
        let mut hi = fine;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if cum[mid] <= clamped {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let frac = if cum[hi] > cum[lo] {
            (clamped - cum[lo]) / (cum[hi] - cum[lo])
        } else {
            0.0
        };
        let mut t = (lo as f64 + frac) * dt;
        for _ in 0..4 {
            let err = shape.arclength(t) - clamped;
            let sp = shape.speed(t);
            t -= err / sp;
            t = t.clamp(0.0, std::f64::consts::FRAC_PI_2);
        }
        t
    };

    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        let s = (i as f64 + 0.5) * ds;
        // fold s into the first quarter and remember the unfolding
        let (q, within) = (s / quarter, s % quarter);
        let quadrant = (q.floor() as usize) % 4;
        let t_local = invert_quarter(match quadrant {
            0 | 2 => within,
            _ => quarter - within,
        });
        let t = match quadrant {
            0 => t_local,
            1 => std::f64::consts::PI - t_local,
            2 => std::f64::consts::PI + t_local,
            _ => 2.0 * std::f64::consts::PI - t_local,
        };
        nodes.push(BoundaryNode {
            position: shape.position(t),
            outward_normal: shape.normal(t),
            curvature: shape.curvature(t),
            arclength_weight: ds,
            arclength: s,
        });
    }
    Ok(BoundaryMesh {
        shape: *shape,
        nodes,
        perimeter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_is_degenerate_ellipse() {
        let c = make_ellipse(0.0, 1.0).unwrap();
        assert_eq!(c.semi_major, 1.0);
        assert_eq!(c.semi_minor, 1.0);
    }

    #[test]
    fn axis_ratio_matches_definition() {
        for &e in &[0.3, 0.782, 0.805, 0.95] {
            let sh = make_ellipse(e, 1.0).unwrap();
            let ratio = sh.semi_minor / sh.semi_major;
            assert!((ratio - (1.0 - e * e).sqrt()).abs() < 1e-14);
            assert!((sh.semi_major * sh.semi_minor - 1.0).abs() < 1e-14);
            let e_back = (1.0 - ratio * ratio).sqrt();
            assert!((e_back - e).abs() < 1e-14);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(make_ellipse(-0.1, 1.0).is_err());
        assert!(make_ellipse(0.96, 1.0).is_err());
        assert!(make_ellipse(0.5, 0.0).is_err());
        let sh = make_ellipse(0.5, 1.0).unwrap();
        assert!(discretize(&sh, 63).is_err());
        assert!(discretize(&sh, 65).is_err());
    }

    #[test]
    fn circle_mesh_is_uniform() {
        let sh = make_ellipse(0.0, 1.0).unwrap();
        let mesh = discretize(&sh, 128).unwrap();
        let expect = 2.0 * std::f64::consts::PI / 128.0;
        for node in &mesh.nodes {
            assert!((node.arclength_weight - expect).abs() < 1e-10);
            assert!((node.curvature - 1.0).abs() < 1e-10);
            let n = node.outward_normal;
            assert!((n[0] * n[0] + n[1] * n[1] - 1.0).abs() < 1e-12);
        }
        assert!((mesh.perimeter - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn weights_sum_to_perimeter() {
        let sh = make_ellipse(0.782, 1.0).unwrap();
        let mesh = discretize(&sh, 256).unwrap();
        let total: f64 = mesh.nodes.iter().map(|n| n.arclength_weight).sum();
        assert!((total - mesh.perimeter).abs() < 1e-10 * mesh.perimeter);
    }

    #[test]
    fn curvature_integral_is_two_pi() {
        for &e in &[0.0, 0.4, 0.782, 0.9] {
            let sh = make_ellipse(e, 1.0).unwrap();
            let mesh = discretize(&sh, 512).unwrap();
            let total: f64 = mesh
                .nodes
                .iter()
                .map(|n| n.curvature * n.arclength_weight)
                .sum();
            assert!(
                (total - 2.0 * std::f64::consts::PI).abs() < 1e-8,
                "e = {e}: {total}"
            );
        }
    }

    #[test]
    fn mirror_symmetry_of_node_set() {
        let sh = make_ellipse(0.6, 1.0).unwrap();
        let mesh = discretize(&sh, 128).unwrap();
        let n = mesh.len();
        for i in 0..n {
            let p = mesh.nodes[i].position;
            let q = mesh.nodes[n - 1 - i].position; // x-mirror partner
            assert!((p[0] - q[0]).abs() < 1e-9 && (p[1] + q[1]).abs() < 1e-9);
            let r = mesh.nodes[(3 * n / 2 - 1 - i) % n].position; // y-mirror partner
            assert!((p[0] + r[0]).abs() < 1e-9 && (p[1] - r[1]).abs() < 1e-9, "i={i}");
        }
    }

    #[test]
    fn nodes_lie_at_equal_arclength_midpoints() {
        let sh = make_ellipse(0.782, 1.0).unwrap();
        let mesh = discretize(&sh, 128).unwrap();
        // verify by re-integrating the speed up to each node parameter
        for (i, node) in mesh.nodes.iter().enumerate().step_by(17) {
            let t = node.position[1].atan2(node.position[0] * sh.semi_minor / sh.semi_major);
            let t = if t < 0.0 {
                t + 2.0 * std::f64::consts::PI
            } else {
                t
            };
            let s = sh.arclength(t);
            let expect = (i as f64 + 0.5) * mesh.perimeter / 128.0;
            assert!((s - expect).abs() < 1e-8, "node {i}: {s} vs {expect}");
        }
    }
}

//! Eccentricity sweeps: predictor–corrector mode tracking, avoided-crossing
//! detection, Lamb-shift curves, and the energy-difference comparison at the
//! crossing.

use crate::bem::{self, find_resonance, ProblemKind, Resonance, SolveOptions};
use crate::geometry::{BoundaryMesh, GeometryError};
use crate::linalg;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("tracking lost at e = {e}: {reason}")]
    TrackingLost { e: f64, reason: String },
    #[error("trajectories are on different eccentricity grids")]
    GridMismatch,
    #[error("trajectory pairing error: {0}")]
    Pairing(String),
    #[error(transparent)]
    Bem(#[from] bem::BemError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Result<T> = std::result::Result<T, SpectrumError>;

/// One tracked point of a trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub e: f64,
    pub resonance: Resonance,
}

/// A mode followed across eccentricity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub mode_label: String,
    pub kind: ProblemKind,
    pub points: Vec<TrajectoryPoint>,
    /// `(m, l)` quantum numbers of the circle mode the sweep started from.
    pub seed_provenance: (u32, u32),
}

impl Trajectory {
    pub fn e_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.e).collect()
    }

    pub fn mu(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.resonance.mu()).collect()
    }

    pub fn same_grid(&self, other: &Trajectory) -> bool {
        self.points.len() == other.points.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| (a.e - b.e).abs() < 1e-12)
    }

    /// Restrict to the grid points with `lo <= e <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> Trajectory {
        Trajectory {
            mode_label: self.mode_label.clone(),
            kind: self.kind,
            points: self
                .points
                .iter()
                .filter(|p| p.e >= lo - 1e-12 && p.e <= hi + 1e-12)
                .cloned()
                .collect(),
            seed_provenance: self.seed_provenance,
        }
    }
}

/// Avoided-crossing summary of a trajectory pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcSummary {
    /// Gap minimizer (quadratically refined).
    pub e_c: f64,
    /// Minimal `|Re kR_1 - Re kR_2|` over the sweep.
    pub gap_min: f64,
    /// Eccentricities where `Im kR_1 - Im kR_2` changes sign.
    pub im_crossings: Vec<f64>,
    /// Whether the boundary character of branch 1 migrated into branch 2.
    pub exchange_detected: bool,
}

/// Lamb-shift curve `L(e) = mu_open(e) - epsilon_closed(e)` for one paired
/// open/closed mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambCurve {
    pub e: Vec<f64>,
    pub shift: Vec<f64>,
    pub open_label: String,
    pub closed_label: String,
    pub provenance: (u32, u32),
}

/// `Delta L`, `Delta mu` curves and where `|Delta mu| - |Delta L|` changes
/// sign.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaCurves {
    pub e: Vec<f64>,
    pub delta_lamb: Vec<f64>,
    pub delta_mu: Vec<f64>,
    pub crossing_e: Option<f64>,
}

/// Tracking controls.
#[derive(Debug, Clone)]
pub struct TrackOptions {
    pub solve: SolveOptions,
    /// Identity bound on `|kR_found - kR_predicted|`.
    pub max_jump: f64,
    /// Identity bound on the boundary-vector overlap with the previous step.
    pub min_overlap: f64,
    /// Smallest automatic sub-step before tracking is declared lost.
    pub min_step: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            solve: SolveOptions::default(),
            max_jump: 0.15,
            min_overlap: 0.5,
            min_step: 1e-4,
        }
    }
}

pub const MAX_TRACK_STEP: f64 = 0.025;

struct TrackState {
    e: f64,
    resonance: Resonance,
    prev: Option<(f64, Complex64)>,
}

impl TrackState {
    fn predict(&self, e: f64) -> Complex64 {
        match self.prev {
            Some((e_prev, kr_prev)) if (self.e - e_prev).abs() > 1e-15 => {
                let slope = (self.resonance.kr - kr_prev) / (self.e - e_prev);
                self.resonance.kr + slope * (e - self.e)
            }
            _ => self.resonance.kr,
        }
    }

    fn accept(&mut self, e: f64, resonance: Resonance) {
        self.prev = Some((self.e, self.resonance.kr));
        self.e = e;
        self.resonance = resonance;
    }
}

fn overlap(a: &Resonance, b: &Resonance) -> f64 {
    let va = a.boundary_vector();
    let vb = b.boundary_vector();
    if va.is_empty() || va.len() != vb.len() {
        return 0.0;
    }
    let na = linalg::norm(&va);
    let nb = linalg::norm(&vb);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    linalg::dot(&va, &vb).norm() / (na * nb)
}

/// Advance the tracked state to eccentricity `target`, bisecting the step
/// whenever the identity tests reject the refined solution.
fn advance<F>(
    mesh_factory: &mut F,
    kind: ProblemKind,
    state: &mut TrackState,
    target: f64,
    opts: &TrackOptions,
) -> Result<()>
where
    F: FnMut(f64) -> std::result::Result<Arc<BoundaryMesh>, GeometryError>,
{
    let mesh = mesh_factory(target)?;
    let predicted = state.predict(target);
    let mut solve_opts = opts.solve.clone();
    if solve_opts.parity.is_none() {
        solve_opts.parity = state.resonance.parity;
    }
    let identity = (|| -> Result<Resonance> {
        let found = find_resonance(&mesh, kind, predicted, &solve_opts)?;
        let jump = (found.kr - predicted).norm();
        let lap = overlap(&state.resonance, &found);
        if jump < opts.max_jump && lap > opts.min_overlap {
            Ok(found)
        } else {
            Err(SpectrumError::TrackingLost {
                e: target,
                reason: format!("jump {jump:.3e}, overlap {lap:.3}"),
            })
        }
    })();
    match identity {
        Ok(found) => {
            state.accept(target, found);
            Ok(())
        }
        Err(err) => {
            let gap = target - state.e;
            if gap <= 2.0 * opts.min_step {
                return Err(err);
            }
            let mid = 0.5 * (state.e + target);
            advance(mesh_factory, kind, state, mid, opts)?;
            advance(mesh_factory, kind, state, target, opts)
        }
    }
}

/// Track a mode along an eccentricity grid starting from a seed resonance at
/// `e_grid[0]`.
pub fn track<F>(
    mut mesh_factory: F,
    kind: ProblemKind,
    mode_label: &str,
    seed_provenance: (u32, u32),
    seed: Resonance,
    e_grid: &[f64],
    opts: &TrackOptions,
) -> Result<Trajectory>
where
    F: FnMut(f64) -> std::result::Result<Arc<BoundaryMesh>, GeometryError>,
{
    if e_grid.is_empty() {
        return Err(SpectrumError::Domain("empty eccentricity grid".into()));
    }
    for w in e_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(SpectrumError::Domain(
                "eccentricity grid must be strictly increasing".into(),
            ));
        }
        if w[1] - w[0] > MAX_TRACK_STEP + 1e-12 {
            return Err(SpectrumError::Domain(format!(
                "grid step {} exceeds maximum {MAX_TRACK_STEP}",
                w[1] - w[0]
            )));
        }
    }
    let mut points = vec![TrajectoryPoint {
        e: e_grid[0],
        resonance: seed.clone(),
    }];
    let mut state = TrackState {
        e: e_grid[0],
        resonance: seed,
        prev: None,
    };
    for &e in &e_grid[1..] {
        advance(&mut mesh_factory, kind, &mut state, e, opts)?;
        points.push(TrajectoryPoint {
            e,
            resonance: state.resonance.clone(),
        });
    }
    Ok(Trajectory {
        mode_label: mode_label.to_string(),
        kind,
        points,
        seed_provenance,
    })
}

fn interp_zero(e0: f64, e1: f64, f0: f64, f1: f64) -> f64 {
    e0 + (e1 - e0) * f0 / (f0 - f1)
}

/// Detect the avoided (or actual) crossing of a trajectory pair sharing one
/// eccentricity grid.
pub fn detect_arc(t1: &Trajectory, t2: &Trajectory) -> Result<ArcSummary> {
    if !t1.same_grid(t2) {
        return Err(SpectrumError::GridMismatch);
    }
    let n = t1.points.len();
    if n < 2 {
        return Err(SpectrumError::Domain(
            "need at least two grid points".into(),
        ));
    }
    let e: Vec<f64> = t1.e_grid();
    let delta: Vec<f64> = (0..n)
        .map(|i| t1.points[i].resonance.mu() - t2.points[i].resonance.mu())
        .collect();

    // real-part crossing: the signed difference passes through zero
    let mut e_c = None;
    let mut gap_min = f64::INFINITY;
    for i in 0..n - 1 {
        if delta[i] == 0.0 {
            e_c = Some(e[i]);
            gap_min = 0.0;
            break;
        }
        if delta[i].signum() != delta[i + 1].signum() {
            e_c = Some(interp_zero(e[i], e[i + 1], delta[i], delta[i + 1]));
            gap_min = 0.0;
            break;
        }
    }

    if e_c.is_none() {
        // avoided crossing: refine the grid argmin of |delta| by a
        // three-point parabola
        let gaps: Vec<f64> = delta.iter().map(|d| d.abs()).collect();
        let mut i_min = 0;
        for i in 1..n {
            if gaps[i] < gaps[i_min] {
                i_min = i;
            }
        }
        if i_min == 0 || i_min == n - 1 {
            e_c = Some(e[i_min]);
            gap_min = gaps[i_min];
        } else {
            let (x0, x1, x2) = (e[i_min - 1], e[i_min], e[i_min + 1]);
            let (y0, y1, y2) = (gaps[i_min - 1], gaps[i_min], gaps[i_min + 1]);
            let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
            let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
            let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
            if a > 0.0 {
                let vertex = (-b / (2.0 * a)).clamp(x0, x2);
                let c = y1 - a * x1 * x1 - b * x1;
                e_c = Some(vertex);
                gap_min = (a * vertex * vertex + b * vertex + c).max(0.0);
            } else {
                e_c = Some(x1);
                gap_min = y1;
            }
        }
    }

    let mut im_crossings = Vec::new();
    for i in 0..n - 1 {
        let f0 = t1.points[i].resonance.kr.im - t2.points[i].resonance.kr.im;
        let f1 = t1.points[i + 1].resonance.kr.im - t2.points[i + 1].resonance.kr.im;
        if f0 == 0.0 {
            im_crossings.push(e[i]);
        } else if f0.signum() != f1.signum() {
            im_crossings.push(interp_zero(e[i], e[i + 1], f0, f1));
        }
    }

    let cross_overlap = overlap(
        &t1.points[0].resonance,
        &t2.points[n - 1].resonance,
    );
    let self_overlap = overlap(&t1.points[0].resonance, &t1.points[n - 1].resonance);
    Ok(ArcSummary {
        e_c: e_c.unwrap(),
        gap_min,
        im_crossings,
        exchange_detected: cross_overlap > self_overlap,
    })
}

/// Lamb-shift curve of one open mode against its closed partner, paired by
/// shared `(m, l)` circle provenance.
pub fn lamb_shift(open: &Trajectory, closed: &Trajectory) -> Result<LambCurve> {
    if !matches!(open.kind, ProblemKind::OpenDielectricTm { .. }) {
        return Err(SpectrumError::Pairing(
            "first trajectory must be an open dielectric sweep".into(),
        ));
    }
    if !matches!(closed.kind, ProblemKind::ClosedDirichlet) {
        return Err(SpectrumError::Pairing(
            "second trajectory must be a closed billiard sweep".into(),
        ));
    }
    if open.seed_provenance != closed.seed_provenance {
        return Err(SpectrumError::Pairing(format!(
            "provenance mismatch: open {:?} vs closed {:?}",
            open.seed_provenance, closed.seed_provenance
        )));
    }
    if !open.same_grid(closed) {
        return Err(SpectrumError::GridMismatch);
    }
    let e = open.e_grid();
    let shift = open
        .points
        .iter()
        .zip(&closed.points)
        .map(|(o, c)| o.resonance.mu() - c.resonance.mu())
        .collect();
    Ok(LambCurve {
        e,
        shift,
        open_label: open.mode_label.clone(),
        closed_label: closed.mode_label.clone(),
        provenance: open.seed_provenance,
    })
}

/// `Delta L = L_1 - L_2`, `Delta mu = mu_1 - mu_2`, and the interpolated
/// eccentricity where `|Delta mu| - |Delta L|` changes sign.
pub fn delta_curves(
    l1: &LambCurve,
    l2: &LambCurve,
    t1: &Trajectory,
    t2: &Trajectory,
) -> Result<DeltaCurves> {
    let n = l1.e.len();
    if l2.e.len() != n || t1.points.len() != n || t2.points.len() != n {
        return Err(SpectrumError::GridMismatch);
    }
    for i in 0..n {
        if (l1.e[i] - l2.e[i]).abs() > 1e-12
            || (l1.e[i] - t1.points[i].e).abs() > 1e-12
            || (l1.e[i] - t2.points[i].e).abs() > 1e-12
        {
            return Err(SpectrumError::GridMismatch);
        }
    }
    let delta_lamb: Vec<f64> = (0..n).map(|i| l1.shift[i] - l2.shift[i]).collect();
    let delta_mu: Vec<f64> = (0..n)
        .map(|i| t1.points[i].resonance.mu() - t2.points[i].resonance.mu())
        .collect();
    let mut crossing_e = None;
    for i in 0..n - 1 {
        let f0 = delta_mu[i].abs() - delta_lamb[i].abs();
        let f1 = delta_mu[i + 1].abs() - delta_lamb[i + 1].abs();
        if f0 == 0.0 {
            crossing_e = Some(l1.e[i]);
            break;
        }
        if f0.signum() != f1.signum() {
            crossing_e = Some(interp_zero(l1.e[i], l1.e[i + 1], f0, f1));
            break;
        }
    }
    Ok(DeltaCurves {
        e: l1.e.clone(),
        delta_lamb,
        delta_mu,
        crossing_e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake_resonance(kr: Complex64) -> Resonance {
        Resonance {
            kr,
            boundary_psi: vec![],
            boundary_dpsi: vec![],
            sigma_min: 0.0,
            sigma_median: 1.0,
            parity: None,
        }
    }

    fn fake_trajectory(label: &str, e: &[f64], kr: &[Complex64]) -> Trajectory {
        Trajectory {
            mode_label: label.into(),
            kind: ProblemKind::OpenDielectricTm { refractive_index: 3.3 },
            points: e
                .iter()
                .zip(kr)
                .map(|(&e, &kr)| TrajectoryPoint {
                    e,
                    resonance: fake_resonance(kr),
                })
                .collect(),
            seed_provenance: (0, 0),
        }
    }

    #[test]
    fn synthetic_hyperbola_arc() {
        let g = 0.02;
        let e: Vec<f64> = (0..101).map(|i| 0.3 + 0.004 * i as f64).collect();
        let up: Vec<Complex64> = e
            .iter()
            .map(|&x| Complex64::new(((x - 0.5) * (x - 0.5) + g * g).sqrt(), -0.01))
            .collect();
        let down: Vec<Complex64> = up.iter().map(|k| Complex64::new(-k.re, -0.01)).collect();
        let t1 = fake_trajectory("up", &e, &up);
        let t2 = fake_trajectory("down", &e, &down);
        let arc = detect_arc(&t1, &t2).unwrap();
        assert!((arc.e_c - 0.5).abs() < 0.004, "e_c = {}", arc.e_c);
        assert!((arc.gap_min - 2.0 * g).abs() < 1e-4, "gap = {}", arc.gap_min);
        assert!(arc.im_crossings.is_empty());
    }

    #[test]
    fn flat_parallel_trajectories_tie_break() {
        let e: Vec<f64> = (0..10).map(|i| 0.1 + 0.01 * i as f64).collect();
        let k1: Vec<Complex64> = e.iter().map(|_| Complex64::new(5.0, -0.01)).collect();
        let k2: Vec<Complex64> = e.iter().map(|_| Complex64::new(5.3, -0.02)).collect();
        let t1 = fake_trajectory("a", &e, &k1);
        let t2 = fake_trajectory("b", &e, &k2);
        let arc = detect_arc(&t1, &t2).unwrap();
        assert_eq!(arc.e_c, e[0]);
        assert!((arc.gap_min - 0.3).abs() < 1e-12);
        assert!(arc.im_crossings.is_empty());
        assert!(!arc.exchange_detected);
    }

    #[test]
    fn real_crossing_is_detected_with_zero_gap() {
        let e: Vec<f64> = (0..11).map(|i| 0.7 + 0.01 * i as f64).collect();
        let k1: Vec<Complex64> = e.iter().map(|&x| Complex64::new(10.0 + x, 0.0)).collect();
        let k2: Vec<Complex64> = e
            .iter()
            .map(|&x| Complex64::new(11.51 - x, 0.0))
            .collect();
        let t1 = fake_trajectory("a", &e, &k1);
        let t2 = fake_trajectory("b", &e, &k2);
        let arc = detect_arc(&t1, &t2).unwrap();
        assert!(arc.gap_min < 1e-12);
        assert!((arc.e_c - 0.755).abs() < 1e-9, "e_c = {}", arc.e_c);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let e1 = [0.1, 0.2];
        let e2 = [0.1, 0.25];
        let ks = [Complex64::new(5.0, 0.0), Complex64::new(5.0, 0.0)];
        let t1 = fake_trajectory("a", &e1, &ks);
        let t2 = fake_trajectory("b", &e2, &ks);
        assert!(matches!(
            detect_arc(&t1, &t2),
            Err(SpectrumError::GridMismatch)
        ));
    }

    #[test]
    fn self_paired_lamb_shift_vanishes() {
        let e = [0.1, 0.12, 0.14];
        let ks = [
            Complex64::new(5.0, -0.01),
            Complex64::new(5.1, -0.01),
            Complex64::new(5.2, -0.01),
        ];
        let open = fake_trajectory("open", &e, &ks);
        let mut closed = open.clone();
        closed.kind = ProblemKind::ClosedDirichlet;
        closed.mode_label = "closed".into();
        let curve = lamb_shift(&open, &closed).unwrap();
        assert!(curve.shift.iter().all(|&s| s.abs() < 1e-14));
    }

    #[test]
    fn delta_curves_equal_when_closed_levels_coincide() {
        // epsilon_1 == epsilon_2 implies Delta mu == Delta L pointwise
        let e = [0.1, 0.12, 0.14, 0.16];
        let mu1 = [5.0, 5.05, 5.11, 5.18];
        let mu2 = [4.8, 4.82, 4.85, 4.89];
        let eps = [15.0, 15.1, 15.2, 15.3];
        let t1 = fake_trajectory("o1", &e, &mu1.map(|m| Complex64::new(m, -0.01)));
        let t2 = fake_trajectory("o2", &e, &mu2.map(|m| Complex64::new(m, -0.01)));
        let l1 = LambCurve {
            e: e.to_vec(),
            shift: (0..4).map(|i| mu1[i] - eps[i]).collect(),
            open_label: "o1".into(),
            closed_label: "c".into(),
            provenance: (0, 0),
        };
        let l2 = LambCurve {
            e: e.to_vec(),
            shift: (0..4).map(|i| mu2[i] - eps[i]).collect(),
            open_label: "o2".into(),
            closed_label: "c".into(),
            provenance: (0, 0),
        };
        let d = delta_curves(&l1, &l2, &t1, &t2).unwrap();
        for i in 0..4 {
            assert!((d.delta_mu[i] - d.delta_lamb[i]).abs() < 1e-12);
        }
    }
}

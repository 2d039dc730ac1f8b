//! Scalar diagnostics of an avoided-crossing sweep and the assembled
//! trade-off report: interior wavefunction overlap against the
//! Bhattacharyya distance between the two modes' decay channels, quality
//! factors, bi-orthogonality residuals, and Pearson anticorrelation of the
//! paired curves.

use crate::bem::{CellKind, FieldMap, Resonance};
use crate::phase_space::CriticalBand;
use crate::spectrum::{detect_arc, ArcSummary, DeltaCurves, Trajectory};
use crate::toymodel::ToyFit;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("grids do not match")]
    GridMismatch,
    #[error("distributions have effectively disjoint support")]
    DisjointSupport,
    #[error("degenerate c-norm (|sum f^2 dA| < 1e-8): near an exceptional point")]
    DegenerateCNorm,
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Spectrum(#[from] crate::spectrum::SpectrumError),
}

pub type Result<T> = std::result::Result<T, AnalysisError>;

/// Bhattacharyya distance `-ln sum sqrt(p q) dmu` between two critical-band
/// distributions on identical grids.
pub fn bhattacharyya(p: &CriticalBand, q: &CriticalBand) -> Result<f64> {
    if p.map.n_s != q.map.n_s || p.map.n_p != q.map.n_p || (p.p_c - q.p_c).abs() > 1e-12 {
        return Err(AnalysisError::GridMismatch);
    }
    let cell = p.map.cell_measure();
    let coefficient: f64 = p
        .map
        .values
        .iter()
        .zip(&q.map.values)
        .map(|(a, b)| (a * b).sqrt())
        .sum::<f64>()
        * cell;
    if coefficient < 1e-300 {
        return Err(AnalysisError::DisjointSupport);
    }
    Ok(-coefficient.ln())
}

fn check_field_grids(f1: &FieldMap, f2: &FieldMap) -> Result<()> {
    if f1.grid != f2.grid || f1.mask != f2.mask {
        return Err(AnalysisError::GridMismatch);
    }
    Ok(())
}

/// Interior overlap `sqrt(|<f1|f2>|)` over the shared interior mask; both
/// fields are expected interior-normalized (as produced by
/// `bem::evaluate_field`).
pub fn interior_overlap(f1: &FieldMap, f2: &FieldMap) -> Result<f64> {
    check_field_grids(f1, f2)?;
    let area = f1.grid.cell_area();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..f1.values.len() {
        if f1.mask[i] == CellKind::Interior {
            acc += f1.values[i].conj() * f2.values[i];
        }
    }
    Ok((acc * area).norm().sqrt())
}

/// Bi-orthogonality product `<f1*|f2> = sum f1 f2 dA` (no conjugation), with
/// each field rescaled to unit c-norm `sum f^2 dA = 1` first.
pub fn c_product(f1: &FieldMap, f2: &FieldMap) -> Result<Complex64> {
    check_field_grids(f1, f2)?;
    let area = f1.grid.cell_area();
    let mut c1 = Complex64::new(0.0, 0.0);
    let mut c2 = Complex64::new(0.0, 0.0);
    let mut cross = Complex64::new(0.0, 0.0);
    for i in 0..f1.values.len() {
        if f1.mask[i] == CellKind::Interior {
            c1 += f1.values[i] * f1.values[i];
            c2 += f2.values[i] * f2.values[i];
            cross += f1.values[i] * f2.values[i];
        }
    }
    c1 *= area;
    c2 *= area;
    cross *= area;
    if c1.norm() < 1e-8 || c2.norm() < 1e-8 {
        return Err(AnalysisError::DegenerateCNorm);
    }
    Ok(cross / (c1.sqrt() * c2.sqrt()))
}

/// Quality factor `Q = Re(kR) / (2 |Im(kR)|)` of a decaying resonance.
pub fn quality_factor(r: &Resonance) -> Result<f64> {
    if r.kr.im >= 0.0 {
        return Err(AnalysisError::Domain(format!(
            "quality factor needs Im(kR) < 0, got {}",
            r.kr.im
        )));
    }
    Ok(r.kr.re / (2.0 * r.kr.im.abs()))
}

/// Pearson correlation; `None` when either variance is degenerate.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Quadratically refined extremum location of a sampled curve.
fn refine_extremum(e: &[f64], y: &[f64], maximum: bool) -> f64 {
    let n = y.len();
    let mut idx = 0;
    for i in 1..n {
        let better = if maximum { y[i] > y[idx] } else { y[i] < y[idx] };
        if better {
            idx = i;
        }
    }
    if idx == 0 || idx == n - 1 {
        return e[idx];
    }
    let (x0, x1, x2) = (e[idx - 1], e[idx], e[idx + 1]);
    let (y0, y1, y2) = (y[idx - 1], y[idx], y[idx + 1]);
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    if denom == 0.0 {
        return x1;
    }
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if a == 0.0 {
        return x1;
    }
    let vertex = -b / (2.0 * a);
    if (maximum && a < 0.0) || (!maximum && a > 0.0) {
        vertex.clamp(x0, x2)
    } else {
        x1
    }
}

/// Assembled per-sweep curves and their trade-off summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcReport {
    pub e: Vec<f64>,
    /// `sqrt(|<psi_1|psi_2>|)` over the interior.
    pub overlap: Vec<f64>,
    /// c-normalized bi-orthogonality product per eccentricity.
    pub c_product: Vec<Complex64>,
    /// Bhattacharyya distance between the two decay channels.
    pub d_b: Vec<f64>,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    pub delta_lamb: Vec<f64>,
    pub delta_mu: Vec<f64>,
    pub delta_crossing_e: Option<f64>,
    pub arc: ArcSummary,
    pub toy_fit: ToyFit,
    /// Pearson coefficient between `overlap(e)` and `d_b(e)`; zero with
    /// `anticorrelation_defined = false` when a variance degenerates.
    pub anticorrelation: f64,
    pub anticorrelation_defined: bool,
    /// Quadratically refined extremal locations.
    pub overlap_peak_e: f64,
    pub d_b_min_e: f64,
}

/// Assemble the report from per-eccentricity fields and critical bands plus
/// the already-computed curves. All inputs must share one grid.
pub fn build_report(
    t1: &Trajectory,
    t2: &Trajectory,
    fields: &[(FieldMap, FieldMap)],
    bands: &[(CriticalBand, CriticalBand)],
    delta: &DeltaCurves,
    toy_fit: ToyFit,
) -> Result<ArcReport> {
    if !t1.same_grid(t2) {
        return Err(AnalysisError::GridMismatch);
    }
    let e = t1.e_grid();
    let n = e.len();
    if fields.len() != n || bands.len() != n || delta.e.len() != n {
        return Err(AnalysisError::GridMismatch);
    }
    let mut overlap = Vec::with_capacity(n);
    let mut c_prod = Vec::with_capacity(n);
    let mut d_b = Vec::with_capacity(n);
    let mut q1 = Vec::with_capacity(n);
    let mut q2 = Vec::with_capacity(n);
    for i in 0..n {
        overlap.push(interior_overlap(&fields[i].0, &fields[i].1)?);
        c_prod.push(c_product(&fields[i].0, &fields[i].1)?);
        d_b.push(bhattacharyya(&bands[i].0, &bands[i].1)?);
        q1.push(quality_factor(&t1.points[i].resonance)?);
        q2.push(quality_factor(&t2.points[i].resonance)?);
    }
    let arc = detect_arc(t1, t2)?;
    let (anticorrelation, defined) = match pearson(&overlap, &d_b) {
        Some(r) => (r, true),
        None => (0.0, false),
    };
    let overlap_peak_e = refine_extremum(&e, &overlap, true);
    let d_b_min_e = refine_extremum(&e, &d_b, false);
    Ok(ArcReport {
        e,
        overlap,
        c_product: c_prod,
        d_b,
        q1,
        q2,
        delta_lamb: delta.delta_lamb.clone(),
        delta_mu: delta.delta_mu.clone(),
        delta_crossing_e: delta.crossing_e,
        arc,
        toy_fit,
        anticorrelation,
        anticorrelation_defined: defined,
        overlap_peak_e,
        d_b_min_e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::HusimiMap;

    fn band_from(values: Vec<f64>, n_s: usize, n_p: usize, p_c: f64) -> CriticalBand {
        let mut map = HusimiMap {
            n_s,
            n_p,
            values,
            normalization: 1.0,
        };
        let mass = map.mass();
        for v in map.values.iter_mut() {
            *v /= mass;
        }
        CriticalBand { p_c, map }
    }

    fn gaussian_band(n_s: usize, n_p: usize, center: f64, width: f64) -> CriticalBand {
        let mut values = vec![0.0; n_s * n_p];
        let probe = HusimiMap {
            n_s,
            n_p,
            values: values.clone(),
            normalization: 1.0,
        };
        for i_s in 0..n_s {
            for i_p in 0..n_p {
                let p = probe.p_at(i_p);
                values[i_s * n_p + i_p] = (-(p - center) * (p - center) / (2.0 * width * width)).exp();
            }
        }
        band_from(values, n_s, n_p, 0.99)
    }

    #[test]
    fn identical_distributions_have_zero_distance() {
        let b = gaussian_band(64, 256, 0.1, 0.05);
        let d = bhattacharyya(&b, &b).unwrap();
        assert!(d.abs() < 1e-12, "d_B = {d}");
    }

    #[test]
    fn equal_width_gaussian_closed_form() {
        // For equal-variance Gaussians a distance delta apart,
        // d_B = delta^2 / (8 sigma^2).
        let sigma_g = 0.08; // 10 cells at n_p = 256
        let delta = 0.12;
        let b1 = gaussian_band(64, 256, -delta / 2.0, sigma_g);
        let b2 = gaussian_band(64, 256, delta / 2.0, sigma_g);
        let d = bhattacharyya(&b1, &b2).unwrap();
        let expect = delta * delta / (8.0 * sigma_g * sigma_g);
        assert!(
            (d - expect).abs() < 0.02 * expect,
            "d_B = {d}, closed form {expect}"
        );
    }

    #[test]
    fn disjoint_support_is_an_error() {
        let n_s = 64;
        let n_p = 64;
        let mut left = vec![0.0; n_s * n_p];
        let mut right = vec![0.0; n_s * n_p];
        for i_s in 0..n_s {
            left[i_s * n_p] = 1.0;
            right[i_s * n_p + n_p - 1] = 1.0;
        }
        let b1 = band_from(left, n_s, n_p, 0.99);
        let b2 = band_from(right, n_s, n_p, 0.99);
        assert!(matches!(
            bhattacharyya(&b1, &b2),
            Err(AnalysisError::DisjointSupport)
        ));
    }

    #[test]
    fn bhattacharyya_is_symmetric() {
        let b1 = gaussian_band(64, 128, -0.2, 0.1);
        let b2 = gaussian_band(64, 128, 0.25, 0.07);
        let d12 = bhattacharyya(&b1, &b2).unwrap();
        let d21 = bhattacharyya(&b2, &b1).unwrap();
        assert_eq!(d12, d21);
    }

    #[test]
    fn pearson_degenerate_variance() {
        assert!(pearson(&[1.0, 1.0, 1.0], &[0.3, 0.5, 0.9]).is_none());
        let r = pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert!((r + 1.0).abs() < 1e-12);
    }
}

//! Incident Husimi distribution on the boundary phase space `(s/L, sin chi)`
//! and its restriction below the critical line.
//!
//! For each phase-space cell, the boundary field and its normal derivative
//! are overlapped with a periodically wrapped Gaussian coherent state whose
//! phase advances with the interior momentum. The incident combination
//! `psi - (i / (n k cos chi)) d_nu psi` isolates the component travelling
//! toward the boundary from inside; its squared magnitude, normalized to
//! unit mass, is the map.

use crate::bem::Resonance;
use crate::geometry::BoundaryMesh;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PhaseSpaceError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("boundary data produced an all-zero map")]
    Normalization,
    #[error("no Husimi mass below the critical line")]
    EmptyBand,
}

pub type Result<T> = std::result::Result<T, PhaseSpaceError>;

/// Probability distribution on boundary phase space. `values[i_s * n_p + i_p]`
/// lives at arclength fraction `i_s / n_s` and momentum
/// `p = -1 + (i_p + 1/2) * 2/n_p`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HusimiMap {
    pub n_s: usize,
    pub n_p: usize,
    pub values: Vec<f64>,
    /// Mass the raw overlaps carried before normalization to one.
    pub normalization: f64,
}

impl HusimiMap {
    #[inline]
    pub fn s_at(&self, i_s: usize) -> f64 {
        i_s as f64 / self.n_s as f64
    }

    #[inline]
    pub fn p_at(&self, i_p: usize) -> f64 {
        -1.0 + (i_p as f64 + 0.5) * 2.0 / self.n_p as f64
    }

    #[inline]
    pub fn cell_measure(&self) -> f64 {
        (1.0 / self.n_s as f64) * (2.0 / self.n_p as f64)
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_measure()
    }

    /// Marginal over momentum (length `n_s`, measure `1/n_s`).
    pub fn s_marginal(&self) -> Vec<f64> {
        let dp = 2.0 / self.n_p as f64;
        (0..self.n_s)
            .map(|i_s| {
                self.values[i_s * self.n_p..(i_s + 1) * self.n_p]
                    .iter()
                    .sum::<f64>()
                    * dp
            })
            .collect()
    }
}

/// Husimi map with support restricted to `|p| <= p_c`, renormalized to unit
/// mass on the band.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalBand {
    pub p_c: f64,
    pub map: HusimiMap,
}

/// Default coherent-state width in arclength units: minimal-uncertainty
/// scaling `~ k^(-1/2)` against the interior wavenumber.
pub fn default_sigma(perimeter: f64, n: f64, kr_re: f64, scale: f64) -> f64 {
    let k_interior = n * kr_re / scale;
    (2.0 * perimeter / (k_interior * 2.0 * std::f64::consts::PI)).sqrt()
}

/// Incident Husimi distribution of a resonance's boundary data.
pub fn husimi_incident(
    mesh: &BoundaryMesh,
    resonance: &Resonance,
    n: f64,
    n_s: usize,
    n_p: usize,
    sigma: Option<f64>,
) -> Result<HusimiMap> {
    if n_s < 64 || n_p < 64 {
        return Err(PhaseSpaceError::Domain(format!(
            "phase-space grid {n_s} x {n_p} below minimum 64 x 64"
        )));
    }
    if !(n > 1.0) {
        return Err(PhaseSpaceError::Domain(format!(
            "refractive index {n} must exceed 1"
        )));
    }
    let nodes = mesh.len();
    if resonance.boundary_psi.len() != nodes || resonance.boundary_dpsi.len() != nodes {
        return Err(PhaseSpaceError::Domain(
            "resonance boundary data does not match mesh".into(),
        ));
    }
    let length = mesh.perimeter;
    let k_interior = n * resonance.kr.re / mesh.shape.scale;
    let sigma = sigma.unwrap_or_else(|| default_sigma(length, n, resonance.kr.re, mesh.shape.scale));
    if !(sigma > 0.0 && sigma < length) {
        return Err(PhaseSpaceError::Domain(format!(
            "coherent-state width {sigma} outside (0, perimeter)"
        )));
    }
    let ds = length / nodes as f64;
    let cutoff = 6.0 * sigma;

    let mut values = vec![0.0f64; n_s * n_p];
    for i_s in 0..n_s {
        let s0 = i_s as f64 / n_s as f64 * length;
        for i_p in 0..n_p {
            let p0 = -1.0 + (i_p as f64 + 0.5) * 2.0 / n_p as f64;
            debug_assert!(p0.abs() < 1.0);
            let weight = 1.0 / (k_interior * (1.0 - p0 * p0).sqrt());
            let mut amp = Complex64::new(0.0, 0.0);
            for (j, node) in mesh.nodes.iter().enumerate() {
                let s = node.arclength;
                // wrap the Gaussian over the neighboring periods
                for w in -1i32..=1 {
                    let shifted = s + f64::from(w) * length;
                    let d = shifted - s0;
                    if d.abs() > cutoff {
                        continue;
                    }
                    let envelope = (-d * d / (2.0 * sigma * sigma)).exp();
                    // conj of the coherent state's exp(-i n k p0 s) phase
                    let phase = Complex64::from_polar(1.0, k_interior * p0 * shifted);
                    let incident = resonance.boundary_psi[j]
                        - Complex64::i() * weight * resonance.boundary_dpsi[j];
                    amp += envelope * phase * incident * ds;
                }
            }
            values[i_s * n_p + i_p] = amp.norm_sqr();
        }
    }

    let cell = (1.0 / n_s as f64) * (2.0 / n_p as f64);
    let raw_mass: f64 = values.iter().sum::<f64>() * cell;
    if raw_mass <= 1e-300 {
        return Err(PhaseSpaceError::Normalization);
    }
    for v in values.iter_mut() {
        *v /= raw_mass;
    }
    Ok(HusimiMap {
        n_s,
        n_p,
        values,
        normalization: raw_mass,
    })
}

/// Zero the map outside `|p| <= p_c` and renormalize to unit mass on the
/// band.
pub fn restrict_below_critical(map: &HusimiMap, p_c: f64) -> Result<CriticalBand> {
    if !(p_c > 0.0 && p_c < 1.0) {
        return Err(PhaseSpaceError::Domain(format!(
            "critical momentum {p_c} outside (0, 1)"
        )));
    }
    let mut values = map.values.clone();
    for i_s in 0..map.n_s {
        for i_p in 0..map.n_p {
            if map.p_at(i_p).abs() > p_c {
                values[i_s * map.n_p + i_p] = 0.0;
            }
        }
    }
    let cell = map.cell_measure();
    let band_mass: f64 = values.iter().sum::<f64>() * cell;
    if band_mass <= 1e-12 {
        return Err(PhaseSpaceError::EmptyBand);
    }
    for v in values.iter_mut() {
        *v /= band_mass;
    }
    Ok(CriticalBand {
        p_c,
        map: HusimiMap {
            n_s: map.n_s,
            n_p: map.n_p,
            values,
            normalization: band_mass,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic_map(n_s: usize, n_p: usize, f: impl Fn(f64, f64) -> f64) -> HusimiMap {
        let mut values = vec![0.0; n_s * n_p];
        let mut map = HusimiMap {
            n_s,
            n_p,
            values: values.clone(),
            normalization: 1.0,
        };
        for i_s in 0..n_s {
            for i_p in 0..n_p {
                values[i_s * n_p + i_p] = f(map.s_at(i_s), map.p_at(i_p));
            }
        }
        map.values = values;
        let mass = map.mass();
        for v in map.values.iter_mut() {
            *v /= mass;
        }
        map
    }

    #[test]
    fn restriction_of_interior_mass_is_identity() {
        let map = synthetic_map(64, 64, |_, p| (-(p * p) / 0.002).exp());
        let band = restrict_below_critical(&map, 0.9).unwrap();
        assert!(band.map.normalization > 0.999);
        assert!((band.map.mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn empty_band_is_an_error() {
        // whispering-gallery-like: all mass near |p| = 0.9
        let map = synthetic_map(64, 64, |_, p| (-((p.abs() - 0.9) * (p.abs() - 0.9)) / 0.001).exp());
        assert!(matches!(
            restrict_below_critical(&map, 0.2),
            Err(PhaseSpaceError::EmptyBand)
        ));
    }

    #[test]
    fn p_grid_excludes_endpoints() {
        let map = synthetic_map(64, 64, |_, _| 1.0);
        assert!(map.p_at(0) > -1.0);
        assert!(map.p_at(63) < 1.0);
        assert!((map.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn critical_band_matches_one_over_n() {
        // p_c = 1/3.3 = 0.303: the band must cover exactly the cells with
        // |p| <= 0.303
        let map = synthetic_map(64, 128, |_, _| 1.0);
        let p_c = 1.0 / 3.3;
        let band = restrict_below_critical(&map, p_c).unwrap();
        for i_p in 0..map.n_p {
            let inside = map.p_at(i_p).abs() <= p_c;
            let v = band.map.values[i_p];
            assert_eq!(v > 0.0, inside, "p = {}", map.p_at(i_p));
        }
    }
}

//! Dense complex matrices and the singular-value machinery used by the
//! boundary-element solver.
//!
//! The heavy factorizations are delegated to `faer`; everything here runs
//! with sequential parallelism so results are bit-reproducible.

use num_complex::Complex64;
use std::sync::Once;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinAlgError {
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, LinAlgError>;

static FAER_SEQ: Once = Once::new();

fn ensure_sequential() {
    FAER_SEQ.call_once(|| {
        faer::set_global_parallelism(faer::Par::Seq);
    });
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone)]
pub struct CMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![Complex64::new(0.0, 0.0); nrows * ncols],
        }
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        Self { nrows, ncols, data }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.ncols + j] = v;
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.ncols);
        let mut out = Vec::with_capacity(self.nrows);
        for i in 0..self.nrows {
            let row = &self.data[i * self.ncols..(i + 1) * self.ncols];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(v) {
                acc += a * b;
            }
            out.push(acc);
        }
        out
    }

    /// `self * B` where `B` is given column-wise; returns the product as a
    /// new matrix. Used to restrict operators onto symmetry subspaces.
    pub fn mul_mat(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = CMatrix::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.data[i * self.ncols + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let orow = &other.data[k * other.ncols..(k + 1) * other.ncols];
                let out_row = &mut out.data[i * other.ncols..(i + 1) * other.ncols];
                for (o, b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    fn to_faer(&self) -> faer::Mat<faer::c64> {
        faer::Mat::from_fn(self.nrows, self.ncols, |i, j| self.get(i, j))
    }
}

/// Full set of singular values, descending.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    ensure_sequential();
    if !m.is_finite() {
        return Err(LinAlgError::Domain("matrix has non-finite entries".into()));
    }
    let f = m.to_faer();
    let svd = f
        .thin_svd()
        .map_err(|e| LinAlgError::Decomposition(format!("{e:?}")))?;
    let s = svd.S();
    Ok((0..m.nrows.min(m.ncols)).map(|i| s[i].re).collect())
}

/// Result of a smallest-singular-pair computation.
#[derive(Debug, Clone)]
pub struct SmallestSingular {
    pub sigma_min: f64,
    /// Right singular vector for `sigma_min`, unit norm, phase-fixed.
    pub null_vector: Vec<Complex64>,
    /// Median of all singular values (scale reference for acceptance tests).
    pub sigma_median: f64,
}

/// Smallest singular value and its right singular vector of a square matrix.
///
/// The vector is unit-norm with a deterministic phase: the first component
/// whose magnitude is at least `1e-10` of the largest is rotated to the
/// positive real axis.
pub fn smallest_singular(m: &CMatrix) -> Result<(f64, Vec<Complex64>)> {
    if m.nrows != m.ncols {
        return Err(LinAlgError::Domain(format!(
            "expected square matrix, got {}x{}",
            m.nrows, m.ncols
        )));
    }
    let full = smallest_singular_any(m)?;
    Ok((full.sigma_min, full.null_vector))
}

/// Like [`smallest_singular`] but accepts rectangular (tall) matrices and
/// also reports the median singular value.
pub fn smallest_singular_any(m: &CMatrix) -> Result<SmallestSingular> {
    ensure_sequential();
    if !m.is_finite() {
        return Err(LinAlgError::Domain("matrix has non-finite entries".into()));
    }
    if m.nrows < m.ncols {
        return Err(LinAlgError::Domain(
            "matrix must have at least as many rows as columns".into(),
        ));
    }
    let f = m.to_faer();
    let svd = f
        .thin_svd()
        .map_err(|e| LinAlgError::Decomposition(format!("{e:?}")))?;
    let k = m.ncols;
    let s = svd.S();
    let sigma_min = s[k - 1].re;
    let sigma_median = s[k / 2].re;
    let v = svd.V();
    let mut null_vector: Vec<Complex64> = (0..k).map(|i| v[(i, k - 1)]).collect();
    apply_phase_convention(&mut null_vector);
    Ok(SmallestSingular {
        sigma_min,
        null_vector,
        sigma_median,
    })
}

/// Rotate a vector so its first significant component is real positive,
/// then normalize to unit Euclidean norm.
pub fn apply_phase_convention(v: &mut [Complex64]) {
    let max = v.iter().map(|x| x.norm()).fold(0.0f64, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .find(|x| x.norm() >= 1e-10 * max)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot / pivot.norm();
    let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let scale = phase.conj() / norm;
    for x in v.iter_mut() {
        *x *= scale;
    }
}

/// `<a, b>` with conjugation on the first argument.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm.
pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_smallest_singular() {
        let id = CMatrix::from_fn(4, 4, |i, j| Complex64::new(f64::from(i == j), 0.0));
        let (s, v) = smallest_singular(&id).unwrap();
        assert!((s - 1.0).abs() < 1e-14);
        // unit basis vector under the phase convention
        let big: Vec<usize> = (0..4).filter(|&i| v[i].norm() > 0.5).collect();
        assert_eq!(big.len(), 1);
        assert!((v[big[0]].re - 1.0).abs() < 1e-12 && v[big[0]].im.abs() < 1e-12);
    }

    #[test]
    fn diagonal_null_vector() {
        let mut m = CMatrix::zeros(3, 3);
        m.set(0, 0, Complex64::new(3.0, 0.0));
        m.set(1, 1, Complex64::new(2.0, 0.0));
        let (s, v) = smallest_singular(&m).unwrap();
        assert!(s.abs() < 1e-14);
        assert!((v[2].re - 1.0).abs() < 1e-12);
        assert!(v[0].norm() < 1e-12 && v[1].norm() < 1e-12);
    }

    #[test]
    fn rejects_non_square_and_non_finite() {
        let m = CMatrix::zeros(2, 3);
        assert!(smallest_singular(&m).is_err());
        let mut bad = CMatrix::zeros(2, 2);
        bad.set(0, 0, Complex64::new(f64::NAN, 0.0));
        assert!(smallest_singular(&bad).is_err());
    }

    #[test]
    fn phase_convention_is_deterministic() {
        let mut v = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.3, -0.4),
            Complex64::new(1.0, 2.0),
        ];
        apply_phase_convention(&mut v);
        assert!(v[1].im.abs() < 1e-15 && v[1].re > 0.0);
        assert!((norm(&v) - 1.0).abs() < 1e-14);
    }
}

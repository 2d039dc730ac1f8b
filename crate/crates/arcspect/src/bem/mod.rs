//! Boundary-element machinery: frequency-dependent interaction matrices,
//! complex-plane resonance search by smallest-singular-value minimization,
//! and field reconstruction inside and outside the cavity.
//!
//! All wavenumbers in the public API are the dimensionless `kR` (scale `R`
//! taken from the mesh); internally they are converted to the mesh length
//! unit.

mod assemble;
mod circle;
mod field;
mod kernels;
mod parity;
mod solve;

pub use assemble::{assemble, assemble_projected};
pub use circle::{
    circle_closed_seed, circle_matching_residual, circle_open_seed, circle_resonance,
    AngularFamily,
};
pub use field::{evaluate_field, field_value_at, CellKind, FieldGrid, FieldMap};
pub use parity::{classify_parity, ParityBasis, ParityClass};
pub use solve::{find_resonance, scan_window, ScanGrid, SolveOptions};

use crate::linalg;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Solver window for `Re(kR)`.
pub const KR_WINDOW: (f64, f64) = (1.0, 25.0);

/// Window for `Im(kR)` accepted by the assembler.
pub const KR_IM_WINDOW: (f64, f64) = (-2.0, 0.5);

#[derive(Debug, Error)]
pub enum BemError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("linear algebra failure: {0}")]
    LinAlg(#[from] linalg::LinAlgError),
    #[error("special function failure: {0}")]
    SpecFun(#[from] crate::specfun::SpecFunError),
    #[error("simplex refinement did not converge: {0}")]
    NotConverged(String),
    #[error("no resonance near seed: {0}")]
    NoResonance(String),
    #[error("root finding did not converge: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, BemError>;

/// Which eigenproblem the boundary operator represents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProblemKind {
    /// Open dielectric cavity, TM polarization (field and normal derivative
    /// continuous across the boundary), with the given interior refractive
    /// index.
    OpenDielectricTm { refractive_index: f64 },
    /// Closed billiard with a Dirichlet wall.
    ClosedDirichlet,
}

impl ProblemKind {
    pub fn validate(&self) -> Result<()> {
        if let ProblemKind::OpenDielectricTm { refractive_index } = self {
            if !(*refractive_index > 1.0 && *refractive_index <= 10.0) {
                return Err(BemError::Domain(format!(
                    "refractive index {refractive_index} outside (1, 10]"
                )));
            }
        }
        Ok(())
    }

    /// Number of boundary unknowns per node (field + normal derivative for
    /// the transmission problem, normal derivative only for Dirichlet).
    pub fn unknowns_per_node(&self) -> usize {
        match self {
            ProblemKind::OpenDielectricTm { .. } => 2,
            ProblemKind::ClosedDirichlet => 1,
        }
    }
}

/// A solved resonance (or real billiard level) with its boundary data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Resonance {
    /// Complex dimensionless wavenumber `kR`.
    pub kr: Complex64,
    /// Boundary field values at the mesh nodes (all zero for Dirichlet).
    pub boundary_psi: Vec<Complex64>,
    /// Outward normal derivative of the field at the mesh nodes.
    pub boundary_dpsi: Vec<Complex64>,
    /// Smallest singular value of the boundary operator at `kr`.
    pub sigma_min: f64,
    /// Median singular value at `kr` (residual scale reference).
    pub sigma_median: f64,
    /// Reflection parity of the boundary solution, when classifiable.
    pub parity: Option<ParityClass>,
}

impl Resonance {
    /// Energy: `mu = Re(kR)`.
    #[inline]
    pub fn mu(&self) -> f64 {
        self.kr.re
    }

    /// Decay width: `omega = -2 Im(kR)`.
    #[inline]
    pub fn omega(&self) -> f64 {
        -2.0 * self.kr.im
    }

    /// Reconstruct `kR` from the `(mu, omega)` pair; identical to `kr` by
    /// construction.
    #[inline]
    pub fn nu(&self) -> Complex64 {
        Complex64::new(self.mu(), -0.5 * self.omega())
    }

    /// Concatenated boundary vector `(psi, dpsi)`, the object tracking and
    /// exchange tests take overlaps of.
    pub fn boundary_vector(&self) -> Vec<Complex64> {
        let mut v = self.boundary_psi.clone();
        v.extend_from_slice(&self.boundary_dpsi);
        v
    }
}

//! Resonance spectroscopy of open elliptical dielectric microcavities.
//!
//! The crate computes complex TM resonances of a two-dimensional dielectric
//! cavity with elliptical cross-section, real levels of the matching closed
//! (Dirichlet) billiard, and tracks both across eccentricity. On top of the
//! raw spectra it provides the diagnostics needed to study avoided resonance
//! crossings: interior wavefunction overlaps, boundary Husimi distributions
//! restricted below the critical line, Bhattacharyya distances between decay
//! channels, Lamb-shift curves, and an exactly solvable 2×2 non-Hermitian
//! effective Hamiltonian.
//!
//! Modules follow the pipeline order:
//!
//! * [`specfun`] — cylinder Bessel/Hankel functions of integer order for
//!   complex arguments, plus real Bessel zeros.
//! * [`geometry`] — ellipse parametrization and equal-arclength boundary
//!   meshes.
//! * [`bem`] — boundary-element assembly, complex-plane resonance search by
//!   smallest-singular-value minimization, and field reconstruction.
//! * [`spectrum`] — eccentricity sweeps with mode tracking, avoided-crossing
//!   detection, Lamb-shift and Δμ/ΔL curves.
//! * [`phase_space`] — incident Husimi distributions on the boundary phase
//!   space and their restriction below the critical line.
//! * [`analysis`] — scalar diagnostics (Bhattacharyya distance, overlaps,
//!   c-products, quality factors) and the assembled trade-off report.
//! * [`toymodel`] — the 2×2 symmetric non-Hermitian Hamiltonian: exact
//!   eigensystem, coupling-regime taxonomy, gap formula, and fits to swept
//!   data.

pub mod analysis;
pub mod bem;
pub mod geometry;
pub mod linalg;
pub mod phase_space;
pub mod specfun;
pub mod spectrum;
pub mod toymodel;

pub use num_complex::Complex64;

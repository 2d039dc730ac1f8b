//! Resonance location: derivative-free simplex descent on the logarithm of
//! the smallest singular value of the boundary operator, plus coarse window
//! scans that produce seeds.

use super::parity::{classify_parity, ParityBasis, ParityClass};
use super::{assemble, assemble_projected, BemError, ProblemKind, Resonance, Result, KR_WINDOW};
use crate::geometry::BoundaryMesh;
use crate::linalg::{self, SmallestSingular};
use num_complex::Complex64;

/// Options for [`find_resonance`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Simplex iterations before giving up.
    pub max_iterations: usize,
    /// Simplex diameter (in kR) below which the search has converged.
    pub simplex_tol: f64,
    /// Initial simplex edge length in kR.
    pub initial_step: f64,
    /// Acceptance: `sigma_min < accept_factor * median singular value`.
    pub accept_factor: f64,
    /// Restrict the boundary operator to one reflection-parity class.
    pub parity: Option<ParityClass>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iterations: 220,
            simplex_tol: 1e-6,
            initial_step: 2e-3,
            accept_factor: 1e-4,
            parity: None,
        }
    }
}

fn sigma_at(
    mesh: &BoundaryMesh,
    kind: ProblemKind,
    kr: Complex64,
    basis: Option<&ParityBasis>,
) -> Result<SmallestSingular> {
    let matrix = match basis {
        Some(b) => assemble_projected(mesh, kind, kr, b)?,
        None => assemble(mesh, kind, kr)?,
    };
    Ok(linalg::smallest_singular_any(&matrix)?)
}

fn in_window(kind: ProblemKind, kr: Complex64) -> bool {
    if kr.re < KR_WINDOW.0 || kr.re > KR_WINDOW.1 {
        return false;
    }
    match kind {
        ProblemKind::ClosedDirichlet => true,
        ProblemKind::OpenDielectricTm { .. } => (-2.0..=0.5).contains(&kr.im),
    }
}

/// Locate the resonance closest to `seed` by Nelder–Mead refinement of
/// `log sigma_min`. Dirichlet problems are searched along the real axis;
/// open problems over the complex plane.
pub fn find_resonance(
    mesh: &BoundaryMesh,
    kind: ProblemKind,
    seed: Complex64,
    opts: &SolveOptions,
) -> Result<Resonance> {
    kind.validate()?;
    if !in_window(kind, seed) {
        return Err(BemError::Domain(format!(
            "seed kR = {seed} outside solver window Re in [{}, {}]",
            KR_WINDOW.0, KR_WINDOW.1
        )));
    }
    let basis = opts
        .parity
        .map(|class| ParityBasis::new(class, mesh.len()));
    let closed = matches!(kind, ProblemKind::ClosedDirichlet);
    let seed = if closed {
        Complex64::new(seed.re, 0.0)
    } else {
        seed
    };

    let mut best: Option<(Complex64, SmallestSingular)> = None;
    let mut evaluate = |kr: Complex64| -> Result<f64> {
        if !in_window(kind, kr) {
            return Ok(f64::INFINITY);
        }
        let s = sigma_at(mesh, kind, kr, basis.as_ref())?;
        let value = s.sigma_min.max(1e-300).ln();
        if best
            .as_ref()
            .map_or(true, |(_, b)| s.sigma_min < b.sigma_min)
        {
            best = Some((kr, s));
        }
        Ok(value)
    };

    // simplex vertices in (Re, Im); 1-simplex for the real-axis search
    let h = opts.initial_step;
    let mut vertices: Vec<Complex64> = if closed {
        vec![seed, seed + Complex64::new(h, 0.0)]
    } else {
        vec![
            seed,
            seed + Complex64::new(h, 0.0),
            seed + Complex64::new(0.0, h),
        ]
    };
    let mut values: Vec<f64> = vertices
        .iter()
        .map(|&v| evaluate(v))
        .collect::<Result<_>>()?;

    let mut converged = false;
    for _ in 0..opts.max_iterations {
        // sort ascending by objective
        let mut order: Vec<usize> = (0..vertices.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        vertices = order.iter().map(|&i| vertices[i]).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = vertices
            .iter()
            .flat_map(|a| vertices.iter().map(move |b| (a - b).norm()))
            .fold(0.0f64, f64::max);
        if diameter < opts.simplex_tol {
            converged = true;
            break;
        }

        let worst = vertices.len() - 1;
        let centroid: Complex64 =
            vertices[..worst].iter().sum::<Complex64>() / (worst as f64);
        let reflected = centroid + (centroid - vertices[worst]);
        let f_reflected = evaluate(reflected)?;
        if f_reflected < values[0] {
            let expanded = centroid + 2.0 * (centroid - vertices[worst]);
            let f_expanded = evaluate(expanded)?;
            if f_expanded < f_reflected {
                vertices[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                vertices[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if f_reflected < values[worst - 1] {
            vertices[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            let contracted = centroid + 0.5 * (vertices[worst] - centroid);
            let f_contracted = evaluate(contracted)?;
            if f_contracted < values[worst] {
                vertices[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                // shrink toward the best vertex
                for i in 1..vertices.len() {
                    vertices[i] = vertices[0] + 0.5 * (vertices[i] - vertices[0]);
                    values[i] = evaluate(vertices[i])?;
                }
            }
        }
    }

    if !converged {
        return Err(BemError::NotConverged(format!(
            "simplex still {:.1e} wide after {} iterations from seed {seed}",
            vertices
                .iter()
                .flat_map(|a| vertices.iter().map(move |b| (a - b).norm()))
                .fold(0.0f64, f64::max),
            opts.max_iterations
        )));
    }

    let (kr, sigma) = best.ok_or_else(|| BemError::NotConverged("no evaluations".into()))?;
    if sigma.sigma_min >= opts.accept_factor * sigma.sigma_median {
        return Err(BemError::NoResonance(format!(
            "sigma_min = {:.3e} vs median {:.3e} at kR = {kr}: seed was not near a resonance",
            sigma.sigma_min, sigma.sigma_median
        )));
    }

    let blocks = kind.unknowns_per_node();
    let mut full = match &basis {
        Some(b) => b.expand(&sigma.null_vector, blocks),
        None => sigma.null_vector.clone(),
    };
    linalg::apply_phase_convention(&mut full);
    let n = mesh.len();
    let (psi, dpsi) = match kind {
        ProblemKind::OpenDielectricTm { .. } => (full[..n].to_vec(), full[n..].to_vec()),
        ProblemKind::ClosedDirichlet => (vec![Complex64::new(0.0, 0.0); n], full),
    };
    let parity = classify_parity(
        &{
            let mut v = psi.clone();
            if blocks == 2 {
                v.extend_from_slice(&dpsi);
            } else {
                v = dpsi.clone();
            }
            v
        },
        n,
        blocks,
    )
    .or(opts.parity);

    Ok(Resonance {
        kr,
        boundary_psi: psi,
        boundary_dpsi: dpsi,
        sigma_min: sigma.sigma_min,
        sigma_median: sigma.sigma_median,
        parity,
    })
}

/// Rectangular scan grid resolution.
#[derive(Debug, Clone, Copy)]
pub struct ScanGrid {
    pub n_re: usize,
    pub n_im: usize,
}

/// Evaluate `sigma_min` on a rectangular grid in complex kR and return the
/// strict local minima that look like resonances, sorted by `sigma_min`
/// ascending.
pub fn scan_window(
    mesh: &BoundaryMesh,
    kind: ProblemKind,
    window: (Complex64, Complex64),
    grid: ScanGrid,
    accept_factor: f64,
) -> Result<Vec<Complex64>> {
    kind.validate()?;
    if grid.n_re < 8 || grid.n_im < 8 {
        return Err(BemError::Domain("scan grid must be at least 8 x 8".into()));
    }
    let (lo, hi) = window;
    if !(lo.re < hi.re && lo.im < hi.im) {
        return Err(BemError::Domain("empty scan window".into()));
    }
    if lo.re < KR_WINDOW.0 || hi.re > KR_WINDOW.1 {
        return Err(BemError::Domain(format!(
            "scan window outside solver limits Re in [{}, {}]",
            KR_WINDOW.0, KR_WINDOW.1
        )));
    }
    let mut sigma = vec![0.0f64; grid.n_re * grid.n_im];
    let mut median = vec![0.0f64; grid.n_re * grid.n_im];
    let mut points = vec![Complex64::new(0.0, 0.0); grid.n_re * grid.n_im];
    for ir in 0..grid.n_re {
        for ii in 0..grid.n_im {
            let fr = ir as f64 / (grid.n_re - 1) as f64;
            let fi = ii as f64 / (grid.n_im - 1) as f64;
            let kr = Complex64::new(
                lo.re + fr * (hi.re - lo.re),
                lo.im + fi * (hi.im - lo.im),
            );
            let s = sigma_at(mesh, kind, kr, None)?;
            let idx = ir * grid.n_im + ii;
            sigma[idx] = s.sigma_min;
            median[idx] = s.sigma_median;
            points[idx] = kr;
        }
    }
    let mut seeds: Vec<(f64, Complex64)> = Vec::new();
    for ir in 0..grid.n_re {
        for ii in 0..grid.n_im {
            let idx = ir * grid.n_im + ii;
            let here = sigma[idx];
            if here >= 10.0 * accept_factor * median[idx] {
                continue;
            }
            let mut strict_min = true;
            for dr in -1i64..=1 {
                for di in -1i64..=1 {
                    if dr == 0 && di == 0 {
                        continue;
                    }
                    let jr = ir as i64 + dr;
                    let ji = ii as i64 + di;
                    if jr < 0 || ji < 0 || jr >= grid.n_re as i64 || ji >= grid.n_im as i64 {
                        continue;
                    }
                    if sigma[jr as usize * grid.n_im + ji as usize] <= here {
                        strict_min = false;
                    }
                }
            }
            if strict_min {
                seeds.push((here, points[idx]));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(seeds.into_iter().map(|(_, kr)| kr).collect())
}

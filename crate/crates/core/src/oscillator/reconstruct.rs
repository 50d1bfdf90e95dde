//! Fock-basis density matrix from a gridded characteristic function,
//! `ρ = (1/π) ∫ d²ξ χ(ξ) D(-ξ)`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::fock::{displacement_with_table, ln_factorials};
use super::interp::{interpolate_chi, max_radius, ChiGrid, GridSpec, InterpOptions};
use super::{period_grid, sample_fixture, ChiSample, OscError, OscParams, StateFixture};
use crate::linalg::{c, hermitian_deviation, trace, trace_distance, CMatrix, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructOptions {
    /// Reject results whose clipped negative eigenvalues sum above this.
    pub max_negative_mass: Option<f64>,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            max_negative_mass: Some(0.05),
        }
    }
}

/// Reconstructed state and the size of each repair applied to it.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub density: DensityMatrix,
    /// `‖ρ - (ρ+ρ†)/2‖_F` of the raw quadrature result.
    pub hermitian_correction: f64,
    /// Sum of the clipped negative eigenvalues.
    pub negative_mass: f64,
    /// `|1 - Tr ρ|` after clipping, removed by renormalization.
    pub trace_correction: f64,
    pub raw_trace: Complex64,
}

/// Trapezoid weight of grid index `i`.
fn edge_weight(i: usize, points: usize) -> f64 {
    if i == 0 || i == points - 1 {
        0.5
    } else {
        1.0
    }
}

/// Raw quadrature `(1/π) Σ w χ(ξ) ⟨n|D(-ξ)|m⟩`, summed row by row in a
/// fixed order.
pub fn quadrature(grid: &ChiGrid, dim: usize) -> CMatrix {
    let spec = grid.spec;
    let p = spec.points;
    let h2 = spec.step() * spec.step();
    let lf = ln_factorials(dim);
    let rows: Vec<CMatrix> = (0..p)
        .into_par_iter()
        .map(|iy| {
            let mut acc = CMatrix::zeros(dim, dim);
            let wy = edge_weight(iy, p);
            for ix in 0..p {
                let chi = grid.at(ix, iy);
                if chi == c(0.0, 0.0) {
                    continue;
                }
                let w = wy * edge_weight(ix, p) * h2 / PI;
                let d = displacement_with_table(-spec.xi(ix, iy), dim, &lf);
                acc.zip_apply(&d, |a, b| *a += b * chi * w);
            }
            acc
        })
        .collect();
    let mut total = CMatrix::zeros(dim, dim);
    for r in rows {
        total += r;
    }
    total
}

/// Hermitizes, clips negative eigenvalues and renormalizes the quadrature
/// result.
pub fn reconstruct_density(
    grid: &ChiGrid,
    dim: usize,
    opts: ReconstructOptions,
) -> Result<Reconstruction, OscError> {
    if dim == 0 {
        return Err(OscError::InvalidParams("dim must be positive".into()));
    }
    let raw = quadrature(grid, dim);
    let raw_trace = trace(&raw);
    let herm = (&raw + raw.adjoint()).scale(0.5);
    let hermitian_correction = hermitian_deviation(&raw) / 2.0;
    let eig = crate::linalg::HermitianEigen::new_unchecked(&herm);
    let negative_mass: f64 = eig.values.iter().filter(|&&l| l < 0.0).map(|l| -l).sum();
    if let Some(limit) = opts.max_negative_mass {
        if negative_mass > limit {
            return Err(OscError::Quality {
                negative_mass,
                limit,
            });
        }
    }
    let clipped_trace: f64 = eig.values.iter().map(|&l| l.max(0.0)).sum();
    if !(clipped_trace > 0.0) {
        return Err(OscError::Interpolation("reconstruction has no positive part".into()));
    }
    let m = eig.apply(|l| c(l.max(0.0) / clipped_trace, 0.0));
    Ok(Reconstruction {
        density: DensityMatrix::new(m)?,
        hermitian_correction,
        negative_mass,
        trace_correction: (1.0 - clipped_trace).abs(),
        raw_trace,
    })
}

/// Settings of the sample → grid → density pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub taus_per_curve: usize,
    pub grid_points: usize,
    /// Quadrature radius is `min(radius_cap, max |ξ|)`.
    pub radius_cap: f64,
    pub interp: InterpOptions,
    pub reconstruct: ReconstructOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            taus_per_curve: 4000,
            grid_points: 161,
            radius_cap: 6.0,
            interp: InterpOptions::default(),
            reconstruct: ReconstructOptions::default(),
        }
    }
}

impl PipelineOptions {
    pub fn grid_for(&self, samples: &[ChiSample]) -> Result<GridSpec, OscError> {
        GridSpec::new(self.radius_cap.min(max_radius(samples)), self.grid_points)
    }
}

/// Interpolates `samples` and reconstructs a `dim`-level density matrix.
pub fn reconstruct_from_samples(
    samples: &[ChiSample],
    dim: usize,
    opts: &PipelineOptions,
) -> Result<(ChiGrid, Reconstruction), OscError> {
    let spec = opts.grid_for(samples)?;
    let grid = interpolate_chi(samples, spec, opts.interp)?;
    let rec = reconstruct_density(&grid, dim, opts.reconstruct)?;
    Ok((grid, rec))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockBenchmarkRow {
    pub n: u32,
    /// Curves `N = 1..=n_tilde` were sampled.
    pub n_tilde: u32,
    pub trace_distance: f64,
    pub negative_mass: f64,
    pub radius: f64,
}

/// Trace distance of reconstructed Fock states `|n⟩` as more curves are
/// added. The negative-mass limit is not applied here, since few curves are
/// expected to give poor states.
pub fn fock_benchmark(
    p: &OscParams,
    fock_numbers: &[u32],
    n_tilde_max: u32,
    dim: usize,
    opts: &PipelineOptions,
) -> Result<Vec<FockBenchmarkRow>, OscError> {
    let taus = period_grid(p, opts.taus_per_curve);
    let mut opts = *opts;
    opts.reconstruct.max_negative_mass = None;
    let mut rows = Vec::new();
    for &n in fock_numbers {
        let state = StateFixture::Fock(n);
        let exact = state.density(dim)?;
        for n_tilde in 1..=n_tilde_max {
            let ns: Vec<u32> = (1..=n_tilde).collect();
            let samples = sample_fixture(p, &ns, &taus, state);
            let (grid, rec) = reconstruct_from_samples(&samples, dim, &opts)?;
            rows.push(FockBenchmarkRow {
                n,
                n_tilde,
                trace_distance: trace_distance(&rec.density, &exact)?,
                negative_mass: rec.negative_mass,
                radius: grid.spec.radius,
            });
        }
    }
    Ok(rows)
}

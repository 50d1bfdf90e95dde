//! Dark harmonic oscillator with a probe-dependent force.
//!
//! The conditional potentials `V0,1 = ν a†a ∓ (g/2)(a + a†)` make the pulsed
//! sequence read out `U0†U1 = D(ξ)`, so the probe coherence samples the
//! characteristic function `χ(ξ) = Tr{D(ξ)ρ}` along the curves `ξ(τ, N)`.
//! Sampling, interpolation onto a grid and inversion to a Fock-basis density
//! matrix live in the submodules.

pub mod fock;
pub mod interp;
pub mod reconstruct;

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

use crate::linalg::{c, expm, CMatrix, DensityMatrix, LinalgError};
use crate::probe::{sequence_propagators, PulseSequence};

pub use fock::{displacement_matrix, laguerre, StateFixture};
pub use interp::{interpolate_chi, ChiGrid, GridSpec, InterpOptions};
pub use reconstruct::{fock_benchmark, reconstruct_density, FockBenchmarkRow, Reconstruction, ReconstructOptions};

/// Largest population tolerated in the top Fock level.
pub const TAIL_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum OscError {
    #[error("invalid oscillator parameters: {0}")]
    InvalidParams(String),
    #[error("truncation too small: top-level population {tail:.3e} exceeds {limit:.0e} at dim {dim}; increase dim")]
    Truncation { tail: f64, dim: usize, limit: f64 },
    #[error("unknown state fixture '{0}' (expected vacuum, fock:N, coherent:RE[,IM] or squeezed:RE[,IM])")]
    UnknownFixture(String),
    #[error("interpolation failed: {0}")]
    Interpolation(String),
    #[error("reconstruction quality: negative eigenvalue mass {negative_mass:.3e} exceeds {limit}")]
    Quality { negative_mass: f64, limit: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscParams {
    nu: f64,
    g: f64,
}

impl OscParams {
    pub fn new(nu: f64, g: f64) -> Result<Self, OscError> {
        if !(nu.is_finite() && nu > 0.0 && g.is_finite()) {
            return Err(OscError::InvalidParams(format!(
                "need nu > 0 and finite g, got nu = {nu}, g = {g}"
            )));
        }
        Ok(Self { nu, g })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn ratio(&self) -> f64 {
        self.g / self.nu
    }

    pub fn epsilon(&self) -> f64 {
        self.g / (2.0 * self.nu)
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.nu
    }

    /// Truncated `(V0, V1)`.
    pub fn hamiltonians(&self, dim: usize) -> (CMatrix, CMatrix) {
        let a = fock::annihilation(dim);
        let x = &a + a.adjoint();
        let n = fock::number(dim).scale(self.nu);
        let f = x.scale(self.g / 2.0);
        (&n - &f, &n + &f)
    }
}

/// `ξ(τ, N)` without the `tan(ντ/2)` pole: with `x = ντ`,
/// `ζ = (g/ν)(1 - e^{ix}) Σ_{k<N} e^{2ikx}` and `ξ = ζ + ζ* e^{2iNx}`.
pub fn xi_curve(p: &OscParams, tau: f64, n: u32) -> Complex64 {
    let x = p.nu * tau;
    let step = Complex64::from_polar(1.0, 2.0 * x);
    let mut sum = c(0.0, 0.0);
    let mut term = c(1.0, 0.0);
    for _ in 0..n {
        sum += term;
        term *= step;
    }
    let zeta = (c(1.0, 0.0) - Complex64::from_polar(1.0, x)) * sum * p.ratio();
    zeta + zeta.conj() * Complex64::from_polar(1.0, 2.0 * n as f64 * x)
}

/// The tangent form `-2(g/ν) sin(Nx) tan(x/2) e^{iNx}`; singular at `x = π`.
pub fn xi_curve_tan(p: &OscParams, tau: f64, n: u32) -> Complex64 {
    let x = p.nu * tau;
    let nx = n as f64 * x;
    Complex64::from_polar(-2.0 * p.ratio() * nx.sin() * (x / 2.0).tan(), nx)
}

/// Displacement reached without pulses after time `t`.
pub fn xi_free(p: &OscParams, t: f64) -> Complex64 {
    (Complex64::from_polar(1.0, p.nu * t) - 1.0) * p.ratio()
}

/// Population of the top Fock level of `U ρ U†`.
fn top_population(u: &CMatrix, rho: &CMatrix) -> f64 {
    let d = u.nrows();
    let row = u.row(d - 1);
    (row * rho * row.adjoint())[(0, 0)].re
}

fn check_tail(u0: &CMatrix, u1: &CMatrix, rho: &CMatrix) -> Result<(), OscError> {
    let d = rho.nrows();
    let tail = rho[(d - 1, d - 1)]
        .re
        .max(top_population(u0, rho))
        .max(top_population(u1, rho));
    if tail > TAIL_TOL {
        return Err(OscError::Truncation {
            tail,
            dim: d,
            limit: TAIL_TOL,
        });
    }
    Ok(())
}

/// `⟨σx⟩ + i⟨σy⟩` of the probe from truncated propagation.
pub fn simulate_probe_osc(
    p: &OscParams,
    seq: PulseSequence,
    rho: &DensityMatrix,
) -> Result<Complex64, OscError> {
    let (v0, v1) = p.hamiltonians(rho.dim());
    let props = sequence_propagators(&v0, &v1, seq)?;
    check_tail(&props.u0, &props.u1, rho.matrix())?;
    Ok(crate::probe::probe_coherence(&props, rho)?)
}

/// One point of the sampled characteristic function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSample {
    pub xi: Complex64,
    pub chi: Complex64,
    pub tau: f64,
    pub n_segments: u32,
    /// Obtained from `χ(-ξ) = χ(ξ)*` rather than measured.
    pub mirrored: bool,
}

/// Evenly spaced `τ` over one period, `[0, 2π/ν)`.
pub fn period_grid(p: &OscParams, points: usize) -> Vec<f64> {
    let h = p.period() / points as f64;
    (0..points).map(|k| k as f64 * h).collect()
}

fn with_mirrors(direct: Vec<ChiSample>) -> Vec<ChiSample> {
    let mut out = Vec::with_capacity(2 * direct.len());
    for s in &direct {
        out.push(*s);
    }
    for s in &direct {
        out.push(ChiSample {
            xi: -s.xi,
            chi: s.chi.conj(),
            mirrored: true,
            ..*s
        });
    }
    out
}

/// Samples `χ` along `ξ(τ, N)` for every `N` and `τ`, using `chi(ξ)` as the
/// measured value, then appends the mirrored points. Order: all direct
/// samples (`N` outer, `τ` inner), then their mirrors in the same order.
pub fn sample_characteristic(
    p: &OscParams,
    ns: &[u32],
    taus: &[f64],
    chi: impl Fn(Complex64) -> Complex64 + Sync,
) -> Vec<ChiSample> {
    let direct: Vec<ChiSample> = ns
        .iter()
        .flat_map(|&n| taus.iter().map(move |&t| (n, t)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(n, tau)| {
            let xi = xi_curve(p, tau, n);
            ChiSample {
                xi,
                chi: chi(xi),
                tau,
                n_segments: n,
                mirrored: false,
            }
        })
        .collect();
    with_mirrors(direct)
}

/// Analytic samples of a fixture.
pub fn sample_fixture(p: &OscParams, ns: &[u32], taus: &[f64], state: StateFixture) -> Vec<ChiSample> {
    sample_characteristic(p, ns, taus, |xi| state.chi_exact(xi))
}

/// Samples obtained by propagating the truncated oscillator for every
/// `(τ, N)`. Powers of the segment operators are accumulated per `τ`.
pub fn sample_simulated(
    p: &OscParams,
    ns: &[u32],
    taus: &[f64],
    rho: &DensityMatrix,
) -> Result<Vec<ChiSample>, OscError> {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let (v0, v1) = p.hamiltonians(rho.dim());
    let per_tau: Vec<Result<Vec<ChiSample>, OscError>> = taus
        .par_iter()
        .map(|&tau| {
            let mut out: Vec<(u32, f64, Complex64)> = Vec::new();
            if n_max == 0 {
                return Ok(Vec::new());
            }
            let e0 = expm(&v0, tau)?;
            let e1 = expm(&v1, tau)?;
            let seg0 = &e1 * &e0;
            let seg1 = &e0 * &e1;
            let (mut u0, mut u1) = (seg0.clone(), seg1.clone());
            for n in 1..=n_max {
                if n > 1 {
                    u0 = &seg0 * &u0;
                    u1 = &seg1 * &u1;
                }
                if ns.contains(&n) {
                    check_tail(&u0, &u1, rho.matrix())?;
                    let chi = crate::linalg::trace(&(u0.adjoint() * &u1 * rho.matrix()));
                    out.push((n, tau, chi));
                }
            }
            Ok(out
                .into_iter()
                .map(|(n, tau, chi)| ChiSample {
                    xi: xi_curve(p, tau, n),
                    chi,
                    tau,
                    n_segments: n,
                    mirrored: false,
                })
                .collect())
        })
        .collect();
    let mut by_tau = Vec::with_capacity(per_tau.len());
    for r in per_tau {
        by_tau.push(r?);
    }
    // Reorder to N outer, τ inner, matching `sample_characteristic`.
    let mut direct = Vec::new();
    for &n in ns {
        for row in &by_tau {
            direct.extend(row.iter().filter(|s| s.n_segments == n).copied());
        }
    }
    Ok(with_mirrors(direct))
}

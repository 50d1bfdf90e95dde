//! Ornstein–Uhlenbeck dephasing of the probe and Monte Carlo readout.
//!
//! The probe picks up `H_noise = (b(t)/2) σz`, with `σz = |1⟩⟨1| - |0⟩⟨0|` on
//! the probe, from a stationary Gaussian
//! `b(t)` of variance `b0²` and correlation time `tb`. `b` is held constant on
//! each step of length `dt` and advanced with the exact OU update.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{c, expm, CMatrix, CVector, DensityMatrix, LinalgError};
use crate::probe::PulseSequence;
use crate::spin::SpinFields;

/// Default number of noise steps per free-evolution interval.
pub const DEFAULT_STEPS_PER_TAU: u32 = 50;

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("invalid noise model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Standard deviation of `b`, angular frequency.
    pub b0: f64,
    /// Correlation time.
    pub tb: f64,
    /// Step length; `None` means `τ / 50`.
    pub dt: Option<f64>,
    pub seed: u64,
    pub realizations: u32,
}

impl NoiseModel {
    pub fn new(b0: f64, tb: f64, seed: u64, realizations: u32) -> Result<Self, NoiseError> {
        let m = Self {
            b0,
            tb,
            dt: None,
            seed,
            realizations,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self, NoiseError> {
        self.dt = Some(dt);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(self.b0.is_finite() && self.b0 >= 0.0) {
            return Err(NoiseError::InvalidModel(format!("b0 = {} must be >= 0", self.b0)));
        }
        if !(self.tb > 0.0) {
            return Err(NoiseError::InvalidModel(format!("tb = {} must be > 0", self.tb)));
        }
        if self.realizations == 0 {
            return Err(NoiseError::InvalidModel("at least one realization".into()));
        }
        if let Some(dt) = self.dt {
            self.check_dt(dt)?;
        }
        Ok(())
    }

    fn check_dt(&self, dt: f64) -> Result<(), NoiseError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(NoiseError::InvalidModel(format!("dt = {dt} must be > 0")));
        }
        if dt > self.tb / 20.0 {
            return Err(NoiseError::InvalidModel(format!(
                "dt = {dt:e} exceeds tb/20 = {:e}",
                self.tb / 20.0
            )));
        }
        Ok(())
    }

    /// Probe dephasing time `T2* = √2 / b0`.
    pub fn t2_star(&self) -> f64 {
        2f64.sqrt() / self.b0
    }

    /// Independent generator for realization `index`.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// `steps` samples `b(0), b(dt), ...`, with `b(0)` drawn from `N(0, b0²)`.
pub fn ou_trajectory(b0: f64, tb: f64, dt: f64, steps: usize, rng: &mut impl Rng) -> Vec<f64> {
    let decay = (-dt / tb).exp();
    let kick = b0 * (-(-2.0 * dt / tb).exp_m1()).sqrt();
    let mut path = Vec::with_capacity(steps);
    if steps == 0 {
        return path;
    }
    let mut b = b0 * rng.sample::<f64, _>(StandardNormal);
    path.push(b);
    for _ in 1..steps {
        b = b * decay + kick * rng.sample::<f64, _>(StandardNormal);
        path.push(b);
    }
    path
}

/// Sample mean, variance and autocovariance at `lag` steps.
pub fn path_statistics(path: &[f64], lag: usize) -> (f64, f64, f64) {
    let n = path.len() as f64;
    let mean = path.iter().sum::<f64>() / n;
    let var = path.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / n;
    let pairs = path.len().saturating_sub(lag);
    let cov = (0..pairs)
        .map(|i| (path[i] - mean) * (path[i + lag] - mean))
        .sum::<f64>()
        / pairs.max(1) as f64;
    (mean, var, cov)
}

/// What the probe experiences between preparation and readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    /// `2N` instantaneous π pulses spaced by `τ`.
    Pulsed(PulseSequence),
    /// No pulses over the same total time `2Nτ`.
    Ramsey(PulseSequence),
}

impl Schedule {
    fn seq(&self) -> PulseSequence {
        match self {
            Schedule::Pulsed(s) | Schedule::Ramsey(s) => *s,
        }
    }
}

/// Averaged probe readout under noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyReadout {
    pub sx_mean: f64,
    pub sy_mean: f64,
    pub sx_stderr: f64,
    pub sy_stderr: f64,
    /// Step length actually used.
    pub dt: f64,
    /// `τ` after snapping to a multiple of `dt`.
    pub tau_used: f64,
    pub steps_per_tau: u32,
}

impl NoisyReadout {
    pub fn coherence_magnitude(&self) -> f64 {
        self.sx_mean.hypot(self.sy_mean)
    }
}

/// Step length and number of steps per interval for a given `τ`.
pub fn discretize(m: &NoiseModel, tau: f64) -> Result<(f64, u32), NoiseError> {
    let dt = m.dt.unwrap_or(tau / DEFAULT_STEPS_PER_TAU as f64);
    m.check_dt(dt)?;
    let steps = ((tau / dt).round() as u32).max(1);
    Ok((dt, steps))
}

/// Monte Carlo readout of `|0⟩⟨0|⊗V0 + |1⟩⟨1|⊗V1 + (b/2)σz ⊗ 1`.
///
/// The probe-first state `|0⟩ψ0 + |1⟩ψ1` is stored as its two branches; a
/// step multiplies branch `k` by `exp(±i b dt/2) exp(-iV_k dt)` and a π pulse
/// swaps the branches. Mixed `ρ` is split into its eigencomponents.
pub fn noisy_measurement(
    v0: &CMatrix,
    v1: &CMatrix,
    rho: &DensityMatrix,
    schedule: Schedule,
    m: &NoiseModel,
) -> Result<NoisyReadout, NoiseError> {
    m.validate()?;
    if v0.nrows() != rho.dim() || v1.nrows() != rho.dim() {
        return Err(LinalgError::DimensionMismatch {
            context: "noisy_measurement",
            left: v0.nrows(),
            right: rho.dim(),
        }
        .into());
    }
    let seq = schedule.seq();
    let (dt, steps_per_tau) = discretize(m, seq.tau())?;
    let p0 = expm(v0, dt)?;
    let p1 = expm(v1, dt)?;
    let eig = rho.eigen();
    let components: Vec<(f64, CVector)> = (0..rho.dim())
        .filter(|&j| eig.values[j] > 1e-14)
        .map(|j| (eig.values[j], eig.vectors.column(j).into_owned()))
        .collect();
    let intervals = seq.pulse_count() as usize;
    let total_steps = intervals * steps_per_tau as usize;
    let pulsed = matches!(schedule, Schedule::Pulsed(_));

    let per_run: Vec<(f64, f64)> = (0..m.realizations as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = m.rng(index);
            let path = ou_trajectory(m.b0, m.tb, dt, total_steps, &mut rng);
            let mut z = c(0.0, 0.0);
            for (weight, psi) in &components {
                let mut branch = [psi.clone(), psi.clone()];
                for (k, &b) in path.iter().enumerate() {
                    let half = b * dt / 2.0;
                    branch[0] = (&p0 * &branch[0]) * c(half.cos(), half.sin());
                    branch[1] = (&p1 * &branch[1]) * c(half.cos(), -half.sin());
                    if pulsed && (k + 1) % steps_per_tau as usize == 0 {
                        branch.swap(0, 1);
                    }
                }
                // Branches start at unit norm instead of 1/√2, so
                // sx + i sy = 2ρ10 = ⟨ψ0|ψ1⟩.
                z += branch[0].dotc(&branch[1]) * *weight;
            }
            (z.re, z.im)
        })
        .collect();

    let n = per_run.len() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for &(x, y) in &per_run {
        sx += x;
        sy += y;
    }
    sx /= n;
    sy /= n;
    let (mut vx, mut vy) = (0.0, 0.0);
    for &(x, y) in &per_run {
        vx += (x - sx).powi(2);
        vy += (y - sy).powi(2);
    }
    let denom = if per_run.len() > 1 { n * (n - 1.0) } else { f64::INFINITY };
    Ok(NoisyReadout {
        sx_mean: sx,
        sy_mean: sy,
        sx_stderr: (vx / denom).sqrt(),
        sy_stderr: (vy / denom).sqrt(),
        dt,
        tau_used: steps_per_tau as f64 * dt,
        steps_per_tau,
    })
}

/// Pulsed `⟨σy⟩` readout of a dark spin under probe dephasing.
pub fn noisy_spin_measurement(
    f: &SpinFields,
    seq: PulseSequence,
    rho: &DensityMatrix,
    m: &NoiseModel,
) -> Result<NoisyReadout, NoiseError> {
    noisy_measurement(&f.v0(), &f.v1(), rho, Schedule::Pulsed(seq), m)
}

/// Pulse-free counterpart over the same total time.
pub fn noisy_spin_ramsey(
    f: &SpinFields,
    seq: PulseSequence,
    rho: &DensityMatrix,
    m: &NoiseModel,
) -> Result<NoisyReadout, NoiseError> {
    noisy_measurement(&f.v0(), &f.v1(), rho, Schedule::Ramsey(seq), m)
}

//! Two coupled dark spins read out through their zero-magnetization
//! pseudo-spin `|0̃⟩ = |01⟩`, `|1̃⟩ = |10⟩`.
//!
//! With `H_d = Σ_k (ω0/2)σz⁽ᵏ⁾ + (A_x/2)σx⁽¹⁾σx⁽²⁾` and
//! `H_1 = Σ_k [(a_z⁽ᵏ⁾/2)σz⁽ᵏ⁾ + (a_x⁽ᵏ⁾/2)σx⁽ᵏ⁾]`, the pseudo-spin sees
//! `V0 = (A_x/2)σ̃x` and `V1 = V0 + (A_z/2)σ̃z` once the `{|00⟩, |11⟩}`
//! manifold is dropped. That is the single-spin problem with `x` and `z`
//! exchanged.

use thiserror::Error;

use crate::linalg::{c, identity, kron, pauli, CMatrix, DensityMatrix, LinalgError};
use crate::probe::{full_space_readout, full_space_state, PulseSequence};
use crate::spin::{measurement_settings_y, spin_observable, SpinError, SpinFields, SpinObservable};

/// Subspace population below which the readout is flagged as weak.
pub const LOW_SIGNAL: f64 = 0.01;

#[derive(Debug, Error)]
pub enum TwoSpinError {
    #[error("invalid two-spin parameters: {0}")]
    InvalidParams(String),
    #[error("A = 0: both conditional potentials coincide on the pseudo-spin")]
    NoContrast,
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSpinParams {
    pub omega0: f64,
    /// Spin-spin coupling `A_x`.
    pub a_xx: f64,
    pub a_z: [f64; 2],
    pub a_x: [f64; 2],
}

impl TwoSpinParams {
    pub fn new(omega0: f64, a_xx: f64, a_z: [f64; 2], a_x: [f64; 2]) -> Result<Self, TwoSpinError> {
        let all = [omega0, a_xx, a_z[0], a_z[1], a_x[0], a_x[1]];
        if all.iter().any(|v| !v.is_finite()) || omega0 <= 0.0 {
            return Err(TwoSpinError::InvalidParams(format!(
                "need finite couplings and omega0 > 0, got {all:?}"
            )));
        }
        Ok(Self {
            omega0,
            a_xx,
            a_z,
            a_x,
        })
    }

    /// `A_z = a_z⁽¹⁾ - a_z⁽²⁾`.
    pub fn a_z_diff(&self) -> f64 {
        self.a_z[0] - self.a_z[1]
    }

    pub fn a_total(&self) -> f64 {
        self.a_xx.hypot(self.a_z_diff())
    }

    /// Largest coupling relative to `ω0`.
    pub fn coupling_ratio(&self) -> f64 {
        [self.a_xx, self.a_z[0], self.a_z[1], self.a_x[0], self.a_x[1]]
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
            / self.omega0
    }

    pub fn weak_coupling(&self) -> bool {
        self.coupling_ratio() <= 0.1
    }

    /// Full four-level `V0 = H_d` and `V1 = H_d + H_1`, spin 1 first.
    pub fn hamiltonians(&self) -> (CMatrix, CMatrix) {
        let id = identity(2);
        let on1 = |op: &CMatrix| kron(op, &id);
        let on2 = |op: &CMatrix| kron(&id, op);
        let (x, z) = (pauli::x(), pauli::z());
        let hd = (on1(&z) + on2(&z)).scale(self.omega0 / 2.0) + kron(&x, &x).scale(self.a_xx / 2.0);
        let h1 = on1(&z).scale(self.a_z[0] / 2.0)
            + on2(&z).scale(self.a_z[1] / 2.0)
            + on1(&x).scale(self.a_x[0] / 2.0)
            + on2(&x).scale(self.a_x[1] / 2.0);
        let v1 = &hd + h1;
        (hd, v1)
    }
}

/// Single-spin fields whose closed form describes the pseudo-spin after the
/// axis exchange in [`to_pseudo_axes`]: `ω0 → A_x`, `ω1 → A`, `v_x = A_z/A`,
/// `v_z = A_x/A`.
pub fn pseudo_spin_fields(p: &TwoSpinParams) -> Result<SpinFields, TwoSpinError> {
    if p.a_total() == 0.0 {
        return Err(TwoSpinError::NoContrast);
    }
    Ok(SpinFields::new(p.a_xx, 0.0, p.a_z_diff())?)
}

/// Maps a single-spin axis to the pseudo-spin axes, `ñ = (n_z, -n_y, n_x)`.
pub fn to_pseudo_axes(w: [f64; 3]) -> [f64; 3] {
    [w[2], -w[1], w[0]]
}

/// Pseudo-spin readout in closed form.
pub fn pseudo_observable(p: &TwoSpinParams, seq: PulseSequence) -> Result<SpinObservable, TwoSpinError> {
    let obs = spin_observable(&pseudo_spin_fields(p)?, seq);
    Ok(SpinObservable {
        cos_phi: obs.cos_phi,
        weighted_axis: to_pseudo_axes(obs.weighted_axis),
    })
}

/// `σ̃x, σ̃y, σ̃z` embedded in the four-level space.
pub fn pseudo_paulis() -> [CMatrix; 3] {
    let (i01, i10) = (1, 2);
    let mut sx = CMatrix::zeros(4, 4);
    sx[(i01, i10)] = c(1.0, 0.0);
    sx[(i10, i01)] = c(1.0, 0.0);
    let mut sy = CMatrix::zeros(4, 4);
    sy[(i01, i10)] = c(0.0, -1.0);
    sy[(i10, i01)] = c(0.0, 1.0);
    let mut sz = CMatrix::zeros(4, 4);
    sz[(i01, i01)] = c(1.0, 0.0);
    sz[(i10, i10)] = c(-1.0, 0.0);
    [sx, sy, sz]
}

/// `⟨σ̃⟩` of `ρ`, not normalized by the subspace population.
pub fn pseudo_bloch(rho: &DensityMatrix) -> Result<[f64; 3], TwoSpinError> {
    let mut r = [0.0; 3];
    for (k, s) in pseudo_paulis().iter().enumerate() {
        r[k] = rho.expectation(s)?.re;
    }
    Ok(r)
}

/// Population of `span{|01⟩, |10⟩}`.
pub fn subspace_population(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    m[(1, 1)].re + m[(2, 2)].re
}

/// `(r̃x, r̃y)` from the two-spin correlators
/// `½⟨σx σx + σy σy⟩` and `½⟨σy σx - σx σy⟩`.
pub fn witnesses(rho: &DensityMatrix) -> Result<(f64, f64), TwoSpinError> {
    let (x, y) = (pauli::x(), pauli::y());
    let wx = (kron(&x, &x) + kron(&y, &y)).scale(0.5);
    let wy = (kron(&y, &x) - kron(&x, &y)).scale(0.5);
    Ok((rho.expectation(&wx)?.re, rho.expectation(&wy)?.re))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReadout {
    pub sy_closed: f64,
    pub sy_oracle: f64,
    pub abs_err: f64,
    /// `abs_err / (max coupling / ω0)`.
    pub error_constant: f64,
    pub subspace_population: f64,
    pub warning: Option<String>,
}

/// Closed pseudo-spin prediction against the full probe ⊗ two-spin
/// propagation.
pub fn witness_measurement(
    p: &TwoSpinParams,
    seq: PulseSequence,
    rho: &DensityMatrix,
) -> Result<WitnessReadout, TwoSpinError> {
    if rho.dim() != 4 {
        return Err(LinalgError::DimensionMismatch {
            context: "witness_measurement",
            left: rho.dim(),
            right: 4,
        }
        .into());
    }
    let obs = pseudo_observable(p, seq)?;
    let sy_closed = obs.sy(pseudo_bloch(rho)?);
    let (v0, v1) = p.hamiltonians();
    let sy_oracle = full_space_readout(&v0, &v1, seq, rho)?.sy;
    let abs_err = (sy_closed - sy_oracle).abs();
    let pop = subspace_population(rho);
    let ratio = p.coupling_ratio();
    Ok(WitnessReadout {
        sy_closed,
        sy_oracle,
        abs_err,
        error_constant: if ratio > 0.0 { abs_err / ratio } else { 0.0 },
        subspace_population: pop,
        warning: (pop < LOW_SIGNAL)
            .then(|| format!("pseudo-spin population {pop:.3e} is below {LOW_SIGNAL}")),
    })
}

/// Settings for the pseudo-spin `σ̃y`-type readout: the single-spin `r_y`
/// recipe applied to [`pseudo_spin_fields`].
pub fn witness_settings(p: &TwoSpinParams, n_max: u32) -> Result<PulseSequence, TwoSpinError> {
    Ok(measurement_settings_y(&pseudo_spin_fields(p)?, n_max)?.seq)
}

/// Largest change of the `|00⟩` and `|11⟩` populations over the oracle
/// propagation, and the trace of the final joint state.
pub fn leakage(
    p: &TwoSpinParams,
    seq: PulseSequence,
    rho: &DensityMatrix,
) -> Result<(f64, f64), TwoSpinError> {
    let (v0, v1) = p.hamiltonians();
    let full = full_space_state(&v0, &v1, seq, rho)?;
    let dark = full.view((0, 0), (4, 4)) + full.view((4, 4), (4, 4));
    let before = rho.matrix();
    let change = [0usize, 3]
        .iter()
        .map(|&k| (dark[(k, k)].re - before[(k, k)].re).abs())
        .fold(0.0, f64::max);
    Ok((change, crate::linalg::trace(&full).re))
}

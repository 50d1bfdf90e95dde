//! Generic pulsed probe readout.
//!
//! With the probe starting in `|+⟩` and `2N` π pulses spaced by `τ`, the
//! branches of the probe carry the dark-system operators
//! `U0 = [e^{-iV1τ} e^{-iV0τ}]^N` and `U1 = [e^{-iV0τ} e^{-iV1τ}]^N`, and the
//! probe coherence is `⟨σx⟩ + i⟨σy⟩ = Tr{U0†U1 ρ}`.

use num_complex::Complex64;

use crate::linalg::{
    self, c, expm, identity, kron, matrix_power, partial_trace_probe, pauli, trace, CMatrix,
    DensityMatrix, LinalgError,
};

/// The `(τ, N)` pair of a sequence of `N` segments `[τ - π - τ - π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSequence {
    tau: f64,
    n_segments: u32,
}

impl PulseSequence {
    pub fn new(tau: f64, n_segments: u32) -> Result<Self, LinalgError> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(LinalgError::InvalidSequence(format!(
                "tau must be positive and finite, got {tau}"
            )));
        }
        if n_segments == 0 {
            return Err(LinalgError::InvalidSequence(
                "the sequence needs at least one segment".into(),
            ));
        }
        Ok(Self { tau, n_segments })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n_segments(&self) -> u32 {
        self.n_segments
    }

    pub fn pulse_count(&self) -> u32 {
        2 * self.n_segments
    }

    pub fn total_time(&self) -> f64 {
        2.0 * self.n_segments as f64 * self.tau
    }
}

/// The two branch operators of a pulsed evolution.
#[derive(Debug, Clone)]
pub struct Propagators {
    pub u0: CMatrix,
    pub u1: CMatrix,
}

impl Propagators {
    /// `U0†U1`, the operator whose real and imaginary parts the probe reads.
    pub fn interference(&self) -> CMatrix {
        self.u0.adjoint() * &self.u1
    }
}

/// Probe Pauli expectations after the sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReadout {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl ProbeReadout {
    pub fn coherence(&self) -> Complex64 {
        c(self.sx, self.sy)
    }
}

fn same_dim(context: &'static str, a: usize, b: usize) -> Result<(), LinalgError> {
    if a != b {
        return Err(LinalgError::DimensionMismatch {
            context,
            left: a,
            right: b,
        });
    }
    Ok(())
}

pub fn sequence_propagators(
    v0: &CMatrix,
    v1: &CMatrix,
    seq: PulseSequence,
) -> Result<Propagators, LinalgError> {
    same_dim("sequence_propagators", v0.nrows(), v1.nrows())?;
    let e0 = expm(v0, seq.tau)?;
    let e1 = expm(v1, seq.tau)?;
    let seg0 = &e1 * &e0;
    let seg1 = &e0 * &e1;
    Ok(Propagators {
        u0: matrix_power(&seg0, seq.n_segments),
        u1: matrix_power(&seg1, seq.n_segments),
    })
}

/// `Tr{U0†U1 ρ}`.
pub fn probe_coherence(props: &Propagators, rho: &DensityMatrix) -> Result<Complex64, LinalgError> {
    same_dim("probe_expectations", props.u0.nrows(), rho.dim())?;
    same_dim("probe_expectations", props.u1.nrows(), rho.dim())?;
    Ok(trace(&(props.u0.adjoint() * &props.u1 * rho.matrix())))
}

/// `(Re, Im) Tr{U0†U1 ρ}`; `⟨σz⟩` of the probe is zero for this protocol.
pub fn probe_expectations(
    props: &Propagators,
    rho: &DensityMatrix,
) -> Result<ProbeReadout, LinalgError> {
    let z = probe_coherence(props, rho)?;
    Ok(ProbeReadout {
        sx: z.re,
        sy: z.im,
        sz: 0.0,
    })
}

/// `|0⟩⟨0| ⊗ V0 + |1⟩⟨1| ⊗ V1` on the probe-first product space.
pub fn combined_hamiltonian(v0: &CMatrix, v1: &CMatrix) -> Result<CMatrix, LinalgError> {
    same_dim("combined_hamiltonian", v0.nrows(), v1.nrows())?;
    let mut p0 = CMatrix::zeros(2, 2);
    p0[(0, 0)] = c(1.0, 0.0);
    let mut p1 = CMatrix::zeros(2, 2);
    p1[(1, 1)] = c(1.0, 0.0);
    Ok(kron(&p0, v0) + kron(&p1, v1))
}

/// Full-space brute force: `|+⟩⟨+| ⊗ ρ` propagated under the combined
/// Hamiltonian with explicit instantaneous `σx ⊗ 1` pulses, then the probe
/// is read out from its reduced state. Shares nothing with
/// [`sequence_propagators`] beyond `expm`.
pub fn full_space_readout(
    v0: &CMatrix,
    v1: &CMatrix,
    seq: PulseSequence,
    rho: &DensityMatrix,
) -> Result<ProbeReadout, LinalgError> {
    let reduced = full_space_probe_state(v0, v1, seq, rho)?;
    let [x, y, z] = pauli::all();
    Ok(ProbeReadout {
        sx: trace(&(x * &reduced)).re,
        sy: trace(&(y * &reduced)).re,
        sz: trace(&(z * &reduced)).re,
    })
}

/// Reduced probe density matrix at the end of the full-space propagation.
pub fn full_space_probe_state(
    v0: &CMatrix,
    v1: &CMatrix,
    seq: PulseSequence,
    rho: &DensityMatrix,
) -> Result<CMatrix, LinalgError> {
    partial_trace_probe(&full_space_state(v0, v1, seq, rho)?)
}

/// Probe-first joint density matrix at the end of the full-space
/// propagation.
pub fn full_space_state(
    v0: &CMatrix,
    v1: &CMatrix,
    seq: PulseSequence,
    rho: &DensityMatrix,
) -> Result<CMatrix, LinalgError> {
    same_dim("full_space_readout", v0.nrows(), rho.dim())?;
    let h = combined_hamiltonian(v0, v1)?;
    let step = expm(&h, seq.tau)?;
    let step_adj = step.adjoint();
    let pulse = kron(&pauli::x(), &identity(rho.dim()));
    let plus = DensityMatrix::from_bloch([1.0, 0.0, 0.0])?;
    let mut state = kron(plus.matrix(), rho.matrix());
    for _ in 0..seq.pulse_count() {
        state = &step * state * &step_adj;
        state = &pulse * state * &pulse;
    }
    Ok(state)
}

/// Largest unitarity defect of the two branch operators.
pub fn unitarity_defect(props: &Propagators) -> f64 {
    linalg::unitarity_deviation(&props.u0).max(linalg::unitarity_deviation(&props.u1))
}

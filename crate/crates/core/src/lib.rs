//! Pulsed probe-qubit reconstruction of quantum states that cannot be
//! measured or controlled directly.
//!
//! A two-level probe is prepared in `|+⟩`, coupled to the dark system through
//! a probe-state-dependent Hamiltonian `|0⟩⟨0|⊗V0 + |1⟩⟨1|⊗V1`, and flipped by
//! `2N` instantaneous π pulses spaced by `τ`. The probe coherence afterwards
//! reads out `Tr{U0†U1 ρ}`, and tuning `(τ, N)` chooses which dark-system
//! quantity that operator represents.
//!
//! Modules:
//! - [`linalg`] and [`probe`]: dense complex kernel and the generic pulsed
//!   propagation, including a full-space brute-force oracle.
//! - [`spin`]: closed-form rotations, measurement settings, Bloch-vector
//!   inversion and coupling estimation for a dark spin-1/2.
//! - [`noise`]: Ornstein–Uhlenbeck probe dephasing and Monte Carlo readout.
//! - [`oscillator`]: displacement curves, characteristic-function sampling,
//!   interpolation and Fock-basis density reconstruction.
//! - [`twospin`]: two coupled dark spins reduced to a pseudo-spin.

pub mod error;
pub mod linalg;
pub mod noise;
pub mod oscillator;
pub mod probe;
pub mod spin;
pub mod twospin;

pub use error::Error;
pub use linalg::{CMatrix, DensityMatrix};
pub use probe::{PulseSequence, ProbeReadout};

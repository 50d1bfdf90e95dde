use thiserror::Error;

use crate::linalg::LinalgError;
use crate::noise::NoiseError;
use crate::oscillator::OscError;
use crate::spin::SpinError;
use crate::twospin::TwoSpinError;

/// Umbrella error for callers that drive several modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Oscillator(#[from] OscError),
    #[error(transparent)]
    TwoSpin(#[from] TwoSpinError),
}

//! Dense complex linear algebra shared by every simulator in the crate.
//!
//! Dimensions are runtime values: the same routines serve the 2-dim spin,
//! the 4-dim spin pair and truncated Fock spaces.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative tolerance for accepting a generator or state as Hermitian.
pub const INPUT_TOL: f64 = 1e-12;
/// Tolerance promised on outputs (unitarity, trace preservation).
pub const OUTPUT_TOL: f64 = 1e-10;
/// Smallest eigenvalue tolerated in a validated density matrix.
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: ||H - H^dagger||_F = {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },
    #[error("probe partial trace needs an even dimension, got {0}")]
    OddDimension(usize),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid pulse sequence: {0}")]
    InvalidSequence(String),
}

pub const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Pauli matrices in the `{|0⟩, |1⟩}` basis with `σz|0⟩ = +|0⟩`.
pub mod pauli {
    use super::{c, CMatrix};

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    pub fn all() -> [CMatrix; 3] {
        [x(), y(), z()]
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

fn ensure_square(m: &CMatrix) -> Result<usize, LinalgError> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Frobenius norm of `m - m†`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// Frobenius norm of `U†U - 1`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    (u.adjoint() * u - identity(u.nrows())).norm()
}

/// Rejects non-square, non-finite or non-Hermitian generators. The
/// tolerance scales with `max(1, ||H||_F)` so physical units do not matter.
pub fn check_hermitian(h: &CMatrix) -> Result<(), LinalgError> {
    ensure_square(h)?;
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let deviation = hermitian_deviation(h);
    if deviation > INPUT_TOL * h.norm().max(1.0) {
        return Err(LinalgError::NotHermitian { deviation });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(h: &CMatrix) -> Result<Self, LinalgError> {
        check_hermitian(h)?;
        Ok(Self::new_unchecked(h))
    }

    /// Symmetrizes `h` first; for matrices that are Hermitian up to roundoff.
    pub fn new_unchecked(h: &CMatrix) -> Self {
        let sym = (h + h.adjoint()).unscale(2.0);
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
        let vectors = CMatrix::from_columns(
            &order
                .iter()
                .map(|&i| eig.eigenvectors.column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        Self { values, vectors }
    }

    /// `V f(Λ) V†` for a scalar function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let fj = f(lambda);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// `exp(-i H t)` for Hermitian `H`, through its eigendecomposition.
pub fn expm(h: &CMatrix, t: f64) -> Result<CMatrix, LinalgError> {
    let eig = HermitianEigen::new(h)?;
    Ok(eig.apply(|lambda| Complex64::from_polar(1.0, -lambda * t)))
}

/// Integer matrix power by repeated squaring.
pub fn matrix_power(m: &CMatrix, mut n: u32) -> CMatrix {
    let mut result = identity(m.nrows());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = &result * &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    result
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self, LinalgError> {
        ensure_square(&m)?;
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let deviation = hermitian_deviation(&m);
        if deviation > INPUT_TOL {
            return Err(LinalgError::NotHermitian { deviation });
        }
        let tr = trace(&m);
        if (tr - c(1.0, 0.0)).norm() > INPUT_TOL {
            return Err(LinalgError::InvalidDensity(format!(
                "trace is {:.15} + {:.3e}i",
                tr.re, tr.im
            )));
        }
        let min_eig = HermitianEigen::new_unchecked(&m).values.min();
        if min_eig < -POSITIVITY_TOL {
            return Err(LinalgError::InvalidDensity(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self(m))
    }

    /// Builds `|ψ⟩⟨ψ|` after normalizing `ψ`.
    pub fn pure(psi: &CVector) -> Result<Self, LinalgError> {
        let norm = psi.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(LinalgError::InvalidDensity("zero state vector".into()));
        }
        let psi = psi.unscale(norm);
        let m = &psi * psi.adjoint();
        // Outer products are Hermitian only up to roundoff in the products.
        Self::new((&m + m.adjoint()).unscale(2.0))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(identity(dim).unscale(dim as f64))
    }

    /// Spin-1/2 state `(1 + r·σ)/2`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self, LinalgError> {
        let [x, y, z] = pauli::all();
        let m = (identity(2) + x.scale(r[0]) + y.scale(r[1]) + z.scale(r[2])).unscale(2.0);
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// `Tr{A ρ}`.
    pub fn expectation(&self, op: &CMatrix) -> Result<Complex64, LinalgError> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(LinalgError::DimensionMismatch {
                context: "expectation",
                left: op.nrows(),
                right: self.dim(),
            });
        }
        Ok(trace(&(op * &self.0)))
    }

    pub fn eigen(&self) -> HermitianEigen {
        HermitianEigen::new_unchecked(&self.0)
    }

    pub fn purity(&self) -> f64 {
        trace(&(&self.0 * &self.0)).re
    }
}

/// `½ Σ |λ_i(a - b)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64, LinalgError> {
    if a.dim() != b.dim() {
        return Err(LinalgError::DimensionMismatch {
            context: "trace_distance",
            left: a.dim(),
            right: b.dim(),
        });
    }
    let diff = a.matrix() - b.matrix();
    let eig = HermitianEigen::new_unchecked(&diff);
    Ok(0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>())
}

/// Reduced probe state of a `2 ⊗ d` operator ordered probe-first.
pub fn partial_trace_probe(full: &CMatrix) -> Result<CMatrix, LinalgError> {
    let n = ensure_square(full)?;
    if n % 2 != 0 || n == 0 {
        return Err(LinalgError::OddDimension(n));
    }
    let d = n / 2;
    let mut out = CMatrix::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            out[(a, b)] = (0..d).map(|i| full[(a * d + i, b * d + i)]).sum();
        }
    }
    Ok(out)
}

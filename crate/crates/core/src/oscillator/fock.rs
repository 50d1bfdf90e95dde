//! Truncated Fock-space operators, displacement matrix elements and the
//! reference states used as fixtures.

use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

use super::OscError;
use crate::linalg::{c, CMatrix, CVector, DensityMatrix};

/// Generalized Laguerre polynomial `L_m^{(k)}(x)` by the three-term
/// recurrence.
pub fn laguerre(m: u32, k: u32, x: f64) -> f64 {
    let k = k as f64;
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = 1.0 + k - x;
    for j in 1..m {
        let j = j as f64;
        let next = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln k!` for `k = 0..len`.
pub fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    for k in 0..len {
        if k > 1 {
            acc += (k as f64).ln();
        }
        out.push(acc);
    }
    out
}

pub fn annihilation(dim: usize) -> CMatrix {
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn number(dim: usize) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_fn(dim, |n, _| c(n as f64, 0.0)))
}

/// `⟨n|D(η)|m⟩` on the lowest `dim` Fock states. Each diagonal offset is
/// filled by one Laguerre recurrence, and the prefactor
/// `√(m!/n!) |η|^{n-m} e^{-|η|²/2}` is assembled in log space.
pub fn displacement_matrix(eta: Complex64, dim: usize) -> CMatrix {
    let lf = ln_factorials(dim);
    displacement_with_table(eta, dim, &lf)
}

pub(crate) fn displacement_with_table(eta: Complex64, dim: usize, lf: &[f64]) -> CMatrix {
    let mut d = CMatrix::zeros(dim, dim);
    let x = eta.norm_sqr();
    let r = eta.norm();
    let ln_r = r.ln();
    let arg = eta.arg();
    // Lower triangle uses η, upper triangle -η*, whose phase is π - arg η.
    let upper_arg = std::f64::consts::PI - arg;
    for k in 0..dim {
        if k > 0 && r == 0.0 {
            break;
        }
        let phase_lower = Complex64::from_polar(1.0, k as f64 * arg);
        let phase_upper = Complex64::from_polar(1.0, k as f64 * upper_arg);
        let kf = k as f64;
        let (mut prev, mut cur) = (0.0, 1.0);
        for m in 0..dim - k {
            if m == 1 {
                prev = 1.0;
                cur = 1.0 + kf - x;
            } else if m > 1 {
                let j = (m - 1) as f64;
                let next = ((2.0 * j + 1.0 + kf - x) * cur - (j + kf) * prev) / (j + 1.0);
                prev = cur;
                cur = next;
            }
            let n = m + k;
            let ln_mag = 0.5 * (lf[m] - lf[n]) + if k > 0 { kf * ln_r } else { 0.0 } - 0.5 * x;
            let mag = ln_mag.exp() * cur;
            d[(n, m)] = phase_lower * mag;
            if k > 0 {
                d[(m, n)] = phase_upper * mag;
            }
        }
    }
    d
}

/// Oscillator states with closed-form characteristic functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateFixture {
    Fock(u32),
    Coherent(Complex64),
    /// `S(λ)|0⟩` with `S(λ) = exp[(λ* a² - λ a†²)/2]`.
    Squeezed(Complex64),
}

impl StateFixture {
    /// `χ(ξ) = Tr{D(ξ)ρ}`.
    pub fn chi_exact(&self, xi: Complex64) -> Complex64 {
        let x = xi.norm_sqr();
        match *self {
            StateFixture::Fock(n) => c(laguerre(n, 0, x) * (-0.5 * x).exp(), 0.0),
            StateFixture::Coherent(eta) => {
                let e = xi * eta.conj() - xi.conj() * eta;
                (-0.5 * x).exp() * Complex64::from_polar(1.0, e.im)
            }
            StateFixture::Squeezed(lambda) => {
                let r = lambda.norm();
                let phase = if r == 0.0 { c(1.0, 0.0) } else { lambda / r };
                let z = xi * r.cosh() + xi.conj() * phase * r.sinh();
                c((-0.5 * z.norm_sqr()).exp(), 0.0)
            }
        }
    }

    /// State vector on the lowest `dim` Fock states, before renormalization.
    pub fn amplitudes(&self, dim: usize) -> CVector {
        let lf = ln_factorials(dim);
        match *self {
            StateFixture::Fock(n) => {
                let mut v = CVector::zeros(dim);
                if (n as usize) < dim {
                    v[n as usize] = c(1.0, 0.0);
                }
                v
            }
            StateFixture::Coherent(eta) => {
                let r = eta.norm();
                CVector::from_fn(dim, |n, _| {
                    if r == 0.0 {
                        return if n == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) };
                    }
                    let mag = (-0.5 * r * r + n as f64 * r.ln() - 0.5 * lf[n]).exp();
                    Complex64::from_polar(mag, n as f64 * eta.arg())
                })
            }
            StateFixture::Squeezed(lambda) => {
                let r = lambda.norm();
                let phase = if r == 0.0 { c(1.0, 0.0) } else { lambda / r };
                let t = r.tanh();
                let norm = r.cosh().sqrt().recip();
                CVector::from_fn(dim, |n, _| {
                    if n % 2 == 1 {
                        return c(0.0, 0.0);
                    }
                    let k = n / 2;
                    if k > 0 && t == 0.0 {
                        return c(0.0, 0.0);
                    }
                    // √((2k)!)/(2^k k!)
                    let ln_coef = 0.5 * lf[n] - k as f64 * 2f64.ln() - lf[k];
                    let ln_t = if k > 0 { k as f64 * t.ln() } else { 0.0 };
                    let sign = (-phase).powu(k as u32);
                    sign * (norm * (ln_coef + ln_t).exp())
                })
            }
        }
    }

    /// Population left outside the lowest `dim` states.
    pub fn truncation_loss(&self, dim: usize) -> f64 {
        (1.0 - self.amplitudes(dim).norm_squared()).max(0.0)
    }

    /// Renormalized truncated density matrix. The population of the top
    /// level must stay below `1e-6`.
    pub fn density(&self, dim: usize) -> Result<DensityMatrix, OscError> {
        let psi = self.amplitudes(dim);
        let tail = psi[dim - 1].norm_sqr() + self.truncation_loss(dim);
        if tail > super::TAIL_TOL {
            return Err(OscError::Truncation {
                tail,
                dim,
                limit: super::TAIL_TOL,
            });
        }
        Ok(DensityMatrix::pure(&psi)?)
    }
}

impl fmt::Display for StateFixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateFixture::Fock(n) => write!(f, "fock:{n}"),
            StateFixture::Coherent(e) => write!(f, "coherent:{},{}", e.re, e.im),
            StateFixture::Squeezed(l) => write!(f, "squeezed:{},{}", l.re, l.im),
        }
    }
}

/// Parses `vacuum`, `fock:N`, `coherent:RE[,IM]` or `squeezed:RE[,IM]`.
impl FromStr for StateFixture {
    type Err = OscError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || OscError::UnknownFixture(s.to_string());
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let complex = |a: Option<&str>| -> Result<Complex64, OscError> {
            let a = a.ok_or_else(bad)?;
            let mut parts = a.split(',').map(|p| p.trim().parse::<f64>());
            let re = parts.next().ok_or_else(bad)?.map_err(|_| bad())?;
            let im = match parts.next() {
                Some(p) => p.map_err(|_| bad())?,
                None => 0.0,
            };
            if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
                return Err(bad());
            }
            Ok(c(re, im))
        };
        match name {
            "vacuum" if arg.is_none() => Ok(StateFixture::Fock(0)),
            "fock" => arg
                .and_then(|a| a.parse().ok())
                .map(StateFixture::Fock)
                .ok_or_else(bad),
            "coherent" => complex(arg).map(StateFixture::Coherent),
            "squeezed" => complex(arg).map(StateFixture::Squeezed),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, trace};
    use approx::assert_abs_diff_eq;

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre(0, 3, 1.7), 1.0);
        assert_abs_diff_eq!(laguerre(1, 2, 0.5), 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(laguerre(2, 0, 2.0), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn vacuum_element_and_identity() {
        let eta = c(0.3, -0.8);
        let d = displacement_matrix(eta, 12);
        assert_abs_diff_eq!(d[(0, 0)].re, (-0.5 * eta.norm_sqr()).exp(), epsilon = 1e-15);
        assert_eq!(displacement_matrix(c(0.0, 0.0), 7), identity(7));
    }

    #[test]
    fn displacement_matches_generator_exponential() {
        // D(η) = exp(ηa† - η*a) = exp(-iH) with H = i(ηa† - η*a).
        let dim = 60;
        let eta = c(0.7, 0.4);
        let a = annihilation(dim);
        let gen = a.adjoint().map(|z| z * eta) - a.map(|z| z * eta.conj());
        let h = gen.map(|z| z * c(0.0, 1.0));
        let exact = crate::linalg::expm(&h, 1.0).unwrap();
        let d = displacement_matrix(eta, dim);
        for n in 0..15 {
            for m in 0..15 {
                assert_abs_diff_eq!(d[(n, m)].re, exact[(n, m)].re, epsilon = 1e-10);
                assert_abs_diff_eq!(d[(n, m)].im, exact[(n, m)].im, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn fixtures_have_unit_chi_at_origin() {
        for f in [
            StateFixture::Fock(3),
            StateFixture::Coherent(c(1.0, 0.5)),
            StateFixture::Squeezed(c(-(2f64.ln()), 0.0)),
        ] {
            assert_abs_diff_eq!(f.chi_exact(c(0.0, 0.0)).re, 1.0, epsilon = 1e-15);
        }
        let x = StateFixture::Fock(1).chi_exact(c(0.6, 0.8));
        assert_abs_diff_eq!(x.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn squeezed_chi_has_quoted_shape() {
        let s = StateFixture::Squeezed(c(0.5f64.ln(), 0.0));
        for xi in [c(1.0, 0.0), c(0.4, -0.9), c(-1.3, 0.2)] {
            let expected = (-xi.re * xi.re / 8.0 - 2.0 * xi.im * xi.im).exp();
            assert_abs_diff_eq!(s.chi_exact(xi).re, expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn chi_matches_trace_with_density() {
        let dim = 40;
        for f in [
            StateFixture::Fock(2),
            StateFixture::Coherent(c(1.0, 0.0)),
            StateFixture::Coherent(c(0.3, -0.7)),
            StateFixture::Squeezed(c(0.5f64.ln(), 0.0)),
            StateFixture::Squeezed(c(0.2, 0.3)),
        ] {
            let rho = f.density(dim).unwrap();
            for xi in [c(0.5, 0.2), c(-1.1, 0.9), c(0.0, 1.5)] {
                let num = trace(&(displacement_matrix(xi, dim) * rho.matrix()));
                let ex = f.chi_exact(xi);
                assert!((num - ex).norm() < 1e-8, "{f}: {num} vs {ex}");
            }
        }
    }

    #[test]
    fn fixture_parsing() {
        assert_eq!("vacuum".parse::<StateFixture>().unwrap(), StateFixture::Fock(0));
        assert_eq!("fock:2".parse::<StateFixture>().unwrap(), StateFixture::Fock(2));
        assert_eq!(
            "coherent:1".parse::<StateFixture>().unwrap(),
            StateFixture::Coherent(c(1.0, 0.0))
        );
        assert_eq!(
            "squeezed:-0.5,0.25".parse::<StateFixture>().unwrap(),
            StateFixture::Squeezed(c(-0.5, 0.25))
        );
        for bad in ["thermal:1", "fock", "fock:x", "coherent:1,2,3", "", "vacuum:1"] {
            assert!(matches!(bad.parse::<StateFixture>(), Err(OscError::UnknownFixture(_))));
        }
    }

    #[test]
    fn truncation_is_enforced() {
        assert!(StateFixture::Coherent(c(3.0, 0.0)).density(10).is_err());
        assert!(StateFixture::Fock(5).density(5).is_err());
        assert!(StateFixture::Fock(5).density(7).is_ok());
    }
}

//! Dark spin-1/2 probed through conditional longitudinal and transverse fields.
//!
//! Conditional potentials are `V0 = (ω0/2)σz` and
//! `V1 = ((ω0+a_z)/2)σz + (a_x/2)σx`. A pulse segment acts on the dark spin as
//! a rotation `u_k = exp(-iθ n_k·σ)`, and the full sequence reads out
//! `U0†U1 = cosφ - i sinφ n·σ`, so that `⟨σx⟩ = cosφ` and `⟨σy⟩ = -sinφ n·r`.

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

use crate::linalg::{c, identity, pauli, trace, CMatrix, DensityMatrix, LinalgError};
use crate::probe::{sequence_propagators, PulseSequence};

/// Below this `|sinθ|` a segment rotation axis is treated as indeterminate.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Largest condition number accepted for the Bloch inversion matrix.
pub const MAX_CONDITION: f64 = 100.0;

#[derive(Debug, Error)]
pub enum SpinError {
    #[error("invalid spin fields: {0}")]
    InvalidFields(String),
    #[error("degenerate rotation at tau = {tau:.6e}: |sin theta| = {sin:.3e}, perturb tau")]
    Degenerate { tau: f64, sin: f64 },
    #[error("composite rotation is the identity (sin phi = {0:.3e}); axis undefined")]
    TrivialComposite(f64),
    #[error("v_x = 0: transverse coupling vanishes, r_x and r_y are not reachable")]
    NoTransverseCoupling,
    #[error("N = {needed} exceeds N_max = {n_max}; a larger a_x is needed")]
    TooManySegments { needed: u64, n_max: u32 },
    #[error("no grid point gives any {axis}-contrast under |cos phi| <= {tol}")]
    NoContrast { axis: char, tol: f64 },
    #[error("inversion matrix is singular; unreachable directions: {directions:?}")]
    Singular { directions: Vec<[f64; 3]> },
    #[error("inversion matrix condition number {0:.3e} exceeds {MAX_CONDITION}")]
    IllConditioned(f64),
    #[error("coupling estimation failed: {0}")]
    EstimationFailed(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Effective fields seen by the dark spin, in angular-frequency units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinFields {
    omega0: f64,
    a_z: f64,
    a_x: f64,
    omega1: f64,
}

impl SpinFields {
    pub fn new(omega0: f64, a_z: f64, a_x: f64) -> Result<Self, SpinError> {
        if !(omega0.is_finite() && a_z.is_finite() && a_x.is_finite()) {
            return Err(SpinError::InvalidFields("non-finite field".into()));
        }
        let omega1 = (omega0 + a_z).hypot(a_x);
        if omega1 <= 0.0 {
            return Err(SpinError::InvalidFields("omega1 must be positive".into()));
        }
        Ok(Self {
            omega0,
            a_z,
            a_x,
            omega1,
        })
    }

    /// Couplings given as fractions of `ω0`.
    pub fn relative(omega0: f64, a_z_rel: f64, a_x_rel: f64) -> Result<Self, SpinError> {
        Self::new(omega0, a_z_rel * omega0, a_x_rel * omega0)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn a_z(&self) -> f64 {
        self.a_z
    }

    pub fn a_x(&self) -> f64 {
        self.a_x
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn v_x(&self) -> f64 {
        self.a_x / self.omega1
    }

    pub fn v_z(&self) -> f64 {
        (self.omega0 + self.a_z) / self.omega1
    }

    /// `τ1 = 2π/(ω1 + ω0)`, where the segment axes are antiparallel.
    pub fn tau1(&self) -> f64 {
        2.0 * PI / (self.omega1 + self.omega0)
    }

    pub fn v0(&self) -> CMatrix {
        pauli::z().scale(self.omega0 / 2.0)
    }

    pub fn v1(&self) -> CMatrix {
        pauli::z().scale((self.omega0 + self.a_z) / 2.0) + pauli::x().scale(self.a_x / 2.0)
    }
}

/// Rotation `exp(-i angle axis·σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    pub angle: f64,
    pub axis: [f64; 3],
}

impl AxisAngle {
    pub fn unitary(&self) -> CMatrix {
        let [x, y, z] = pauli::all();
        let gen = x.scale(self.axis[0]) + y.scale(self.axis[1]) + z.scale(self.axis[2]);
        identity(2).scale(self.angle.cos()) - gen.map(|e| e * c(0.0, self.angle.sin()))
    }
}

/// `u0 = exp(-iθ n0·σ)` and `u1 = exp(-iθ n1·σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentRotation {
    pub theta: f64,
    pub n0: [f64; 3],
    pub n1: [f64; 3],
}

impl SegmentRotation {
    pub fn u0(&self) -> AxisAngle {
        AxisAngle {
            angle: self.theta,
            axis: self.n0,
        }
    }

    pub fn u1(&self) -> AxisAngle {
        AxisAngle {
            angle: self.theta,
            axis: self.n1,
        }
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn mirror_y(a: [f64; 3]) -> [f64; 3] {
    [a[0], -a[1], a[2]]
}

/// `(cosθ, sinθ·n0)` of one segment. Finite for every `τ`.
fn segment_vector(f: &SpinFields, tau: f64) -> (f64, [f64; 3]) {
    let (sa, ca) = (f.omega0 * tau / 2.0).sin_cos();
    let (sb, cb) = (f.omega1 * tau / 2.0).sin_cos();
    let (vx, vz) = (f.v_x(), f.v_z());
    let cos_theta = ca * cb - vz * sa * sb;
    let v = [vx * ca * sb, -vx * sa * sb, sa * cb + vz * ca * sb];
    (cos_theta, v)
}

pub fn segment_rotation(f: &SpinFields, tau: f64) -> Result<SegmentRotation, SpinError> {
    let (cos_theta, v) = segment_vector(f, tau);
    let sin_theta = norm(v);
    if sin_theta < DEGENERACY_TOL {
        return Err(SpinError::Degenerate { tau, sin: sin_theta });
    }
    let n0 = scale(v, 1.0 / sin_theta);
    Ok(SegmentRotation {
        theta: sin_theta.atan2(cos_theta),
        n0,
        n1: mirror_y(n0),
    })
}

/// `cosφ` and `sinφ·n` of `U0†U1`, the quantities a probe readout sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinObservable {
    pub cos_phi: f64,
    pub weighted_axis: [f64; 3],
}

impl SpinObservable {
    pub fn sin_phi(&self) -> f64 {
        norm(self.weighted_axis)
    }

    pub fn axis_angle(&self) -> Result<AxisAngle, SpinError> {
        let s = self.sin_phi();
        if s < DEGENERACY_TOL {
            return Err(SpinError::TrivialComposite(s));
        }
        Ok(AxisAngle {
            angle: s.atan2(self.cos_phi),
            axis: scale(self.weighted_axis, 1.0 / s),
        })
    }

    /// Probe `⟨σy⟩` for a dark spin with Bloch vector `r`.
    pub fn sy(&self, r: [f64; 3]) -> f64 {
        -dot(self.weighted_axis, r)
    }

    pub fn component(&self, axis: Axis) -> f64 {
        self.weighted_axis[axis.index()]
    }
}

/// Combines `cos(Nθ)`, `sin(Nθ)n0` and `sin(Nθ)n1` into `U0†U1`.
fn compose(c_n: f64, s_n0: [f64; 3], s_n1: [f64; 3]) -> SpinObservable {
    let diff = [s_n1[0] - s_n0[0], s_n1[1] - s_n0[1], s_n1[2] - s_n0[2]];
    let x = cross(s_n0, s_n1);
    SpinObservable {
        cos_phi: c_n * c_n + dot(s_n0, s_n1),
        weighted_axis: [
            c_n * diff[0] - x[0],
            c_n * diff[1] - x[1],
            c_n * diff[2] - x[2],
        ],
    }
}

pub fn composite_rotation(seg: &SegmentRotation, n: u32) -> SpinObservable {
    let (s, c_n) = (n as f64 * seg.theta).sin_cos();
    compose(c_n, scale(seg.n0, s), scale(seg.n1, s))
}

/// `T_N(x)` and `U_{N-1}(x)`, so that `cos Nθ = T_N(cosθ)` and
/// `sin Nθ = U_{N-1}(cosθ) sinθ`.
fn chebyshev(n: u32, x: f64) -> (f64, f64) {
    let (mut t_prev, mut t) = (1.0, x);
    let (mut u_prev, mut u) = (0.0, 1.0);
    for _ in 1..n {
        let t_next = 2.0 * x * t - t_prev;
        let u_next = 2.0 * x * u - u_prev;
        t_prev = t;
        t = t_next;
        u_prev = u;
        u = u_next;
    }
    (t, u)
}

/// Closed-form readout of a pulsed sequence. Uses the unnormalized segment
/// vector with Chebyshev powers, so it stays finite where `sinθ = 0`.
pub fn spin_observable(f: &SpinFields, seq: PulseSequence) -> SpinObservable {
    let (cos_theta, v) = segment_vector(f, seq.tau());
    let (t_n, u_n1) = chebyshev(seq.n_segments(), cos_theta);
    let s_n0 = scale(v, u_n1);
    compose(t_n, s_n0, mirror_y(s_n0))
}

/// Same quantity read off the numerically propagated 2×2 product `U0†U1`.
pub fn numeric_observable(f: &SpinFields, seq: PulseSequence) -> Result<SpinObservable, SpinError> {
    let w = sequence_propagators(&f.v0(), &f.v1(), seq)?.interference();
    Ok(decompose_su2(&w))
}

/// `W = cosφ - i w·σ`: `cosφ = Re Tr W / 2`, `w_k = Re(i Tr(W σ_k)) / 2`.
pub fn decompose_su2(w: &CMatrix) -> SpinObservable {
    let mut axis = [0.0; 3];
    for (k, s) in pauli::all().iter().enumerate() {
        axis[k] = (c(0.0, 1.0) * trace(&(w * s))).re / 2.0;
    }
    SpinObservable {
        cos_phi: trace(w).re / 2.0,
        weighted_axis: axis,
    }
}

/// Pulse-free readout `U0†U1 = exp(iV0τ) exp(-iV1τ)` after a free evolution
/// of duration `tau`. Its transverse part never exceeds `v_x`.
pub fn free_evolution_observable(f: &SpinFields, tau: f64) -> SpinObservable {
    let (sa, ca) = (f.omega0 * tau / 2.0).sin_cos();
    let (sb, cb) = (f.omega1 * tau / 2.0).sin_cos();
    let (vx, vz) = (f.v_x(), f.v_z());
    SpinObservable {
        cos_phi: ca * cb + vz * sa * sb,
        weighted_axis: [vx * ca * sb, -vx * sa * sb, -sa * cb + vz * ca * sb],
    }
}

/// Bloch vector of a dark spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn new(r: [f64; 3]) -> Result<Self, SpinError> {
        if r.iter().any(|x| !x.is_finite()) || norm(r) > 1.0 + 1e-10 {
            return Err(SpinError::InvalidFields(format!(
                "Bloch vector {r:?} lies outside the unit ball"
            )));
        }
        Ok(Self(r))
    }

    pub fn norm(&self) -> f64 {
        norm(self.0)
    }

    pub fn density(&self) -> Result<DensityMatrix, SpinError> {
        Ok(DensityMatrix::from_bloch(self.0)?)
    }

    pub fn from_density(rho: &DensityMatrix) -> Result<Self, SpinError> {
        if rho.dim() != 2 {
            return Err(LinalgError::DimensionMismatch {
                context: "Bloch vector",
                left: rho.dim(),
                right: 2,
            }
            .into());
        }
        let mut r = [0.0; 3];
        for (k, s) in pauli::all().iter().enumerate() {
            r[k] = rho.expectation(s)?.re;
        }
        Self::new(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn label(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

/// A sequence together with the readout it produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setting {
    pub seq: PulseSequence,
    pub observable: SpinObservable,
}

/// `τ1` and `N = round(π/4v_x)`, which make `sinφ n_y ≈ -1`.
pub fn measurement_settings_y(f: &SpinFields, n_max: u32) -> Result<Setting, SpinError> {
    let vx = f.v_x().abs();
    if vx == 0.0 {
        return Err(SpinError::NoTransverseCoupling);
    }
    let exact = PI / (4.0 * vx);
    if exact > n_max as f64 + 0.5 {
        return Err(SpinError::TooManySegments {
            needed: exact.round() as u64,
            n_max,
        });
    }
    let n = (exact.round() as u32).max(1);
    let seq = PulseSequence::new(f.tau1(), n)?;
    Ok(Setting {
        seq,
        observable: spin_observable(f, seq),
    })
}

/// Grid for the numerical search of x and z settings, with `τ` in units of
/// `τ1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchGrid {
    pub tau_max_over_tau1: f64,
    pub tau_points: usize,
    pub n_min: u32,
    pub n_max: u32,
    pub cos_tol: f64,
}

impl Default for SearchGrid {
    fn default() -> Self {
        Self {
            tau_max_over_tau1: 3.0,
            tau_points: 600,
            n_min: 1,
            n_max: 40,
            cos_tol: 0.05,
        }
    }
}

impl SearchGrid {
    pub fn taus(&self, tau1: f64) -> Vec<f64> {
        let step = self.tau_max_over_tau1 * tau1 / self.tau_points as f64;
        (1..=self.tau_points).map(|k| k as f64 * step).collect()
    }
}

/// Outcome of a grid search; `warning` is set when the best value is below
/// 0.9.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub setting: Setting,
    pub warning: Option<String>,
}

/// Grid point maximizing `|sinφ n_axis|` under `|cosφ| ≤ cos_tol`.
pub fn search_setting(
    f: &SpinFields,
    axis: Axis,
    grid: &SearchGrid,
) -> Result<SearchResult, SpinError> {
    if grid.tau_points == 0 || grid.n_min == 0 || grid.n_min > grid.n_max {
        return Err(SpinError::InvalidFields("empty search grid".into()));
    }
    let taus = grid.taus(f.tau1());
    let best_per_tau: Vec<Option<(f64, Setting)>> = taus
        .par_iter()
        .map(|&tau| {
            let mut best: Option<(f64, Setting)> = None;
            for n in grid.n_min..=grid.n_max {
                let seq = PulseSequence::new(tau, n).ok()?;
                let obs = spin_observable(f, seq);
                if obs.cos_phi.abs() > grid.cos_tol {
                    continue;
                }
                let score = obs.component(axis).abs();
                if best.is_none_or(|(b, _)| score > b) {
                    best = Some((score, Setting { seq, observable: obs }));
                }
            }
            best
        })
        .collect();
    let mut best: Option<(f64, Setting)> = None;
    for cand in best_per_tau.into_iter().flatten() {
        if best.is_none_or(|(b, _)| cand.0 > b) {
            best = Some(cand);
        }
    }
    match best {
        Some((score, setting)) if score > 1e-6 => Ok(SearchResult {
            setting,
            warning: (score < 0.9).then(|| {
                format!(
                    "best |sin phi n_{}| on the grid is {score:.4}, below 0.9",
                    axis.label()
                )
            }),
        }),
        _ => Err(SpinError::NoContrast {
            axis: axis.label(),
            tol: grid.cos_tol,
        }),
    }
}

pub fn measurement_settings_x(f: &SpinFields, grid: &SearchGrid) -> Result<SearchResult, SpinError> {
    search_setting(f, Axis::X, grid)
}

pub fn measurement_settings_z(f: &SpinFields, grid: &SearchGrid) -> Result<SearchResult, SpinError> {
    search_setting(f, Axis::Z, grid)
}

/// Result of the three-setting linear inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochEstimate {
    pub r: BlochVector,
    /// Norm before clipping; clipping happened when this exceeds 1.
    pub raw_norm: f64,
    pub clipped: bool,
    pub condition_number: f64,
}

/// Solves `sy_i = -(sinφ n)_i · r` for `r`.
pub fn invert_bloch(
    observables: &[SpinObservable; 3],
    measured_sy: [f64; 3],
) -> Result<BlochEstimate, SpinError> {
    let m = Matrix3::from_fn(|i, j| -observables[i].weighted_axis[j]);
    let svd = m.svd(true, true);
    let sv = svd.singular_values;
    let s_max = sv.max();
    let v_t = svd.v_t.expect("requested V^T");
    let rank_tol = 1e-10 * s_max.max(1e-300);
    let null: Vec<[f64; 3]> = (0..3)
        .filter(|&k| sv[k] <= rank_tol)
        .map(|k| [v_t[(k, 0)], v_t[(k, 1)], v_t[(k, 2)]])
        .collect();
    if !null.is_empty() || s_max == 0.0 {
        return Err(SpinError::Singular { directions: null });
    }
    let cond = s_max / sv.min();
    if cond > MAX_CONDITION {
        return Err(SpinError::IllConditioned(cond));
    }
    let b = Vector3::from(measured_sy);
    let r = svd
        .solve(&b, 0.0)
        .map_err(|e| SpinError::EstimationFailed(e.to_string()))?;
    let mut r = [r[0], r[1], r[2]];
    let raw_norm = norm(r);
    let clipped = raw_norm > 1.0;
    if clipped {
        r = scale(r, 1.0 / raw_norm);
    }
    Ok(BlochEstimate {
        r: BlochVector(r),
        raw_norm,
        clipped,
        condition_number: cond,
    })
}

pub fn reconstruct_bloch(
    f: &SpinFields,
    settings: &[PulseSequence; 3],
    measured_sy: [f64; 3],
) -> Result<BlochEstimate, SpinError> {
    let obs = settings.map(|s| spin_observable(f, s));
    invert_bloch(&obs, measured_sy)
}

/// One row of a `(τ, N)` scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub tau: f64,
    pub n: u32,
    pub cos_phi: f64,
    pub w: [f64; 3],
}

/// Closed-form readout over `taus × ns`, ordered by `N` then `τ`.
pub fn scan(f: &SpinFields, taus: &[f64], ns: &[u32]) -> Result<Vec<ScanRow>, SpinError> {
    let pairs: Vec<(u32, f64)> = ns
        .iter()
        .flat_map(|&n| taus.iter().map(move |&t| (n, t)))
        .collect();
    pairs
        .par_iter()
        .map(|&(n, tau)| {
            let obs = spin_observable(f, PulseSequence::new(tau, n)?);
            Ok(ScanRow {
                tau,
                n,
                cos_phi: obs.cos_phi,
                w: obs.weighted_axis,
            })
        })
        .collect()
}

/// `cosφ` versus `τ` at one fixed `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauSweep {
    pub n: u32,
    pub taus: Vec<f64>,
    pub cos_phi: Vec<f64>,
}

/// Estimated couplings together with the intermediate quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingEstimate {
    pub tau1: f64,
    pub omega1: f64,
    pub n_opt: u32,
    pub a_z: f64,
    pub a_x: f64,
}

/// Contrast below which a sweep is considered flat.
const MIN_CONTRAST: f64 = 1e-6;

/// Position of the first dip that reaches at least half the deepest one,
/// refined by a parabola through its neighbours.
pub fn locate_tau1(sweeps: &[TauSweep]) -> Result<(u32, f64), SpinError> {
    let mut ordered: Vec<&TauSweep> = sweeps.iter().collect();
    ordered.sort_by_key(|s| s.n);
    for sw in ordered {
        if sw.taus.len() != sw.cos_phi.len() || sw.taus.len() < 3 {
            return Err(SpinError::EstimationFailed(format!(
                "sweep at N = {} needs at least 3 matching samples",
                sw.n
            )));
        }
        let y = &sw.cos_phi;
        let top = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let bottom = y.iter().cloned().fold(f64::INFINITY, f64::min);
        let depth = top - bottom;
        if !(depth > MIN_CONTRAST) {
            continue;
        }
        let threshold = top - 0.5 * depth;
        let idx = (1..y.len() - 1)
            .find(|&i| y[i] <= y[i - 1] && y[i] <= y[i + 1] && y[i] <= threshold);
        let Some(i) = idx else { continue };
        let (t0, t1, t2) = (sw.taus[i - 1], sw.taus[i], sw.taus[i + 1]);
        let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
        let denom = (t0 - t1) * (t0 - t2) * (t1 - t2);
        let a = (t2 * (y1 - y0) + t1 * (y0 - y2) + t0 * (y2 - y1)) / denom;
        let b = (t2 * t2 * (y0 - y1) + t1 * t1 * (y2 - y0) + t0 * t0 * (y1 - y2)) / denom;
        let vertex = if a > 0.0 { -b / (2.0 * a) } else { t1 };
        let tau1 = if vertex > t0 && vertex < t2 { vertex } else { t1 };
        return Ok((sw.n, tau1));
    }
    Err(SpinError::EstimationFailed(
        "no sweep shows a cos phi dip".into(),
    ))
}

/// Extracts `a_z` and `a_x` from `cosφ` sweeps. `measure_at_tau1` supplies
/// `cosφ` for the follow-up sweep over `N` at the estimated `τ1`. The sign of
/// `a_x` is not observable; it is reported as nonnegative.
pub fn estimate_coupling(
    omega0: f64,
    sweeps: &[TauSweep],
    n_max: u32,
    mut measure_at_tau1: impl FnMut(PulseSequence) -> Result<f64, SpinError>,
) -> Result<CouplingEstimate, SpinError> {
    let (_, tau1) = locate_tau1(sweeps)?;
    let omega1 = 2.0 * PI / tau1 - omega0;
    if !(omega1 > 0.0) {
        return Err(SpinError::EstimationFailed(format!(
            "estimated omega1 = {omega1} is not positive"
        )));
    }
    let mut best = (f64::INFINITY, 0u32);
    for n in 1..=n_max {
        let v = measure_at_tau1(PulseSequence::new(tau1, n)?)?.abs();
        if v < best.0 {
            best = (v, n);
        }
    }
    let n_opt = best.1;
    if n_opt == 0 {
        return Err(SpinError::EstimationFailed("empty N range".into()));
    }
    let a_x = omega1 * PI / (4.0 * n_opt as f64);
    if a_x > omega1 {
        return Err(SpinError::EstimationFailed(format!(
            "a_x = {a_x} exceeds omega1 = {omega1}"
        )));
    }
    let a_z = (omega1 * omega1 - a_x * a_x).sqrt() - omega0;
    Ok(CouplingEstimate {
        tau1,
        omega1,
        n_opt,
        a_z,
        a_x,
    })
}

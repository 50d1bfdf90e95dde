//! Experiment configuration files.
//!
//! Frequencies are given as ordinary frequencies under `*_over_2pi` keys and
//! converted to angular frequencies on use. Times are in the reciprocal unit
//! of those frequencies. Physical parameters are required; numerical
//! settings have defaults, and the resolved values are written back into the
//! run manifest.

use std::f64::consts::TAU;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SpinScan,
    SpinReconstruct,
    SpinNoise,
    EstimateCoupling,
    OscCurves,
    OscSample,
    OscReconstruct,
    FockBenchmark,
    Twospin,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::SpinScan => "spin-scan",
            Experiment::SpinReconstruct => "spin-reconstruct",
            Experiment::SpinNoise => "spin-noise",
            Experiment::EstimateCoupling => "estimate-coupling",
            Experiment::OscCurves => "osc-curves",
            Experiment::OscSample => "osc-sample",
            Experiment::OscReconstruct => "osc-reconstruct",
            Experiment::FockBenchmark => "fock-benchmark",
            Experiment::Twospin => "twospin",
        }
    }

    /// Sections the experiment reads; any other section is rejected.
    fn sections(self) -> &'static [&'static str] {
        match self {
            Experiment::SpinScan => &["spin", "scan"],
            Experiment::SpinReconstruct => &["spin", "state", "search"],
            Experiment::SpinNoise => &["spin", "noise"],
            Experiment::EstimateCoupling => &["spin", "estimate"],
            Experiment::OscCurves => &["oscillator", "curves"],
            Experiment::OscSample => &["oscillator", "sampling"],
            Experiment::OscReconstruct => &["oscillator", "sampling", "reconstruct"],
            Experiment::FockBenchmark => &["oscillator", "benchmark", "reconstruct"],
            Experiment::Twospin => &["twospin", "witness"],
        }
    }

    /// Sections without defaults.
    fn required(self) -> &'static [&'static str] {
        match self {
            Experiment::SpinScan
            | Experiment::SpinReconstruct
            | Experiment::EstimateCoupling => &["spin"],
            Experiment::SpinNoise => &["spin", "noise"],
            Experiment::OscCurves | Experiment::FockBenchmark => &["oscillator"],
            Experiment::OscSample | Experiment::OscReconstruct => &["oscillator", "sampling"],
            Experiment::Twospin => &["twospin"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<SpinSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oscillator: Option<OscillatorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<CurvesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconstruct: Option<ReconstructSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<BenchmarkSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twospin: Option<TwoSpinSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSection>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSection {
    pub omega0_over_2pi: f64,
    pub a_z_over_2pi: f64,
    pub a_x_over_2pi: f64,
}

impl SpinSection {
    pub fn fields(&self) -> Result<darkprobe::spin::SpinFields, CliError> {
        darkprobe::spin::SpinFields::new(
            TAU * self.omega0_over_2pi,
            TAU * self.a_z_over_2pi,
            TAU * self.a_x_over_2pi,
        )
        .map_err(|e| CliError::Config(format!("spin: {e}")))
    }
}

/// `(τ, N)` grid. An unset `τ` range means `[0.5 τ1, 1.5 τ1]`.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<f64>,
    pub tau_points: usize,
    pub n_min: u32,
    pub n_max: u32,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            tau_min: None,
            tau_max: None,
            tau_points: 201,
            n_min: 1,
            n_max: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateSection {
    pub bloch: [f64; 3],
}

impl Default for StateSection {
    fn default() -> Self {
        Self {
            bloch: [0.3, 0.4, -0.2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSection {
    pub tau_max_over_tau1: f64,
    pub tau_points: usize,
    pub n_max: u32,
    pub cos_tol: f64,
}

impl Default for SearchSection {
    fn default() -> Self {
        let g = darkprobe::spin::SearchGrid::default();
        Self {
            tau_max_over_tau1: g.tau_max_over_tau1,
            tau_points: g.tau_points,
            n_max: g.n_max,
            cos_tol: g.cos_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub b0_over_2pi: Vec<f64>,
    pub tb: Vec<f64>,
    pub tau: f64,
    pub n: u32,
    #[serde(default = "default_noise_bloch")]
    pub bloch: [f64; 3],
    #[serde(default = "default_realizations")]
    pub realizations: u32,
    #[serde(default = "default_steps_per_tau")]
    pub steps_per_tau: u32,
    /// Also run the pulse-free schedule over the same total time.
    #[serde(default)]
    pub ramsey: bool,
}

fn default_noise_bloch() -> [f64; 3] {
    [0.0, 0.4, 0.0]
}

fn default_realizations() -> u32 {
    1000
}

fn default_steps_per_tau() -> u32 {
    darkprobe::noise::DEFAULT_STEPS_PER_TAU
}

/// `cosφ` sweeps for coupling estimation. An unset `τ` range means
/// `[0.8, 1.2]·π/ω0`, which brackets `τ1` for weak coupling.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateSection {
    pub sweep_n: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<f64>,
    pub tau_points: usize,
    pub n_max: u32,
}

impl Default for EstimateSection {
    fn default() -> Self {
        Self {
            sweep_n: vec![2, 4, 6, 8, 10],
            tau_min: None,
            tau_max: None,
            tau_points: 401,
            n_max: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSection {
    pub nu_over_2pi: f64,
    pub g_over_nu: f64,
}

impl OscillatorSection {
    pub fn params(&self) -> Result<darkprobe::oscillator::OscParams, CliError> {
        let nu = TAU * self.nu_over_2pi;
        darkprobe::oscillator::OscParams::new(nu, self.g_over_nu * nu)
            .map_err(|e| CliError::Config(format!("oscillator: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurvesSection {
    pub n_max: u32,
    pub taus_per_curve: usize,
}

impl Default for CurvesSection {
    fn default() -> Self {
        Self {
            n_max: 20,
            taus_per_curve: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChiSource {
    /// Closed-form `χ` of the fixture at each `ξ(τ, N)`.
    Analytic,
    /// Truncated propagation of probe and oscillator.
    Simulated,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    /// `vacuum`, `fock:N`, `coherent:RE[,IM]` or `squeezed:RE[,IM]`.
    pub fixture: String,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    #[serde(default = "default_taus_per_curve")]
    pub taus_per_curve: usize,
    #[serde(default = "default_source")]
    pub source: ChiSource,
    #[serde(default = "default_dim")]
    pub dim: usize,
}

fn default_n_max() -> u32 {
    20
}

fn default_taus_per_curve() -> usize {
    4000
}

fn default_source() -> ChiSource {
    ChiSource::Analytic
}

fn default_dim() -> usize {
    40
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructSection {
    pub grid_points: usize,
    pub radius_cap: f64,
    pub thin_cell: f64,
    pub cutoff: f64,
    /// Negative eigenvalue mass above which a reconstruction is rejected;
    /// a negative value disables the check.
    pub max_negative_mass: f64,
}

impl Default for ReconstructSection {
    fn default() -> Self {
        let p = darkprobe::oscillator::reconstruct::PipelineOptions::default();
        Self {
            grid_points: p.grid_points,
            radius_cap: p.radius_cap,
            thin_cell: p.interp.thin_cell,
            cutoff: p.interp.cutoff,
            max_negative_mass: p.reconstruct.max_negative_mass.unwrap_or(-1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchmarkSection {
    pub fock: Vec<u32>,
    pub n_tilde_max: u32,
    pub taus_per_curve: usize,
    pub dim: usize,
}

impl Default for BenchmarkSection {
    fn default() -> Self {
        Self {
            fock: vec![0, 1, 2],
            n_tilde_max: 20,
            taus_per_curve: 1000,
            dim: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TwoSpinSection {
    pub omega0_over_2pi: f64,
    /// Spin-spin coupling `A_x`.
    pub a_xx_over_2pi: f64,
    pub a_z_over_2pi: [f64; 2],
    pub a_x_over_2pi: [f64; 2],
}

impl TwoSpinSection {
    pub fn params(&self) -> Result<darkprobe::twospin::TwoSpinParams, CliError> {
        darkprobe::twospin::TwoSpinParams::new(
            TAU * self.omega0_over_2pi,
            TAU * self.a_xx_over_2pi,
            self.a_z_over_2pi.map(|v| TAU * v),
            self.a_x_over_2pi.map(|v| TAU * v),
        )
        .map_err(|e| CliError::Config(format!("twospin: {e}")))
    }
}

/// Two-spin states to read out. Named states are `bell`, `bell-minus`,
/// `00`, `01`, `10`, `11` and `mixed`; `random_states` adds seeded random
/// mixed states. Unset `tau`/`n` use the `σ̃y` recipe on the pseudo-spin.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct WitnessSection {
    pub states: Vec<String>,
    pub random_states: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    pub n_max: u32,
}

impl Default for WitnessSection {
    fn default() -> Self {
        Self {
            states: vec!["bell".into(), "01".into()],
            random_states: 0,
            tau: None,
            n: None,
            n_max: 40,
        }
    }
}

fn config_err(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(config_err(field, format!("must be positive and finite, got {v}")))
    }
}

fn nonempty(field: &str, len: usize) -> Result<(), CliError> {
    if len == 0 {
        Err(config_err(field, "grid is empty"))
    } else {
        Ok(())
    }
}

fn n_range(field: &str, lo: u32, hi: u32) -> Result<(), CliError> {
    if lo == 0 || lo > hi {
        Err(config_err(field, format!("need 1 <= n_min <= n_max, got {lo}..={hi}")))
    } else {
        Ok(())
    }
}

fn tau_range(field: &str, lo: Option<f64>, hi: Option<f64>) -> Result<(), CliError> {
    if let Some(v) = lo {
        positive(&format!("{field}.tau_min"), v)?;
    }
    if let Some(v) = hi {
        positive(&format!("{field}.tau_max"), v)?;
    }
    if let (Some(a), Some(b)) = (lo, hi) {
        if a >= b {
            return Err(config_err(field, format!("tau_min {a} must be below tau_max {b}")));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.resolve()?;
        Ok(cfg)
    }

    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let flags = [
            ("spin", self.spin.is_some()),
            ("scan", self.scan.is_some()),
            ("state", self.state.is_some()),
            ("search", self.search.is_some()),
            ("noise", self.noise.is_some()),
            ("estimate", self.estimate.is_some()),
            ("oscillator", self.oscillator.is_some()),
            ("curves", self.curves.is_some()),
            ("sampling", self.sampling.is_some()),
            ("reconstruct", self.reconstruct.is_some()),
            ("benchmark", self.benchmark.is_some()),
            ("twospin", self.twospin.is_some()),
            ("witness", self.witness.is_some()),
        ];
        for (name, on) in flags {
            if on {
                out.push(name);
            }
        }
        out
    }

    /// Checks section membership, fills defaulted sections and validates
    /// values.
    fn resolve(&mut self) -> Result<(), CliError> {
        let exp = self.experiment;
        for s in self.present() {
            if !exp.sections().contains(&s) {
                return Err(config_err(s, format!("section is not used by {}", exp.name())));
            }
        }
        let present = self.present();
        for s in exp.required() {
            if !present.contains(s) {
                return Err(config_err(s, format!("section is required by {}", exp.name())));
            }
        }
        let uses = |s: &str| exp.sections().contains(&s);
        if uses("scan") {
            self.scan.get_or_insert_with(Default::default);
        }
        if uses("state") {
            self.state.get_or_insert_with(Default::default);
        }
        if uses("search") {
            self.search.get_or_insert_with(Default::default);
        }
        if uses("estimate") {
            self.estimate.get_or_insert_with(Default::default);
        }
        if uses("curves") {
            self.curves.get_or_insert_with(Default::default);
        }
        if uses("reconstruct") {
            self.reconstruct.get_or_insert_with(Default::default);
        }
        if uses("benchmark") {
            self.benchmark.get_or_insert_with(Default::default);
        }
        if uses("witness") {
            self.witness.get_or_insert_with(Default::default);
        }
        self.validate()
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Some(s) = &self.spin {
            positive("spin.omega0_over_2pi", s.omega0_over_2pi)?;
            for (k, v) in [("spin.a_z_over_2pi", s.a_z_over_2pi), ("spin.a_x_over_2pi", s.a_x_over_2pi)] {
                if !v.is_finite() {
                    return Err(config_err(k, "must be finite"));
                }
            }
        }
        if let Some(s) = &self.scan {
            nonempty("scan.tau_points", s.tau_points)?;
            n_range("scan", s.n_min, s.n_max)?;
            tau_range("scan", s.tau_min, s.tau_max)?;
        }
        if let Some(s) = &self.state {
            darkprobe::spin::BlochVector::new(s.bloch).map_err(|e| config_err("state.bloch", e))?;
        }
        if let Some(s) = &self.search {
            positive("search.tau_max_over_tau1", s.tau_max_over_tau1)?;
            nonempty("search.tau_points", s.tau_points)?;
            n_range("search", 1, s.n_max)?;
            positive("search.cos_tol", s.cos_tol)?;
        }
        if let Some(s) = &self.noise {
            nonempty("noise.b0_over_2pi", s.b0_over_2pi.len())?;
            nonempty("noise.tb", s.tb.len())?;
            for &b in &s.b0_over_2pi {
                if !(b.is_finite() && b >= 0.0) {
                    return Err(config_err("noise.b0_over_2pi", format!("{b} must be >= 0")));
                }
            }
            for &t in &s.tb {
                positive("noise.tb", t)?;
            }
            positive("noise.tau", s.tau)?;
            if s.n == 0 {
                return Err(config_err("noise.n", "must be at least 1"));
            }
            if s.realizations == 0 {
                return Err(config_err("noise.realizations", "must be at least 1"));
            }
            if s.steps_per_tau == 0 {
                return Err(config_err("noise.steps_per_tau", "must be at least 1"));
            }
            darkprobe::spin::BlochVector::new(s.bloch).map_err(|e| config_err("noise.bloch", e))?;
        }
        if let Some(s) = &self.estimate {
            nonempty("estimate.sweep_n", s.sweep_n.len())?;
            if s.sweep_n.contains(&0) {
                return Err(config_err("estimate.sweep_n", "pulse numbers start at 1"));
            }
            if s.tau_points < 3 {
                return Err(config_err("estimate.tau_points", "need at least 3 points"));
            }
            n_range("estimate", 1, s.n_max)?;
            tau_range("estimate", s.tau_min, s.tau_max)?;
        }
        if let Some(s) = &self.oscillator {
            positive("oscillator.nu_over_2pi", s.nu_over_2pi)?;
            if !s.g_over_nu.is_finite() {
                return Err(config_err("oscillator.g_over_nu", "must be finite"));
            }
        }
        if let Some(s) = &self.curves {
            n_range("curves", 1, s.n_max)?;
            nonempty("curves.taus_per_curve", s.taus_per_curve)?;
        }
        if let Some(s) = &self.sampling {
            s.fixture
                .parse::<darkprobe::oscillator::StateFixture>()
                .map_err(|e| config_err("sampling.fixture", e))?;
            n_range("sampling", 1, s.n_max)?;
            nonempty("sampling.taus_per_curve", s.taus_per_curve)?;
            if s.dim < 2 {
                return Err(config_err("sampling.dim", "need at least 2 levels"));
            }
        }
        if let Some(s) = &self.reconstruct {
            if s.grid_points < 3 || s.grid_points % 2 == 0 {
                return Err(config_err("reconstruct.grid_points", "must be odd and at least 3"));
            }
            positive("reconstruct.radius_cap", s.radius_cap)?;
            positive("reconstruct.thin_cell", s.thin_cell)?;
            positive("reconstruct.cutoff", s.cutoff)?;
        }
        if let Some(s) = &self.benchmark {
            nonempty("benchmark.fock", s.fock.len())?;
            n_range("benchmark", 1, s.n_tilde_max)?;
            nonempty("benchmark.taus_per_curve", s.taus_per_curve)?;
            if s.dim < 2 {
                return Err(config_err("benchmark.dim", "need at least 2 levels"));
            }
        }
        if let Some(s) = &self.twospin {
            positive("twospin.omega0_over_2pi", s.omega0_over_2pi)?;
        }
        if let Some(s) = &self.witness {
            if s.states.is_empty() && s.random_states == 0 {
                return Err(config_err("witness.states", "no states to measure"));
            }
            if let Some(t) = s.tau {
                positive("witness.tau", t)?;
            }
            if s.n == Some(0) {
                return Err(config_err("witness.n", "must be at least 1"));
            }
        }
        Ok(())
    }
}

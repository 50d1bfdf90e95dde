//! The nine experiments. Each turns a resolved config into tables and
//! summary metrics; nothing here touches the file system.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use darkprobe::linalg::{c, trace_distance, CMatrix, CVector, DensityMatrix};
use darkprobe::noise::{noisy_measurement, NoiseModel, Schedule};
use darkprobe::oscillator::reconstruct::{
    fock_benchmark, reconstruct_from_samples, PipelineOptions, ReconstructOptions,
};
use darkprobe::oscillator::{
    interp::InterpOptions, period_grid, sample_fixture, sample_simulated, xi_curve, ChiSample,
    OscParams, StateFixture,
};
use darkprobe::probe::{probe_expectations, sequence_propagators, PulseSequence};
use darkprobe::spin::{
    estimate_coupling, measurement_settings_x, measurement_settings_y, measurement_settings_z,
    reconstruct_bloch, scan, spin_observable, Axis, SearchGrid, SpinFields, TauSweep,
};
use darkprobe::twospin::{pseudo_bloch, witness_measurement, witness_settings, witnesses};

use crate::config::{ChiSource, Experiment, ExperimentConfig, ReconstructSection, SamplingSection};
use crate::output::{Report, Table};
use crate::{num, CliError};

pub fn run(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    match cfg.experiment {
        Experiment::SpinScan => spin_scan(cfg),
        Experiment::SpinReconstruct => spin_reconstruct(cfg),
        Experiment::SpinNoise => spin_noise(cfg),
        Experiment::EstimateCoupling => coupling(cfg),
        Experiment::OscCurves => osc_curves(cfg),
        Experiment::OscSample => osc_sample(cfg),
        Experiment::OscReconstruct => osc_reconstruct(cfg),
        Experiment::FockBenchmark => fock(cfg),
        Experiment::Twospin => twospin(cfg),
    }
}

/// `points` values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let h = (hi - lo) / (points - 1) as f64;
    (0..points).map(|k| lo + k as f64 * h).collect()
}

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref()
        .ok_or_else(|| CliError::Config(format!("{name}: section missing")))
}

fn seq(tau: f64, n: u32) -> Result<PulseSequence, CliError> {
    PulseSequence::new(tau, n).map_err(num)
}

/// `⟨σy⟩` and `⟨σx⟩` of the probe from propagated 2×2 operators, i.e. a
/// simulated measurement that does not use the closed form.
fn measure(f: &SpinFields, s: PulseSequence, rho: &DensityMatrix) -> Result<(f64, f64), CliError> {
    let props = sequence_propagators(&f.v0(), &f.v1(), s).map_err(num)?;
    let r = probe_expectations(&props, rho).map_err(num)?;
    Ok((r.sx, r.sy))
}

fn spin_scan(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let f = section(&cfg.spin, "spin")?.fields()?;
    let sc = section(&cfg.scan, "scan")?;
    let tau1 = f.tau1();
    let lo = sc.tau_min.unwrap_or(0.5 * tau1);
    let hi = sc.tau_max.unwrap_or(1.5 * tau1);
    if lo >= hi {
        return Err(CliError::Config(format!("scan: tau range [{lo}, {hi}] is empty")));
    }
    let taus = linspace(lo, hi, sc.tau_points);
    let ns: Vec<u32> = (sc.n_min..=sc.n_max).collect();
    let rows = scan(&f, &taus, &ns).map_err(num)?;

    let mut t = Table::new(
        "scan",
        &["tau", "n", "cos_phi", "w_x", "w_y", "w_z", "abs_sin_phi_n_y"],
    );
    let mut best = (0.0, 0.0, 0u32);
    for r in &rows {
        let y = r.w[1].abs();
        if y > best.0 {
            best = (y, r.tau, r.n);
        }
        t.push(vec![
            r.tau.into(),
            r.n.into(),
            r.cos_phi.into(),
            r.w[0].into(),
            r.w[1].into(),
            r.w[2].into(),
            y.into(),
        ]);
    }
    let mut rep = Report::default();
    rep.tables.push(t);
    rep.metric("tau1", tau1);
    rep.metric("tau_min", lo);
    rep.metric("tau_max", hi);
    rep.metric("v_x", f.v_x());
    rep.metric("n_design", PI / (4.0 * f.v_x().abs()));
    rep.metric("best_abs_sin_phi_n_y", best.0);
    rep.metric("best_tau", best.1);
    rep.metric("best_n", best.2 as f64);
    Ok(rep)
}

fn spin_reconstruct(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let f = section(&cfg.spin, "spin")?.fields()?;
    let r_true = section(&cfg.state, "state")?.bloch;
    let se = section(&cfg.search, "search")?;
    let grid = SearchGrid {
        tau_max_over_tau1: se.tau_max_over_tau1,
        tau_points: se.tau_points,
        n_min: 1,
        n_max: se.n_max,
        cos_tol: se.cos_tol,
    };
    let mut rep = Report::default();
    let y = measurement_settings_y(&f, se.n_max).map_err(num)?;
    let x = measurement_settings_x(&f, &grid).map_err(num)?;
    let z = measurement_settings_z(&f, &grid).map_err(num)?;
    rep.warnings.extend(x.warning.clone());
    rep.warnings.extend(z.warning.clone());
    let settings = [x.setting, y, z.setting];

    let rho = DensityMatrix::from_bloch(r_true).map_err(num)?;
    let mut sy = [0.0; 3];
    let mut t = Table::new("settings", &["axis", "tau", "n", "cos_phi", "w_x", "w_y", "w_z", "sy"]);
    for (k, (s, axis)) in settings.iter().zip([Axis::X, Axis::Y, Axis::Z]).enumerate() {
        sy[k] = measure(&f, s.seq, &rho)?.1;
        let w = s.observable.weighted_axis;
        t.push(vec![
            axis.label().to_string().into(),
            s.seq.tau().into(),
            s.seq.n_segments().into(),
            s.observable.cos_phi.into(),
            w[0].into(),
            w[1].into(),
            w[2].into(),
            sy[k].into(),
        ]);
    }
    rep.tables.push(t);
    let est = reconstruct_bloch(&f, &settings.map(|s| s.seq), sy).map_err(num)?;
    let mut b = Table::new("bloch", &["component", "true", "estimate"]);
    for (k, axis) in [Axis::X, Axis::Y, Axis::Z].iter().enumerate() {
        b.push(vec![axis.label().to_string().into(), r_true[k].into(), est.r.0[k].into()]);
    }
    rep.tables.push(b);
    let err = (0..3).map(|k| (est.r.0[k] - r_true[k]).powi(2)).sum::<f64>().sqrt();
    rep.metric("error_norm", err);
    rep.metric("condition_number", est.condition_number);
    rep.metric("raw_norm", est.raw_norm);
    rep.metric("clipped", est.clipped as u8 as f64);
    if est.clipped {
        rep.warnings.push(format!("estimate norm {} clipped to 1", est.raw_norm));
    }
    Ok(rep)
}

fn spin_noise(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let f = section(&cfg.spin, "spin")?.fields()?;
    let ns = section(&cfg.noise, "noise")?;
    let rho = DensityMatrix::from_bloch(ns.bloch).map_err(num)?;
    let s = seq(ns.tau, ns.n)?;
    let dt = ns.tau / ns.steps_per_tau as f64;
    let mut schedules = vec![("pulsed", Schedule::Pulsed(s))];
    if ns.ramsey {
        schedules.push(("ramsey", Schedule::Ramsey(s)));
    }
    let mut t = Table::new(
        "noise",
        &[
            "schedule", "tb", "b0_over_2pi", "sx_mean", "sy_mean", "sx_stderr", "sy_stderr", "coherence",
            "tau_used",
        ],
    );
    let mut tau_used = ns.tau;
    for (label, schedule) in &schedules {
        for &tb in &ns.tb {
            for &b0 in &ns.b0_over_2pi {
                // Same seed at every grid point: the paths for different b0
                // share their normal draws, which keeps trends smooth.
                let m = NoiseModel::new(TAU * b0, tb, cfg.seed, ns.realizations)
                    .and_then(|m| m.with_dt(dt))
                    .map_err(|e| CliError::Config(format!("noise: {e}")))?;
                let r = noisy_measurement(&f.v0(), &f.v1(), &rho, *schedule, &m).map_err(num)?;
                tau_used = r.tau_used;
                t.push(vec![
                    (*label).into(),
                    tb.into(),
                    b0.into(),
                    r.sx_mean.into(),
                    r.sy_mean.into(),
                    r.sx_stderr.into(),
                    r.sy_stderr.into(),
                    r.coherence_magnitude().into(),
                    r.tau_used.into(),
                ]);
            }
        }
    }
    let mut rep = Report::default();
    rep.tables.push(t);
    let clean = spin_observable(&f, seq(tau_used, ns.n)?);
    rep.metric("sy_noiseless", clean.sy(ns.bloch));
    rep.metric("cos_phi_noiseless", clean.cos_phi);
    rep.metric("tau_used", tau_used);
    rep.metric("dt", dt);
    rep.metric("tau1", f.tau1());
    Ok(rep)
}

fn coupling(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let sp = section(&cfg.spin, "spin")?;
    let f = sp.fields()?;
    let es = section(&cfg.estimate, "estimate")?;
    let omega0 = f.omega0();
    let lo = es.tau_min.unwrap_or(0.8 * PI / omega0);
    let hi = es.tau_max.unwrap_or(1.2 * PI / omega0);
    if lo >= hi {
        return Err(CliError::Config(format!("estimate: tau range [{lo}, {hi}] is empty")));
    }
    let taus = linspace(lo, hi, es.tau_points);
    // ⟨σx⟩ of the probe with a maximally mixed dark spin is cosφ.
    let mixed = DensityMatrix::maximally_mixed(2);
    let mut sweeps = Vec::new();
    let mut st = Table::new("sweeps", &["n", "tau", "cos_phi"]);
    for &n in &es.sweep_n {
        let mut values = Vec::with_capacity(taus.len());
        for &tau in &taus {
            let v = measure(&f, seq(tau, n)?, &mixed)?.0;
            st.push(vec![n.into(), tau.into(), v.into()]);
            values.push(v);
        }
        sweeps.push(TauSweep {
            n,
            taus: taus.clone(),
            cos_phi: values,
        });
    }
    let mut nt = Table::new("n_sweep", &["n", "tau", "cos_phi"]);
    let mut n_rows = Vec::new();
    let est = estimate_coupling(omega0, &sweeps, es.n_max, |s| {
        let v = measure(&f, s, &mixed).map_err(|e| match e {
            CliError::Numerical(darkprobe::Error::Spin(se)) => se,
            other => darkprobe::spin::SpinError::EstimationFailed(other.to_string()),
        })?;
        n_rows.push((s.n_segments(), s.tau(), v.0));
        Ok(v.0)
    })
    .map_err(num)?;
    for (n, tau, v) in n_rows {
        nt.push(vec![n.into(), tau.into(), v.into()]);
    }
    let mut et = Table::new("estimate", &["quantity", "true", "estimated", "rel_err"]);
    let rows = [
        ("tau1", f.tau1(), est.tau1),
        ("omega1_over_2pi", f.omega1() / TAU, est.omega1 / TAU),
        ("a_z_over_2pi", sp.a_z_over_2pi, est.a_z / TAU),
        ("a_x_over_2pi", sp.a_x_over_2pi.abs(), est.a_x / TAU),
    ];
    let mut rep = Report::default();
    for (name, truth, value) in rows {
        let rel = if truth != 0.0 { (value - truth).abs() / truth.abs() } else { (value - truth).abs() };
        et.push(vec![name.into(), truth.into(), value.into(), rel.into()]);
        rep.metric(&format!("rel_err_{name}"), rel);
    }
    rep.metric("n_opt", est.n_opt as f64);
    rep.metric("tau_min", lo);
    rep.metric("tau_max", hi);
    rep.tables.extend([st, nt, et]);
    Ok(rep)
}

fn osc_params(cfg: &ExperimentConfig) -> Result<OscParams, CliError> {
    section(&cfg.oscillator, "oscillator")?.params()
}

fn osc_curves(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let p = osc_params(cfg)?;
    let cs = section(&cfg.curves, "curves")?;
    let taus = period_grid(&p, cs.taus_per_curve);
    let mut t = Table::new("curves", &["tau", "n", "xi_re", "xi_im"]);
    let mut max_xi: f64 = 0.0;
    for n in 1..=cs.n_max {
        for &tau in &taus {
            let xi = xi_curve(&p, tau, n);
            max_xi = max_xi.max(xi.norm());
            t.push(vec![tau.into(), n.into(), xi.re.into(), xi.im.into()]);
        }
    }
    let mut rep = Report::default();
    rep.tables.push(t);
    rep.metric("max_abs_xi", max_xi);
    rep.metric("max_abs_xi_bound", 4.0 * cs.n_max as f64 * p.ratio());
    rep.metric("period", p.period());
    Ok(rep)
}

fn fixture(s: &SamplingSection) -> Result<StateFixture, CliError> {
    s.fixture
        .parse()
        .map_err(|e| CliError::Config(format!("sampling.fixture: {e}")))
}

fn samples(p: &OscParams, s: &SamplingSection, rep: &mut Report) -> Result<Vec<ChiSample>, CliError> {
    let state = fixture(s)?;
    let ns: Vec<u32> = (1..=s.n_max).collect();
    let taus = period_grid(p, s.taus_per_curve);
    let exact = sample_fixture(p, &ns, &taus, state);
    match s.source {
        ChiSource::Analytic => Ok(exact),
        ChiSource::Simulated => {
            let rho = state.density(s.dim).map_err(num)?;
            let sim = sample_simulated(p, &ns, &taus, &rho).map_err(num)?;
            let dev = sim
                .iter()
                .zip(&exact)
                .map(|(a, b)| (a.chi - b.chi).norm())
                .fold(0.0, f64::max);
            rep.metric("max_abs_dev_from_exact", dev);
            Ok(sim)
        }
    }
}

fn osc_sample(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let p = osc_params(cfg)?;
    let s = section(&cfg.sampling, "sampling")?;
    let mut rep = Report::default();
    let samples = samples(&p, s, &mut rep)?;
    let mut t = Table::new(
        "samples",
        &["tau", "n", "xi_re", "xi_im", "chi_re", "chi_im", "mirrored"],
    );
    for x in &samples {
        t.push(vec![
            x.tau.into(),
            x.n_segments.into(),
            x.xi.re.into(),
            x.xi.im.into(),
            x.chi.re.into(),
            x.chi.im.into(),
            x.mirrored.into(),
        ]);
    }
    rep.tables.push(t);
    rep.metric("samples", samples.len() as f64);
    Ok(rep)
}

fn pipeline(r: &ReconstructSection, taus_per_curve: usize) -> PipelineOptions {
    PipelineOptions {
        taus_per_curve,
        grid_points: r.grid_points,
        radius_cap: r.radius_cap,
        interp: InterpOptions {
            thin_cell: r.thin_cell,
            cutoff: r.cutoff,
        },
        reconstruct: ReconstructOptions {
            max_negative_mass: (r.max_negative_mass >= 0.0).then_some(r.max_negative_mass),
        },
    }
}

fn matrix_table(name: &str, m: &CMatrix) -> Table {
    let mut t = Table::new(name, &["n", "m", "re", "im"]);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            t.push(vec![i.into(), j.into(), m[(i, j)].re.into(), m[(i, j)].im.into()]);
        }
    }
    t
}

fn osc_reconstruct(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let p = osc_params(cfg)?;
    let s = section(&cfg.sampling, "sampling")?;
    let r = section(&cfg.reconstruct, "reconstruct")?;
    let mut rep = Report::default();
    let samples = samples(&p, s, &mut rep)?;
    let opts = pipeline(r, s.taus_per_curve);
    let (grid, rec) = reconstruct_from_samples(&samples, s.dim, &opts).map_err(num)?;
    let exact = fixture(s)?.density(s.dim).map_err(num)?;
    let td = trace_distance(&rec.density, &exact).map_err(num)?;

    let spec = grid.spec;
    let mut g = Table::new("grid", &["xi_re", "xi_im", "chi_re", "chi_im", "flagged"]);
    for iy in 0..spec.points {
        for ix in 0..spec.points {
            let xi = spec.xi(ix, iy);
            let v = grid.at(ix, iy);
            let flagged = grid.flagged[iy * spec.points + ix];
            g.push(vec![xi.re.into(), xi.im.into(), v.re.into(), v.im.into(), flagged.into()]);
        }
    }
    rep.tables.push(g);
    rep.tables.push(matrix_table("density", rec.density.matrix()));
    rep.tables.push(matrix_table("exact", exact.matrix()));
    rep.metric("trace_distance", td);
    rep.metric("negative_mass", rec.negative_mass);
    rep.metric("hermitian_correction", rec.hermitian_correction);
    rep.metric("trace_correction", rec.trace_correction);
    rep.metric("raw_trace_re", rec.raw_trace.re);
    rep.metric("raw_trace_im", rec.raw_trace.im);
    rep.metric("purity", rec.density.purity());
    rep.metric("radius", spec.radius);
    rep.metric("grid_step", spec.step());
    rep.metric("gap_fraction", grid.gap_fraction());
    rep.metric("hull_chi_max", grid.hull_chi_max);
    rep.metric("vertices", grid.vertices as f64);
    rep.note("fixture", fixture(s)?.to_string());
    Ok(rep)
}

fn fock(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let p = osc_params(cfg)?;
    let b = section(&cfg.benchmark, "benchmark")?;
    let r = section(&cfg.reconstruct, "reconstruct")?;
    let opts = pipeline(r, b.taus_per_curve);
    let rows = fock_benchmark(&p, &b.fock, b.n_tilde_max, b.dim, &opts).map_err(num)?;
    let mut t = Table::new("benchmark", &["n", "n_tilde", "trace_distance", "negative_mass", "radius"]);
    for row in &rows {
        t.push(vec![
            row.n.into(),
            row.n_tilde.into(),
            row.trace_distance.into(),
            row.negative_mass.into(),
            row.radius.into(),
        ]);
    }
    let mut rep = Report::default();
    rep.tables.push(t);
    Ok(rep)
}

fn named_two_spin_state(name: &str) -> Option<DensityMatrix> {
    let s = 0.5f64.sqrt();
    let z = c(0.0, 0.0);
    let ket = |a: [Complex64; 4]| DensityMatrix::pure(&CVector::from_row_slice(&a)).ok();
    match name {
        "bell" => ket([z, c(s, 0.0), c(s, 0.0), z]),
        "bell-minus" => ket([z, c(s, 0.0), c(-s, 0.0), z]),
        "00" => ket([c(1.0, 0.0), z, z, z]),
        "01" => ket([z, c(1.0, 0.0), z, z]),
        "10" => ket([z, z, c(1.0, 0.0), z]),
        "11" => ket([z, z, z, c(1.0, 0.0)]),
        "mixed" => Some(DensityMatrix::maximally_mixed(4)),
        _ => None,
    }
}

fn random_two_spin_state(rng: &mut ChaCha8Rng) -> Result<DensityMatrix, CliError> {
    let a = CMatrix::from_fn(4, 4, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let m = &a * a.adjoint();
    let t = m.trace().re;
    DensityMatrix::new(m.unscale(t)).map_err(num)
}

fn twospin(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let p = section(&cfg.twospin, "twospin")?.params()?;
    let w = section(&cfg.witness, "witness")?;
    let recipe = match (w.tau, w.n) {
        (Some(t), Some(n)) => seq(t, n)?,
        _ => {
            let r = witness_settings(&p, w.n_max).map_err(num)?;
            seq(w.tau.unwrap_or(r.tau()), w.n.unwrap_or(r.n_segments()))?
        }
    };
    let mut states = Vec::new();
    for name in &w.states {
        let rho = named_two_spin_state(name)
            .ok_or_else(|| CliError::Config(format!("witness.states: unknown state {name:?}")))?;
        states.push((name.clone(), rho));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for k in 0..w.random_states {
        states.push((format!("random-{k}"), random_two_spin_state(&mut rng)?));
    }
    let mut t = Table::new(
        "twospin",
        &[
            "state", "coupling_ratio", "tau", "n", "sy_closed", "sy_oracle", "abs_err", "error_constant",
            "r_x_witness", "r_y_witness", "r_z_pseudo", "population",
        ],
    );
    let mut rep = Report::default();
    let mut worst: f64 = 0.0;
    for (name, rho) in &states {
        let r = witness_measurement(&p, recipe, rho).map_err(num)?;
        let (wx, wy) = witnesses(rho).map_err(num)?;
        let rz = pseudo_bloch(rho).map_err(num)?[2];
        worst = worst.max(r.abs_err);
        if let Some(msg) = &r.warning {
            rep.warnings.push(format!("{name}: {msg}"));
        }
        t.push(vec![
            name.as_str().into(),
            p.coupling_ratio().into(),
            recipe.tau().into(),
            recipe.n_segments().into(),
            r.sy_closed.into(),
            r.sy_oracle.into(),
            r.abs_err.into(),
            r.error_constant.into(),
            wx.into(),
            wy.into(),
            rz.into(),
            r.subspace_population.into(),
        ]);
    }
    rep.tables.push(t);
    rep.metric("max_abs_err", worst);
    rep.metric("coupling_ratio", p.coupling_ratio());
    Ok(rep)
}

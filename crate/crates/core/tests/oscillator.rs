//! Oscillator readout: truncated propagation against analytic χ, and the
//! reconstruction pipeline.

use std::f64::consts::PI;

use darkprobe::linalg::{c, hermitian_deviation, trace, trace_distance, DensityMatrix};
use darkprobe::oscillator::reconstruct::{reconstruct_from_samples, PipelineOptions};
use darkprobe::oscillator::{
    period_grid, sample_fixture, sample_simulated, xi_curve, ChiGrid, GridSpec, OscParams, StateFixture,
};
use num_complex::Complex64;

fn params() -> OscParams {
    OscParams::new(1.0, 3.0 / 40.0).unwrap()
}

fn fixtures() -> [StateFixture; 4] {
    [
        StateFixture::Fock(0),
        StateFixture::Coherent(c(1.0, 0.0)),
        StateFixture::Squeezed(c(0.5f64.ln(), 0.0)),
        StateFixture::Fock(1),
    ]
}

#[test]
fn propagation_equals_analytic_characteristic_function() {
    let p = params();
    let ns: Vec<u32> = (1..=10).collect();
    let taus = period_grid(&p, 24);
    let dim = 60;
    for state in fixtures() {
        let rho = state.density(dim).unwrap();
        let simulated = sample_simulated(&p, &ns, &taus, &rho).unwrap();
        let analytic = sample_fixture(&p, &ns, &taus, state);
        assert_eq!(simulated.len(), analytic.len());
        let worst = simulated
            .iter()
            .zip(&analytic)
            .map(|(s, a)| {
                assert_eq!((s.n_segments, s.tau, s.mirrored), (a.n_segments, a.tau, a.mirrored));
                (s.chi - a.chi).norm()
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{state}: {worst:e}");
    }
}

#[test]
fn largest_displacement_at_half_period() {
    let p = params();
    for n in 1..=20 {
        let xi = xi_curve(&p, PI / p.nu(), n);
        assert!((xi.norm() - 4.0 * n as f64 * p.ratio()).abs() < 1e-12);
    }
}

#[test]
fn coherent_chi_matches_independent_formula() {
    // χ(ξ) = exp(-|ξ|²/2 + ξη* - ξ*η) for a coherent state |η⟩.
    let eta = c(0.7, -0.4);
    let state = StateFixture::Coherent(eta);
    for k in 0..50 {
        let xi = Complex64::from_polar(0.1 * k as f64, 0.37 * k as f64);
        let expected = (-0.5 * xi.norm_sqr() + xi * eta.conj() - xi.conj() * eta).exp();
        assert!((state.chi_exact(xi) - expected).norm() < 1e-14);
    }
}

#[test]
fn squeezed_chi_is_the_stated_gaussian() {
    let state = StateFixture::Squeezed(c(0.5f64.ln(), 0.0));
    for k in 0..40 {
        let xi = Complex64::from_polar(0.08 * k as f64, 0.61 * k as f64);
        let expected = (-xi.re * xi.re / 8.0 - 2.0 * xi.im * xi.im).exp();
        assert!((state.chi_exact(xi).re - expected).abs() < 1e-14);
    }
}

#[test]
fn symmetrized_grid_is_hermitian() {
    let spec = GridSpec::new(3.0, 41).unwrap();
    let mut grid = ChiGrid::from_fn(spec, |xi| c(xi.re.sin(), xi.im * xi.re));
    grid.symmetrize();
    let p = spec.points;
    for iy in 0..p {
        for ix in 0..p {
            assert_eq!(grid.at(ix, iy), grid.at(p - 1 - ix, p - 1 - iy).conj());
        }
    }
}

#[test]
fn reconstruction_is_a_valid_state() {
    let p = params();
    let opts = PipelineOptions {
        taus_per_curve: 1000,
        grid_points: 81,
        ..PipelineOptions::default()
    };
    let ns: Vec<u32> = (1..=12).collect();
    let state = StateFixture::Coherent(c(0.5, 0.3));
    let samples = sample_fixture(&p, &ns, &period_grid(&p, opts.taus_per_curve), state);
    let (_, rec) = reconstruct_from_samples(&samples, 20, &opts).unwrap();
    let m = rec.density.matrix();
    assert!((trace(m).re - 1.0).abs() < 1e-12);
    assert!(hermitian_deviation(m) < 1e-12);
    assert!(rec.density.eigen().values.iter().all(|&l| l >= -1e-12));
    assert!(rec.density.purity() <= 1.0 + 1e-9);
    let exact: DensityMatrix = state.density(20).unwrap();
    let td = trace_distance(&rec.density, &exact).unwrap();
    assert!(td < 0.05, "{td}");
}

//! Named parameter sets used by the bundled configurations.

use std::f64::consts::TAU;

/// `γ/2π` of a ¹³C nucleus in Hz/T.
pub const GAMMA_C13_OVER_2PI: f64 = 10.7084e6;

pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub values: Vec<(&'static str, String)>,
}

/// Dimensionless dark spin with `a_z = 0.015 ω0`, `a_x = 0.08 ω0`.
pub const FIG1_A_Z: f64 = 0.015;
pub const FIG1_A_X: f64 = 0.08;

/// NV probe with a weakly coupled ¹³C.
pub const NV_A_PAR_OVER_2PI: f64 = 2.54e3;
pub const NV_A_PERP_OVER_2PI: f64 = 13.22e3;
pub const NV_FIELD_T: f64 = 15.4e-3;

pub fn nv_omega0_over_2pi() -> f64 {
    GAMMA_C13_OVER_2PI * NV_FIELD_T
}

/// Angular `(ω0, a_z, a_x)` of the NV fixture, in rad/s.
pub fn nv_fields() -> darkprobe::spin::SpinFields {
    darkprobe::spin::SpinFields::new(
        TAU * nv_omega0_over_2pi(),
        TAU * NV_A_PAR_OVER_2PI,
        TAU * NV_A_PERP_OVER_2PI,
    )
    .expect("fixture fields are valid")
}

/// Trapped ¹⁷¹Yb⁺ ion in a magnetic field gradient.
pub const YB_NU_OVER_2PI: f64 = 117e3;
pub const YB_G_OVER_NU: f64 = 0.072;

/// Oscillator reconstruction fixture.
pub const FIG2_G_OVER_NU: f64 = 3.0 / 40.0;
pub fn fig2_squeeze() -> f64 {
    0.5f64.ln()
}
pub const FIG2_ETA: f64 = 1.0;

/// Probe-noise grid.
pub const FIGS3_B0_OVER_2PI: [f64; 4] = [9e3, 28e3, 56e3, 112e3];
pub const FIGS3_TB: [f64; 3] = [0.2e-3, 0.5e-3, 1e-3];
pub const FIGS3_TAU: f64 = 3e-6;
pub const FIGS3_N: u32 = 10;
pub const FIGS3_BLOCH: [f64; 3] = [0.0, 0.4, 0.0];
pub const FIGS3_REALIZATIONS: u32 = 1000;

pub fn catalog() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "fig1-nv",
            summary: "dark spin-1/2 in units of omega0",
            values: vec![
                ("a_z", format!("{FIG1_A_Z} omega0")),
                ("a_x", format!("{FIG1_A_X} omega0")),
            ],
        },
        Fixture {
            name: "nv-lab",
            summary: "NV center probe, weakly coupled 13C dark spin",
            values: vec![
                ("A_par/2pi", format!("{} kHz", NV_A_PAR_OVER_2PI / 1e3)),
                ("A_perp/2pi", format!("{} kHz", NV_A_PERP_OVER_2PI / 1e3)),
                ("B", format!("{} mT", NV_FIELD_T * 1e3)),
                ("gamma_C/2pi", format!("{} MHz/T", GAMMA_C13_OVER_2PI / 1e6)),
                ("omega0/2pi", format!("{:.3} kHz", nv_omega0_over_2pi() / 1e3)),
            ],
        },
        Fixture {
            name: "yb-trap",
            summary: "171Yb+ ion, axial mode as dark oscillator",
            values: vec![
                ("nu/2pi", format!("{} kHz", YB_NU_OVER_2PI / 1e3)),
                ("g/nu", format!("{YB_G_OVER_NU}")),
            ],
        },
        Fixture {
            name: "fig2",
            summary: "oscillator reconstruction targets",
            values: vec![
                ("g/nu", "3/40".to_string()),
                ("lambda", "log(1/2) (squeezed vacuum)".to_string()),
                ("eta", format!("{FIG2_ETA} (coherent state)")),
            ],
        },
        Fixture {
            name: "figS3",
            summary: "probe-noise grid on the nv-lab spin",
            values: vec![
                ("b0/2pi", "9, 28, 56, 112 kHz".to_string()),
                ("tb", "0.2, 0.5, 1 ms".to_string()),
                ("tau", "3 us".to_string()),
                ("N", FIGS3_N.to_string()),
                ("r", "(0, 0.4, 0)".to_string()),
                ("realizations", FIGS3_REALIZATIONS.to_string()),
            ],
        },
    ]
}

pub fn render_catalog() -> String {
    let mut out = String::new();
    for f in catalog() {
        out.push_str(&format!("{}: {}\n", f.name, f.summary));
        for (k, v) in &f.values {
            out.push_str(&format!("    {k} = {v}\n"));
        }
    }
    out
}

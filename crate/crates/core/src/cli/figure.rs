//! Figure presets: the fixed parameters and axes of each panel.

use std::fmt::Write as _;
use std::str::FromStr;

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::sweep::Axis;

pub const POINTS_1D: usize = 201;
pub const POINTS_2D: usize = 101;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Fig2a,
    Fig2a1,
    Fig2b,
    Fig2b1,
    Fig2c,
    Fig2c1,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
}

impl Preset {
    pub const ALL: [Preset; 10] = [
        Preset::Fig2a,
        Preset::Fig2a1,
        Preset::Fig2b,
        Preset::Fig2b1,
        Preset::Fig2c,
        Preset::Fig2c1,
        Preset::Fig3a,
        Preset::Fig3b,
        Preset::Fig4a,
        Preset::Fig4b,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2a1 => "fig2a1",
            Preset::Fig2b => "fig2b",
            Preset::Fig2b1 => "fig2b1",
            Preset::Fig2c => "fig2c",
            Preset::Fig2c1 => "fig2c1",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig4a => "fig4a",
            Preset::Fig4b => "fig4b",
        }
    }

    /// Column the panel plots: photon number for the `*1` panels.
    fn plotted_column(&self) -> &'static str {
        match self {
            Preset::Fig2a1 | Preset::Fig2b1 | Preset::Fig2c1 => "n_a",
            _ => "log10_g2",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::Config(format!(
                    "unknown preset {s:?} (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// One CSV worth of sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    /// Empty for single-curve presets.
    pub label: String,
    pub config: RunConfig,
}

impl Curve {
    pub fn file_name(&self, preset: Preset) -> String {
        if self.label.is_empty() {
            format!("{}.csv", preset.name())
        } else {
            format!("{}_{}.csv", preset.name(), self.label)
        }
    }
}

fn set(cfg: &mut RunConfig, name: &str, v: f64) {
    cfg.params
        .set(name, v)
        .expect("preset parameter names are valid");
}

/// Resolve a preset on top of `base` (defaults + config file). The caller
/// re-applies explicit command-line overrides afterwards.
pub fn curves(preset: Preset, base: &RunConfig) -> Vec<Curve> {
    let mut cfg = base.clone();
    cfg.axis2 = None;
    cfg.log_g2 = true;
    set(&mut cfg, "F", 0.1);
    set(&mut cfg, "n_th", 0.0);
    let one = |label: String, cfg: RunConfig| Curve { label, config: cfg };
    let two_d = |mut cfg: RunConfig, a1: Axis, a2: Axis| {
        cfg.axis1 = Some(a1);
        cfg.axis2 = Some(a2);
        vec![Curve {
            label: String::new(),
            config: cfg,
        }]
    };
    let g_axis = |n| Axis::new("g", -10.0, 10.0, n);
    let j_axis = |n| Axis::new("J", -10.0, 10.0, n);
    let delta_axis = |n| Axis::new("delta", 0.0, 20.0, n);

    match preset {
        Preset::Fig2a | Preset::Fig2a1 => {
            set(&mut cfg, "delta", 10.0);
            two_d(cfg, g_axis(POINTS_2D), j_axis(POINTS_2D))
        }
        Preset::Fig2b | Preset::Fig2b1 => {
            set(&mut cfg, "J", 2.0);
            two_d(cfg, g_axis(POINTS_2D), delta_axis(POINTS_2D))
        }
        Preset::Fig2c | Preset::Fig2c1 => {
            set(&mut cfg, "g", 5.0);
            two_d(cfg, j_axis(POINTS_2D), delta_axis(POINTS_2D))
        }
        Preset::Fig3a => {
            set(&mut cfg, "delta", 10.0);
            cfg.axis1 = Some(g_axis(POINTS_1D));
            [9.0, 7.0, 5.0]
                .into_iter()
                .map(|j| {
                    let mut c = cfg.clone();
                    set(&mut c, "J", j);
                    one(format!("J{j}"), c)
                })
                .collect()
        }
        Preset::Fig3b => {
            set(&mut cfg, "delta", 10.0);
            cfg.axis1 = Some(j_axis(POINTS_1D));
            [7.0, 6.0, 5.0]
                .into_iter()
                .map(|g| {
                    let mut c = cfg.clone();
                    set(&mut c, "g", g);
                    one(format!("g{g}"), c)
                })
                .collect()
        }
        Preset::Fig4a => {
            set(&mut cfg, "delta", 10.0);
            set(&mut cfg, "J", 6.0);
            set(&mut cfg, "g", 4.0 * std::f64::consts::SQRT_2);
            cfg.axis1 = Some(Axis::new("F", 0.01, 2.0, POINTS_1D));
            vec![one(String::new(), cfg)]
        }
        Preset::Fig4b => {
            set(&mut cfg, "delta", 8.0);
            set(&mut cfg, "g", 5.0);
            cfg.axis1 = Some(Axis::new("J", -8.0, 8.0, POINTS_1D));
            [0.001, 0.01, 0.1]
                .into_iter()
                .map(|n| {
                    let mut c = cfg.clone();
                    set(&mut c, "n_th", n);
                    one(format!("nth{n}"), c)
                })
                .collect()
        }
    }
}

/// Set every axis of every curve to `n` points.
pub fn with_points(curves: &mut [Curve], n: usize) {
    for c in curves {
        for a in [&mut c.config.axis1, &mut c.config.axis2]
            .into_iter()
            .flatten()
        {
            a.count = n;
        }
    }
}

/// Gnuplot script drawing the panel from the emitted CSVs.
pub fn plot_script(preset: Preset, curves: &[Curve]) -> String {
    let col = preset.plotted_column();
    let mut s = String::new();
    writeln!(
        s,
        "# {} ; run with: gnuplot -p {}.gp",
        preset.name(),
        preset.name()
    )
    .unwrap();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set datafile commentschars '#'").unwrap();
    let first = &curves[0].config;
    let a1 = first.axis1.as_ref().map_or("x", |a| a.name.as_str());
    writeln!(s, "set xlabel '{a1}/kappa'").unwrap();
    match &first.axis2 {
        Some(a2) => {
            writeln!(s, "set ylabel '{}/kappa'", a2.name).unwrap();
            writeln!(s, "set cblabel '{col}'").unwrap();
            writeln!(s, "set view map").unwrap();
            writeln!(
                s,
                "plot '{}' skip 1 using 1:2:(column('{col}')) with image notitle",
                curves[0].file_name(preset)
            )
            .unwrap();
        }
        None => {
            writeln!(s, "set ylabel '{col}'").unwrap();
            let parts: Vec<String> = curves
                .iter()
                .map(|c| {
                    let title = if c.label.is_empty() {
                        preset.name()
                    } else {
                        &c.label
                    };
                    format!(
                        "'{}' skip 1 using 1:(column('{col}')) with lines title '{title}'",
                        c.file_name(preset)
                    )
                })
                .collect();
            writeln!(s, "plot {}", parts.join(", \\\n     ")).unwrap();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("fig5".parse::<Preset>().is_err());
    }

    #[test]
    fn fig4b_has_three_thermal_curves() {
        let c = curves(Preset::Fig4b, &RunConfig::default());
        assert_eq!(c.len(), 3);
        let nth: Vec<f64> = c.iter().map(|c| c.config.params.n_th).collect();
        assert_eq!(nth, vec![0.001, 0.01, 0.1]);
        for cv in &c {
            assert_eq!(cv.config.params.delta_a, 8.0);
            assert_eq!(cv.config.params.delta_b, 4.0);
            assert_eq!(cv.config.params.g, 5.0);
            assert_eq!(cv.config.axis1.as_ref().unwrap().name, "J");
        }
        assert_eq!(c[0].file_name(Preset::Fig4b), "fig4b_nth0.001.csv");
    }

    #[test]
    fn fig3a_and_fig4a_parameters() {
        let c = curves(Preset::Fig3a, &RunConfig::default());
        let js: Vec<f64> = c.iter().map(|c| c.config.params.j).collect();
        assert_eq!(js, vec![9.0, 7.0, 5.0]);
        assert_eq!(c[0].config.axis1.as_ref().unwrap().count, POINTS_1D);

        let c = curves(Preset::Fig4a, &RunConfig::default());
        assert_eq!(c.len(), 1);
        let p = c[0].config.params;
        assert_eq!((p.delta_a, p.j, p.n_th), (10.0, 6.0, 0.0));
        assert!((p.g - 32f64.sqrt()).abs() < 1e-15);
        assert_eq!(c[0].config.axis1.as_ref().unwrap().name, "F");
    }

    #[test]
    fn two_d_presets() {
        for p in [Preset::Fig2a, Preset::Fig2b1, Preset::Fig2c] {
            let c = curves(p, &RunConfig::default());
            assert_eq!(c.len(), 1);
            assert!(c[0].config.axis2.is_some());
            assert!(c[0].config.validate().is_ok());
        }
        let s = plot_script(
            Preset::Fig2a1,
            &curves(Preset::Fig2a1, &RunConfig::default()),
        );
        assert!(s.contains("with image"));
        assert!(s.contains("n_a"));
    }

    #[test]
    fn resolution_override() {
        let mut c = curves(Preset::Fig2a, &RunConfig::default());
        with_points(&mut c, 11);
        assert_eq!(c[0].config.axis1.as_ref().unwrap().count, 11);
        assert_eq!(c[0].config.axis2.as_ref().unwrap().count, 11);
    }
}

//! Command-line front end.
//!
//! Exit codes: 0 success, 1 solver or validation failure, 2 configuration
//! or usage error.

pub mod config;
pub mod csv;
pub mod figure;
pub mod validate;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::liouvillian::{liouvillian, DensityMatrix};
use crate::model::{cpb_condition, eigenfrequencies, single_excitation_matrix};
use crate::observables::{g2_zero, is_antibunched, Mode, ObservableSet};
use crate::solver::{steady_state_direct_with, steady_state_evolved_with};
use crate::sweep::{find_minima, run_sweep, Status};
use config::{default_workers, RunConfig};
use figure::Preset;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Tolerance on `|√2|g| − √(Δ² − J²)|` for flagging a point as resonant.
const CPB_FLAG_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "blockade",
    version,
    about = "Steady-state photon statistics of an atom coupled to a two-mode nonlinear cavity"
)]
struct Cli {
    /// TOML file of `key = value` settings.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one setting; repeatable, applied in order.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output file (sweep, point, evolve, validate) or directory (figure).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Sweep worker threads [default: $BLOCKADE_WORKERS or all cores].
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Fock levels kept for mode a.
    #[arg(long, global = true, value_name = "N")]
    trunc_a: Option<usize>,

    /// Fock levels kept for mode b.
    #[arg(long, global = true, value_name = "N")]
    trunc_b: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one parameter point and report its observables.
    Point,
    /// Reproduce a figure panel as CSV files.
    Figure {
        /// fig2a, fig2a1, fig2b, fig2b1, fig2c, fig2c1, fig3a, fig3b, fig4a, fig4b
        preset: String,
        /// Also write a gnuplot script next to the CSVs.
        #[arg(long)]
        plot_script: bool,
        /// Points per axis, replacing the preset resolution.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Grid sweep over `axis1` (and optionally `axis2`) from the config.
    Sweep,
    /// Run the built-in invariant and oracle checks.
    Validate,
    /// Solve by time evolution and compare with the direct solver.
    Evolve {
        /// Initial state.
        #[arg(long, value_enum, default_value_t = Start::Vacuum)]
        from: Start,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Start {
    Vacuum,
    Mixed,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::InvalidParam { .. }
        | Error::InvalidTruncation { .. }
        | Error::InvalidSweep(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let base = load_base(cli)?;
    match &cli.command {
        Command::Figure {
            preset,
            plot_script,
            points,
        } => cmd_figure(cli, &base, preset.parse()?, *plot_script, *points),
        cmd => {
            let mut cfg = base;
            apply_cli(&mut cfg, cli)?;
            cfg.validate()?;
            for w in cfg.params.warnings() {
                eprintln!("warning: {w}");
            }
            match cmd {
                Command::Point => cmd_point(&cfg),
                Command::Sweep => cmd_sweep(&cfg),
                Command::Validate => cmd_validate(&cfg),
                Command::Evolve { from } => cmd_evolve(&cfg, *from),
                Command::Figure { .. } => unreachable!(),
            }
        }
    }
}

/// Defaults overlaid with the `--config` file.
fn load_base(cli: &Cli) -> Result<RunConfig> {
    match &cli.config {
        None => Ok(RunConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text)
        }
    }
}

/// `--set` overrides, then the dedicated flags.
fn apply_cli(cfg: &mut RunConfig, cli: &Cli) -> Result<()> {
    for kv in &cli.set {
        cfg.apply_override(kv)?;
    }
    if let Some(n) = cli.trunc_a {
        cfg.na_dim = n;
    }
    if let Some(n) = cli.trunc_b {
        cfg.nb_dim = n;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    Ok(())
}

fn workers(cfg: &RunConfig) -> usize {
    cfg.workers.unwrap_or_else(default_workers)
}

/// Print `text` to stdout, or write it to `out` when given.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn point_report(cfg: &RunConfig) -> Result<(String, bool)> {
    let space = cfg.space()?;
    let p = &cfg.params;
    let r = steady_state_direct_with(&liouvillian(p, space), cfg.direct())?;
    let obs = ObservableSet::from_state(&r.rho)?;
    let mut s = String::new();
    writeln!(s, "space      {space}").unwrap();
    writeln!(
        s,
        "params     delta_a={} delta_e={} delta_b={} J={} g={} F={} kappa_a={} kappa_b={} gamma={} n_th={}",
        p.delta_a, p.delta_e, p.delta_b, p.j, p.g, p.f, p.kappa_a, p.kappa_b, p.gamma, p.n_th
    )
    .unwrap();
    match obs.g2_a {
        Some(g2) => {
            let tag = if is_antibunched(g2) {
                "antibunched"
            } else {
                "not antibunched"
            };
            writeln!(s, "g2(0)      {g2:.6e} ({tag})").unwrap();
        }
        None => {
            let err = g2_zero(&r.rho, Mode::A).unwrap_err();
            writeln!(s, "g2(0)      undefined ({err})").unwrap();
        }
    }
    writeln!(s, "N_a        {:.6e}", obs.mean_n_a).unwrap();
    writeln!(s, "N_b        {:.6e}", obs.mean_n_b).unwrap();
    writeln!(s, "P_g10      {:.6e}", obs.p_g10).unwrap();
    writeln!(s, "P_g02      {:.6e}", obs.p_g02).unwrap();
    writeln!(s, "P_e00      {:.6e}", obs.p_e00).unwrap();
    let conv = if r.converged {
        ""
    } else {
        " (above tolerance)"
    };
    writeln!(s, "residual   {:.3e}{conv}", r.residual).unwrap();

    match p.constrained_delta() {
        Some(delta) => {
            let ev = eigenfrequencies(delta, p.j, p.g);
            writeln!(s, "xi_plus    {:.6}", ev.xi_plus).unwrap();
            writeln!(s, "xi_minus   {:.6}", ev.xi_minus).unwrap();
            match cpb_condition(delta, p.j) {
                Some(c) => {
                    writeln!(s, "cpb g*     {:+.6} / {:+.6}", c.g_plus, c.g_minus).unwrap();
                    let off = (std::f64::consts::SQRT_2 * p.g.abs()
                        - (delta * delta - p.j * p.j).sqrt())
                    .abs();
                    if off < CPB_FLAG_TOL {
                        writeln!(s, "on analytic CPB condition").unwrap();
                    }
                }
                None => writeln!(s, "cpb g*     no real CPB solution (delta^2 < J^2)").unwrap(),
            }
        }
        None => {
            let e = SymmetricEigen::new(single_excitation_matrix(p)).eigenvalues;
            let mut v: Vec<f64> = e.iter().copied().collect();
            v.sort_by(f64::total_cmp);
            writeln!(
                s,
                "detunings unconstrained; single-excitation levels (numerical) {:.6} {:.6} {:.6}",
                v[0], v[1], v[2]
            )
            .unwrap();
            writeln!(
                s,
                "cpb g*     closed form requires delta_a = delta_e = 2 delta_b"
            )
            .unwrap();
        }
    }
    Ok((s, r.converged))
}

fn cmd_point(cfg: &RunConfig) -> Result<i32> {
    let (text, converged) = point_report(cfg)?;
    emit(cfg.out.as_deref(), &text)?;
    Ok(if converged { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_sweep(cfg: &RunConfig) -> Result<i32> {
    let spec = cfg
        .sweep_spec()?
        .ok_or_else(|| Error::Config("sweep needs axis1 (name:min:max:count)".into()))?;
    let rows = run_sweep(&spec, workers(cfg))?;
    emit(cfg.out.as_deref(), &csv::render(cfg, &spec, &rows))?;
    report_failures(&rows);
    Ok(if rows.iter().any(|r| r.status == Status::SolverFailed) {
        EXIT_FAILURE
    } else {
        EXIT_OK
    })
}

fn report_failures(rows: &[crate::sweep::SweepRow]) {
    let failed = rows
        .iter()
        .filter(|r| r.status == Status::SolverFailed)
        .count();
    let undefined = rows
        .iter()
        .filter(|r| r.status == Status::UndefinedG2)
        .count();
    if failed + undefined > 0 {
        eprintln!(
            "{} points: {failed} solver failures, {undefined} with undefined g2",
            rows.len()
        );
    }
}

fn cmd_figure(
    cli: &Cli,
    base: &RunConfig,
    preset: Preset,
    plot_script: bool,
    points: Option<usize>,
) -> Result<i32> {
    let mut curves = figure::curves(preset, base);
    for c in &mut curves {
        apply_cli(&mut c.config, cli)?;
    }
    if let Some(n) = points {
        figure::with_points(&mut curves, n);
    }
    let mut results = Vec::with_capacity(curves.len());
    for c in &curves {
        c.config.validate()?;
        let spec = c.config.sweep_spec()?.expect("presets define axis1");
        let rows = run_sweep(&spec, workers(&c.config))?;
        results.push((spec, rows));
    }

    let dir = curves[0]
        .config
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let mut any_failed = false;
    for (c, (spec, rows)) in curves.iter().zip(&results) {
        let path = dir.join(c.file_name(preset));
        std::fs::write(&path, csv::render(&c.config, spec, rows))?;
        println!("wrote {}", path.display());
        report_failures(rows);
        any_failed |= rows.iter().any(|r| r.status == Status::SolverFailed);
        if spec.axis2.is_none() {
            if let Ok(m) = find_minima(rows, 0) {
                let locs: Vec<String> = m
                    .iter()
                    .map(|m| format!("{}={:.4} (g2 {:.3e})", spec.axis1.name, m.location, m.g2))
                    .collect();
                println!(
                    "  minima: {}",
                    if locs.is_empty() {
                        "none".into()
                    } else {
                        locs.join(", ")
                    }
                );
            }
        }
    }
    if plot_script {
        let path = dir.join(format!("{}.gp", preset.name()));
        std::fs::write(&path, figure::plot_script(preset, &curves))?;
        println!("wrote {}", path.display());
    }
    Ok(if any_failed { EXIT_FAILURE } else { EXIT_OK })
}

fn cmd_validate(cfg: &RunConfig) -> Result<i32> {
    let checks = validate::run_validation(cfg)?;
    let mut s = String::new();
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        writeln!(s, "{tag} {}: {}", c.name, c.detail).unwrap();
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(
        s,
        "{} of {} checks passed",
        checks.len() - failed,
        checks.len()
    )
    .unwrap();
    emit(cfg.out.as_deref(), &s)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_evolve(cfg: &RunConfig, from: Start) -> Result<i32> {
    let space = cfg.space()?;
    let l = liouvillian(&cfg.params, space);
    let rho0 = match from {
        Start::Vacuum => DensityMatrix::vacuum(space),
        Start::Mixed => DensityMatrix::maximally_mixed(space),
    };
    let ev = steady_state_evolved_with(&l, &rho0, cfg.evolve)?;
    let mut s = String::new();
    writeln!(s, "space           {space}").unwrap();
    writeln!(
        s,
        "start           {}",
        if from == Start::Vacuum {
            "vacuum"
        } else {
            "maximally mixed"
        }
    )
    .unwrap();
    writeln!(s, "t               {:.6e}", ev.t).unwrap();
    writeln!(s, "steps           {}", ev.steps).unwrap();
    writeln!(s, "residual        {:.3e}", ev.residual).unwrap();
    let g2 = |rho: &DensityMatrix| match g2_zero(rho, Mode::A) {
        Ok(v) => format!("{v:.6e}"),
        Err(_) => "undefined".into(),
    };
    writeln!(s, "g2(0) evolved   {}", g2(&ev.rho)).unwrap();
    match steady_state_direct_with(&l, cfg.direct()) {
        Ok(d) => {
            writeln!(s, "g2(0) direct    {}", g2(&d.rho)).unwrap();
            writeln!(s, "trace distance  {:.3e}", d.rho.trace_distance(&ev.rho)?).unwrap();
        }
        Err(e) => writeln!(s, "direct solve    failed: {e}").unwrap(),
    }
    emit(cfg.out.as_deref(), &s)?;
    Ok(EXIT_OK)
}

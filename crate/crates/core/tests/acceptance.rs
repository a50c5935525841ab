//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use blockade::cli::config::{default_workers, RunConfig};
use blockade::cli::figure::{curves, Preset};
use blockade::cli::validate::{fig4a_point, run_validation, sample_regime};
use blockade::hilbert::{annihilator_a, make_space, BasisState};
use blockade::liouvillian::{liouvillian, DensityMatrix};
use blockade::model::{eigenfrequencies, single_excitation_matrix, SystemParams};
use blockade::observables::{g2_zero, mean_photon, population, Mode};
use blockade::solver::{steady_state_direct, steady_state_evolved_with, EvolveOptions};
use blockade::sweep::{find_minima, run_sweep, Axis, Minimum, SweepSpec};
use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn nearest(minima: &[Minimum], target: f64) -> Option<Minimum> {
    minima.iter().copied().min_by(|a, b| {
        (a.location - target)
            .abs()
            .total_cmp(&(b.location - target).abs())
    })
}

fn fmt_minima(m: &[Minimum]) -> String {
    let v: Vec<String> = m.iter().map(|m| format!("{:.3}", m.location)).collect();
    format!("[{}]", v.join(", "))
}

fn analytic_blockade_points() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for c in curves(Preset::Fig3a, &RunConfig::default()) {
        let p = c.config.params;
        let target = ((p.delta_a * p.delta_a - p.j * p.j) / 2.0).sqrt();
        let spec = c.config.sweep_spec().unwrap().unwrap();
        let start = Instant::now();
        let rows = run_sweep(&spec, 1).unwrap();
        let elapsed = start.elapsed();
        let minima = find_minima(&rows, 0).unwrap();
        let hits: Vec<f64> = [target, -target]
            .iter()
            .map(|&t| nearest(&minima, t).map_or(f64::INFINITY, |m| (m.location - t).abs()))
            .collect();
        let curve_ok = hits.iter().all(|&d| d < 0.15) && elapsed < Duration::from_secs(60);
        ok &= curve_ok;
        lines.push(format!(
            "J={}: analytic ±{target:.3}, minima {}, offsets {:.3}/{:.3}, {:.1}s",
            p.j,
            fmt_minima(&minima),
            hits[0],
            hits[1],
            elapsed.as_secs_f64()
        ));
    }
    check(ok, lines.join("; "))
}

fn central_blockade_region() -> Outcome {
    let base = SystemParams::constrained(10.0, 9.0, 0.0, 0.1);
    let spec = SweepSpec::one_d(
        base,
        make_space(5, 5).unwrap(),
        Axis::new("g", -2.4, 2.4, 49),
    );
    let rows = run_sweep(&spec, default_workers()).unwrap();
    let worst = rows
        .iter()
        .map(|r| r.g2_a)
        .fold(f64::NEG_INFINITY, f64::max);
    let all_ok = rows.iter().all(|r| r.is_ok());
    check(
        all_ok && worst < 1.0,
        format!(
            "max g2(0) over {} points with |g| <= 2.4: {worst:.4}",
            rows.len()
        ),
    )
}

fn thermal_optimum() -> Outcome {
    let target = 14f64.sqrt();
    let mut ok = true;
    let mut lines = Vec::new();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for c in curves(Preset::Fig4b, &RunConfig::default()) {
        let spec = c.config.sweep_spec().unwrap().unwrap();
        let rows = run_sweep(&spec, default_workers()).unwrap();
        let minima = find_minima(&rows, 0).unwrap();
        let p = nearest(&minima, target).map_or(f64::NAN, |m| m.location);
        let n = nearest(&minima, -target).map_or(f64::NAN, |m| m.location);
        ok &= (p - target).abs() <= 0.1 && (n + target).abs() <= 0.1;
        pos.push(p);
        neg.push(n);
        lines.push(format!(
            "n_th={}: minima {}",
            c.config.params.n_th,
            fmt_minima(&minima)
        ));
    }
    let spread = |v: &[f64]| {
        v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - v.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let shift = spread(&pos).max(spread(&neg));
    ok &= shift < 0.1;
    lines.push(format!(
        "target ±{target:.3}, max shift across n_th {shift:.3}"
    ));
    check(ok, lines.join("; "))
}

fn drive_degradation() -> Outcome {
    let space = make_space(5, 5).unwrap();
    let fs = [0.1, 0.3, 0.5, 1.0, 2.0];
    let g2: Vec<f64> = fs
        .iter()
        .map(|&f| {
            let mut p = fig4a_point();
            p.f = f;
            let r = steady_state_direct(&liouvillian(&p, space)).unwrap();
            g2_zero(&r.rho, Mode::A).unwrap()
        })
        .collect();
    let increasing = g2.windows(2).all(|w| w[1] > w[0]);
    let ratio = (g2[0] - 1.0).abs() / (g2[4] - 1.0).abs();
    let v: Vec<String> = g2.iter().map(|x| format!("{x:.4}")).collect();
    check(
        increasing && ratio >= 5.0,
        format!(
            "g2(0) at F={fs:?}: [{}], increasing {increasing}, |g2-1| ratio F=0.1/F=2 {ratio:.3} (need >= 5)",
            v.join(", ")
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let space = make_space(5, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_td: f64 = 0.0;
    let mut worst_t = Duration::ZERO;
    let mut errors = Vec::new();
    for _ in 0..10 {
        let p = sample_regime(&mut rng);
        let l = liouvillian(&p, space);
        let start = Instant::now();
        let direct = steady_state_direct(&l);
        worst_t = worst_t.max(start.elapsed());
        let evolved =
            steady_state_evolved_with(&l, &DensityMatrix::vacuum(space), EvolveOptions::default());
        match (direct, evolved) {
            (Ok(d), Ok(e)) => worst_td = worst_td.max(d.rho.trace_distance(&e.rho).unwrap()),
            (Err(e), _) | (_, Err(e)) => errors.push(e.to_string()),
        }
    }
    check(
        errors.is_empty() && worst_td < 1e-6 && worst_t < Duration::from_secs(1),
        format!(
            "max trace distance {worst_td:.3e}, slowest direct solve {:.3}s, errors {errors:?}",
            worst_t.as_secs_f64()
        ),
    )
}

fn exact_small_system() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut eig_err: f64 = 0.0;
    for _ in 0..100 {
        let p = SystemParams::constrained(
            rng.gen_range(-15.0..15.0),
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
            0.1,
        );
        let mut num: Vec<f64> = SymmetricEigen::new(single_excitation_matrix(&p))
            .eigenvalues
            .iter()
            .copied()
            .collect();
        num.sort_by(f64::total_cmp);
        let e = eigenfrequencies(p.delta_a, p.j, p.g);
        for (a, b) in num.iter().zip([e.xi_minus, e.xi_zero, e.xi_plus]) {
            eig_err = eig_err.max((a - b).abs());
        }
    }

    let space = make_space(5, 5).unwrap();
    let p = SystemParams::constrained(10.0, 0.0, 0.0, 0.1);
    let r = steady_state_direct(&liouvillian(&p, space)).unwrap();
    let n_a = mean_photon(&r.rho, Mode::A).unwrap();
    let want = 0.01 / (100.0 + 0.25);
    let n_rel = (n_a - want).abs() / want;
    let g2 = g2_zero(&r.rho, Mode::A).unwrap();

    let mut q = SystemParams::constrained(10.0, 6.0, 4.0, 0.0);
    q.n_th = 0.0;
    let vac = DensityMatrix::vacuum(space);
    let lv = liouvillian(&q, space).apply(&vac).unwrap();
    let dark = lv.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let a_vac = annihilator_a(space).expectation(&vac).unwrap().norm();

    check(
        eig_err < 1e-12 && n_rel < 1e-6 && (g2 - 1.0).abs() < 1e-6 && dark == 0.0 && a_vac == 0.0,
        format!(
            "eigenvalue error {eig_err:.2e}; N_a relative error {n_rel:.2e}; g2 {g2:.9}; max |L vac| {dark:e}"
        ),
    )
}

fn structural_suite() -> Outcome {
    let checks = run_validation(&RunConfig::default()).unwrap();
    let wanted = [
        "trace preservation",
        "hermiticity preservation",
        "steady-state positivity",
        "population normalization",
        "truncation convergence",
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for c in checks.iter().filter(|c| wanted.contains(&c.name)) {
        ok &= c.passed;
        lines.push(format!(
            "{} {}: {}",
            if c.passed { "ok" } else { "failed" },
            c.name,
            c.detail
        ));
    }
    check(ok && lines.len() == wanted.len(), lines.join("; "))
}

fn mechanism() -> Outcome {
    let space = make_space(5, 5).unwrap();
    let r = steady_state_direct(&liouvillian(&fig4a_point(), space)).unwrap();
    let p10 = population(&r.rho, BasisState::g(1, 0)).unwrap();
    let p02 = population(&r.rho, BasisState::g(0, 2)).unwrap();
    check(p10 > p02, format!("P_g10 {p10:.4e}, P_g02 {p02:.4e}"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("analytic blockade points", analytic_blockade_points),
        ("central blockade region", central_blockade_region),
        ("thermal optimum", thermal_optimum),
        ("drive-strength degradation", drive_degradation),
        ("oracle equivalence", oracle_equivalence),
        ("exact small-system checks", exact_small_system),
        ("structural invariant suite", structural_suite),
        ("mechanism", mechanism),
    ];
    if std::env::args().any(|a| a == "--list") {
        for (name, _) in criteria {
            println!("{name}: test");
        }
        return;
    }
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {} {name} ({secs:.1}s): {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.1}s): {d}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

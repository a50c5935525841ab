//! Built-in invariant suite behind the `validate` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::RunConfig;
use crate::error::Result;
use crate::hilbert::{make_space, HilbertSpace};
use crate::liouvillian::{liouvillian, max_abs, DensityMatrix};
use crate::model::SystemParams;
use crate::observables::{g2_zero, population, Mode};
use crate::solver::{steady_state_direct_with, steady_state_evolved_with};

pub const TRACE_TOL: f64 = 1e-12;
pub const HERMITICITY_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-8;
pub const NORMALIZATION_TOL: f64 = 1e-10;
pub const ORACLE_TOL: f64 = 1e-6;
pub const TRUNCATION_REL_TOL: f64 = 0.01;

const SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

/// A parameter point drawn from the figure regime:
/// `|Δ| ≤ 15`, `|J|, |g| ≤ 10`, `F ≤ 0.3`, `n̄ ≤ 0.1`, constrained
/// detunings and unit loss rates.
pub fn sample_regime<R: Rng>(rng: &mut R) -> SystemParams {
    SystemParams::constrained(
        rng.gen_range(-15.0..=15.0),
        rng.gen_range(-10.0..=10.0),
        rng.gen_range(-10.0..=10.0),
        rng.gen_range(0.01..=0.3),
    )
    .with_n_th(rng.gen_range(0.0..=0.1))
}

/// Operating point of the `fig4a` preset: Δ = 10, J = 6, g = 4√2, F = 0.1, n̄ = 0.
pub fn fig4a_point() -> SystemParams {
    SystemParams::constrained(10.0, 6.0, 4.0 * std::f64::consts::SQRT_2, 0.1)
}

fn check_trace(space: HilbertSpace, points: &[SystemParams]) -> Check {
    let worst = points
        .iter()
        .map(|p| liouvillian(p, space).trace_preservation_error())
        .fold(0.0, f64::max);
    Check::new(
        "trace preservation",
        worst < TRACE_TOL,
        format!("max |<<I|L| = {worst:e} (tol {TRACE_TOL:e})"),
    )
}

fn check_hermiticity(
    space: HilbertSpace,
    points: &[SystemParams],
    rng: &mut ChaCha8Rng,
) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for p in points {
        let l = liouvillian(p, space);
        for _ in 0..3 {
            let rho = DensityMatrix::random(space, rng);
            let out = l.apply(&rho)?;
            worst = worst.max(max_abs(&(&out - out.adjoint())));
        }
    }
    Ok(Check::new(
        "hermiticity preservation",
        worst < HERMITICITY_TOL,
        format!("max |Lρ - (Lρ)†| = {worst:e} (tol {HERMITICITY_TOL:e})"),
    ))
}

fn check_steady_state(
    cfg: &RunConfig,
    space: HilbertSpace,
    points: &[SystemParams],
) -> Result<[Check; 2]> {
    let mut lmin = f64::INFINITY;
    let mut norm_err: f64 = 0.0;
    let mut failures = Vec::new();
    for p in points {
        match steady_state_direct_with(&liouvillian(p, space), cfg.direct()) {
            Ok(r) => {
                lmin = lmin.min(r.rho.min_eigenvalue());
                let total: f64 = space
                    .states()
                    .map(|s| population(&r.rho, s))
                    .sum::<Result<f64>>()?;
                norm_err = norm_err.max((total - 1.0).abs());
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    let failed = !failures.is_empty();
    let suffix = if failed {
        format!("; solver failures: {}", failures.join("; "))
    } else {
        String::new()
    };
    Ok([
        Check::new(
            "steady-state positivity",
            !failed && lmin >= -POSITIVITY_TOL,
            format!(
                "min eigenvalue {lmin:e} (floor {:e}){suffix}",
                -POSITIVITY_TOL
            ),
        ),
        Check::new(
            "population normalization",
            !failed && norm_err < NORMALIZATION_TOL,
            format!("max |Σ P - 1| = {norm_err:e} (tol {NORMALIZATION_TOL:e}){suffix}"),
        ),
    ])
}

fn check_oracle(cfg: &RunConfig, space: HilbertSpace, points: &[SystemParams]) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for p in points {
        let l = liouvillian(p, space);
        let direct = steady_state_direct_with(&l, cfg.direct());
        let evolved = steady_state_evolved_with(&l, &DensityMatrix::vacuum(space), cfg.evolve);
        match (direct, evolved) {
            (Ok(d), Ok(e)) => worst = worst.max(d.rho.trace_distance(&e.rho)?),
            (Err(e), _) | (_, Err(e)) => errors.push(e.to_string()),
        }
    }
    let ok = errors.is_empty() && worst < ORACLE_TOL;
    let mut detail = format!(
        "max trace distance direct vs evolved = {worst:e} over {} points (tol {ORACLE_TOL:e})",
        points.len()
    );
    if !errors.is_empty() {
        detail.push_str(&format!("; errors: {}", errors.join("; ")));
    }
    Ok(Check::new("oracle equivalence", ok, detail))
}

/// Relative change of `g²(0)` at the `fig4a` operating point from (5,5) to (7,7).
pub fn truncation_change(cfg: &RunConfig) -> Result<(f64, f64, f64)> {
    let mut p = fig4a_point();
    p.kappa_a = cfg.params.kappa_a;
    p.kappa_b = cfg.params.kappa_b;
    p.gamma = cfg.params.gamma;
    let g2_at = |na, nb| -> Result<f64> {
        let s = make_space(na, nb)?;
        let r = steady_state_direct_with(&liouvillian(&p, s), cfg.direct())?;
        g2_zero(&r.rho, Mode::A)
    };
    let small = g2_at(5, 5)?;
    let large = g2_at(7, 7)?;
    Ok((small, large, (small - large).abs() / large.abs()))
}

fn check_truncation(cfg: &RunConfig) -> Check {
    match truncation_change(cfg) {
        Ok((small, large, rel)) => Check::new(
            "truncation convergence",
            rel < TRUNCATION_REL_TOL,
            format!(
                "g2(0) at fig4a point: (5,5) {small:e}, (7,7) {large:e}, relative change {:.3}% (tol {}%)",
                rel * 100.0,
                TRUNCATION_REL_TOL * 100.0
            ),
        ),
        Err(e) => Check::new("truncation convergence", false, e.to_string()),
    }
}

/// Run every check on the configured truncation and parameters.
pub fn run_validation(cfg: &RunConfig) -> Result<Vec<Check>> {
    cfg.validate()?;
    let space = cfg.space()?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let random: Vec<SystemParams> = (0..3).map(|_| sample_regime(&mut rng)).collect();
    let mut points = vec![cfg.params];
    points.extend(random.iter().copied());

    let mut checks = vec![
        check_trace(space, &points),
        check_hermiticity(space, &points, &mut rng)?,
    ];
    checks.extend(check_steady_state(cfg, space, &points)?);
    checks.push(check_oracle(cfg, space, &random)?);
    checks.push(check_truncation(cfg));
    Ok(checks)
}

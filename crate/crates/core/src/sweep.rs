//! Parameter grids over the steady-state observables.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::liouvillian::liouvillian;
use crate::model::{SystemParams, PARAM_NAMES};
use crate::observables::ObservableSet;
use crate::solver::{steady_state_direct_with, DirectOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, min: f64, max: f64, count: usize) -> Self {
        Self {
            name: name.into(),
            min,
            max,
            count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !PARAM_NAMES.contains(&self.name.as_str()) {
            return Err(Error::InvalidSweep(format!(
                "unknown axis parameter {:?} (expected one of {})",
                self.name,
                PARAM_NAMES.join(", ")
            )));
        }
        if self.count < 2 {
            return Err(Error::InvalidSweep(format!(
                "axis {} needs at least 2 points, got {}",
                self.name, self.count
            )));
        }
        if self.min.is_nan() || self.max.is_nan() || self.min >= self.max {
            return Err(Error::InvalidSweep(format!(
                "axis {} needs min < max, got [{}, {}]",
                self.name, self.min, self.max
            )));
        }
        Ok(())
    }

    /// Evenly spaced samples including both end points.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == self.count - 1 {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }

    /// `name:min:max:count`
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidSweep(format!("expected name:min:max:count, got {s:?}"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let axis = Self::new(
            parts[0],
            parts[1].trim().parse().map_err(|_| bad())?,
            parts[2].trim().parse().map_err(|_| bad())?,
            parts[3].trim().parse().map_err(|_| bad())?,
        );
        axis.validate()?;
        Ok(axis)
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}:{}", self.name, self.min, self.max, self.count)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub base: SystemParams,
    pub space: HilbertSpace,
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    /// Emit `log10 g²(0)` alongside the linear value.
    pub log_g2: bool,
    pub solver: DirectOptions,
}

impl SweepSpec {
    pub fn one_d(base: SystemParams, space: HilbertSpace, axis: Axis) -> Self {
        Self {
            base,
            space,
            axis1: axis,
            axis2: None,
            log_g2: true,
            solver: DirectOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.axis1.validate()?;
        if let Some(a2) = &self.axis2 {
            a2.validate()?;
            if a2.name == self.axis1.name {
                return Err(Error::InvalidSweep(format!("both axes sweep {}", a2.name)));
            }
        }
        Ok(())
    }

    pub fn axes(&self) -> Vec<&Axis> {
        std::iter::once(&self.axis1)
            .chain(self.axis2.as_ref())
            .collect()
    }

    /// Grid coordinates, axis2-major then axis1.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let v1 = self.axis1.values();
        match &self.axis2 {
            None => v1.into_iter().map(|x| vec![x]).collect(),
            Some(a2) => a2
                .values()
                .into_iter()
                .flat_map(|y| v1.iter().map(move |&x| vec![x, y]))
                .collect(),
        }
    }

    fn params_at(&self, coords: &[f64]) -> Result<SystemParams> {
        let mut p = self.base;
        for (axis, &v) in self.axes().into_iter().zip(coords) {
            p.set(&axis.name, v)?;
        }
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    UndefinedG2,
    SolverFailed,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::UndefinedG2 => "undefined_g2",
            Status::SolverFailed => "solver_failed",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    /// One value per axis, in axis order.
    pub coords: Vec<f64>,
    pub g2_a: f64,
    pub mean_n_a: f64,
    pub p_g10: f64,
    pub p_g02: f64,
    pub residual: f64,
    pub status: Status,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    fn failed(coords: Vec<f64>) -> Self {
        Self {
            coords,
            g2_a: f64::NAN,
            mean_n_a: f64::NAN,
            p_g10: f64::NAN,
            p_g02: f64::NAN,
            residual: f64::NAN,
            status: Status::SolverFailed,
        }
    }
}

/// Build, solve and measure a single parameter point.
pub fn evaluate(
    params: &SystemParams,
    space: HilbertSpace,
    opts: DirectOptions,
    coords: Vec<f64>,
) -> SweepRow {
    let l = liouvillian(params, space);
    let Ok(sol) = steady_state_direct_with(&l, opts) else {
        return SweepRow::failed(coords);
    };
    let Ok(obs) = ObservableSet::from_state(&sol.rho) else {
        return SweepRow::failed(coords);
    };
    let status = if !sol.converged {
        Status::SolverFailed
    } else if obs.g2_a.is_none() {
        Status::UndefinedG2
    } else {
        Status::Ok
    };
    SweepRow {
        coords,
        g2_a: obs.g2_a.unwrap_or(f64::NAN),
        mean_n_a: obs.mean_n_a,
        p_g10: obs.p_g10,
        p_g02: obs.p_g02,
        residual: sol.residual,
        status,
    }
}

/// Evaluate every grid point on a pool of `workers` threads. Row order is
/// the grid order of [`SweepSpec::points`] whatever the pool width.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let points = spec.points();
    let jobs: Vec<(Vec<f64>, SystemParams)> = points
        .into_iter()
        .map(|c| spec.params_at(&c).map(|p| (c, p)))
        .collect::<Result<_>>()?;
    let run = |(coords, p): &(Vec<f64>, SystemParams)| {
        evaluate(p, spec.space, spec.solver, coords.clone())
    };
    if workers <= 1 {
        return Ok(jobs.iter().map(run).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidSweep(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| jobs.par_iter().map(run).collect()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub location: f64,
    pub g2: f64,
}

/// Strict interior local minima of `g²(0)` along axis `axis` (index into
/// each row's coordinates), over the ok rows in order. Each minimum is
/// refined by a parabola through `log10 g²` at the three bracketing
/// samples.
pub fn find_minima(rows: &[SweepRow], axis: usize) -> Result<Vec<Minimum>> {
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.is_ok()).collect();
    if ok.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: ok.len(),
        });
    }
    let mut out = Vec::new();
    for w in ok.windows(3) {
        let (l, c, r) = (w[0], w[1], w[2]);
        if !(c.g2_a < l.g2_a && c.g2_a < r.g2_a) {
            continue;
        }
        let (x0, x1, x2) = (l.coords[axis], c.coords[axis], r.coords[axis]);
        let (y0, y1, y2) = (log_floor(l.g2_a), log_floor(c.g2_a), log_floor(r.g2_a));
        let (x, y) = parabola_vertex((x0, y0), (x1, y1), (x2, y2)).unwrap_or((x1, y1));
        let x = x.clamp(x0.min(x2), x0.max(x2));
        out.push(Minimum {
            location: x,
            g2: 10f64.powf(y).min(c.g2_a),
        });
    }
    Ok(out)
}

fn log_floor(g2: f64) -> f64 {
    g2.max(1e-300).log10()
}

fn parabola_vertex(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> Option<(f64, f64)> {
    let (x0, y0) = p0;
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if a.is_nan() || a <= 0.0 {
        return None;
    }
    // Newton form: y(x) = y0 + d01 (x − x0) + a (x − x0)(x − x1)
    let b = d01 - a * (x0 + x1);
    let x = -b / (2.0 * a);
    let y = y0 + d01 * (x - x0) + a * (x - x0) * (x - x1);
    Some((x, y))
}

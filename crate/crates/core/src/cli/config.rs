//! Run configuration: a flat key-value file (TOML syntax) whose model keys
//! are exactly the [`SystemParams`] field names.
//!
//! Precedence, lowest to highest: built-in defaults, `--config` file,
//! `--set key=value` (in command-line order), dedicated flags
//! (`--trunc-a`, `--trunc-b`, `--out`, `--workers`). Within one source the
//! `delta` alias is applied before the individual detuning keys.

use std::fmt::Write as _;
use std::path::PathBuf;

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::hilbert::{make_space, HilbertSpace};
use crate::model::SystemParams;
use crate::solver::{DirectOptions, EvolveOptions};
use crate::sweep::{Axis, SweepSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub na_dim: usize,
    pub nb_dim: usize,
    pub direct_tol: f64,
    pub evolve: EvolveOptions,
    pub axis1: Option<Axis>,
    pub axis2: Option<Axis>,
    pub log_g2: bool,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: SystemParams::default(),
            na_dim: 5,
            nb_dim: 5,
            direct_tol: DirectOptions::default().tol,
            evolve: EvolveOptions::default(),
            axis1: None,
            axis2: None,
            log_g2: true,
            out: None,
            workers: None,
        }
    }
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| cfg_err(format!("{key}: expected a number, got {s:?}"))),
        other => Err(cfg_err(format!("{key}: expected a number, got {other}"))),
    }
}

fn as_usize(key: &str, v: &Value) -> Result<usize> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| cfg_err(format!("{key}: expected a non-negative integer, got {s:?}"))),
        other => Err(cfg_err(format!(
            "{key}: expected a non-negative integer, got {other}"
        ))),
    }
}

fn as_str(key: &str, v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        other => Err(cfg_err(format!("{key}: expected a string, got {other}"))),
    }
}

fn as_bool(key: &str, v: &Value) -> Result<bool> {
    match v {
        Value::Boolean(b) => Ok(*b),
        Value::String(s) if s == "true" || s == "false" => Ok(s == "true"),
        other => Err(cfg_err(format!(
            "{key}: expected true or false, got {other}"
        ))),
    }
}

impl RunConfig {
    /// Apply one key. Unknown keys are rejected.
    pub fn set_value(&mut self, key: &str, v: &Value) -> Result<()> {
        match key {
            "na_dim" => self.na_dim = as_usize(key, v)?,
            "nb_dim" => self.nb_dim = as_usize(key, v)?,
            "direct_tol" => self.direct_tol = as_f64(key, v)?,
            "evolve_tol" => self.evolve.tol = as_f64(key, v)?,
            "evolve_rtol" => self.evolve.rtol = as_f64(key, v)?,
            "evolve_atol" => self.evolve.atol = as_f64(key, v)?,
            "t_max" => self.evolve.t_max = as_f64(key, v)?,
            "axis1" => self.axis1 = Some(Axis::parse(&as_str(key, v)?)?),
            "axis2" => {
                let s = as_str(key, v)?;
                self.axis2 = if s.is_empty() {
                    None
                } else {
                    Some(Axis::parse(&s)?)
                };
            }
            "log_g2" => self.log_g2 = as_bool(key, v)?,
            "out" => self.out = Some(PathBuf::from(as_str(key, v)?)),
            "workers" => self.workers = Some(as_usize(key, v)?),
            _ => {
                let x = as_f64(key, v)?;
                self.params
                    .set(key, x)
                    .map_err(|_| cfg_err(format!("unknown key {key:?}")))?;
            }
        }
        Ok(())
    }

    /// Apply every key of a table, `delta` first.
    pub fn apply_table(&mut self, table: &Table) -> Result<()> {
        if let Some(v) = table.get("delta") {
            self.set_value("delta", v)?;
        }
        for (k, v) in table.iter().filter(|(k, _)| k.as_str() != "delta") {
            if v.is_table() || v.is_array() {
                return Err(cfg_err(format!(
                    "{k}: nested values are not supported, keys are flat"
                )));
            }
            self.set_value(k, v)?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: Table = text.parse().map_err(|e| cfg_err(format!("{e}")))?;
        let mut cfg = Self::default();
        cfg.apply_table(&table)?;
        Ok(cfg)
    }

    /// `key=value`; the value is read as a TOML value, falling back to a
    /// bare string (so `--set axis1=g:-10:10:201` works unquoted).
    pub fn apply_override(&mut self, kv: &str) -> Result<String> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| cfg_err(format!("--set expects key=value, got {kv:?}")))?;
        let k = k.trim();
        let v = v.trim();
        let value = format!("v = {v}")
            .parse::<Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(v.to_string()));
        self.set_value(k, &value)?;
        Ok(k.to_string())
    }

    /// Canonical text form; `parse(to_text(c))` reproduces `c`.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let mut f = |k: &str, v: f64| writeln!(s, "{k} = {v:?}").unwrap();
        f("delta_a", p.delta_a);
        f("delta_e", p.delta_e);
        f("delta_b", p.delta_b);
        f("J", p.j);
        f("g", p.g);
        f("F", p.f);
        f("kappa_a", p.kappa_a);
        f("kappa_b", p.kappa_b);
        f("gamma", p.gamma);
        f("n_th", p.n_th);
        writeln!(s, "na_dim = {}", self.na_dim).unwrap();
        writeln!(s, "nb_dim = {}", self.nb_dim).unwrap();
        writeln!(s, "direct_tol = {:?}", self.direct_tol).unwrap();
        writeln!(s, "evolve_tol = {:?}", self.evolve.tol).unwrap();
        writeln!(s, "evolve_rtol = {:?}", self.evolve.rtol).unwrap();
        writeln!(s, "evolve_atol = {:?}", self.evolve.atol).unwrap();
        writeln!(s, "t_max = {:?}", self.evolve.t_max).unwrap();
        if let Some(a) = &self.axis1 {
            writeln!(s, "axis1 = {:?}", a.to_string()).unwrap();
        }
        if let Some(a) = &self.axis2 {
            writeln!(s, "axis2 = {:?}", a.to_string()).unwrap();
        }
        writeln!(s, "log_g2 = {}", self.log_g2).unwrap();
        if let Some(o) = &self.out {
            writeln!(s, "out = {:?}", o.display().to_string()).unwrap();
        }
        if let Some(w) = self.workers {
            writeln!(s, "workers = {w}").unwrap();
        }
        s
    }

    pub fn space(&self) -> Result<HilbertSpace> {
        make_space(self.na_dim, self.nb_dim)
    }

    pub fn direct(&self) -> DirectOptions {
        DirectOptions {
            tol: self.direct_tol,
        }
    }

    /// Check every value against the module preconditions.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.space()?;
        for (k, v) in [
            ("direct_tol", self.direct_tol),
            ("evolve_tol", self.evolve.tol),
            ("evolve_rtol", self.evolve.rtol),
            ("evolve_atol", self.evolve.atol),
            ("t_max", self.evolve.t_max),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(cfg_err(format!("{k} must be positive and finite, got {v}")));
            }
        }
        if self.workers == Some(0) {
            return Err(cfg_err("workers must be at least 1"));
        }
        if let Some(spec) = self.sweep_spec()? {
            spec.validate()?;
        }
        Ok(())
    }

    pub fn sweep_spec(&self) -> Result<Option<SweepSpec>> {
        let Some(axis1) = self.axis1.clone() else {
            if self.axis2.is_some() {
                return Err(cfg_err("axis2 given without axis1"));
            }
            return Ok(None);
        };
        Ok(Some(SweepSpec {
            base: self.params,
            space: self.space()?,
            axis1,
            axis2: self.axis2.clone(),
            log_g2: self.log_g2,
            solver: self.direct(),
        }))
    }
}

/// Environment variable consulted for the default worker count.
pub const WORKERS_ENV: &str = "BLOCKADE_WORKERS";

pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

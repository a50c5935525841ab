//! Sweep CSV output.
//!
//! Layout: `#`-prefixed lines carrying the resolved configuration, then a
//! header (axis names, `g2`, `log10_g2`, `n_a`, `p_g10`, `p_g02`,
//! `residual`, `status`), then one row per grid point. Numbers use Rust's
//! shortest round-trip formatting, so identical inputs give identical bytes.

use std::fmt::Write as _;

use super::config::RunConfig;
use crate::sweep::{SweepRow, SweepSpec};

pub fn header(spec: &SweepSpec) -> Vec<String> {
    let mut cols: Vec<String> = spec.axes().iter().map(|a| a.name.clone()).collect();
    cols.push("g2".into());
    if spec.log_g2 {
        cols.push("log10_g2".into());
    }
    cols.extend(["n_a", "p_g10", "p_g02", "residual", "status"].map(String::from));
    cols
}

pub fn render(cfg: &RunConfig, spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let mut s = String::new();
    for line in cfg.to_text().lines() {
        writeln!(s, "# {line}").unwrap();
    }
    writeln!(s, "{}", header(spec).join(",")).unwrap();
    for r in rows {
        let mut fields: Vec<String> = r.coords.iter().map(|c| format!("{c:?}")).collect();
        fields.push(format!("{:?}", r.g2_a));
        if spec.log_g2 {
            fields.push(format!("{:?}", r.g2_a.log10()));
        }
        for v in [r.mean_n_a, r.p_g10, r.p_g02, r.residual] {
            fields.push(format!("{v:?}"));
        }
        fields.push(r.status.as_str().into());
        writeln!(s, "{}", fields.join(",")).unwrap();
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParsedCsv {
    pub config: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Read back a file written by [`render`].
pub fn parse(text: &str) -> ParsedCsv {
    let mut config = String::new();
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(c) = line.strip_prefix('#') {
            config.push_str(c.strip_prefix(' ').unwrap_or(c));
            config.push('\n');
        } else if header.is_empty() {
            header = line.split(',').map(String::from).collect();
        } else if !line.is_empty() {
            rows.push(line.split(',').map(String::from).collect());
        }
    }
    ParsedCsv {
        config,
        header,
        rows,
    }
}

// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Run reports and their CSV, JSON and SVG renderings.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{Format, RunConfig};
use super::svg;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// The relation being checked.
    pub tag: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckRecord {
    /// Passes iff `residual ≤ tolerance`; NaN fails.
    pub fn at_most(name: impl Into<String>, tag: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), tag: tag.into(), residual, tolerance, passed: residual <= tolerance }
    }

    /// Passes iff `residual < tolerance`; NaN fails.
    pub fn below(name: impl Into<String>, tag: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self { passed: residual < tolerance, ..Self::at_most(name, tag, residual, tolerance) }
    }
}

/// A table of real columns, the first of which is the abscissa.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// A named scalar result that is recorded but not asserted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub environment: Environment,
    pub checks: Vec<CheckRecord>,
    pub series: Vec<Series>,
    pub metrics: Vec<Metric>,
}

impl RunReport {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Self {
            command: command.to_string(),
            environment: Environment {
                tool: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed: cfg.seed,
                config_hash: cfg.hash(),
            },
            checks: Vec::new(),
            series: Vec::new(),
            metrics: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&mut self, record: CheckRecord) {
        self.checks.push(record);
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.push(Metric { name: name.into(), value });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Writes the report into `dir` in each requested format and returns the
    /// paths written.
    pub fn write(&self, dir: &Path, formats: &[Format]) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: String, body: String| -> io::Result<()> {
            let path = dir.join(name);
            fs::write(&path, body)?;
            written.push(path);
            Ok(())
        };
        for fmt in formats {
            match fmt {
                Format::Csv => {
                    if !self.checks.is_empty() {
                        put(format!("{}-checks.csv", self.command), checks_csv(&self.checks))?;
                    }
                    for s in &self.series {
                        put(format!("{}.csv", s.name), series_csv(s))?;
                    }
                }
                Format::Json => put(format!("{}-report.json", self.command), self.to_json() + "\n")?,
                Format::Svg => {
                    for s in self.series.iter().filter(|s| s.columns.len() > 1 && !s.rows.is_empty()) {
                        put(format!("{}.svg", s.name), svg::line_plot(s))?;
                    }
                }
            }
        }
        Ok(written)
    }
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `name,tag,residual,tolerance,passed` with 17 significant digits.
pub fn checks_csv(checks: &[CheckRecord]) -> String {
    let mut out = String::from("name,tag,residual,tolerance,passed\n");
    for c in checks {
        let _ =
            writeln!(out, "{},{},{},{},{}", quote(&c.name), quote(&c.tag), sci(c.residual), sci(c.tolerance), c.passed);
    }
    out
}

pub fn series_csv(s: &Series) -> String {
    let mut out = s.columns.iter().map(|c| quote(c)).collect::<Vec<_>>().join(",");
    out.push('\n');
    for row in &s.rows {
        out.push_str(&row.iter().map(|&x| sci(x)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

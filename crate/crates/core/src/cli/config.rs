// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a flat `key = value` text format with `#` comments.
//! Keys are the kebab-case flag names; underscores are accepted as aliases.

use std::fmt;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::hilbert::{SpinScheme, TensorSpace};
use crate::models::ModelParams;
use crate::numerics::ToleranceConfig;
use crate::Error;

/// Spacing of the time grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        })
    }
}

impl FromStr for Spacing {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            _ => Err(format!("expected linear or log, got `{s}`")),
        }
    }
}

/// Output format of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        })
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            _ => Err(format!("expected csv, json or svg, got `{s}`")),
        }
    }
}

/// A rejected configuration value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.reason)
    }
}

impl std::error::Error for ConfigError {}

fn bad(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError { field: field.to_string(), reason: reason.into() }
}

/// Every configuration key with its help text, in canonical order.
pub const FIELDS: &[(&str, &str)] = &[
    ("omega", "oscillator frequency ω > 0"),
    ("mu", "spin frequency μ > 0"),
    ("gamma", "oscillator dissipation γ > 0"),
    ("gamma-bar", "spin dissipation γ̄ ≥ 0 of the general model"),
    ("lambda", "coupling λ"),
    ("j", "bath parameter J ≥ 0"),
    ("alpha-minus", "standalone spin lowering rate"),
    ("alpha-plus", "standalone spin raising rate"),
    ("fock-cutoff", "highest Fock occupation kept"),
    ("spin-halfwidth", "spin window |m| ≤ halfwidth"),
    ("scheme", "spin truncation scheme: hard or periodic"),
    ("margin-spin", "interior margin on the spin axis"),
    ("margin-fock", "interior margin on the Fock axis"),
    ("sigma", "decoupling parameter σ > 0"),
    ("sigma-sweep", "comma-separated σ values for the decoupling checks"),
    ("t-start", "first grid time"),
    ("t-end", "last grid time"),
    ("points", "number of grid points"),
    ("spacing", "grid spacing: linear or log"),
    ("sync-times", "comma-separated times for the synchronized comparison"),
    ("ode-rel", "integrator relative tolerance"),
    ("ode-abs", "integrator absolute tolerance"),
    ("identity-tol", "bound on identity-suite residuals"),
    ("trace-tol", "bound on trace and Hermiticity defects"),
    ("psd-tol", "bound on negative eigenvalues"),
    ("fd-step", "finite-difference step"),
    ("decoupling-tol", "bound on intertwining residuals"),
    ("identity-halfwidth", "spin halfwidth of the identity suite"),
    ("identity-cutoff", "Fock cutoff of the identity suite"),
    ("identity-margin", "interior margin of the identity suite on both axes"),
    ("instances", "random instances per identity"),
    ("probes", "random probes per intertwining check"),
    ("window", "half-width K of the spin window |m| ≤ K"),
    ("spin-offset", "centre m₀ of the initial spin state"),
    ("inverse-threshold", "largest accepted amplification of V(σ)⁻¹"),
    ("seed", "seed of every random draw"),
    ("out", "output directory"),
    ("format", "comma-separated output formats: csv, json, svg"),
];

/// Keys that select where and how results are written; they are excluded
/// from the configuration hash.
const OUTPUT_KEYS: &[&str] = &["out", "format"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub fock_cutoff: usize,
    pub spin_halfwidth: usize,
    pub scheme: SpinScheme,
    pub margin_spin: usize,
    pub margin_fock: usize,
    pub sigma: f64,
    pub sigma_sweep: Vec<f64>,
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub sync_times: Vec<f64>,
    pub tolerances: ToleranceConfig,
    pub decoupling_tol: f64,
    pub identity_halfwidth: usize,
    pub identity_cutoff: usize,
    pub identity_margin: usize,
    pub instances: usize,
    pub probes: usize,
    pub window: usize,
    pub spin_offset: i64,
    pub inverse_threshold: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            fock_cutoff: 20,
            spin_halfwidth: 14,
            scheme: SpinScheme::Hard,
            margin_spin: 10,
            margin_fock: 16,
            sigma: 0.5,
            sigma_sweep: vec![0.3, 0.5, 1.0],
            t_start: 0.0,
            t_end: 5.0,
            points: 11,
            spacing: Spacing::Linear,
            sync_times: vec![0.5, 2.0, 5.0],
            tolerances: ToleranceConfig::default(),
            decoupling_tol: 1e-7,
            identity_halfwidth: 8,
            identity_cutoff: 8,
            identity_margin: 2,
            instances: 20,
            probes: 3,
            window: 1,
            spin_offset: 0,
            inverse_threshold: 1e6,
            seed: 20260101,
            out: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

fn parse<T: FromStr>(field: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| bad(field, format!("cannot parse `{value}`: {e}")))
}

fn parse_list<T: FromStr>(field: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse(field, s)).collect()
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Canonical key spelling: lower case, hyphen separated.
pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

impl RunConfig {
    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = normalize_key(key);
        let f = key.as_str();
        let v = value.trim();
        let p = &mut self.params;
        let tol = &mut self.tolerances;
        match f {
            "omega" => p.omega = parse(f, v)?,
            "mu" => p.mu = parse(f, v)?,
            "gamma" => p.gamma = parse(f, v)?,
            "gamma-bar" => p.gamma_bar = parse(f, v)?,
            "lambda" => p.lambda = parse(f, v)?,
            "j" => p.j = parse(f, v)?,
            "alpha-minus" => p.alpha_minus = parse(f, v)?,
            "alpha-plus" => p.alpha_plus = parse(f, v)?,
            "fock-cutoff" => self.fock_cutoff = parse(f, v)?,
            "spin-halfwidth" => self.spin_halfwidth = parse(f, v)?,
            "scheme" => self.scheme = parse(f, v)?,
            "margin-spin" => self.margin_spin = parse(f, v)?,
            "margin-fock" => self.margin_fock = parse(f, v)?,
            "sigma" => self.sigma = parse(f, v)?,
            "sigma-sweep" => self.sigma_sweep = parse_list(f, v)?,
            "t-start" => self.t_start = parse(f, v)?,
            "t-end" => self.t_end = parse(f, v)?,
            "points" => self.points = parse(f, v)?,
            "spacing" => self.spacing = parse(f, v)?,
            "sync-times" => self.sync_times = parse_list(f, v)?,
            "ode-rel" => tol.ode_rel = parse(f, v)?,
            "ode-abs" => tol.ode_abs = parse(f, v)?,
            "identity-tol" => tol.identity_tol = parse(f, v)?,
            "trace-tol" => tol.trace_tol = parse(f, v)?,
            "psd-tol" => tol.psd_tol = parse(f, v)?,
            "fd-step" => tol.fd_step = parse(f, v)?,
            "decoupling-tol" => self.decoupling_tol = parse(f, v)?,
            "identity-halfwidth" => self.identity_halfwidth = parse(f, v)?,
            "identity-cutoff" => self.identity_cutoff = parse(f, v)?,
            "identity-margin" => self.identity_margin = parse(f, v)?,
            "instances" => self.instances = parse(f, v)?,
            "probes" => self.probes = parse(f, v)?,
            "window" => self.window = parse(f, v)?,
            "spin-offset" => self.spin_offset = parse(f, v)?,
            "inverse-threshold" => self.inverse_threshold = parse(f, v)?,
            "seed" => self.seed = parse(f, v)?,
            "out" => self.out = PathBuf::from(v),
            "format" => {
                let mut fmts: Vec<Format> = parse_list(f, v)?;
                fmts.sort();
                fmts.dedup();
                self.formats = fmts;
            }
            _ => return Err(bad(f, "unknown configuration key")),
        }
        Ok(())
    }

    /// Textual value of one field, as it would appear in a config file.
    pub fn get(&self, key: &str) -> Option<String> {
        let p = &self.params;
        let tol = &self.tolerances;
        let s = match normalize_key(key).as_str() {
            "omega" => p.omega.to_string(),
            "mu" => p.mu.to_string(),
            "gamma" => p.gamma.to_string(),
            "gamma-bar" => p.gamma_bar.to_string(),
            "lambda" => p.lambda.to_string(),
            "j" => p.j.to_string(),
            "alpha-minus" => p.alpha_minus.to_string(),
            "alpha-plus" => p.alpha_plus.to_string(),
            "fock-cutoff" => self.fock_cutoff.to_string(),
            "spin-halfwidth" => self.spin_halfwidth.to_string(),
            "scheme" => self.scheme.to_string(),
            "margin-spin" => self.margin_spin.to_string(),
            "margin-fock" => self.margin_fock.to_string(),
            "sigma" => self.sigma.to_string(),
            "sigma-sweep" => join(&self.sigma_sweep),
            "t-start" => self.t_start.to_string(),
            "t-end" => self.t_end.to_string(),
            "points" => self.points.to_string(),
            "spacing" => self.spacing.to_string(),
            "sync-times" => join(&self.sync_times),
            "ode-rel" => tol.ode_rel.to_string(),
            "ode-abs" => tol.ode_abs.to_string(),
            "identity-tol" => tol.identity_tol.to_string(),
            "trace-tol" => tol.trace_tol.to_string(),
            "psd-tol" => tol.psd_tol.to_string(),
            "fd-step" => tol.fd_step.to_string(),
            "decoupling-tol" => self.decoupling_tol.to_string(),
            "identity-halfwidth" => self.identity_halfwidth.to_string(),
            "identity-cutoff" => self.identity_cutoff.to_string(),
            "identity-margin" => self.identity_margin.to_string(),
            "instances" => self.instances.to_string(),
            "probes" => self.probes.to_string(),
            "window" => self.window.to_string(),
            "spin-offset" => self.spin_offset.to_string(),
            "inverse-threshold" => self.inverse_threshold.to_string(),
            "seed" => self.seed.to_string(),
            "out" => self.out.display().to_string(),
            "format" => join(&self.formats),
            _ => return None,
        };
        Some(s)
    }

    /// Applies a config file's `key = value` lines on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(&format!("line {}", lineno + 1), format!("expected `key = value`, got `{line}`")))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Parses a config file on top of the defaults.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Every field as `key = value`, one per line, in canonical order.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, _) in FIELDS {
            let _ = writeln!(out, "{key} = {}", self.get(key).unwrap_or_default());
        }
        out
    }

    /// SHA-256 of the rendered configuration without the output keys.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (key, _) in FIELDS.iter().filter(|(k, _)| !OUTPUT_KEYS.contains(k)) {
            h.update(format!("{key}={}\n", self.get(key).unwrap_or_default()));
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Tensor space of the main geometry.
    pub fn space(&self) -> crate::Result<TensorSpace> {
        TensorSpace::new(self.spin_halfwidth, self.scheme, self.fock_cutoff)
    }

    /// Time grid from `t_start` to `t_end`.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        if n == 1 {
            return vec![self.t_start];
        }
        (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.t_start + s * (self.t_end - self.t_start),
                    Spacing::Log => (self.t_start.ln() + s * (self.t_end / self.t_start).ln()).exp(),
                }
            })
            .collect()
    }

    /// Checks every constructor precondition and names the offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.validate_core().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => bad(&normalize_key(name), reason),
            other => bad("params", other.to_string()),
        })?;
        self.tolerances.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => bad(&normalize_key(name), reason),
            other => bad("tolerances", other.to_string()),
        })?;
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(bad(field, format!("must be positive and finite, got {v}")))
            }
        };
        positive("decoupling-tol", self.decoupling_tol)?;
        positive("inverse-threshold", self.inverse_threshold)?;
        positive("sigma", self.sigma)?;
        if self.sigma_sweep.is_empty() {
            return Err(bad("sigma-sweep", "must list at least one value"));
        }
        for &s in &self.sigma_sweep {
            positive("sigma-sweep", s)?;
        }
        for &t in &self.sync_times {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(bad("sync-times", format!("times must be finite and non-negative, got {t}")));
            }
        }
        if self.fock_cutoff == 0 {
            return Err(bad("fock-cutoff", "must be at least 1"));
        }
        if self.margin_spin > 0 && self.margin_spin >= self.spin_halfwidth {
            return Err(bad("margin-spin", "must be smaller than spin-halfwidth"));
        }
        if self.margin_fock > 0 && self.margin_fock >= self.fock_cutoff {
            return Err(bad("margin-fock", "must be smaller than fock-cutoff"));
        }
        if self.identity_cutoff == 0 {
            return Err(bad("identity-cutoff", "must be at least 1"));
        }
        if self.identity_margin > 0 && self.identity_margin >= self.identity_halfwidth.min(self.identity_cutoff) {
            return Err(bad("identity-margin", "must be smaller than identity-halfwidth and identity-cutoff"));
        }
        if self.instances == 0 {
            return Err(bad("instances", "must be at least 1"));
        }
        if self.probes == 0 {
            return Err(bad("probes", "must be at least 1"));
        }
        if !(self.t_start >= 0.0 && self.t_start.is_finite()) {
            return Err(bad("t-start", "must be finite and non-negative"));
        }
        if !(self.t_end > self.t_start && self.t_end.is_finite()) {
            return Err(bad("t-end", "must be finite and exceed t-start"));
        }
        if self.points < 2 {
            return Err(bad("points", "need at least two grid points"));
        }
        if self.spacing == Spacing::Log && self.t_start <= 0.0 {
            return Err(bad("spacing", "log spacing needs t-start > 0"));
        }
        if self.window > self.spin_halfwidth {
            return Err(bad("window", "must not exceed spin-halfwidth"));
        }
        if self.spin_offset.unsigned_abs() as usize + 1 > self.spin_halfwidth {
            return Err(bad("spin-offset", "initial spin support must fit inside the spin window"));
        }
        if self.formats.is_empty() {
            return Err(bad("format", "must list at least one format"));
        }
        self.space().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => bad(&normalize_key(name), reason),
            other => bad("geometry", other.to_string()),
        })?;
        Ok(())
    }
}

// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Configuration-driven command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or a
//! computation errors, 2 for usage and configuration errors.

pub mod commands;
pub mod config;
pub mod report;
mod svg;

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::{Arg, ArgAction, ArgMatches, Command};

pub use commands::{cmd_evolve, cmd_spectrum, cmd_sync_compare, cmd_verify, verify_plan, Fault};
pub use config::{ConfigError, Format, RunConfig, Spacing, FIELDS};
pub use report::{CheckRecord, Metric, RunReport, Series};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn config_args() -> Vec<Arg> {
    let mut args =
        vec![Arg::new("config").long("config").value_name("PATH").help("configuration file of `key = value` lines")];
    for (key, help) in FIELDS {
        args.push(Arg::new(*key).long(*key).value_name("VALUE").allow_negative_numbers(true).help(*help));
    }
    args
}

fn command() -> Command {
    let sub = |name: &'static str, about: &'static str| Command::new(name).about(about).args(config_args());
    Command::new("oisd")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Verification suite and experiments for the open infinite-spin Dicke model")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(
            sub("verify", "run every verification check")
                .arg(
                    Arg::new("list")
                        .long("list")
                        .action(ArgAction::SetTrue)
                        .help("print the checks without running them"),
                )
                .arg(Arg::new("inject-fault").long("inject-fault").value_parser(["negated-spin-rate"]).hide(true)),
        )
        .subcommand(sub("evolve", "closed-form and integrated trajectories"))
        .subcommand(sub("sync-compare", "OISD evolution against its synchronized surrogate"))
        .subcommand(sub("spectrum", "eigenvalues of the open-oscillator generator"))
        .subcommand(sub("list", "print the verification checks"))
}

/// Defaults, then the config file, then command-line flags.
fn load_config(m: &ArgMatches) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = m.get_one::<String>("config") {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError { field: "config".into(), reason: format!("cannot read `{path}`: {e}") })?;
        cfg.apply_text(&text)?;
    }
    for (key, _) in FIELDS {
        if let Some(v) = m.get_one::<String>(key) {
            cfg.set(key, v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_plan(cfg: &RunConfig) {
    for (name, tag) in verify_plan(cfg) {
        println!("{name}\t{tag}");
    }
}

fn finish(report: &RunReport, out: &Path, formats: &[Format]) -> i32 {
    for c in &report.checks {
        println!(
            "{} {} residual={:.3e} tol={:.3e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.residual,
            c.tolerance
        );
    }
    for m in &report.metrics {
        println!("metric {} = {:.6e}", m.name, m.value);
    }
    match report.write(out, formats) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: cannot write report to {}: {e}", out.display());
            return EXIT_FAIL;
        }
    }
    let failed = report.failures().count();
    if failed == 0 {
        EXIT_PASS
    } else {
        eprintln!("{failed} check(s) failed");
        EXIT_FAIL
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let Some((name, sub)) = matches.subcommand() else {
        return EXIT_USAGE;
    };
    let cfg = match load_config(sub) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match name {
        "list" => {
            print_plan(&cfg);
            return EXIT_PASS;
        }
        "verify" if sub.get_flag("list") => {
            print_plan(&cfg);
            return EXIT_PASS;
        }
        "verify" => {
            let fault = sub.get_one::<String>("inject-fault").map(|_| Fault::NegatedSpinRate);
            cmd_verify(&cfg, fault)
        }
        "evolve" => cmd_evolve(&cfg),
        "sync-compare" => cmd_sync_compare(&cfg),
        "spectrum" => cmd_spectrum(&cfg),
        _ => return EXIT_USAGE,
    };
    match result {
        Ok(report) => finish(&report, &cfg.out, &cfg.formats),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAIL
        }
    }
}

//! Batch front end behind the `popper` binary.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure (including a
//! failed `verify` check), 3 I/O failure. Data goes to files or standard
//! output, diagnostics to standard error.

pub mod config;
pub mod csv;
pub mod report;
pub mod verify;

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;

pub use config::{parse_config_file, parse_grid, parse_run_config, Command, RunConfig};
pub use csv::{emit_csv, parse_csv, to_csv_string, COLUMNS};

use crate::closed_form::Method;
use crate::error::{Error, Result};
use crate::scenarios::{
    case_i_rows, run_case_i, run_case_ii, sweep, DetectorBand, SweepPlan, SweepRow,
};

pub const THREADS_VAR: &str = "POPPER_THREADS";

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain { .. } | Error::Config(_) => 1,
        Error::Convergence { .. }
        | Error::Statistics { .. }
        | Error::OutOfRange { .. }
        | Error::Branch { .. } => 2,
        Error::Io(_) => 3,
    }
}

/// Runs one invocation. `argv` starts with the program name; `env` supplies
/// environment variables (only `POPPER_THREADS` is read).
pub fn run_cli(argv: &[String], env: &HashMap<String, String>) -> i32 {
    let cli = match config::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let pool = match thread_pool(env) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let (command, flags) = config::split_command(cli);
    let result = pool.install(|| {
        let cfg = config::resolve_flags(command, &flags)?;
        execute(&cfg)
    });
    match result {
        Ok(code) => code,
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> i32 {
    eprintln!("popper: {e}");
    exit_code(e)
}

fn thread_pool(env: &HashMap<String, String>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(v) = env.get(THREADS_VAR) {
        let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
            Error::Config(format!(
                "{THREADS_VAR} must be a positive integer, got {v:?}"
            ))
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker threads: {e}")))
}

fn open(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_outputs(cfg: &RunConfig, rows: &[SweepRow], report: &str) -> Result<()> {
    let io_err = |e: io::Error| Error::Io(e.to_string());
    match &cfg.output {
        Some(path) => {
            let mut f = open(path)?;
            emit_csv(rows, &mut f)
                .and_then(|_| f.flush())
                .map_err(io_err)?;
        }
        None => {
            let mut out = io::stdout().lock();
            emit_csv(rows, &mut out)
                .and_then(|_| out.flush())
                .map_err(io_err)?;
        }
    }
    match (&cfg.report, &cfg.output) {
        (Some(path), _) => {
            let mut f = open(path)?;
            f.write_all(report.as_bytes())
                .and_then(|_| f.flush())
                .map_err(io_err)?;
        }
        (None, Some(_)) => print!("{report}"),
        (None, None) => {}
    }
    Ok(())
}

/// Exit code for a finished run whose rows may carry per-cell failures.
fn row_status(rows: &[SweepRow]) -> i32 {
    let mut code = 0;
    for r in rows {
        for f in &r.failures {
            eprintln!(
                "popper: a = {}, t = {}: {} failed: {}",
                r.a, r.t, f.column, f.error
            );
            code = code.max(exit_code(&f.error));
        }
    }
    code
}

fn sweep_plan(cfg: &RunConfig, momentum: bool, position: bool) -> SweepPlan {
    let mut plan = SweepPlan::new(cfg.methods.clone(), cfg.quadrature);
    if cfg.methods.contains(&Method::MonteCarlo) {
        plan.mc = Some(cfg.mc);
    }
    plan.band = cfg.band;
    plan.momentum = momentum;
    plan.position = position;
    plan
}

fn execute(cfg: &RunConfig) -> Result<i32> {
    match cfg.command {
        Command::SpreadK2 | Command::SpreadY2 | Command::Sweep => {
            let plan = sweep_plan(
                cfg,
                cfg.command != Command::SpreadY2,
                cfg.command != Command::SpreadK2,
            );
            let rows = sweep(&cfg.grid, &plan)?;
            let title = match cfg.command {
                Command::SpreadK2 => "Momentum spread (dk2sq)",
                Command::SpreadY2 => "Position spread (dy2sq)",
                _ => "Sweep",
            };
            write_outputs(cfg, &rows, &report::rows(title, &rows))?;
            Ok(row_status(&rows))
        }
        Command::CaseIi => {
            let r = run_case_ii(&cfg.grid.a, &cfg.params, &cfg.quadrature)?;
            write_outputs(cfg, &r.rows, &report::case_ii(&r, &cfg.params))?;
            Ok(row_status(&r.rows))
        }
        Command::CaseI => {
            let band = cfg
                .band
                .unwrap_or_else(|| DetectorBand::default_for(&cfg.params));
            let r = run_case_i(
                cfg.slits.left_half_width(),
                &cfg.params,
                band,
                &cfg.quadrature,
            )?;
            write_outputs(cfg, &case_i_rows(&r), &report::case_i(&r, &cfg.params))?;
            Ok(0)
        }
        Command::Verify => {
            let outcomes = verify::run_checks();
            let mut text = String::new();
            for o in &outcomes {
                let tag = if o.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!("{tag} {}: {}\n", o.name, o.detail));
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed == 0 {
                text.push_str(&format!("all {} checks passed\n", outcomes.len()));
            } else {
                text.push_str(&format!("{failed} of {} checks failed\n", outcomes.len()));
            }
            match &cfg.output {
                Some(path) => {
                    let mut f = open(path)?;
                    f.write_all(text.as_bytes())
                        .and_then(|_| f.flush())
                        .map_err(|e| Error::Io(e.to_string()))?;
                }
                None => print!("{text}"),
            }
            Ok(if failed == 0 { 0 } else { 2 })
        }
    }
}

//! `zk`: command-line driver.
//!
//! ```text
//! zk run      --config run.toml [--seed N] [--out DIR]
//! zk verify   [--config run.toml] [--seed N] [--samples N] [--out DIR]
//! zk sweep    [--config run.toml] [--eps START:COUNT] [--out DIR]
//! zk mms      [--config run.toml] [--out DIR]
//! zk poincare [--config run.toml] [--seed N] [--samples N] [--out DIR]
//! ```
//!
//! Without `--config` the built-in defaults are used. `ZK_THREADS` caps the
//! worker pool. Failures print a single `error kind=<kind> message=<text>`
//! line on stderr and exit with status 2; a completed check that does not pass
//! exits with status 1.

// `!(x > 0.0)` style guards are meant to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zk_core::io::diagnostics_csv::write_bound_table;
use zk_core::io::report::{identity_table, mms_table, poincare_table, suite_table, sweep_table};
use zk_core::io::{load_config, write_snapshot, DiagnosticsWriter, RunConfig};
use zk_core::timestepper::integrate;
use zk_core::verifier::{
    geometric_epsilons, poincare_sampling, run_eps_sweep, run_mms_study, static_suite_with, SuiteOptions,
    SweepConfig,
};
use zk_core::{build_domain, Error, Result};

#[derive(Parser)]
#[command(name = "zk", version, about = "Zakharov-Kuznetsov solver and verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration, writing diagnostics and snapshots.
    Run(Common),
    /// Static identity and inequality suite on random and basis fields.
    Verify(Common),
    /// Regularisation sweep over a geometric list of epsilons.
    Sweep(Common),
    /// Manufactured-solution convergence study.
    Mms(Common),
    /// Empirical Poincare-type constants.
    Poincare(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of random fields for verify and poincare.
    #[arg(long)]
    samples: Option<usize>,
    /// Epsilon list `START:COUNT`; successive values shrink by the configured ratio.
    #[arg(long)]
    eps: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Whether the command's checks passed.
type Verdict = bool;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| dispatch(cli.command));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error kind={} message={msg}", e.kind());
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("ZK_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Argument(format!("ZK_THREADS must be a positive integer, got \"{raw}\"")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn dispatch(cmd: Command) -> Result<Verdict> {
    match cmd {
        Command::Run(a) => cmd_run(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Mms(a) => cmd_mms(&a),
        Command::Poincare(a) => cmd_poincare(&a),
    }
}

fn load(a: &Common) -> Result<RunConfig> {
    let mut cfg = match &a.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(n) = a.samples {
        cfg.verify.samples = n;
    }
    if let Some(dir) = &a.out {
        cfg.output.dir = dir.clone();
    }
    Ok(cfg)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

/// Prints `text` and, when `--out` was given, saves it as `<out>/<name>`.
fn emit(a: &Common, name: &str, text: &str) -> Result<()> {
    print!("{text}");
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Error::Io { path, source: e })?;
    }
    Ok(())
}

fn cmd_run(a: &Common) -> Result<Verdict> {
    let cfg = load(a)?;
    let basis = build_domain(cfg.domain)?;
    let u0 = cfg.initial.build(&basis, cfg.seed)?;
    let out = &cfg.output;
    create_dir(&out.dir)?;
    let csv_path = out.diagnostics_path();
    if csv_path.exists() {
        fs::remove_file(&csv_path).map_err(|e| Error::Io {
            path: csv_path.clone(),
            source: e,
        })?;
    }
    let mut writer = DiagnosticsWriter::open(&csv_path)?;
    let every = cfg.diagnostics.snapshot_every;
    let mut count = 0usize;
    let result = integrate(&u0, &cfg.params, &cfg.diagnostics.config(), |state, rec| {
        writer.append(rec)?;
        if every > 0 && count.is_multiple_of(every) {
            let path = out.dir.join(format!("snap_{:08}.zks", state.step_index));
            write_snapshot(&state.u, state.t, state.step_index as u64, &path)?;
        }
        count += 1;
        Ok(())
    });
    writer.flush()?;
    let run = result?;
    let s = &run.final_state;
    write_snapshot(&s.u, s.t, s.step_index as u64, &out.final_snapshot_path())?;
    let last = run.records.last().expect("integrate records t = 0");
    let first = &run.records[0];
    println!("steps {}  t {:.6}", s.step_index, s.t);
    println!("{:<20} {:>15} {:>15}", "quantity", "initial", "final");
    println!("{:<20} {:>15.8e} {:>15.8e}", "|u|", first.l2, last.l2);
    println!("{:<20} {:>15.8e} {:>15.8e}", "|grad u|", first.grad_l2, last.grad_l2);
    println!("{:<20} {:>15.8e} {:>15.8e}", "E1", first.e1, last.e1);
    println!("{:<20} {:>15} {:>15.8e}", "balance residual", "-", last.balance_residual);
    println!("{:<20} {:>15} {:>15.8e}", "mean-law residual", "-", last.mean_residual);
    println!("diagnostics {}", csv_path.display());
    println!("snapshot {}", out.final_snapshot_path().display());
    Ok(true)
}

fn cmd_verify(a: &Common) -> Result<Verdict> {
    let cfg = load(a)?;
    let basis = build_domain(cfg.domain)?;
    let opts = SuiteOptions {
        samples: cfg.verify.samples,
        identity_samples: cfg.verify.identity_samples,
        l3_samples: cfg.verify.l3_samples,
    };
    let suite = static_suite_with(&basis, cfg.params.c, cfg.seed, &opts, &cfg.tolerances)?;
    let pass = suite.all_pass();
    let mut text = suite_table(&suite);
    text.push_str(if pass { "verify: PASS\n" } else { "verify: FAIL\n" });
    emit(a, "verify.txt", &text)?;
    Ok(pass)
}

/// Parses `START:COUNT`.
fn parse_eps(spec: &str) -> Result<(f64, usize)> {
    let bad = || Error::Argument(format!("--eps expects START:COUNT, got \"{spec}\""));
    let (s, c) = spec.split_once(':').ok_or_else(bad)?;
    let start: f64 = s.trim().parse().map_err(|_| bad())?;
    let count: usize = c.trim().parse().map_err(|_| bad())?;
    if !(start > 0.0) || count == 0 {
        return Err(bad());
    }
    Ok((start, count))
}

fn cmd_sweep(a: &Common) -> Result<Verdict> {
    let cfg = load(a)?;
    let basis = build_domain(cfg.domain)?;
    let (start, count) = match &a.eps {
        Some(spec) => parse_eps(spec)?,
        None => (cfg.sweep.eps_start, cfg.sweep.eps_count),
    };
    let sweep = SweepConfig {
        u0: cfg.initial.build(&basis, cfg.seed)?,
        params: cfg.params.clone(),
        epsilons: geometric_epsilons(start, count, cfg.sweep.eps_ratio),
        diagnostics: cfg.diagnostics.config(),
    };
    let report = run_eps_sweep(&sweep)?;
    emit(a, "sweep.txt", &sweep_table(&report))?;
    if let Some(dir) = &a.out {
        write_bound_table(&report.bound_table, &dir.join("sweep.csv"))?;
    }
    let report = report.into_result()?;
    let tol = cfg.sweep.uniformity_tol;
    Ok(report.spread(|r| r.sup_l2_sq) <= tol
        && report.spread(|r| r.sup_grad_sq) <= tol
        && report.gaps_strictly_decreasing())
}

fn cmd_mms(a: &Common) -> Result<Verdict> {
    let cfg = load(a)?;
    let basis = build_domain(cfg.domain)?;
    let m = &cfg.mms;
    let mut params = cfg.params.clone();
    params.t_final = m.t_final;
    let study = run_mms_study(&basis, &params, &m.case, m.scale, &m.dts)?;
    let order = study.fitted_order();
    let pass = study.rows.len() < 2 || (order - m.expected_order).abs() <= m.order_tol;
    let mut text = mms_table(&study);
    text.push_str(&format!(
        "mms: {} (expected order {} +/- {})\n",
        if pass { "PASS" } else { "FAIL" },
        m.expected_order,
        m.order_tol
    ));
    emit(a, "mms.txt", &text)?;
    Ok(pass)
}

fn cmd_poincare(a: &Common) -> Result<Verdict> {
    let cfg = load(a)?;
    let basis = build_domain(cfg.domain)?;
    let (reports, stats) = poincare_sampling(
        &basis,
        cfg.seed,
        cfg.verify.samples,
        cfg.verify.l3_samples,
        &cfg.tolerances,
    )?;
    let pass = reports.iter().all(|r| r.pass);
    let mut text = identity_table(&reports);
    text.push_str(&poincare_table(&stats));
    emit(a, "poincare.txt", &text)?;
    Ok(pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_spec() {
        assert_eq!(parse_eps("1e-2:4").unwrap(), (1e-2, 4));
        assert!(parse_eps("1e-2").is_err());
        assert!(parse_eps("-1:3").is_err());
        assert!(parse_eps("1e-2:0").is_err());
    }
}

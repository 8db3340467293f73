//! Command-line driver: each verification is a subcommand writing CSV
//! rows and a human summary. Exit codes: 0 all checks pass, 1 at least
//! one failing check, 2 usage or configuration errors.

use crate::checks::{run_check, Check};
use crate::config::RunConfig;
use crate::report::{to_csv, ReportRow};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "supersde",
    about = "Verification suite: Grassmann calculus, super-Wick expectations, \
             and SDE/Gibbs Monte Carlo checks",
    disable_help_subcommand = true
)]
struct Cli {
    /// Plain-text config file (`key = value` lines); defaults reproduce
    /// the full suite.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// CSV output path.
    #[arg(long, global = true, value_name = "PATH", default_value = "supersde-report.csv")]
    out: PathBuf,
    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Quarter-size ensembles for smoke runs.
    #[arg(long, global = true)]
    fast: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Cmd {
    /// Exact Grassmann algebra fuzzing and Berezin sign conventions.
    AlgebraSelftest,
    /// Superspace reduction formula on supersymmetric pairs.
    VerifyReduction,
    /// Fermionic determinants against the 2^{-n} collapse.
    VerifyWick,
    /// Symbolic and estimator-level localization identities.
    VerifyLocalization,
    /// Direct vs Girsanov-weighted estimates across potentials.
    VerifyGirsanov,
    /// Monte Carlo vs Gibbs quadrature for the main identity.
    VerifyGibbs,
    /// Mollified-noise convergence to the Stratonovich integral.
    WongZakai,
    /// Every check above, in that order.
    All,
}

fn checks_for(cmd: Cmd) -> Vec<Check> {
    match cmd {
        Cmd::AlgebraSelftest => vec![Check::AlgebraSelftest],
        Cmd::VerifyReduction => vec![Check::Reduction],
        Cmd::VerifyWick => vec![Check::Wick],
        Cmd::VerifyLocalization => vec![Check::Localization],
        Cmd::VerifyGirsanov => vec![Check::Girsanov],
        Cmd::VerifyGibbs => vec![Check::Gibbs],
        Cmd::WongZakai => vec![Check::WongZakai],
        Cmd::All => Check::ALL_ORDER.to_vec(),
    }
}

/// Entry point used by the binary; argument vector injectable for tests.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let mut cfg = match &cli.config {
        Some(path) => match RunConfig::from_file(path) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        },
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.sim.master_seed = seed;
    }
    if cli.fast {
        cfg.sim.n_paths = (cfg.sim.n_paths / 4).max(1);
    }

    let mut rows: Vec<ReportRow> = Vec::new();
    for check in checks_for(cli.cmd) {
        match run_check(check, &cfg) {
            Ok(mut r) => rows.append(&mut r),
            Err(e) => {
                eprintln!("error while running {}: {e}", check.id());
                return 2;
            }
        }
    }

    for r in &rows {
        let status = if r.pass { "PASS" } else { "FAIL" };
        let se = r
            .std_err
            .map(|s| format!(" +- {s:.3e}"))
            .unwrap_or_default();
        println!(
            "{status} [{}] {}: value {:.10e}{se}, reference {:.10e}, tolerance {:.3e}",
            r.check_id, r.quantity, r.value, r.reference, r.tolerance
        );
    }
    if let Err(e) = crate::report::write_csv(&cli.out, &rows) {
        eprintln!("error: cannot write {}: {e}", cli.out.display());
        return 2;
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    println!(
        "{} checks, {} failed; report written to {}",
        rows.len(),
        failed,
        cli.out.display()
    );
    if failed > 0 {
        1
    } else {
        0
    }
}

pub fn run_cli() -> i32 {
    run(std::env::args_os())
}

/// Produce the CSV text for a subcommand name without touching the file
/// system (used by determinism tests).
pub fn csv_for(cmd_name: &str, cfg: &RunConfig) -> Result<String, crate::checks::CheckError> {
    let cmd = match cmd_name {
        "algebra-selftest" => Cmd::AlgebraSelftest,
        "verify-reduction" => Cmd::VerifyReduction,
        "verify-wick" => Cmd::VerifyWick,
        "verify-localization" => Cmd::VerifyLocalization,
        "verify-girsanov" => Cmd::VerifyGirsanov,
        "verify-gibbs" => Cmd::VerifyGibbs,
        "wong-zakai" => Cmd::WongZakai,
        _ => Cmd::All,
    };
    let mut rows = Vec::new();
    for check in checks_for(cmd) {
        rows.append(&mut run_check(check, cfg)?);
    }
    Ok(to_csv(&rows))
}

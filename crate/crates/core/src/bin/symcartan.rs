use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use symcartan::calculus::FieldFile;
use symcartan::cartan::PathSpec;
use symcartan::commands::{eval_fields, holonomy_of, ActionName, EvalOptions};
use symcartan::suite::{SeedRange, SuiteConfig};
use symcartan::{Error, Q};

const REPORT_FILE: &str = "symcartan-report.json";

#[derive(Parser)]
#[command(name = "symcartan", version, about = "Verify Cartan-connection identities and evaluate gravity actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and write a JSON report.
    Verify {
        /// Suite configuration; the exact 3d identities when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed range `a..b`, overriding the config.
        #[arg(long)]
        seeds: Option<SeedRange>,
        /// Report path, overriding the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for the report when no path is given.
        #[arg(long, env = "SYMCARTAN_OUT_DIR")]
        out_dir: Option<PathBuf>,
        /// Record wall-clock times in the report (makes it nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Evaluate an action on a field file.
    Eval {
        #[arg(long)]
        fields: PathBuf,
        /// cs, palatini, cs_omega_torsion, tmg or mm.
        #[arg(long)]
        action: ActionName,
        #[arg(long, allow_hyphen_values = true)]
        c0: Option<Q>,
        #[arg(long, allow_hyphen_values = true)]
        c1: Option<Q>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<Q>,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<Q>,
        /// Quadrature grid per axis for numeric actions.
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        grid: Option<u64>,
    },
    /// Holonomy of a rolling model around a path.
    Holonomy {
        /// sphere, sphere-cartan or ball-on-plane.
        #[arg(long)]
        model: String,
        #[arg(long)]
        path: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
    },
}

enum Failure {
    Usage(Error),
    Runtime(Error),
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e)
}

/// Bad input shapes are usage errors; numerical failures are not.
fn classify(e: Error) -> Failure {
    match e {
        Error::Parse(_)
        | Error::UnknownAlgebra(_)
        | Error::AlgebraMismatch(..)
        | Error::DimensionMismatch(_)
        | Error::DegreeOverflow { .. }
        | Error::Precondition(_)
        | Error::InvalidPath(_)
        | Error::Unsupported(_) => Failure::Usage(e),
        _ => Failure::Runtime(e),
    }
}

// A closed pipe is not an error worth reporting.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn verify(
    config: Option<PathBuf>,
    seeds: Option<SeedRange>,
    out: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    timings: bool,
) -> Result<bool, Failure> {
    let mut cfg = match &config {
        Some(p) => SuiteConfig::load(p).map_err(usage)?,
        None => SuiteConfig::default(),
    };
    if let Some(s) = seeds {
        cfg.seeds = s;
    }
    let path = out.or_else(|| cfg.out.clone()).unwrap_or_else(|| out_dir.unwrap_or_default().join(REPORT_FILE));
    let plan = cfg.plan().map_err(usage)?;
    let report = plan.run(timings).map_err(Failure::Runtime)?;
    report.write(&path).map_err(Failure::Runtime)?;
    let s = report.summary;
    emit(&format!(
        "{} checks, {} passed, {} failed; report written to {}",
        s.total,
        s.passed,
        s.failed,
        path.display()
    ));
    for d in report.failing_digests() {
        eprintln!("FAILED {d}");
    }
    Ok(report.all_passed())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Verify { config, seeds, out, out_dir, timings } => verify(config, seeds, out, out_dir, timings),
        Command::Eval { fields, action, c0, c1, mu, gamma, grid } => {
            let file = FieldFile::load(&fields).map_err(usage)?;
            let opts = EvalOptions { c0, c1, mu, gamma, grid: grid.map(|g| g as usize) };
            let out = eval_fields(&file, action, &opts).map_err(classify)?;
            emit(&out.to_string());
            emit(&out.to_json_string());
            Ok(true)
        }
        Command::Holonomy { model, path, steps } => {
            let spec = PathSpec::load(&path).map_err(usage)?;
            let out = holonomy_of(&model, &spec, steps as usize).map_err(classify)?;
            emit(&out.to_string());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stratolevy_harness::suites::{
    run_combinatorics_suite, run_discrete_identity_suite, run_mc_convergence, run_subordinator_pathwise,
    MAX_COMBINATORICS_N,
};
use stratolevy_harness::{ExperimentConfig, HarnessError, Runner, SuiteReport};

/// Identity suites and Monte Carlo studies for multiple Lévy integrals.
///
/// Writes a CSV report. Exit status: 0 when every hard check passes,
/// 1 when one fails, 2 on usage, configuration or I/O errors.
#[derive(Parser)]
#[command(name = "stratolevy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Output {
    /// CSV destination; defaults to the config's `out`, then stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct FromConfig {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's base seed
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive partition-lattice and diagonal checks
    Combinatorics {
        #[arg(long, default_value_t = MAX_COMBINATORICS_N)]
        max_n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Randomised exact discrete identities
    Identities {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo convergence along the N ladder
    Mc(FromConfig),
    /// Pathwise subordinator integrals
    Pathwise(FromConfig),
}

fn load(args: &FromConfig) -> Result<(ExperimentConfig, Option<PathBuf>), HarnessError> {
    let mut cfg = ExperimentConfig::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = args.output.out.clone().or_else(|| cfg.out.clone());
    Ok((cfg, out))
}

fn run(cli: &Cli) -> Result<(SuiteReport, Option<PathBuf>), HarnessError> {
    let runner = Runner::from_env()?;
    match &cli.command {
        Command::Combinatorics { max_n, output } => Ok((run_combinatorics_suite(*max_n)?, output.out.clone())),
        Command::Identities { trials, seed, output } => {
            Ok((run_discrete_identity_suite(*trials, *seed, &runner)?, output.out.clone()))
        }
        Command::Mc(args) => {
            let (cfg, out) = load(args)?;
            Ok((run_mc_convergence(&cfg, &runner)?, out))
        }
        Command::Pathwise(args) => {
            let (cfg, out) = load(args)?;
            Ok((run_subordinator_pathwise(&cfg, &runner)?, out))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, out) = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &out {
        Some(path) => report.write_csv(path),
        None => std::io::stdout()
            .write_all(report.to_csv().as_bytes())
            .map_err(|source| HarnessError::Io { path: PathBuf::from("<stdout>"), source }),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.all_passed() {
        return ExitCode::SUCCESS;
    }
    for row in report.rows.iter().filter(|r| r.failed()) {
        let cells = row.cells.map(|c| format!(" N={c}")).unwrap_or_default();
        eprintln!(
            "FAIL {} {}{cells}: value {} > tolerance {}",
            row.suite,
            row.statistic,
            row.value,
            row.tolerance.unwrap_or(f64::NAN)
        );
    }
    for f in &report.failures {
        eprintln!("FAIL {f}");
    }
    ExitCode::from(1)
}

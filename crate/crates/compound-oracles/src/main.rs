use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use compound_oracles::cli::{
    self, exit_code_for, Overrides, EXIT_CONFIG_ERROR, EXIT_OK, EXIT_PROPERTY_FAILURE,
};

/// Oracle rules for compound estimation and a Monte Carlo risk laboratory.
#[derive(Parser)]
#[command(name = "compound-oracles", version, about)]
struct Cli {
    /// Worker threads for Monte Carlo replications (0 = all cores).
    /// Results are byte-identical for any worker count.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Paired Monte Carlo risk comparison over an n-grid.
    Gap {
        /// Experiment config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Output format override.
        #[arg(long, value_parser = parse_format)]
        format: Option<cli::OutputFormat>,
        /// Output path override.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Moment-condition diagnostics for a single-n config.
    Check {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-engine property validation on random instances.
    Validate {
        /// Largest instance size (enumeration-backed, 2 ≤ max-n ≤ 7).
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        /// Random instances per property.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 20260810)]
        seed: u64,
        /// Replay-file path for a failing instance.
        #[arg(long, default_value = "validate-replay.json")]
        out: PathBuf,
        /// Test-only: perturb one permanental minor by 1e-6 to prove the
        /// harness detects a broken engine.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn parse_format(s: &str) -> Result<cli::OutputFormat, String> {
    match s {
        "csv" => Ok(cli::OutputFormat::Csv),
        "jsonl" => Ok(cli::OutputFormat::Jsonl),
        other => Err(format!("unknown format {other:?} (expected csv or jsonl)")),
    }
}

fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Gap {
            config,
            seed,
            format,
            out,
        } => {
            let overrides = Overrides { seed, format, out };
            match cli::cmd_gap(&config, &overrides) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code_for(&e)
                }
            }
        }
        Command::Check { config, seed, out } => {
            let overrides = Overrides {
                seed,
                format: None,
                out,
            };
            match cli::cmd_check(&config, &overrides) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code_for(&e)
                }
            }
        }
        Command::Validate {
            max_n,
            trials,
            seed,
            out,
            inject_fault,
        } => match cli::cmd_validate(max_n, trials, seed, inject_fault, &out) {
            Ok(true) => EXIT_OK,
            Ok(false) => EXIT_PROPERTY_FAILURE,
            Err(e) => {
                eprintln!("error: {e}");
                exit_code_for(&e)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers;
    let code = if workers > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(|| run(cli)),
            Err(e) => {
                eprintln!("error: cannot build worker pool: {e}");
                EXIT_CONFIG_ERROR
            }
        }
    } else {
        run(cli)
    };
    ExitCode::from(code as u8)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use csd::experiments::{run_scenario, ExperimentConfig, Scenario};
use csd::Error;

#[derive(Parser)]
#[command(name = "csd", version, about = "Chern-Simons-Dirac lattice solver and estimate probes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario named in the config.
    Run(Common),
    /// Run a probe scenario: product, besov, dilation, bilinear or energy.
    Probe {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// List scenario names.
    ListScenarios,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress progress messages.
    #[arg(long)]
    quiet: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::Scenario(_) => 2,
        Error::Io { .. } => 4,
        _ => 3,
    }
}

fn load(common: &Common) -> Result<ExperimentConfig, Error> {
    let mut config = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    Ok(config)
}

fn execute(config: &ExperimentConfig) -> ExitCode {
    match run_scenario(config) {
        Ok(outcome) => {
            print!("{}", outcome.summary());
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn init_logging(quiet: bool) {
    let level = if quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListScenarios => {
            for sc in Scenario::ALL {
                println!("{:<16}{}", sc.name(), sc.description());
            }
            ExitCode::SUCCESS
        }
        Command::Run(common) => {
            init_logging(common.quiet);
            match load(&common) {
                Ok(config) => execute(&config),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e))
                }
            }
        }
        Command::Probe { name, common } => {
            init_logging(common.quiet);
            let Some(probe) = Scenario::probe(&name) else {
                eprintln!("error: unknown probe `{name}` (expected product, besov, dilation, bilinear or energy)");
                return ExitCode::from(2);
            };
            match load(&common) {
                Ok(config) if config.scenario != probe => {
                    eprintln!(
                        "error: config scenario is `{}`, not `{}`",
                        config.scenario.name(),
                        probe.name()
                    );
                    ExitCode::from(2)
                }
                Ok(config) => execute(&config),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e))
                }
            }
        }
    }
}

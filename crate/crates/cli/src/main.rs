use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ergolab::fixtures;
use ergolab::runner::run_and_write;
use ergolab::{CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "ergolab", version, about = "Ergotropy and work-extraction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its result files.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// List the named states and measurements.
    Fixtures,
    /// Parse and validate a config without running it.
    Validate {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "ERGOLAB_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn load(path: &Path, o: Overrides) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::from_file(path)?;
    if let Some(seed) = o.seed {
        cfg.seed = seed;
    }
    if o.threads.is_some() {
        cfg.threads = o.threads;
    }
    if o.output_dir.is_some() {
        cfg.output_dir = o.output_dir;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fixtures => {
            print!("{}", fixtures::catalog());
            Ok(())
        }
        Command::Validate { config, overrides } => load(&config, overrides).and_then(|cfg| {
            cfg.prepare()?;
            println!("{}: ok ({:?})", config.display(), cfg.kind);
            Ok(())
        }),
        Command::Run { config, overrides } => load(&config, overrides).and_then(|cfg| {
            for path in run_and_write(&cfg)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ergolab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

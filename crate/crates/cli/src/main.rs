use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ppt_geometry::NumberField;
use ppt_runner::config::parse_field;
use ppt_runner::{report, run_config_file, ExperimentKind, Overrides, EXIT_NUMERICAL, EXIT_PASS};

#[derive(Parser)]
#[command(name = "ppt-geometry", version, about = "Constant-height and PPT-probability experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Summarize every JSON record in a directory.
    Report { dir: PathBuf },
    /// Run a `sampler-validate` config.
    ValidateSamplers {
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
}

#[derive(Args)]
struct OverrideArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shards: Option<u32>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, value_parser = parse_field)]
    field: Option<NumberField>,
    /// Bipartite shape `KxM`.
    #[arg(long)]
    shape: Option<String>,
}

impl From<OverrideArgs> for Overrides {
    fn from(a: OverrideArgs) -> Self {
        Overrides { seed: a.seed, shards: a.shards, samples: a.samples, field: a.field, shape: a.shape }
    }
}

fn run(config: PathBuf, overrides: OverrideArgs, force: Option<ExperimentKind>) -> i32 {
    match run_config_file(&config, &overrides.into(), force) {
        Ok((record, code)) => {
            println!("{}", record.summary_line());
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, overrides } => run(config, overrides, None),
        Command::ValidateSamplers { config, overrides } => run(config, overrides, Some(ExperimentKind::SamplerValidate)),
        Command::Report { dir } => match report::write_report(&dir) {
            Ok(rep) => {
                print!("{}", rep.to_markdown());
                if rep.all_failed() { EXIT_NUMERICAL } else { EXIT_PASS }
            }
            Err(e) => {
                eprintln!("error: {}: {e}", dir.display());
                EXIT_NUMERICAL
            }
        },
    };
    ExitCode::from(code as u8)
}

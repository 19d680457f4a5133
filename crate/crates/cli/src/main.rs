use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use distenergy::scenario::{load_scenario, run_scenario, RunOptions};

#[derive(Parser)]
#[command(name = "distenergy", version, about = "Run distribution-energy inequality scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write report.jsonl, summary.csv and curves/.
    Run {
        config: PathBuf,
        /// Output directory; overrides the scenario's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for generated models; overrides the scenario.
        #[arg(long)]
        seed: Option<u64>,
        /// Trial count for generated models; overrides the scenario.
        #[arg(long)]
        trials: Option<u64>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

const DEFAULT_OUT: &str = "distenergy-out";

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            trials,
            jobs,
        } => {
            let result = (|| {
                let scenario = load_scenario(&config)?;
                let opts = RunOptions { seed, trials };
                let output = match jobs {
                    Some(n) => rayon::ThreadPoolBuilder::new()
                        .num_threads(n.max(1))
                        .build()
                        .map_err(|e| distenergy::Error::InvalidArgument(e.to_string()))?
                        .install(|| run_scenario(&scenario, &opts))?,
                    None => run_scenario(&scenario, &opts)?,
                };
                let dir = out
                    .or_else(|| scenario.output().map(PathBuf::from))
                    .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
                output.write(&dir)?;
                Ok::<_, distenergy::Error>((output, dir))
            })();
            match result {
                Ok((output, dir)) => {
                    println!(
                        "{}: {} reports, {} failures, written to {}",
                        output.suite,
                        output.records.len(),
                        output.failures(),
                        dir.display()
                    );
                    ExitCode::from(output.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use imcmoead::problems::ProblemRegistry;
use imcmoead_cli::experiment::{read_outcomes, write_plots, RunRecord};
use imcmoead_cli::{run_and_write, summarize, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "imcmoead",
    about = "Constrained multi-objective optimization experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config file.
    Run {
        /// Experiment config: {problems, algorithms, repetitions, seed, hv_samples}.
        #[arg(long)]
        config: PathBuf,
        /// Output directory for runs.jsonl, summary.csv and front SVGs.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (defaults to all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Overrides the config's base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write per-generation population snapshots as CSV.
        #[arg(long)]
        snapshots: bool,
    },
    /// Rebuild summary.csv from an output directory and print it.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Rebuild the front SVGs from an output directory.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(1)
        }
    }
}

fn run() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let registry = ProblemRegistry::with_builtins();
    match cli.command {
        Command::Run {
            config,
            out,
            jobs,
            seed,
            snapshots,
        } => {
            if let Some(jobs) = jobs {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs)
                    .build_global()
                    .ok();
            }
            let text = fs::read_to_string(&config)?;
            let mut experiment: ExperimentConfig = serde_json::from_str(&text)?;
            if let Some(seed) = seed {
                experiment.seed = seed;
            }
            let failures = run_and_write(&registry, &experiment, &out, snapshots)?;
            if failures > 0 {
                eprintln!("{failures} run(s) failed; see runs.jsonl");
                Ok(ExitCode::from(2))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Summarize { input } => {
            let outcomes = read_outcomes(&input.join("runs.jsonl"))?;
            let records: Vec<&RunRecord> = outcomes.iter().filter_map(|o| o.record()).collect();
            let table = summarize(&records);
            fs::write(input.join("summary.csv"), table.to_csv())?;
            print!("{}", table.to_csv());
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot { input } => {
            let outcomes = read_outcomes(&input.join("runs.jsonl"))?;
            write_plots(&input, &registry, &outcomes)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

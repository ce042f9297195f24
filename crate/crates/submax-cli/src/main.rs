use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use submax_cli::config::ExperimentConfig;
use submax_cli::experiment::run_experiment;
use submax_cli::movierec::parse_movielens;
use submax_cli::summarization::gen_summarization;

#[derive(Parser)]
#[command(
    name = "submax",
    about = "Solvers and experiments for monotone up-concave maximization under uncertainty"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config, writing trajectory
    /// CSVs and a summary.json into its output_dir.
    Run {
        config: PathBuf,
        /// Validate the config and exit without executing or writing.
        #[arg(long)]
        dry_run: bool,
    },
    /// Validate a JSON config and exit.
    Validate { config: PathBuf },
    /// Generate a summarization instance (uniform similarity indices) and
    /// write it as JSON.
    GenSummarization {
        #[arg(long, default_value_t = 50)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5.0)]
        budget: f64,
    },
    /// Parse a MovieLens ratings.dat file ("::"-separated) and write the
    /// densely re-indexed triples as JSON.
    IngestMovielens {
        #[arg(long)]
        ratings: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, dry_run } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let written = run_experiment(&cfg, dry_run)?;
            if dry_run {
                println!("config ok: {}", config.display());
            } else {
                for path in written {
                    println!("wrote {}", path.display());
                }
            }
        }
        Command::Validate { config } => {
            ExperimentConfig::from_path(&config)?;
            println!("config ok: {}", config.display());
        }
        Command::GenSummarization {
            k,
            seed,
            out,
            budget,
        } => {
            let inst = gen_summarization(k, seed, budget)?;
            let body = serde_json::to_string(&serde_json::json!({
                "k": inst.k,
                "budget": inst.budget,
                "seed": seed,
                "similarity": inst.s,
            }))?;
            fs::write(&out, body).with_context(|| format!("cannot write {}", out.display()))?;
            println!("wrote {}", out.display());
        }
        Command::IngestMovielens { ratings, out } => {
            let data = parse_movielens(&ratings)?;
            let body = serde_json::to_string(&serde_json::json!({
                "user_ids": data.user_ids,
                "movie_ids": data.movie_ids,
                "triples": data.triples,
            }))?;
            fs::write(&out, body).with_context(|| format!("cannot write {}", out.display()))?;
            println!(
                "wrote {} ({} users, {} movies, {} ratings)",
                out.display(),
                data.n_users(),
                data.n_movies(),
                data.triples.len()
            );
        }
    }
    Ok(())
}

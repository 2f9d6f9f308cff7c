use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mimo_cee::cli::{self, RunOptions};

#[derive(Parser)]
#[command(name = "mimo-cee", version, about = "MIMO link simulator and rate calculator under imperfect channel estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a built-in recipe.
    Run {
        /// Path to a TOML experiment config (omit when using --recipe).
        config: Option<PathBuf>,
        /// Built-in recipe name (see `recipes`).
        #[arg(long, conflicts_with = "config")]
        recipe: Option<String>,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory the CSV path is resolved against.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0 or omitted = all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the built-in recipes.
    Recipes,
    /// Print a built-in recipe as a TOML config.
    ShowRecipe { name: String },
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> mimo_cee::Result<()> {
    match Cli::parse().command {
        Command::Run {
            config,
            recipe,
            seed,
            out,
            threads,
        } => {
            let opts = RunOptions {
                seed,
                out_dir: out,
                threads,
            };
            let path = match (config, recipe) {
                (Some(path), None) => cli::run_experiment(&path, &opts)?,
                (None, Some(name)) => {
                    let cfg = cli::recipe(&name).ok_or_else(|| {
                        mimo_cee::Error::InvalidConfig(format!(
                            "unknown recipe '{name}'; available: {}",
                            cli::RECIPE_NAMES.join(", ")
                        ))
                    })?;
                    let hash = cli::config_hash(cfg.to_toml_string().as_bytes());
                    cli::run_experiment_config(&cfg, &hash, &opts)?
                }
                _ => {
                    return Err(mimo_cee::Error::InvalidConfig(
                        "pass a config path or --recipe <name>".into(),
                    ))
                }
            };
            println!("{}", path.display());
            Ok(())
        }
        Command::Recipes => {
            for r in cli::list_recipes() {
                println!("{:<16} {}", r.name, r.summary);
            }
            Ok(())
        }
        Command::ShowRecipe { name } => {
            let cfg = cli::recipe(&name).ok_or_else(|| {
                mimo_cee::Error::InvalidConfig(format!(
                    "unknown recipe '{name}'; available: {}",
                    cli::RECIPE_NAMES.join(", ")
                ))
            })?;
            print!("{}", cfg.to_toml_string());
            Ok(())
        }
    }
}

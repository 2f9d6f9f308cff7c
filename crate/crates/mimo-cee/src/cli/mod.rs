//! Reproducible experiment runner: structured configs, built-in recipes,
//! and CSV artifacts for external plotting.

mod config;
mod recipes;
mod runner;

pub use config::{BerParams, ExperimentConfig, ExperimentKind, RateParams};
pub use recipes::{list_recipes, recipe, RecipeInfo, RECIPE_NAMES};
pub use runner::{config_hash, run_experiment, run_experiment_config, RunOptions};

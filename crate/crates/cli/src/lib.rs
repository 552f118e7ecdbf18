//! Command-line experiment runner for the `discrim-core` library.
//!
//! Each experiment reads a JSON [`ExperimentConfig`], applies command-line
//! overrides and writes a CSV or JSON report that starts with the resolved
//! config and the master seed.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::Path;

pub use config::{Experiment, ExperimentConfig, Format, Overrides, Target};
pub use experiments::{run, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] discrim_core::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    /// Process exit status: 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

/// Loads, resolves, runs and renders. Returns the rendered text.
pub fn execute(experiment: Experiment, config_path: &Path, overrides: &Overrides) -> Result<String, CliError> {
    let config = ExperimentConfig::load(config_path)?.resolve(experiment, overrides)?;
    let report = run(&config)?;
    let text = output::render(&config, &report)?;
    if let Some(path) = config.output_target() {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Output(format!("cannot create `{}`: {e}", dir.display())))?;
        }
        std::fs::write(&path, &text).map_err(|e| CliError::Output(format!("cannot write `{}`: {e}", path.display())))?;
    } else {
        print!("{text}");
    }
    Ok(text)
}

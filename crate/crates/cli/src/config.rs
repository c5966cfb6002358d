use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;
use solvfrag::fermion::MfOptions;
use solvfrag::sim::DenseLimits;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Optimizer {
    pub max_fragments: Option<usize>,
    pub restarts: Option<usize>,
    pub max_iters: Option<usize>,
}

/// Defaults read from `--config`; command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub sweeps: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub fixtures: Option<String>,
    #[serde(default)]
    pub dense: Option<DenseLimits>,
    #[serde(default)]
    pub optimizer: Optimizer,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn mf_options(&self, tol: Option<f64>, seed: Option<u64>) -> MfOptions {
        let d = MfOptions::default();
        MfOptions {
            tol: tol.or(self.tol).unwrap_or(d.tol),
            seed: seed.or(self.seed).unwrap_or(d.seed),
            max_fragments: self.optimizer.max_fragments.unwrap_or(d.max_fragments),
            restarts: self.optimizer.restarts.unwrap_or(d.restarts),
            max_iters: self.optimizer.max_iters.unwrap_or(d.max_iters),
            ..d
        }
    }
}

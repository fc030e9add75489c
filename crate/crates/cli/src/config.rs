use std::path::Path;

use anyhow::Context;
use mmc_core::bench::{SweepAxis, TrialSpec};
use serde::Deserialize;

fn default_repeats() -> usize {
    30
}

/// A sweep: the base trial plus the axis to vary.
///
/// ```toml
/// regime = "mmc"
/// states = 7
/// order = 5
/// train_windows = 5000
/// test_windows = 1000
/// models = ["mmc-greedy", "fmc", "hmc", "mtd"]
/// seed = 1
/// axis = "data"
/// values = [1000, 2000, 5000, 10000, 20000]
/// repeats = 30
/// ```
#[derive(Debug, Deserialize)]
pub struct BenchConfig {
    #[serde(flatten)]
    pub trial: TrialSpec,
    pub axis: SweepAxis,
    #[serde(default)]
    values: Option<Vec<usize>>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
}

impl BenchConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let config: BenchConfig = toml::from_str(text)?;
        config.trial.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Axis values, falling back to the default grid for the axis.
    pub fn values(&self) -> Vec<usize> {
        self.values
            .clone()
            .unwrap_or_else(|| self.axis.default_values())
    }
}

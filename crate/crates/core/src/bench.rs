//! Synthetic benchmark harness.
//!
//! A trial plants a generator for one data regime, draws independent train
//! and test sequences from it, fits every requested model on the training
//! sequence and scores the mean per-window log-likelihood of the test
//! sequence. A sweep repeats trials along one axis (training size, state
//! count or order) and aggregates per model.
//!
//! Every random stream is derived from the trial seed, and sweep cells derive
//! their trial seeds from `(base seed, axis value, repeat)`, so results do
//! not depend on execution order or thread count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{
    derive_seed, generate_causal_with_map, generate_hmc_data, generate_mmc_data,
    sample_causal_map, sample_random_hmc, sample_random_mmc, sample_separated_mmc, CausalMap,
    PlantedHmc,
};
use crate::dataset::SequenceDataset;
use crate::error::{Error, Result};
use crate::family::{fit_model, Diagnostics, FitConfig, FitOutcome, ModelKind};
use crate::mmc::MmcModel;
use crate::model::{SequenceModel, DEFAULT_EPSILON};

/// Stream ids passed to [`derive_seed`] for the planted generator and the two splits.
pub const PLANT_STREAM: u64 = 1;
pub const TRAIN_STREAM: u64 = 2;
pub const TEST_STREAM: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Hmc,
    Mmc,
    Causal,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Hmc => "hmc",
            Regime::Mmc => "mmc",
            Regime::Causal => "causal",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hmc" => Ok(Regime::Hmc),
            "mmc" => Ok(Regime::Mmc),
            "causal" => Ok(Regime::Causal),
            _ => Err(Error::InvalidParameter(format!("unknown regime '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Data,
    State,
    Order,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::Data => "data",
            SweepAxis::State => "state",
            SweepAxis::Order => "order",
        }
    }

    /// Default sweep grid for this axis.
    pub fn default_values(&self) -> Vec<usize> {
        match self {
            SweepAxis::Data => vec![1000, 2000, 5000, 10000, 20000],
            SweepAxis::State => vec![3, 5, 7, 9, 11],
            SweepAxis::Order => vec![2, 3, 4, 5, 6],
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "data" => Ok(SweepAxis::Data),
            "state" => Ok(SweepAxis::State),
            "order" => Ok(SweepAxis::Order),
            _ => Err(Error::InvalidParameter(format!("unknown sweep axis '{s}'"))),
        }
    }
}

fn default_strength() -> f64 {
    0.8
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

/// One benchmark trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub regime: Regime,
    pub states: usize,
    pub order: usize,
    pub train_windows: usize,
    pub test_windows: usize,
    pub models: Vec<ModelKind>,
    pub seed: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Trigger probability of the causal regime.
    #[serde(default = "default_strength")]
    pub causal_strength: f64,
    /// Minimum pairwise gap between planted MMC row maxima; 0 plants an unconstrained model.
    #[serde(default)]
    pub planted_min_gap: f64,
    #[serde(flatten)]
    pub fit: FitConfig,
}

impl TrialSpec {
    pub fn new(regime: Regime, states: usize, order: usize, train: usize, test: usize) -> Self {
        Self {
            regime,
            states,
            order,
            train_windows: train,
            test_windows: test,
            models: vec![ModelKind::MmcGreedy, ModelKind::Fmc, ModelKind::Hmc, ModelKind::Mtd],
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            causal_strength: default_strength(),
            planted_min_gap: 0.0,
            fit: FitConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.train_windows == 0 || self.test_windows == 0 {
            return bad("train and test window counts must be at least 1".into());
        }
        if self.states == 0 || self.order == 0 {
            return bad("states and order must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return bad(format!("epsilon {} outside [0, 1)", self.epsilon));
        }
        if self.models.is_empty() {
            return bad("no models requested".into());
        }
        Ok(())
    }

    fn with_axis(&self, axis: SweepAxis, value: usize) -> Self {
        let mut spec = self.clone();
        match axis {
            SweepAxis::Data => spec.train_windows = value,
            SweepAxis::State => spec.states = value,
            SweepAxis::Order => spec.order = value,
        }
        spec
    }
}

/// The data source planted for one trial.
#[derive(Clone, Debug)]
pub enum Planted {
    Mmc(MmcModel),
    Hmc(PlantedHmc),
    Causal(CausalMap),
}

impl Planted {
    pub fn new(spec: &TrialSpec) -> Result<Self> {
        let seed = derive_seed(spec.seed, PLANT_STREAM);
        Ok(match spec.regime {
            Regime::Mmc if spec.planted_min_gap > 0.0 => Planted::Mmc(sample_separated_mmc(
                spec.states,
                spec.order,
                spec.planted_min_gap,
                seed,
            )?),
            Regime::Mmc => Planted::Mmc(sample_random_mmc(spec.states, spec.order, seed)?),
            Regime::Hmc => Planted::Hmc(sample_random_hmc(spec.states, spec.order, seed)?),
            Regime::Causal => Planted::Causal(sample_causal_map(
                spec.states,
                spec.order,
                spec.causal_strength,
                seed,
            )?),
        })
    }

    pub fn sample(&self, n_windows: usize, seed: u64) -> SequenceDataset {
        match self {
            Planted::Mmc(m) => generate_mmc_data(m, n_windows, seed),
            Planted::Hmc(h) => generate_hmc_data(h, n_windows, seed),
            Planted::Causal(c) => generate_causal_with_map(c, n_windows, seed),
        }
    }
}

/// Draws the planted generator and the train/test sequences of a trial.
pub fn trial_data(spec: &TrialSpec) -> Result<(Planted, SequenceDataset, SequenceDataset)> {
    spec.validate()?;
    let planted = Planted::new(spec)?;
    let train = planted.sample(spec.train_windows, derive_seed(spec.seed, TRAIN_STREAM));
    let test = planted.sample(spec.test_windows, derive_seed(spec.seed, TEST_STREAM));
    Ok((planted, train, test))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ModelStatus {
    Scored {
        /// Mean held-out log-likelihood per window.
        metric: f64,
        train_seconds: f64,
        train_log_likelihood: f64,
        diagnostics: Diagnostics,
    },
    Skipped {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelResult {
    pub kind: ModelKind,
    #[serde(flatten)]
    pub status: ModelStatus,
}

impl ModelResult {
    pub fn metric(&self) -> Option<f64> {
        match &self.status {
            ModelStatus::Scored { metric, .. } => Some(*metric),
            ModelStatus::Skipped { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialResult {
    pub seed: u64,
    pub models: Vec<ModelResult>,
}

impl TrialResult {
    pub fn get(&self, kind: ModelKind) -> Option<&ModelResult> {
        self.models.iter().find(|m| m.kind == kind)
    }

    pub fn metric(&self, kind: ModelKind) -> Option<f64> {
        self.get(kind).and_then(ModelResult::metric)
    }
}

fn score(outcome: Result<FitOutcome>, test: &SequenceDataset, epsilon: f64) -> Result<ModelStatus> {
    match outcome {
        Ok(fit) => Ok(ModelStatus::Scored {
            metric: fit.model.mean_log_likelihood(test, epsilon)?,
            train_seconds: fit.elapsed.as_secs_f64(),
            train_log_likelihood: fit.train_log_likelihood,
            diagnostics: fit.diagnostics,
        }),
        Err(e @ (Error::Intractable(_) | Error::InvalidParameter(_))) => {
            Ok(ModelStatus::Skipped {
                reason: e.to_string(),
            })
        }
        Err(e) => Err(e),
    }
}

/// Runs one trial. Models whose configuration is intractable are reported as skipped.
pub fn run_trial(spec: &TrialSpec) -> Result<TrialResult> {
    let (_, train, test) = trial_data(spec)?;
    let models = spec
        .models
        .iter()
        .map(|&kind| {
            let status = score(fit_model(kind, &train, &spec.fit), &test, spec.epsilon)?;
            Ok(ModelResult { kind, status })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialResult {
        seed: spec.seed,
        models,
    })
}

/// Seed of repeat `repeat` in the sweep cell for `axis_value`.
pub fn cell_seed(base_seed: u64, axis_value: usize, repeat: usize) -> u64 {
    derive_seed(derive_seed(base_seed, axis_value as u64), repeat as u64)
}

/// Aggregated results for one `(axis value, model)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub regime: Regime,
    pub axis: SweepAxis,
    pub axis_value: usize,
    pub model: ModelKind,
    /// Number of repeats that produced a score.
    pub repeats: usize,
    pub metric_mean: f64,
    pub metric_std: f64,
    pub time_mean_s: f64,
    /// Base seed of the sweep.
    pub seed: u64,
    #[serde(skip)]
    pub skipped: Vec<String>,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs `repeats` trials per axis value (in parallel) and aggregates per model.
///
/// Rows come out ordered by axis value, then by the model order of `base`.
/// `metric_std` is the sample standard deviation (0 for a single repeat).
pub fn run_sweep(
    base: &TrialSpec,
    axis: SweepAxis,
    values: &[usize],
    repeats: usize,
) -> Result<Vec<SweepRow>> {
    if repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    if values.is_empty() {
        return Err(Error::InvalidParameter("no axis values".into()));
    }
    let cells: Vec<(usize, usize)> = values
        .iter()
        .flat_map(|&v| (0..repeats).map(move |r| (v, r)))
        .collect();
    let results: Vec<TrialResult> = cells
        .par_iter()
        .map(|&(value, repeat)| {
            let mut spec = base.with_axis(axis, value);
            spec.seed = cell_seed(base.seed, value, repeat);
            run_trial(&spec)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (vi, &value) in values.iter().enumerate() {
        let trials = &results[vi * repeats..(vi + 1) * repeats];
        for &kind in &base.models {
            let mut metrics = Vec::new();
            let mut times = Vec::new();
            let mut skipped = Vec::new();
            for t in trials {
                match t.get(kind).map(|m| &m.status) {
                    Some(ModelStatus::Scored {
                        metric,
                        train_seconds,
                        ..
                    }) => {
                        metrics.push(*metric);
                        times.push(*train_seconds);
                    }
                    Some(ModelStatus::Skipped { reason }) => skipped.push(reason.clone()),
                    None => {}
                }
            }
            let (metric_mean, metric_std) = mean_std(&metrics);
            let (time_mean_s, _) = mean_std(&times);
            skipped.dedup();
            rows.push(SweepRow {
                regime: base.regime,
                axis,
                axis_value: value,
                model: kind,
                repeats: metrics.len(),
                metric_mean,
                metric_std,
                time_mean_s,
                seed: base.seed,
                skipped,
            });
        }
    }
    Ok(rows)
}

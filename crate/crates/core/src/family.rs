//! Uniform fitting and scoring across the four model families.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::baselines::{
    fit_fmc, fit_hmc_with_cap, fit_mtd, FmcModel, HmcModel, MtdModel, MtdOptions,
    DEFAULT_HMC_ALPHA, DEFAULT_HMC_CONTEXT_CAP,
};
use crate::dataset::SequenceDataset;
use crate::error::{Error, Result};
use crate::estimation::{
    fit_exact_with_cap, fit_greedy, fit_hill_climb, HillClimbInit, DEFAULT_EXACT_STATE_CAP,
};
use crate::mmc::MmcModel;
use crate::model::SequenceModel;
use crate::space::StateSpace;

/// A fitting procedure selectable from the command line and bench configs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    MmcExact,
    MmcHill,
    MmcGreedy,
    Fmc,
    Hmc,
    Mtd,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::MmcExact,
        ModelKind::MmcHill,
        ModelKind::MmcGreedy,
        ModelKind::Fmc,
        ModelKind::Hmc,
        ModelKind::Mtd,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::MmcExact => "mmc-exact",
            ModelKind::MmcHill => "mmc-hill",
            ModelKind::MmcGreedy => "mmc-greedy",
            ModelKind::Fmc => "fmc",
            ModelKind::Hmc => "hmc",
            ModelKind::Mtd => "mtd",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown model '{s}'")))
    }
}

/// Hyperparameters and tractability caps for [`fit_model`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub hmc_alpha: f64,
    pub hmc_context_cap: u64,
    pub mtd_max_iters: usize,
    pub mtd_tol: f64,
    pub exact_state_cap: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        let mtd = MtdOptions::default();
        Self {
            hmc_alpha: DEFAULT_HMC_ALPHA,
            hmc_context_cap: DEFAULT_HMC_CONTEXT_CAP,
            mtd_max_iters: mtd.max_iters,
            mtd_tol: mtd.tol,
            exact_state_cap: DEFAULT_EXACT_STATE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FittedModel {
    Mmc(MmcModel),
    Fmc(FmcModel),
    Hmc(HmcModel),
    Mtd(MtdModel),
}

impl FittedModel {
    pub fn family(&self) -> &'static str {
        match self {
            FittedModel::Mmc(_) => "mmc",
            FittedModel::Fmc(_) => "fmc",
            FittedModel::Hmc(_) => "hmc",
            FittedModel::Mtd(_) => "mtd",
        }
    }

    fn inner(&self) -> &dyn SequenceModel {
        match self {
            FittedModel::Mmc(m) => m,
            FittedModel::Fmc(m) => m,
            FittedModel::Hmc(m) => m,
            FittedModel::Mtd(m) => m,
        }
    }
}

impl SequenceModel for FittedModel {
    fn space(&self) -> StateSpace {
        self.inner().space()
    }

    fn order(&self) -> Option<usize> {
        self.inner().order()
    }

    fn target_probability(&self, lags: &[usize], target: usize) -> f64 {
        self.inner().target_probability(lags, target)
    }

    fn distribution(&self, lags: &[usize]) -> Vec<f64> {
        self.inner().distribution(lags)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub sgo_evaluations: Option<u64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    /// MTD training log-likelihood after each update.
    #[serde(skip)]
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct FitOutcome {
    pub kind: ModelKind,
    pub model: FittedModel,
    /// Unsmoothed training log-likelihood.
    pub train_log_likelihood: f64,
    pub elapsed: Duration,
    pub diagnostics: Diagnostics,
}

pub fn fit_model(kind: ModelKind, data: &SequenceDataset, config: &FitConfig) -> Result<FitOutcome> {
    let start = Instant::now();
    let mut diagnostics = Diagnostics::default();
    let (model, train_ll) = match kind {
        ModelKind::MmcExact | ModelKind::MmcHill | ModelKind::MmcGreedy => {
            let report = match kind {
                ModelKind::MmcExact => fit_exact_with_cap(data, config.exact_state_cap)?,
                ModelKind::MmcHill => fit_hill_climb(data, HillClimbInit::Greedy)?,
                _ => fit_greedy(data)?,
            };
            diagnostics.sgo_evaluations = Some(report.sgo_evaluations);
            (FittedModel::Mmc(report.model), report.train_log_likelihood)
        }
        ModelKind::Fmc => {
            let m = fit_fmc(data);
            let ll = m.log_likelihood(data, 0.0)?;
            (FittedModel::Fmc(m), ll)
        }
        ModelKind::Hmc => {
            let m = fit_hmc_with_cap(data, config.hmc_alpha, config.hmc_context_cap)?;
            let ll = m.log_likelihood(data, 0.0)?;
            (FittedModel::Hmc(m), ll)
        }
        ModelKind::Mtd => {
            let options = MtdOptions {
                max_iters: config.mtd_max_iters,
                tol: config.mtd_tol,
            };
            let fit = fit_mtd(data, options)?;
            let ll = fit.train_log_likelihood();
            diagnostics.iterations = Some(fit.iterations);
            diagnostics.converged = Some(fit.converged);
            diagnostics.trace = fit.trace;
            (FittedModel::Mtd(fit.model), ll)
        }
    };
    Ok(FitOutcome {
        kind,
        model,
        train_log_likelihood: train_ll,
        elapsed: start.elapsed(),
        diagnostics,
    })
}

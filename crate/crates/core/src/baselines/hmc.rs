use std::collections::HashMap;

use crate::dataset::SequenceDataset;
use crate::error::{Error, Result};
use crate::model::SequenceModel;
use crate::space::StateSpace;

/// Jeffreys-style additive smoothing.
pub const DEFAULT_HMC_ALPHA: f64 = 0.5;
/// Largest number of contexts (`M^K`) a full chain may address.
pub const DEFAULT_HMC_CONTEXT_CAP: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
struct ContextCounts {
    counts: Vec<u64>,
    total: u64,
}

/// Full order-`K` chain with additive smoothing.
///
/// Contexts are indexed in base `M` with the most recent lag as the least
/// significant digit. Only observed contexts are stored; every other context
/// predicts the uniform distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct HmcModel {
    space: StateSpace,
    order: usize,
    alpha: f64,
    contexts: HashMap<u64, ContextCounts>,
}

fn context_count(space: StateSpace, order: usize) -> Option<u64> {
    (space.size() as u64).checked_pow(u32::try_from(order).ok()?)
}

impl HmcModel {
    /// Rebuilds a model from observed `(context index, target counts)` pairs.
    pub fn from_counts(
        space: StateSpace,
        order: usize,
        alpha: f64,
        observed: impl IntoIterator<Item = (u64, Vec<u64>)>,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        let limit = context_count(space, order)
            .ok_or_else(|| Error::Intractable(format!("{}^{order} contexts", space.size())))?;
        let mut contexts = HashMap::new();
        for (ctx, counts) in observed {
            if ctx >= limit || counts.len() != space.size() {
                return Err(Error::Format(format!("bad context entry {ctx}")));
            }
            let total = counts.iter().sum();
            contexts.insert(ctx, ContextCounts { counts, total });
        }
        Ok(Self {
            space,
            order,
            alpha,
            contexts,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn model_order(&self) -> usize {
        self.order
    }

    /// `M^K`, the number of rows of the conceptual context table.
    pub fn num_contexts(&self) -> u64 {
        context_count(self.space, self.order).expect("checked at construction")
    }

    pub fn context_index(&self, lags: &[usize]) -> u64 {
        let m = self.space.size() as u64;
        lags.iter().fold(0, |acc, &s| acc * m + s as u64)
    }

    /// Observed contexts and their target counts, by increasing context index.
    pub fn observed(&self) -> Vec<(u64, &[u64])> {
        let mut out: Vec<_> = self
            .contexts
            .iter()
            .map(|(&k, v)| (k, v.counts.as_slice()))
            .collect();
        out.sort_unstable_by_key(|(k, _)| *k);
        out
    }

    pub fn context_row(&self, context: u64) -> Vec<f64> {
        let m = self.space.size();
        match self.contexts.get(&context) {
            Some(c) => {
                let denom = c.total as f64 + self.alpha * m as f64;
                c.counts
                    .iter()
                    .map(|&n| (n as f64 + self.alpha) / denom)
                    .collect()
            }
            None => vec![1.0 / m as f64; m],
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "smoothing alpha {alpha} must be finite and non-negative"
        )))
    }
}

pub fn fit_hmc(data: &SequenceDataset, alpha: f64) -> Result<HmcModel> {
    fit_hmc_with_cap(data, alpha, DEFAULT_HMC_CONTEXT_CAP)
}

/// Counts targets per observed context; fails if `M^K` exceeds `max_contexts`.
pub fn fit_hmc_with_cap(data: &SequenceDataset, alpha: f64, max_contexts: u64) -> Result<HmcModel> {
    check_alpha(alpha)?;
    let (m, k) = (data.num_states(), data.order());
    match context_count(data.space(), k) {
        Some(c) if c <= max_contexts => {}
        _ => {
            return Err(Error::Intractable(format!(
                "full chain needs {m}^{k} contexts; the cap is {max_contexts}"
            )))
        }
    }
    let mut model = HmcModel {
        space: data.space(),
        order: k,
        alpha,
        contexts: HashMap::new(),
    };
    for w in data.windows() {
        let ctx = model.context_index(w.lags);
        let entry = model.contexts.entry(ctx).or_insert_with(|| ContextCounts {
            counts: vec![0; m],
            total: 0,
        });
        entry.counts[w.target] += 1;
        entry.total += 1;
    }
    Ok(model)
}

impl SequenceModel for HmcModel {
    fn space(&self) -> StateSpace {
        self.space
    }

    fn order(&self) -> Option<usize> {
        Some(self.order)
    }

    fn target_probability(&self, lags: &[usize], target: usize) -> f64 {
        let m = self.space.size() as f64;
        match self.contexts.get(&self.context_index(lags)) {
            Some(c) => (c.counts[target] as f64 + self.alpha) / (c.total as f64 + self.alpha * m),
            None => 1.0 / m,
        }
    }

    fn distribution(&self, lags: &[usize]) -> Vec<f64> {
        self.context_row(self.context_index(lags))
    }
}

use std::collections::HashMap;

use crate::counts::CountTable;
use crate::dataset::SequenceDataset;
use crate::error::{Error, Result};
use crate::sgo::Sgo;

/// Counts each window against the highest-priority state among its lags.
pub fn derive_generation_counts(data: &SequenceDataset, sgo: &Sgo) -> Result<CountTable> {
    check_sgo(data, sgo)?;
    let mut counts = CountTable::zeros(data.space());
    for w in data.windows() {
        counts.add(sgo.generator(w.lags), w.target, 1);
    }
    Ok(counts)
}

pub(crate) fn check_sgo(data: &SequenceDataset, sgo: &Sgo) -> Result<()> {
    if sgo.len() != data.num_states() {
        return Err(Error::InvalidSgo(format!(
            "order covers {} states, data has {}",
            sgo.len(),
            data.num_states()
        )));
    }
    Ok(())
}

/// A group of windows that share the same set of distinct lag states and target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Pattern {
    pub states: Vec<usize>,
    pub target: usize,
    pub count: u64,
}

/// Windows collapsed by (distinct lag states, target).
///
/// Which lag generates a window depends only on the set of states present,
/// so repeated evaluations under different orders can work on this table
/// instead of the raw windows.
#[derive(Clone, Debug)]
pub(crate) struct PatternTable {
    pub num_states: usize,
    pub patterns: Vec<Pattern>,
}

impl PatternTable {
    pub fn build(data: &SequenceDataset) -> Self {
        let mut index: HashMap<(Vec<usize>, usize), u64> = HashMap::new();
        let mut scratch = Vec::with_capacity(data.order());
        for w in data.windows() {
            scratch.clear();
            scratch.extend_from_slice(w.lags);
            scratch.sort_unstable();
            scratch.dedup();
            *index.entry((scratch.clone(), w.target)).or_insert(0) += 1;
        }
        let mut patterns: Vec<Pattern> = index
            .into_iter()
            .map(|((states, target), count)| Pattern {
                states,
                target,
                count,
            })
            .collect();
        patterns.sort_unstable_by(|a, b| (&a.states, a.target).cmp(&(&b.states, b.target)));
        Self {
            num_states: data.num_states(),
            patterns,
        }
    }

    pub fn counts(&self, sgo: &Sgo) -> CountTable {
        let n = self.num_states;
        let mut cells = vec![vec![0u64; n]; n];
        for p in &self.patterns {
            cells[sgo.generator(&p.states)][p.target] += p.count;
        }
        CountTable::from_rows(&cells)
    }
}

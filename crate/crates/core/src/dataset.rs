use crate::error::{Error, Result};
use crate::space::StateSpace;

/// One training datum: `order` lag states followed by the state they precede.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window<'a> {
    pub lags: &'a [usize],
    pub target: usize,
}

/// State sequences viewed through a sliding window of `order` lags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceDataset {
    sequences: Vec<Vec<usize>>,
    order: usize,
    space: StateSpace,
}

impl SequenceDataset {
    pub fn new(space: StateSpace, order: usize, sequences: Vec<Vec<usize>>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("order must be at least 1".into()));
        }
        for seq in &sequences {
            for &s in seq {
                space.check(s)?;
            }
        }
        Ok(Self {
            sequences,
            order,
            space,
        })
    }

    pub fn empty(space: StateSpace, order: usize) -> Result<Self> {
        Self::new(space, order, Vec::new())
    }

    pub fn sequences(&self) -> &[Vec<usize>] {
        &self.sequences
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn num_states(&self) -> usize {
        self.space.size()
    }

    /// The same sequences viewed with a different lag count.
    pub fn with_order(&self, order: usize) -> Result<Self> {
        Self::new(self.space, order, self.sequences.clone())
    }

    pub fn num_windows(&self) -> usize {
        self.sequences
            .iter()
            .map(|s| s.len().saturating_sub(self.order))
            .sum()
    }

    pub fn windows(&self) -> impl Iterator<Item = Window<'_>> + '_ {
        let k = self.order;
        self.sequences.iter().flat_map(move |seq| {
            seq.windows(k + 1).map(move |w| Window {
                lags: &w[..k],
                target: w[k],
            })
        })
    }

    /// Consecutive `(from, to)` pairs within each sequence, ignoring the order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.sequences
            .iter()
            .flat_map(|seq| seq.windows(2).map(|w| (w[0], w[1])))
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite state space whose states are the dense ids `0..size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct StateSpace {
    size: usize,
}

impl StateSpace {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyStateSpace);
        }
        Ok(Self { size })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn contains(&self, state: usize) -> bool {
        state < self.size
    }

    pub fn check(&self, state: usize) -> Result<()> {
        if self.contains(state) {
            Ok(())
        } else {
            Err(Error::StateOutOfRange {
                state,
                states: self.size,
            })
        }
    }

    pub fn states(&self) -> std::ops::Range<usize> {
        0..self.size
    }
}

impl TryFrom<usize> for StateSpace {
    type Error = Error;

    fn try_from(size: usize) -> Result<Self> {
        Self::new(size)
    }
}

impl From<StateSpace> for usize {
    fn from(space: StateSpace) -> usize {
        space.size
    }
}

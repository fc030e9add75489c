use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// State generation order: a strict priority ranking of every state, highest first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Sgo {
    priority: Vec<usize>,
    rank: Vec<usize>,
}

impl Sgo {
    pub fn new(priority: Vec<usize>) -> Result<Self> {
        if priority.is_empty() {
            return Err(Error::InvalidSgo("empty order".into()));
        }
        let mut rank = vec![usize::MAX; priority.len()];
        for (r, &s) in priority.iter().enumerate() {
            if s >= priority.len() {
                return Err(Error::InvalidSgo(format!(
                    "state {s} out of range for {} states",
                    priority.len()
                )));
            }
            if rank[s] != usize::MAX {
                return Err(Error::InvalidSgo(format!("state {s} appears twice")));
            }
            rank[s] = r;
        }
        Ok(Self { priority, rank })
    }

    /// `0 ≻ 1 ≻ ... ≻ n-1`.
    pub fn identity(n: usize) -> Self {
        Self::new((0..n).collect()).expect("identity permutation")
    }

    pub fn len(&self) -> usize {
        self.priority.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priority.is_empty()
    }

    /// States from highest to lowest priority.
    pub fn priority(&self) -> &[usize] {
        &self.priority
    }

    /// Position of `state` in the order; 0 is the highest priority.
    #[inline]
    pub fn rank(&self, state: usize) -> usize {
        self.rank[state]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    pub fn outranks(&self, a: usize, b: usize) -> bool {
        self.rank[a] < self.rank[b]
    }

    /// The highest-priority state among `states`.
    ///
    /// Panics on an empty slice.
    #[inline]
    pub fn generator(&self, states: &[usize]) -> usize {
        let mut best = states[0];
        for &s in &states[1..] {
            if self.rank[s] < self.rank[best] {
                best = s;
            }
        }
        best
    }

    /// Exchanges the positions of two states.
    pub fn swapped(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        let (ra, rb) = (out.rank[a], out.rank[b]);
        out.priority.swap(ra, rb);
        out.rank[a] = rb;
        out.rank[b] = ra;
        out
    }
}

impl TryFrom<Vec<usize>> for Sgo {
    type Error = Error;

    fn try_from(priority: Vec<usize>) -> Result<Self> {
        Self::new(priority)
    }
}

impl From<Sgo> for Vec<usize> {
    fn from(sgo: Sgo) -> Vec<usize> {
        sgo.priority
    }
}

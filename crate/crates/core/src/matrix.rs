use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Checks that `row` is a probability vector.
pub(crate) fn check_distribution(row: &[f64], what: &str) -> Result<()> {
    if let Some(bad) = row.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidDistribution(format!(
            "{what}: entry {bad} outside [0, 1]"
        )));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "{what}: sums to {sum}"
        )));
    }
    Ok(())
}

pub(crate) fn row_max(row: &[f64]) -> f64 {
    row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Square row-stochastic matrix; row `r` is the generation distribution of state `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct GenerationMatrix {
    rows: Vec<Vec<f64>>,
}

impl GenerationMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyStateSpace);
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidDistribution(format!(
                    "row {r} has length {}, expected {n}",
                    row.len()
                )));
            }
            check_distribution(row, &format!("row {r}"))?;
        }
        Ok(Self { rows })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            rows: vec![vec![1.0 / n as f64; n]; n],
        }
    }

    pub fn num_states(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.rows[r]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row_max(&self, r: usize) -> f64 {
        row_max(&self.rows[r])
    }
}

impl TryFrom<Vec<Vec<f64>>> for GenerationMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<GenerationMatrix> for Vec<Vec<f64>> {
    fn from(m: GenerationMatrix) -> Self {
        m.rows
    }
}

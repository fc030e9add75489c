use crate::dataset::SequenceDataset;
use crate::matrix::GenerationMatrix;
use crate::model::SequenceModel;
use crate::space::StateSpace;

/// First-order chain. Scoring uses only the most recent lag, whatever the window order.
#[derive(Clone, Debug, PartialEq)]
pub struct FmcModel {
    transition: GenerationMatrix,
}

impl FmcModel {
    pub fn new(transition: GenerationMatrix) -> Self {
        Self { transition }
    }

    pub fn transition(&self) -> &GenerationMatrix {
        &self.transition
    }
}

/// Count-and-normalize over consecutive pairs; rows without evidence are uniform.
pub fn fit_fmc(data: &SequenceDataset) -> FmcModel {
    let n = data.num_states();
    let mut counts = vec![vec![0u64; n]; n];
    for (a, b) in data.transitions() {
        counts[a][b] += 1;
    }
    let rows = counts
        .into_iter()
        .map(|row| {
            let total: u64 = row.iter().sum();
            if total == 0 {
                vec![1.0 / n as f64; n]
            } else {
                row.iter().map(|&c| c as f64 / total as f64).collect()
            }
        })
        .collect();
    FmcModel {
        transition: GenerationMatrix::new(rows).expect("normalized counts"),
    }
}

impl SequenceModel for FmcModel {
    fn space(&self) -> StateSpace {
        StateSpace::new(self.transition.num_states()).expect("non-empty matrix")
    }

    fn order(&self) -> Option<usize> {
        None
    }

    #[inline]
    fn target_probability(&self, lags: &[usize], target: usize) -> f64 {
        self.transition.row(lags[lags.len() - 1])[target]
    }

    fn distribution(&self, lags: &[usize]) -> Vec<f64> {
        self.transition.row(lags[lags.len() - 1]).to_vec()
    }
}

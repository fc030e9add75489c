use crate::error::{Error, Result};
use crate::matrix::{GenerationMatrix, ROW_SUM_TOLERANCE};
use crate::model::SequenceModel;
use crate::sgo::Sgo;
use crate::space::StateSpace;

/// A max Markov chain: the next state is drawn from the generation row of the
/// highest-priority state among the lags.
#[derive(Clone, Debug, PartialEq)]
pub struct MmcModel {
    matrix: GenerationMatrix,
    sgo: Sgo,
    order: usize,
    space: StateSpace,
}

impl MmcModel {
    pub fn new(matrix: GenerationMatrix, sgo: Sgo, order: usize) -> Result<Self> {
        let n = matrix.num_states();
        if sgo.len() != n {
            return Err(Error::InvalidSgo(format!(
                "order covers {} states, matrix has {n}",
                sgo.len()
            )));
        }
        if order == 0 {
            return Err(Error::InvalidParameter("order must be at least 1".into()));
        }
        let model = Self {
            space: StateSpace::new(n)?,
            matrix,
            sgo,
            order,
        };
        if let Some((a, b)) = model.first_sgo_violation() {
            return Err(Error::InvalidSgo(format!(
                "state {a} outranks {b} but has a smaller row maximum ({} < {})",
                model.matrix.row_max(a),
                model.matrix.row_max(b)
            )));
        }
        Ok(model)
    }

    pub fn matrix(&self) -> &GenerationMatrix {
        &self.matrix
    }

    pub fn sgo(&self) -> &Sgo {
        &self.sgo
    }

    pub fn num_states(&self) -> usize {
        self.space.size()
    }

    pub fn model_order(&self) -> usize {
        self.order
    }

    /// The generation row used for `lags`.
    pub fn generating_row(&self, lags: &[usize]) -> &[f64] {
        self.matrix.row(self.sgo.generator(lags))
    }

    /// First consecutive pair `a ≻ b` whose row maxima break the order, if any.
    pub fn first_sgo_violation(&self) -> Option<(usize, usize)> {
        self.sgo.priority().windows(2).find_map(|w| {
            let (a, b) = (w[0], w[1]);
            (self.matrix.row_max(a) < self.matrix.row_max(b) - ROW_SUM_TOLERANCE)
                .then_some((a, b))
        })
    }

    pub fn is_sgo_consistent(&self) -> bool {
        self.first_sgo_violation().is_none()
    }
}

impl SequenceModel for MmcModel {
    fn space(&self) -> StateSpace {
        self.space
    }

    fn order(&self) -> Option<usize> {
        Some(self.order)
    }

    #[inline]
    fn target_probability(&self, lags: &[usize], target: usize) -> f64 {
        self.generating_row(lags)[target]
    }

    fn distribution(&self, lags: &[usize]) -> Vec<f64> {
        self.generating_row(lags).to_vec()
    }
}

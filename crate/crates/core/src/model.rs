use crate::dataset::SequenceDataset;
use crate::error::{Error, Result};
use crate::space::StateSpace;

/// Default evaluation smoothing shared by every model family.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// A fitted next-state predictor conditioned on a window of lag states.
///
/// Every family is scored through [`SequenceModel::log_likelihood`] so that
/// the smoothing contract is identical across families.
pub trait SequenceModel {
    fn space(&self) -> StateSpace;

    /// Number of lags the model consumes, or `None` if it accepts any order.
    fn order(&self) -> Option<usize>;

    /// Probability of `target` given `lags`; inputs are assumed validated.
    fn target_probability(&self, lags: &[usize], target: usize) -> f64;

    /// Full predictive distribution for a validated lag window.
    fn distribution(&self, lags: &[usize]) -> Vec<f64>;

    fn predict_distribution(&self, lags: &[usize]) -> Result<Vec<f64>> {
        if let Some(k) = self.order() {
            if lags.len() != k {
                return Err(Error::WrongLagCount {
                    expected: k,
                    got: lags.len(),
                });
            }
        } else if lags.is_empty() {
            return Err(Error::WrongLagCount {
                expected: 1,
                got: 0,
            });
        }
        let space = self.space();
        for &s in lags {
            space.check(s)?;
        }
        Ok(self.distribution(lags))
    }

    /// Sum over windows of `ln((1 - ε) p + ε / M)`.
    ///
    /// With `ε = 0` this is the exact likelihood and may be `-inf`.
    fn log_likelihood(&self, data: &SequenceDataset, epsilon: f64) -> Result<f64> {
        check_compatible(self.space(), self.order(), data)?;
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "smoothing epsilon {epsilon} outside [0, 1)"
            )));
        }
        let floor = epsilon / self.space().size() as f64;
        let keep = 1.0 - epsilon;
        Ok(data
            .windows()
            .map(|w| (keep * self.target_probability(w.lags, w.target) + floor).ln())
            .sum())
    }

    /// Log-likelihood divided by the window count (NaN on an empty dataset).
    fn mean_log_likelihood(&self, data: &SequenceDataset, epsilon: f64) -> Result<f64> {
        let total = self.log_likelihood(data, epsilon)?;
        Ok(total / data.num_windows() as f64)
    }
}

pub(crate) fn check_compatible(
    space: StateSpace,
    order: Option<usize>,
    data: &SequenceDataset,
) -> Result<()> {
    if space != data.space() {
        return Err(Error::StateSpaceMismatch {
            model: space.size(),
            data: data.num_states(),
        });
    }
    if let Some(k) = order {
        if k != data.order() {
            return Err(Error::OrderMismatch {
                model: k,
                data: data.order(),
            });
        }
    }
    Ok(())
}

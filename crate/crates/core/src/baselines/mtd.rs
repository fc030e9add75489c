use crate::dataset::SequenceDataset;
use crate::error::{Error, Result};
use crate::matrix::{check_distribution, GenerationMatrix};
use crate::model::SequenceModel;
use crate::space::StateSpace;

use super::fit_fmc;

/// Mixture transition distribution model.
///
/// `P(next | lags) = Σ_l λ_l q[lags[l]][next]`, where `lags[0]` is the oldest
/// lag and one transition matrix `q` is shared by every lag.
#[derive(Clone, Debug, PartialEq)]
pub struct MtdModel {
    lambda: Vec<f64>,
    q: GenerationMatrix,
}

impl MtdModel {
    pub fn new(lambda: Vec<f64>, q: GenerationMatrix) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::InvalidParameter("MTD needs at least one lag".into()));
        }
        check_distribution(&lambda, "lag weights")?;
        Ok(Self { lambda, q })
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn q(&self) -> &GenerationMatrix {
        &self.q
    }

    pub fn model_order(&self) -> usize {
        self.lambda.len()
    }

    /// Free parameters: `M(M-1)` for `q` plus `K-1` for the weights.
    pub fn parameter_count(&self) -> usize {
        let m = self.q.num_states();
        m * (m - 1) + self.lambda.len() - 1
    }
}

impl SequenceModel for MtdModel {
    fn space(&self) -> StateSpace {
        StateSpace::new(self.q.num_states()).expect("non-empty matrix")
    }

    fn order(&self) -> Option<usize> {
        Some(self.lambda.len())
    }

    #[inline]
    fn target_probability(&self, lags: &[usize], target: usize) -> f64 {
        lags.iter()
            .zip(&self.lambda)
            .map(|(&s, &w)| w * self.q.row(s)[target])
            .sum()
    }

    fn distribution(&self, lags: &[usize]) -> Vec<f64> {
        let m = self.q.num_states();
        let mut out = vec![0.0; m];
        for (&s, &w) in lags.iter().zip(&self.lambda) {
            for (o, &p) in out.iter_mut().zip(self.q.row(s)) {
                *o += w * p;
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MtdOptions {
    pub max_iters: usize,
    /// Stop once the relative log-likelihood gain of an iteration falls below this.
    pub tol: f64,
}

impl Default for MtdOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MtdFit {
    pub model: MtdModel,
    /// Training log-likelihood of the initial point and after every update.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl MtdFit {
    pub fn train_log_likelihood(&self) -> f64 {
        self.trace.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

struct Expectation {
    log_likelihood: f64,
    lambda_mass: Vec<f64>,
    flow: Vec<f64>,
}

/// Expected lag responsibilities and transition flows under the current parameters.
fn expectation(windows: &[usize], k: usize, m: usize, lambda: &[f64], q: &[f64]) -> Expectation {
    let mut log_likelihood = 0.0;
    let mut lambda_mass = vec![0.0; k];
    let mut flow = vec![0.0; m * m];
    let mut mix = vec![0.0; k];
    for w in windows.chunks_exact(k + 1) {
        let target = w[k];
        let mut total = 0.0;
        for l in 0..k {
            mix[l] = lambda[l] * q[w[l] * m + target];
            total += mix[l];
        }
        log_likelihood += total.ln();
        if total > 0.0 {
            for l in 0..k {
                let g = mix[l] / total;
                lambda_mass[l] += g;
                flow[w[l] * m + target] += g;
            }
        }
    }
    Expectation {
        log_likelihood,
        lambda_mass,
        flow,
    }
}

/// Fits an MTD model by expectation-maximization.
///
/// Starts from uniform lag weights and `q = 0.9 · FMC + 0.1 · uniform`. Each
/// iteration reassigns every window's likelihood mass across its lags and
/// re-estimates `λ` and `q` from that split, which never decreases the
/// training likelihood. Rows of `q` that receive no mass keep their value.
pub fn fit_mtd(data: &SequenceDataset, options: MtdOptions) -> Result<MtdFit> {
    let (m, k) = (data.num_states(), data.order());
    if !(options.tol.is_finite() && options.tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {}", options.tol)));
    }
    let windows: Vec<usize> = data
        .windows()
        .flat_map(|w| w.lags.iter().copied().chain(std::iter::once(w.target)))
        .collect();
    let n_windows = windows.len() / (k + 1);

    let fmc = fit_fmc(data);
    let mut q: Vec<f64> = (0..m)
        .flat_map(|r| fmc.transition().row(r).to_vec())
        .map(|p| 0.9 * p + 0.1 / m as f64)
        .collect();
    let mut lambda = vec![1.0 / k as f64; k];

    let mut e = expectation(&windows, k, m, &lambda, &q);
    let mut trace = vec![e.log_likelihood];
    let mut best = (lambda.clone(), q.clone(), e.log_likelihood);
    let mut converged = n_windows == 0;
    let mut iterations = 0;

    while !converged && iterations < options.max_iters {
        for (l, mass) in lambda.iter_mut().zip(&e.lambda_mass) {
            *l = mass / n_windows as f64;
        }
        let norm: f64 = lambda.iter().sum();
        lambda.iter_mut().for_each(|l| *l /= norm);
        for r in 0..m {
            let row = &e.flow[r * m..(r + 1) * m];
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                for (dst, &f) in q[r * m..(r + 1) * m].iter_mut().zip(row) {
                    *dst = f / total;
                }
            }
        }
        iterations += 1;

        let previous = e.log_likelihood;
        e = expectation(&windows, k, m, &lambda, &q);
        trace.push(e.log_likelihood);
        if e.log_likelihood > best.2 {
            best = (lambda.clone(), q.clone(), e.log_likelihood);
        }
        let gain = e.log_likelihood - previous;
        converged = gain <= options.tol * previous.abs();
    }

    let (lambda, q, _) = best;
    let rows = q.chunks(m).map(|r| r.to_vec()).collect();
    let model = MtdModel::new(lambda, GenerationMatrix::new(rows)?)?;
    Ok(MtdFit {
        model,
        trace,
        iterations,
        converged,
    })
}

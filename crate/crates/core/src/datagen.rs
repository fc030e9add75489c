//! Seeded synthetic data for the three benchmark regimes.
//!
//! Every generator draws from a PCG-64 stream seeded from a `u64`, so the
//! same parameters and seed always reproduce the same dataset. Independent
//! streams for trials and train/test splits come from [`derive_seed`].

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_distr::Exp1;
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::dataset::SequenceDataset;
use crate::error::{Error, Result};
use crate::matrix::GenerationMatrix;
use crate::mmc::MmcModel;
use crate::model::SequenceModel;
use crate::sgo::Sgo;
use crate::space::StateSpace;

/// Largest planted context table (`M^K` rows) [`sample_random_hmc`] builds.
pub const DEFAULT_PLANTED_HMC_CAP: u64 = 10_000_000;

pub fn rng_from_seed(seed: u64) -> Pcg64 {
    Pcg64::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for `stream`: `splitmix64(seed ^ splitmix64(stream))`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

/// One draw from the flat Dirichlet over `n` outcomes.
pub fn flat_dirichlet<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    if total > 0.0 {
        draws.iter_mut().for_each(|d| *d /= total);
    } else {
        draws.fill(1.0 / n as f64);
    }
    draws
}

/// Inverse-CDF draw; falls back to the last positive entry on rounding shortfall.
pub fn sample_categorical<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

fn check_shape(states: usize, order: usize) -> Result<StateSpace> {
    if order == 0 {
        return Err(Error::InvalidParameter("order must be at least 1".into()));
    }
    StateSpace::new(states)
}

fn uniform_prefix<R: Rng + ?Sized>(rng: &mut R, states: usize, order: usize, len: usize) -> Vec<usize> {
    let mut seq = Vec::with_capacity(len);
    seq.extend((0..order).map(|_| rng.random_range(0..states)));
    seq
}

/// Random MMC with flat-Dirichlet rows, ordered by decreasing row maximum.
pub fn sample_random_mmc(states: usize, order: usize, seed: u64) -> Result<MmcModel> {
    check_shape(states, order)?;
    let mut rng = rng_from_seed(seed);
    let rows: Vec<Vec<f64>> = (0..states).map(|_| flat_dirichlet(&mut rng, states)).collect();
    let matrix = GenerationMatrix::new(rows)?;
    let mut priority: Vec<usize> = (0..states).collect();
    priority.sort_by(|&a, &b| {
        matrix
            .row_max(b)
            .total_cmp(&matrix.row_max(a))
            .then(a.cmp(&b))
    });
    MmcModel::new(matrix, Sgo::new(priority)?, order)
}

/// Smallest gap between any two row maxima of `model`.
pub fn min_row_max_gap(model: &MmcModel) -> f64 {
    let maxima: Vec<f64> = model
        .sgo()
        .priority()
        .iter()
        .map(|&s| model.matrix().row_max(s))
        .collect();
    maxima
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min)
}

/// Rejection-samples [`sample_random_mmc`] over derived seeds until all row
/// maxima are at least `min_gap` apart.
pub fn sample_separated_mmc(states: usize, order: usize, min_gap: f64, seed: u64) -> Result<MmcModel> {
    const MAX_ATTEMPTS: u64 = 1_000_000;
    for attempt in 0..MAX_ATTEMPTS {
        let model = sample_random_mmc(states, order, derive_seed(seed, attempt))?;
        if min_row_max_gap(&model) >= min_gap {
            return Ok(model);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no {states}-state model with row-max gaps >= {min_gap} in {MAX_ATTEMPTS} draws"
    )))
}

/// One sequence of `order + n_windows` states drawn from `model`.
pub fn generate_mmc_data(model: &MmcModel, n_windows: usize, seed: u64) -> SequenceDataset {
    let (m, k) = (model.num_states(), model.model_order());
    let mut rng = rng_from_seed(seed);
    let mut seq = uniform_prefix(&mut rng, m, k, k + n_windows);
    for t in 0..n_windows {
        let row = model.generating_row(&seq[t..t + k]);
        seq.push(sample_categorical(&mut rng, row));
    }
    SequenceDataset::new(model.space(), k, vec![seq]).expect("generated ids are in range")
}

/// Dense order-`K` transition table used to plant high-order data.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedHmc {
    space: StateSpace,
    order: usize,
    /// `M^K` rows of `M` probabilities, row index in base `M`, most recent lag least significant.
    table: Vec<f64>,
}

impl PlantedHmc {
    pub fn num_contexts(&self) -> usize {
        self.table.len() / self.space.size()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn row(&self, lags: &[usize]) -> &[f64] {
        let m = self.space.size();
        let ctx = lags.iter().fold(0usize, |acc, &s| acc * m + s);
        &self.table[ctx * m..(ctx + 1) * m]
    }

    pub fn context_row(&self, context: usize) -> &[f64] {
        let m = self.space.size();
        &self.table[context * m..(context + 1) * m]
    }
}

/// Full order-`K` chain with every context row drawn from the flat Dirichlet.
pub fn sample_random_hmc(states: usize, order: usize, seed: u64) -> Result<PlantedHmc> {
    let space = check_shape(states, order)?;
    let contexts = (states as u64)
        .checked_pow(order as u32)
        .filter(|&c| c <= DEFAULT_PLANTED_HMC_CAP)
        .ok_or_else(|| {
            Error::Intractable(format!(
                "planted chain needs {states}^{order} rows; the cap is {DEFAULT_PLANTED_HMC_CAP}"
            ))
        })?;
    let mut rng = rng_from_seed(seed);
    let mut table = Vec::with_capacity(contexts as usize * states);
    for _ in 0..contexts {
        table.extend(flat_dirichlet(&mut rng, states));
    }
    Ok(PlantedHmc {
        space,
        order,
        table,
    })
}

pub fn generate_hmc_data(model: &PlantedHmc, n_windows: usize, seed: u64) -> SequenceDataset {
    let (m, k) = (model.space.size(), model.order);
    let mut rng = rng_from_seed(seed);
    let mut seq = uniform_prefix(&mut rng, m, k, k + n_windows);
    for t in 0..n_windows {
        let next = sample_categorical(&mut rng, model.row(&seq[t..t + k]));
        seq.push(next);
    }
    SequenceDataset::new(model.space, k, vec![seq]).expect("generated ids are in range")
}

/// Effect map for causal data: a lag holding `s` triggers `effect[s]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CausalMap {
    pub effect: Vec<usize>,
    pub strength: f64,
    pub order: usize,
}

impl CausalMap {
    pub fn num_states(&self) -> usize {
        self.effect.len()
    }

    /// Exact next-state distribution of the causal process given `lags`.
    pub fn distribution(&self, lags: &[usize]) -> Vec<f64> {
        let m = self.effect.len();
        let mut out = vec![(1.0 - self.strength) / m as f64; m];
        let per_lag = self.strength / lags.len() as f64;
        for &s in lags {
            out[self.effect[s]] += per_lag;
        }
        out
    }
}

/// Uniform random derangement as the effect map.
pub fn sample_causal_map(states: usize, order: usize, strength: f64, seed: u64) -> Result<CausalMap> {
    check_shape(states, order)?;
    if states < 2 {
        return Err(Error::InvalidParameter(
            "causal data needs at least two states".into(),
        ));
    }
    if !(0.0..=1.0).contains(&strength) {
        return Err(Error::InvalidParameter(format!(
            "causal strength {strength} outside [0, 1]"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut effect: Vec<usize> = (0..states).collect();
    loop {
        effect.shuffle(&mut rng);
        if effect.iter().enumerate().all(|(s, &e)| s != e) {
            break;
        }
    }
    Ok(CausalMap {
        effect,
        strength,
        order,
    })
}

/// Each step picks one lag uniformly; with probability `strength` the next
/// state is that lag's effect, otherwise it is uniform.
pub fn generate_causal_with_map(map: &CausalMap, n_windows: usize, seed: u64) -> SequenceDataset {
    let (m, k) = (map.num_states(), map.order);
    let mut rng = rng_from_seed(seed);
    let mut seq = uniform_prefix(&mut rng, m, k, k + n_windows);
    for t in 0..n_windows {
        let lag = seq[t + rng.random_range(0..k)];
        let next = if rng.random::<f64>() < map.strength {
            map.effect[lag]
        } else {
            rng.random_range(0..m)
        };
        seq.push(next);
    }
    let space = StateSpace::new(m).expect("at least two states");
    SequenceDataset::new(space, k, vec![seq]).expect("generated ids are in range")
}

/// Samples an effect map from `seed` and a sequence from a stream derived from it.
pub fn generate_causal_data(
    states: usize,
    order: usize,
    strength: f64,
    seed: u64,
    n_windows: usize,
) -> Result<(SequenceDataset, CausalMap)> {
    let map = sample_causal_map(states, order, strength, seed)?;
    let data = generate_causal_with_map(&map, n_windows, derive_seed(seed, 1));
    Ok((data, map))
}

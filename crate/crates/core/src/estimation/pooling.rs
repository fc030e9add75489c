use num_rational::Ratio;
use num_traits::Num;

use crate::counts::CountTable;
use crate::error::{Error, Result};

const FEASIBILITY_SLACK: f64 = 1e-12;

/// Arithmetic shared by the floating-point and exact rational row fills.
pub(crate) trait Scalar: Num + Clone + PartialOrd {
    fn from_count(n: u64) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn from_count(n: u64) -> Self {
        n as f64
    }
}

impl Scalar for Ratio<i128> {
    #[inline]
    fn from_count(n: u64) -> Self {
        Ratio::from_integer(n as i128)
    }
}

pub(crate) fn ratio_to_f64(r: &Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Index of the largest count, lowest id on ties.
fn peak_index(counts: &[u64]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// Fills a row whose maximum is fixed at `p_star`.
///
/// The peak state takes `p_star`; the other observed states, largest count
/// first, take their proportional share of what is left, capped at
/// `p_star`; unobserved states split any remainder equally. Returns the row
/// and whether any share hit the cap.
pub(crate) fn fill_row<T: Scalar>(counts: &[u64], p_star: &T) -> (Vec<T>, bool) {
    let n = counts.len();
    let recipient = peak_index(counts);
    let mut row = vec![T::zero(); n];
    row[recipient] = p_star.clone();

    let mut rest: Vec<usize> = (0..n)
        .filter(|&i| i != recipient && counts[i] > 0)
        .collect();
    rest.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));

    let mut remaining = T::one() - p_star.clone();
    let mut unassigned: u64 = rest.iter().map(|&i| counts[i]).sum();
    let mut capped = false;
    for i in rest {
        let mut share =
            T::from_count(counts[i]) * remaining.clone() / T::from_count(unassigned);
        if share > *p_star {
            share = p_star.clone();
            capped = true;
        }
        if share < T::zero() {
            share = T::zero();
        }
        remaining = remaining - share.clone();
        unassigned -= counts[i];
        row[i] = share;
    }

    let silent: Vec<usize> = (0..n)
        .filter(|&i| i != recipient && counts[i] == 0)
        .collect();
    if !silent.is_empty() && remaining > T::zero() {
        let mut each = remaining / T::from_count(silent.len() as u64);
        if each > *p_star {
            each = p_star.clone();
        }
        for i in silent {
            row[i] = each.clone();
        }
    }
    (row, capped)
}

/// Generation row with maximum exactly `p_star` that best fits `row_counts`.
pub fn assign_row_distribution(row_counts: &[u64], p_star: f64) -> Result<Vec<f64>> {
    let n = row_counts.len();
    if n == 0 {
        return Err(Error::EmptyStateSpace);
    }
    if p_star.is_nan() || p_star < 1.0 / n as f64 - FEASIBILITY_SLACK || p_star > 1.0 {
        return Err(Error::InfeasibleMaximum { p_star, states: n });
    }
    Ok(fill_row(row_counts, &p_star).0)
}

/// `Σ n_i ln q_i`, skipping zero counts.
pub fn row_log_likelihood(row_counts: &[u64], row: &[f64]) -> f64 {
    row_counts
        .iter()
        .zip(row)
        .filter(|(&n, _)| n > 0)
        .map(|(&n, &q)| n as f64 * q.ln())
        .sum()
}

/// Log-likelihood of the member rows when they all share maximum `p`.
pub fn component_log_likelihood(component: &[usize], counts: &CountTable, p: f64) -> f64 {
    component
        .iter()
        .map(|&r| {
            let row = counts.row(r);
            row_log_likelihood(row, &fill_row(row, &p).0)
        })
        .sum()
}

/// `(Σ peak counts, Σ row totals)` over the members.
pub(crate) fn pooled_fraction(component: &[usize], counts: &CountTable) -> Result<(u64, u64)> {
    if component.is_empty() {
        return Err(Error::EmptyComponent);
    }
    let mut peak = 0;
    let mut total = 0;
    for &r in component {
        let t = counts.row_total(r);
        if t == 0 {
            return Err(Error::InvalidParameter(format!(
                "state {r} generates no windows and cannot be pooled"
            )));
        }
        peak += counts.row_peak(r);
        total += t;
    }
    Ok((peak, total))
}

/// Shared maximum generation probability of a component: pooled peak counts over pooled totals.
pub fn pool_component(component: &[usize], counts: &CountTable) -> Result<f64> {
    let (peak, total) = pooled_fraction(component, counts)?;
    Ok(peak as f64 / total as f64)
}

/// Shared maximum of one component after optimization.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum SharedMax {
    /// Pooled fraction; no row needed a cap, so the rows follow in exact arithmetic.
    Exact(Ratio<i128>),
    /// Numerical maximizer of the component likelihood when the pooled fraction is capped.
    Searched(f64),
}

impl SharedMax {
    pub fn value(&self) -> f64 {
        match self {
            SharedMax::Exact(r) => ratio_to_f64(r),
            SharedMax::Searched(p) => *p,
        }
    }

    pub fn less_than(&self, other: &SharedMax) -> bool {
        match (self, other) {
            (SharedMax::Exact(a), SharedMax::Exact(b)) => a < b,
            _ => self.value() < other.value(),
        }
    }

    pub fn fill(&self, row_counts: &[u64]) -> Vec<f64> {
        match self {
            SharedMax::Exact(r) => fill_row(row_counts, r)
                .0
                .iter()
                .map(ratio_to_f64)
                .collect(),
            SharedMax::Searched(p) => fill_row(row_counts, p).0,
        }
    }
}

/// Maximizes the component likelihood over the shared maximum.
///
/// When no member row is capped at the pooled fraction, that fraction is the
/// stationary point of the (concave) component likelihood and is returned
/// exactly. Otherwise the capped rows move the optimum and it is located by
/// golden-section search over the feasible interval `[1/M, 1]`.
pub(crate) fn maximize_component(component: &[usize], counts: &CountTable) -> Result<SharedMax> {
    let (peak, total) = pooled_fraction(component, counts)?;
    let pooled = Ratio::new(peak as i128, total as i128);
    let capped = component
        .iter()
        .any(|&r| fill_row(counts.row(r), &pooled).1);
    if !capped {
        return Ok(SharedMax::Exact(pooled));
    }

    let objective = |p: f64| component_log_likelihood(component, counts, p);
    let floor = 1.0 / counts.num_states() as f64;
    let p = golden_section_max(objective, floor, 1.0, ratio_to_f64(&pooled));
    Ok(SharedMax::Searched(p))
}

fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, hint: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a <= 1e-15 {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    // the bracket endpoints and the starting point are candidates too
    let mut best = (f(hint), hint);
    for x in [a, b, c, d, lo, hi] {
        let fx = f(x);
        if fx > best.0 {
            best = (fx, x);
        }
    }
    best.1
}

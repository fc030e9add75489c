use std::cmp::Ordering;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::counts::cmp_fractions;
use crate::dataset::SequenceDataset;
use crate::error::{Error, Result};
use crate::mmc::MmcModel;
use crate::sgo::Sgo;

use super::counting::{check_sgo, PatternTable};
use super::optimize::{optimize_counts, SgoFit};

/// Largest state space [`fit_exact`] enumerates by default (8! orders).
pub const DEFAULT_EXACT_STATE_CAP: usize = 8;

const IMPROVEMENT_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct FitReport {
    pub model: MmcModel,
    /// Exact training log-likelihood, `-inf` if some window is impossible.
    pub train_log_likelihood: f64,
    /// Number of orders whose rows were optimized.
    pub sgo_evaluations: u64,
    pub elapsed: Duration,
}

/// Starting point for [`fit_hill_climb`].
#[derive(Clone, Debug, Default)]
pub enum HillClimbInit {
    #[default]
    Greedy,
    Sgo(Sgo),
}

fn evaluate(table: &PatternTable, sgo: &Sgo, order: usize) -> SgoFit {
    optimize_counts(&table.counts(sgo), sgo, order)
}

/// `true` if `candidate` beats `incumbent`. Any finite likelihood beats `-inf`.
fn improves(candidate: f64, incumbent: f64) -> bool {
    if incumbent == f64::NEG_INFINITY {
        candidate > f64::NEG_INFINITY
    } else {
        candidate > incumbent + IMPROVEMENT_THRESHOLD
    }
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let Some(i) = perm.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = perm.iter().rposition(|&x| x > perm[i]).expect("successor exists");
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

fn report(fit: SgoFit, sgo_evaluations: u64, start: Instant) -> FitReport {
    FitReport {
        model: fit.model,
        train_log_likelihood: fit.log_likelihood,
        sgo_evaluations,
        elapsed: start.elapsed(),
    }
}

/// Maximum-likelihood fit over every generation order, with the default state cap.
pub fn fit_exact(data: &SequenceDataset) -> Result<FitReport> {
    fit_exact_with_cap(data, DEFAULT_EXACT_STATE_CAP)
}

/// Optimizes every order in lexicographic sequence and keeps the best.
///
/// Ties go to the lexicographically smallest order, so parallel and serial
/// evaluation agree.
pub fn fit_exact_with_cap(data: &SequenceDataset, max_states: usize) -> Result<FitReport> {
    let start = Instant::now();
    let n = data.num_states();
    if n > max_states {
        return Err(Error::Intractable(format!(
            "exact fitting enumerates {n}! orders; the cap is {max_states} states"
        )));
    }
    let table = PatternTable::build(data);

    let mut orders = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        orders.push(perm.clone());
        if !next_permutation(&mut perm) {
            break;
        }
    }

    let (best, _) = orders
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let sgo = Sgo::new(p.clone()).expect("permutation");
            (i, evaluate(&table, &sgo, data.order()).log_likelihood)
        })
        .reduce(
            || (usize::MAX, f64::NEG_INFINITY),
            |a, b| {
                let a_wins = match a.1.partial_cmp(&b.1) {
                    Some(Ordering::Greater) => true,
                    Some(Ordering::Less) => false,
                    _ => a.0 < b.0,
                };
                if a_wins {
                    a
                } else {
                    b
                }
            },
        );
    let sgo = Sgo::new(orders[best].clone()).expect("permutation");
    let fit = evaluate(&table, &sgo, data.order());
    Ok(report(fit, orders.len() as u64, start))
}

/// First-improvement local search over pairwise swaps of the order.
///
/// Each scan visits state pairs `(a, b)`, `a < b`, in increasing order and
/// restarts after the first swap that improves the likelihood; the search
/// stops after a full scan without improvement.
pub fn fit_hill_climb(data: &SequenceDataset, init: HillClimbInit) -> Result<FitReport> {
    let start = Instant::now();
    let n = data.num_states();
    let table = PatternTable::build(data);
    let mut sgo = match init {
        HillClimbInit::Greedy => greedy_order(&table),
        HillClimbInit::Sgo(sgo) => {
            check_sgo(data, &sgo)?;
            sgo
        }
    };
    let mut current = evaluate(&table, &sgo, data.order());
    let mut evaluations = 1;

    'scan: loop {
        for a in 0..n {
            for b in a + 1..n {
                let candidate = sgo.swapped(a, b);
                let fit = evaluate(&table, &candidate, data.order());
                evaluations += 1;
                if improves(fit.log_likelihood, current.log_likelihood) {
                    sgo = candidate;
                    current = fit;
                    continue 'scan;
                }
            }
        }
        break;
    }
    Ok(report(current, evaluations, start))
}

/// Greedy order construction followed by row optimization under that order.
pub fn fit_greedy(data: &SequenceDataset) -> Result<FitReport> {
    let start = Instant::now();
    let table = PatternTable::build(data);
    let sgo = greedy_order(&table);
    let fit = evaluate(&table, &sgo, data.order());
    Ok(report(fit, 1, start))
}

/// The order chosen by the greedy heuristic, without fitting rows.
pub fn greedy_sgo(data: &SequenceDataset) -> Sgo {
    greedy_order(&PatternTable::build(data))
}

/// Ranks states one at a time by their empirical maximum generation fraction.
///
/// At each rank, every unranked state appearing in a still-unclaimed window
/// is credited with that window's target. The state with the largest
/// peak-over-total fraction wins (lowest id on ties) and claims every window
/// it appears in. States that are never credited go last, by id.
fn greedy_order(table: &PatternTable) -> Sgo {
    let n = table.num_states;
    let mut ranked = vec![false; n];
    let mut priority = Vec::with_capacity(n);
    let mut active: Vec<usize> = (0..table.patterns.len()).collect();
    let mut tally = vec![0u64; n * n];
    let mut touched = Vec::with_capacity(n);

    while !active.is_empty() {
        for &c in &touched {
            tally[c * n..(c + 1) * n].fill(0);
        }
        touched.clear();
        let mut seen = vec![false; n];
        for &i in &active {
            let p = &table.patterns[i];
            for &c in &p.states {
                tally[c * n + p.target] += p.count;
                if !seen[c] {
                    seen[c] = true;
                    touched.push(c);
                }
            }
        }
        touched.sort_unstable();

        let mut best: Option<(usize, u64, u64)> = None;
        for &c in &touched {
            let row = &tally[c * n..(c + 1) * n];
            let peak = row.iter().copied().max().unwrap_or(0);
            let total: u64 = row.iter().sum();
            let better = match best {
                None => true,
                Some((_, bp, bt)) => cmp_fractions(peak, total, bp, bt) == Ordering::Greater,
            };
            if better {
                best = Some((c, peak, total));
            }
        }
        let (winner, _, _) = best.expect("active windows credit some state");
        ranked[winner] = true;
        priority.push(winner);
        active.retain(|&i| !table.patterns[i].states.contains(&winner));
    }
    priority.extend((0..n).filter(|&s| !ranked[s]));
    Sgo::new(priority).expect("greedy ranks every state once")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::StateSpace;

    fn worked_example() -> SequenceDataset {
        let seq = vec![2, 2, 2, 2, 2, 2, 0, 1, 2, 0, 1, 2, 0];
        SequenceDataset::new(StateSpace::new(3).unwrap(), 2, vec![seq]).unwrap()
    }

    #[test]
    fn permutations_are_lexicographic() {
        let mut p = vec![0, 1, 2];
        let mut all = vec![p.clone()];
        while next_permutation(&mut p) {
            all.push(p.clone());
        }
        assert_eq!(
            all,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
    }

    #[test]
    fn greedy_on_worked_example() {
        assert_eq!(greedy_sgo(&worked_example()).priority(), &[0, 1, 2]);
    }

    #[test]
    fn single_state_fits() {
        let data =
            SequenceDataset::new(StateSpace::new(1).unwrap(), 3, vec![vec![0; 10]]).unwrap();
        for report in [
            fit_exact(&data).unwrap(),
            fit_greedy(&data).unwrap(),
            fit_hill_climb(&data, HillClimbInit::Greedy).unwrap(),
        ] {
            assert_eq!(report.model.matrix().row(0), &[1.0]);
            assert_eq!(report.train_log_likelihood, 0.0);
        }
        assert_eq!(fit_exact(&data).unwrap().sgo_evaluations, 1);
    }

    #[test]
    fn exact_respects_cap() {
        let space = StateSpace::new(9).unwrap();
        let data = SequenceDataset::new(space, 2, vec![(0..9).collect()]).unwrap();
        assert!(matches!(fit_exact(&data), Err(Error::Intractable(_))));
        assert!(fit_exact_with_cap(&data, 3).is_err());
    }

    #[test]
    fn finite_beats_negative_infinity() {
        assert!(improves(-1e9, f64::NEG_INFINITY));
        assert!(!improves(f64::NEG_INFINITY, f64::NEG_INFINITY));
        assert!(!improves(-1.0, -1.0));
        assert!(improves(-1.0, -1.1));
    }

    #[test]
    fn hill_climb_from_reversed_order_on_worked_example() {
        let data = worked_example();
        let init = Sgo::new(vec![2, 1, 0]).unwrap();
        let start = evaluate(&PatternTable::build(&data), &init, 2).log_likelihood;
        let report = fit_hill_climb(&data, HillClimbInit::Sgo(init)).unwrap();
        assert!(report.train_log_likelihood >= start);
        assert!(report.train_log_likelihood <= fit_exact(&data).unwrap().train_log_likelihood);
    }
}

use mmc_core::datagen::rng_from_seed;
use mmc_core::estimation::{
    assign_row_distribution, build_misalignment_graph, component_log_likelihood,
    derive_generation_counts, fit_exact, fit_greedy, fit_hill_climb, optimize_counts,
    optimize_under_sgo, pool_component, row_log_likelihood, HillClimbInit,
};
use mmc_core::{CountTable, SequenceDataset, SequenceModel, Sgo, StateSpace};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn dataset(m: usize, k: usize, seq: Vec<usize>) -> SequenceDataset {
    SequenceDataset::new(StateSpace::new(m).unwrap(), k, vec![seq]).unwrap()
}

/// Sequence with a skewed stationary mix so that some states generate rarely.
fn random_sequence(m: usize, len: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng_from_seed(seed);
    let weights: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    (0..len)
        .map(|_| {
            let mut u = rng.random::<f64>() * total;
            for (i, w) in weights.iter().enumerate() {
                if u < *w {
                    return i;
                }
                u -= w;
            }
            m - 1
        })
        .collect()
}

fn random_sgo(m: usize, seed: u64) -> Sgo {
    let mut p: Vec<usize> = (0..m).collect();
    p.shuffle(&mut rng_from_seed(seed));
    Sgo::new(p).unwrap()
}

fn sequence_strategy() -> impl Strategy<Value = (usize, usize, Vec<usize>, Vec<usize>)> {
    (2usize..6, 1usize..4).prop_flat_map(|(m, k)| {
        (
            Just(m),
            Just(k),
            prop::collection::vec(0..m, k..k + 60),
            Just((0..m).collect::<Vec<_>>()).prop_shuffle(),
        )
    })
}

/// Best log-likelihood of a row whose maximum is pinned at `p`: the peak
/// takes `p`, the rest is water-filled proportionally under the cap `p`.
fn capped_row_ll(counts: &[u64], p: f64) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let peak = (0..counts.len()).max_by_key(|&i| (counts[i], usize::MAX - i)).unwrap();
    let mut probs = vec![0.0; counts.len()];
    probs[peak] = p;
    let mut free: Vec<usize> = (0..counts.len()).filter(|&i| i != peak && counts[i] > 0).collect();
    let mut mass = 1.0 - p;
    loop {
        let weight: u64 = free.iter().map(|&i| counts[i]).sum();
        let over: Vec<usize> = free
            .iter()
            .copied()
            .filter(|&i| counts[i] as f64 * mass / weight as f64 > p)
            .collect();
        if over.is_empty() {
            for &i in &free {
                probs[i] = counts[i] as f64 * mass / weight as f64;
            }
            break;
        }
        for &i in &over {
            probs[i] = p;
            mass -= p;
        }
        free.retain(|i| !over.contains(i));
    }
    counts
        .iter()
        .zip(&probs)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &q)| c as f64 * q.ln())
        .sum()
}

/// Constrained optimum over row maxima on a grid: maxima must not increase
/// along the order. Solved by dynamic programming over the grid.
fn grid_chain_optimum(counts: &CountTable, sgo: &Sgo, grid: usize) -> f64 {
    let m = counts.num_states();
    let lo = 1.0 / m as f64;
    let points: Vec<f64> = (0..grid).map(|g| lo + (1.0 - lo) * g as f64 / (grid - 1) as f64).collect();
    // best[g]: optimum of the states placed so far, the last one at or above points[g]
    let mut best = vec![0.0f64; grid];
    for &s in sgo.priority() {
        let row = counts.row(s);
        let mut run = f64::NEG_INFINITY;
        for g in (0..grid).rev() {
            run = run.max(capped_row_ll(row, points[g]) + best[g]);
            best[g] = run;
        }
    }
    best.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn first_order_counts_are_bigrams((m, _k, seq, perm) in sequence_strategy()) {
        let data = dataset(m, 1, seq.clone());
        let counts = derive_generation_counts(&data, &Sgo::new(perm).unwrap()).unwrap();
        let mut oracle = vec![vec![0u64; m]; m];
        for w in seq.windows(2) {
            oracle[w[0]][w[1]] += 1;
        }
        prop_assert_eq!(counts.to_rows(), oracle);
    }

    #[test]
    fn counts_follow_highest_priority_lag((m, k, seq, perm) in sequence_strategy()) {
        let data = dataset(m, k, seq.clone());
        let counts = derive_generation_counts(&data, &Sgo::new(perm.clone()).unwrap()).unwrap();
        let mut oracle = vec![vec![0u64; m]; m];
        for w in seq.windows(k + 1) {
            let generator = *perm.iter().find(|s| w[..k].contains(s)).unwrap();
            oracle[generator][w[k]] += 1;
        }
        prop_assert_eq!(counts.to_rows(), oracle);
        prop_assert_eq!(counts.total() as usize, data.num_windows());
    }

    #[test]
    fn misalignment_graph_matches_pairwise_scan((m, k, seq, perm) in sequence_strategy()) {
        let data = dataset(m, k, seq);
        let sgo = Sgo::new(perm.clone()).unwrap();
        let counts = derive_generation_counts(&data, &sgo).unwrap();
        let graph = build_misalignment_graph(&counts, &sgo);
        let frac = |s: usize| counts.row_peak(s) as f64 / counts.row_total(s) as f64;
        let active: Vec<usize> = perm.iter().copied().filter(|&s| counts.row_total(s) > 0).collect();
        let mut edges = Vec::new();
        for (i, &x) in active.iter().enumerate() {
            for &y in &active[i + 1..] {
                if frac(x) < frac(y) {
                    edges.push((x, y));
                }
            }
        }
        let mut got = graph.edges.clone();
        got.sort_unstable();
        edges.sort_unstable();
        prop_assert_eq!(got, edges.clone());

        // components by flood fill
        let mut label = vec![usize::MAX; m];
        for &start in &active {
            if label[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            label[start] = start;
            while let Some(u) = stack.pop() {
                for &(a, b) in &edges {
                    let v = if a == u { b } else if b == u { a } else { continue };
                    if label[v] == usize::MAX {
                        label[v] = start;
                        stack.push(v);
                    }
                }
            }
        }
        for c in &graph.components {
            for &s in c {
                prop_assert_eq!(label[s], label[c[0]]);
            }
        }
        let covered: usize = graph.components.iter().map(Vec::len).sum();
        prop_assert_eq!(covered, active.len());
        let distinct: std::collections::BTreeSet<usize> = active.iter().map(|&s| label[s]).collect();
        prop_assert_eq!(distinct.len(), graph.components.len());
    }

    #[test]
    fn assigned_rows_are_distributions_with_requested_max(
        counts in prop::collection::vec(0u64..20, 2..7),
        t in 0.0f64..=1.0,
    ) {
        let m = counts.len();
        let p = 1.0 / m as f64 + t * (1.0 - 1.0 / m as f64);
        let row = assign_row_distribution(&counts, p).unwrap();
        let sum: f64 = row.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        let max = row.iter().cloned().fold(f64::MIN, f64::max);
        prop_assert!((max - p).abs() < 1e-12);
        prop_assert!(row.iter().all(|&x| x >= 0.0));
        prop_assert!((row_log_likelihood(&counts, &row) - capped_row_ll(&counts, p)).abs() < 1e-9);
    }

    #[test]
    fn aligned_rows_are_exact_normalized_counts(
        rows in prop::collection::vec(prop::collection::vec(0u64..30, 4), 4),
    ) {
        // order states by descending peak fraction, so that no pair is misaligned
        let mut ids: Vec<usize> = (0..4).filter(|&s| rows[s].iter().sum::<u64>() > 0).collect();
        ids.sort_by(|&a, &b| {
            let fa = *rows[a].iter().max().unwrap() as u128 * rows[b].iter().sum::<u64>() as u128;
            let fb = *rows[b].iter().max().unwrap() as u128 * rows[a].iter().sum::<u64>() as u128;
            fb.cmp(&fa)
        });
        ids.extend((0..4).filter(|&s| rows[s].iter().sum::<u64>() == 0));
        let sgo = Sgo::new(ids).unwrap();
        let counts = CountTable::from_rows(&rows);
        prop_assert!(build_misalignment_graph(&counts, &sgo).edges.is_empty());
        let fit = optimize_counts(&counts, &sgo, 1);
        for (s, row) in rows.iter().enumerate() {
            let total: u64 = row.iter().sum();
            if total == 0 {
                continue;
            }
            let want: Vec<f64> = row.iter().map(|&c| c as f64 / total as f64).collect();
            prop_assert_eq!(fit.model.matrix().row(s), &want[..]);
        }
    }
}

#[test]
fn worked_example_counts_graph_and_likelihood() {
    let data = dataset(3, 2, vec![2, 2, 2, 2, 2, 2, 0, 1, 2, 0, 1, 2, 0]);
    let sgo = Sgo::identity(3);
    let counts = derive_generation_counts(&data, &sgo).unwrap();
    assert_eq!(counts.to_rows(), vec![vec![0, 2, 2], vec![2, 0, 0], vec![1, 0, 4]]);
    let graph = build_misalignment_graph(&counts, &sgo);
    assert!(graph.has_edge(0, 1) && graph.has_edge(0, 2) && !graph.has_edge(1, 2));
    assert_eq!(pool_component(&[0, 1, 2], &counts).unwrap(), 8.0 / 11.0);
    let model = optimize_under_sgo(&data, &sgo).unwrap();
    let want = 8.0 * (8.0f64 / 11.0).ln() + 3.0 * (3.0f64 / 11.0).ln();
    assert!((model.log_likelihood(&data, 0.0).unwrap() - want).abs() < 1e-12);
}

/// Per-component grid search of the shared maximum, summed over components.
fn component_grid_optimum(counts: &CountTable, components: &[Vec<usize>], grid: usize) -> f64 {
    let m = counts.num_states();
    let lo = 1.0 / m as f64;
    components
        .iter()
        .map(|members| {
            (0..grid)
                .map(|g| lo + (1.0 - lo) * g as f64 / (grid - 1) as f64)
                .map(|p| members.iter().map(|&s| capped_row_ll(counts.row(s), p)).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum()
}

#[test]
fn fitted_likelihood_matches_component_grid_search() {
    let mut untouched = 0;
    for seed in 0..200u64 {
        let k = 1 + (seed % 3) as usize;
        let data = dataset(3, k, random_sequence(3, 40 + (seed % 50) as usize, seed));
        let sgo = random_sgo(3, seed ^ 0xabc);
        let counts = derive_generation_counts(&data, &sgo).unwrap();
        let fit = optimize_counts(&counts, &sgo, k);
        let oracle = component_grid_optimum(&counts, &fit.components, 2001);
        assert!(fit.log_likelihood >= oracle - 1e-9, "seed {seed}");
        assert!(fit.log_likelihood <= oracle + 1e-3, "seed {seed}");
        let graph = build_misalignment_graph(&counts, &sgo);
        if graph.components == fit.components {
            untouched += 1;
        }
        // any order-consistent assignment of maxima bounds the fit from above
        let chain = grid_chain_optimum(&counts, &sgo, 2001);
        assert!(fit.log_likelihood <= chain + 1e-3, "seed {seed}");
        let direct = fit.model.log_likelihood(&data, 0.0).unwrap();
        assert!((direct - fit.log_likelihood).abs() < 1e-9);
    }
    assert!(untouched > 150, "repair fired on {} of 200 instances", 200 - untouched);
}

#[test]
fn graph_pooling_can_over_merge() {
    // peak fractions along the order: 0.4, 0.75, 0.41; the graph links the
    // first state to both others, but pooling only the first two is better
    let counts = CountTable::from_rows(&[vec![6, 6, 3], vec![9, 9, 4], vec![1, 6, 1]]);
    let sgo = Sgo::new(vec![0, 2, 1]).unwrap();
    let fit = optimize_counts(&counts, &sgo, 1);
    assert_eq!(fit.components, vec![vec![0, 2, 1]]);
    let split = component_grid_optimum(&counts, &[vec![0, 2], vec![1]], 2001);
    assert!(split > fit.log_likelihood + 0.1);
}

#[test]
fn component_members_share_one_maximum() {
    for seed in 0..100u64 {
        let m = 3 + (seed % 3) as usize;
        let data = dataset(m, 2, random_sequence(m, 150, seed));
        let sgo = random_sgo(m, seed + 7);
        let counts = derive_generation_counts(&data, &sgo).unwrap();
        let fit = optimize_counts(&counts, &sgo, 2);
        for (members, &p) in fit.components.iter().zip(&fit.shared_max) {
            for &s in members {
                assert!((fit.model.matrix().row_max(s) - p).abs() < 1e-12, "seed {seed}");
            }
        }
        assert!(fit.model.is_sgo_consistent());
    }
}

#[test]
fn shared_maximum_beats_every_grid_point() {
    for seed in 0..100u64 {
        let data = dataset(4, 2, random_sequence(4, 120, seed));
        let sgo = random_sgo(4, seed);
        let counts = derive_generation_counts(&data, &sgo).unwrap();
        let fit = optimize_counts(&counts, &sgo, 2);
        for (members, &p) in fit.components.iter().zip(&fit.shared_max) {
            let at_fit = component_log_likelihood(members, &counts, p);
            for g in 0..=1000 {
                let q = 0.25 + 0.75 * g as f64 / 1000.0;
                assert!(component_log_likelihood(members, &counts, q) <= at_fit + 1e-9, "seed {seed}");
            }
        }
    }
}

#[test]
fn perturbing_a_shared_maximum_never_helps() {
    for seed in 0..50u64 {
        let m = 2 + (seed % 3) as usize;
        let data = dataset(m, 2, random_sequence(m, 200, seed));
        let report = fit_exact(&data).unwrap();
        let sgo = report.model.sgo().clone();
        let counts = derive_generation_counts(&data, &sgo).unwrap();
        let fit = optimize_counts(&counts, &sgo, 2);
        for (members, &p) in fit.components.iter().zip(&fit.shared_max) {
            for delta in [-1e-4, 1e-4] {
                let q = p + delta;
                if q < 1.0 / m as f64 || q > 1.0 {
                    continue;
                }
                let moved: f64 = members
                    .iter()
                    .map(|&s| {
                        let row = assign_row_distribution(counts.row(s), q).unwrap();
                        row_log_likelihood(counts.row(s), &row)
                    })
                    .sum();
                let base = component_log_likelihood(members, &counts, p);
                assert!(moved <= base + 1e-12, "seed {seed}: {moved} > {base}");
            }
        }
    }
}

#[test]
fn exact_search_matches_exhaustive_enumeration() {
    use itertools::Itertools;
    for seed in 0..30u64 {
        let m = 4;
        let data = dataset(m, 3, random_sequence(m, 300, seed));
        let best = (0..m)
            .permutations(m)
            .map(|p| {
                let model = optimize_under_sgo(&data, &Sgo::new(p).unwrap()).unwrap();
                model.log_likelihood(&data, 0.0).unwrap()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let report = fit_exact(&data).unwrap();
        assert!((report.train_log_likelihood - best).abs() < 1e-9, "seed {seed}");
        assert_eq!(report.sgo_evaluations, 24);
    }
}

#[test]
fn greedy_hill_exact_chain() {
    for seed in 0..60u64 {
        let m = 3 + (seed % 3) as usize;
        let data = dataset(m, 2 + (seed % 2) as usize, random_sequence(m, 250, seed));
        let greedy = fit_greedy(&data).unwrap().train_log_likelihood;
        let hill = fit_hill_climb(&data, HillClimbInit::Greedy).unwrap().train_log_likelihood;
        let exact = fit_exact(&data).unwrap().train_log_likelihood;
        assert!(greedy <= hill + 1e-9, "seed {seed}");
        assert!(hill <= exact + 1e-9, "seed {seed}");
    }
}

#[test]
fn hill_climb_ends_at_a_swap_local_optimum() {
    for seed in 0..20u64 {
        let m = 5;
        let data = dataset(m, 2, random_sequence(m, 300, seed));
        let report = fit_hill_climb(&data, HillClimbInit::Sgo(random_sgo(m, seed))).unwrap();
        let sgo = report.model.sgo();
        for a in 0..m {
            for b in a + 1..m {
                let model = optimize_under_sgo(&data, &sgo.swapped(a, b)).unwrap();
                let ll = model.log_likelihood(&data, 0.0).unwrap();
                assert!(ll <= report.train_log_likelihood + 1e-9, "seed {seed}");
            }
        }
    }
}

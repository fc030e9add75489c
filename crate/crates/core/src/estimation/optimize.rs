use crate::counts::CountTable;
use crate::dataset::SequenceDataset;
use crate::error::Result;
use crate::matrix::GenerationMatrix;
use crate::mmc::MmcModel;
use crate::sgo::Sgo;

use super::counting::derive_generation_counts;
use super::misalignment::{build_misalignment_graph, DisjointSet};
use super::pooling::{fill_row, maximize_component, row_log_likelihood, SharedMax};

/// Result of optimizing the generation rows under one fixed order.
#[derive(Clone, Debug)]
pub struct SgoFit {
    pub model: MmcModel,
    /// Exact training log-likelihood (`-inf` allowed).
    pub log_likelihood: f64,
    /// Groups of generating states sharing one maximum, after order repair.
    pub components: Vec<Vec<usize>>,
    /// Shared maximum of each entry of `components`.
    pub shared_max: Vec<f64>,
}

/// Best generation rows for `data` when states are prioritized by `sgo`.
pub fn optimize_under_sgo(data: &SequenceDataset, sgo: &Sgo) -> Result<MmcModel> {
    let counts = derive_generation_counts(data, sgo)?;
    Ok(optimize_counts(&counts, sgo, data.order()).model)
}

/// Optimizes the generation rows for counts already attributed under `sgo`.
///
/// Panics if the table and the order disagree on the number of states or
/// if `order` is zero.
pub fn optimize_counts(counts: &CountTable, sgo: &Sgo, order: usize) -> SgoFit {
    let n = counts.num_states();
    assert_eq!(n, sgo.len(), "count table and order disagree on state count");

    let graph = build_misalignment_graph(counts, sgo);
    let mut dsu = DisjointSet::new(n);
    for &(a, b) in &graph.edges {
        dsu.union(a, b);
    }

    // merge neighbours until pooled maxima are non-increasing along the order
    let (components, shared) = loop {
        let components = dsu.groups(&graph.nodes);
        let shared: Vec<SharedMax> = components
            .iter()
            .map(|c| maximize_component(c, counts).expect("members generate windows"))
            .collect();
        let mut slot = vec![usize::MAX; n];
        for (i, c) in components.iter().enumerate() {
            for &s in c {
                slot[s] = i;
            }
        }
        let mut merged = false;
        for w in graph.nodes.windows(2) {
            let (hi, lo) = (slot[w[0]], slot[w[1]]);
            if hi != lo && shared[hi].less_than(&shared[lo]) {
                dsu.union(w[0], w[1]);
                merged = true;
            }
        }
        if !merged {
            break (components, shared);
        }
    };

    let mut rows: Vec<Option<Vec<f64>>> = vec![None; n];
    let mut log_likelihood = 0.0;
    for (members, max) in components.iter().zip(&shared) {
        for &s in members {
            let row = max.fill(counts.row(s));
            log_likelihood += row_log_likelihood(counts.row(s), &row);
            rows[s] = Some(row);
        }
    }

    // Silent states never generate a training window. They get the flattest
    // row whose maximum still fits between their neighbours in the order.
    let mut floor = 1.0 / n as f64;
    for &s in sgo.priority().iter().rev() {
        match &rows[s] {
            Some(row) => floor = floor.max(crate::matrix::row_max(row)),
            None => rows[s] = Some(fill_row(&vec![0; n], &floor).0),
        }
    }

    let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.expect("every row filled")).collect();
    let matrix = GenerationMatrix::new(rows).expect("filled rows are distributions");
    let model = MmcModel::new(matrix, sgo.clone(), order).expect("repaired rows respect the order");
    SgoFit {
        model,
        log_likelihood,
        components,
        shared_max: shared.iter().map(SharedMax::value).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SequenceModel;
    use crate::space::StateSpace;
    use approx::assert_abs_diff_eq;

    fn worked_example() -> SequenceDataset {
        let seq = vec![2, 2, 2, 2, 2, 2, 0, 1, 2, 0, 1, 2, 0];
        SequenceDataset::new(StateSpace::new(3).unwrap(), 2, vec![seq]).unwrap()
    }

    #[test]
    fn worked_example_rows() {
        let model = optimize_under_sgo(&worked_example(), &Sgo::identity(3)).unwrap();
        let expected = [
            [0.0, 8.0 / 11.0, 3.0 / 11.0],
            [8.0 / 11.0, 3.0 / 22.0, 3.0 / 22.0],
            [3.0 / 11.0, 0.0, 8.0 / 11.0],
        ];
        for (r, want) in expected.iter().enumerate() {
            for (c, w) in want.iter().enumerate() {
                assert_abs_diff_eq!(model.matrix().row(r)[c], *w, epsilon = 1e-15);
            }
        }
        let ll = model.log_likelihood(&worked_example(), 0.0).unwrap();
        let want = 8.0 * (8.0f64 / 11.0).ln() + 3.0 * (3.0f64 / 11.0).ln();
        assert_abs_diff_eq!(ll, want, epsilon = 1e-12);
    }

    #[test]
    fn aligned_rows_are_normalized_counts() {
        let counts = CountTable::from_rows(&[vec![9, 1, 0], vec![3, 3, 1], vec![0, 0, 0]]);
        let fit = optimize_counts(&counts, &Sgo::identity(3), 1);
        assert_eq!(fit.model.matrix().row(0), &[0.9, 0.1, 0.0]);
        assert_eq!(
            fit.model.matrix().row(1),
            &[3.0 / 7.0, 3.0 / 7.0, 1.0 / 7.0]
        );
        // silent state sits below state 1, so its maximum is capped by it
        assert!(fit.model.is_sgo_consistent());
    }

    #[test]
    fn silent_state_above_loud_states_stays_consistent() {
        let counts = CountTable::from_rows(&[vec![0, 0, 0], vec![0, 9, 1], vec![1, 1, 1]]);
        let fit = optimize_counts(&counts, &Sgo::identity(3), 2);
        let m = fit.model.matrix();
        assert_eq!(m.row_max(0), 0.9);
        assert!(fit.model.is_sgo_consistent());
        assert_abs_diff_eq!(m.row(0).iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }
}

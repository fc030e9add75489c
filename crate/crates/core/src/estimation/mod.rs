//! Maximum-likelihood estimation of max Markov chains.
//!
//! Fitting happens in two layers. Under a fixed generation order every
//! window has a known generating state, so the counts split into one
//! multinomial per state; the only coupling between states is the
//! requirement that row maxima are non-increasing along the order. States
//! whose empirical maxima contradict the order are linked in a misalignment
//! graph and each connected component shares one maximum, after which the
//! remaining mass in each row is filled greedily under that cap.
//!
//! On top of that, [`fit_exact`], [`fit_hill_climb`] and [`fit_greedy`]
//! search over generation orders.

mod counting;
mod misalignment;
mod optimize;
mod pooling;
mod search;

pub use counting::derive_generation_counts;
pub use misalignment::{build_misalignment_graph, DisjointSet, MisalignmentGraph};
pub use optimize::{optimize_counts, optimize_under_sgo, SgoFit};
pub use pooling::{
    assign_row_distribution, component_log_likelihood, pool_component, row_log_likelihood,
};
pub use search::{
    fit_exact, fit_exact_with_cap, fit_greedy, fit_hill_climb, greedy_sgo, FitReport,
    HillClimbInit, DEFAULT_EXACT_STATE_CAP,
};

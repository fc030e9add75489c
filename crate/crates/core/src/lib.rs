//! Max Markov chains.
//!
//! A max Markov chain of order `K` predicts the next state from the `K`
//! preceding states, but only one of them matters: the lag state with the
//! highest priority in a state generation order ([`Sgo`]) generates the next
//! state from its own row of a [`GenerationMatrix`]. The crate provides
//! likelihood-based fitting ([`estimation`]), first-order, full high-order
//! and mixture-transition baselines ([`baselines`]), seeded synthetic data
//! generators ([`datagen`]), the benchmark harness ([`bench`]) and the text
//! formats used by the command-line tool ([`format`]).

pub mod baselines;
pub mod bench;
pub mod counts;
pub mod datagen;
pub mod dataset;
pub mod error;
pub mod estimation;
pub mod family;
pub mod format;
pub mod matrix;
pub mod mmc;
pub mod model;
pub mod sgo;
pub mod space;

pub use counts::CountTable;
pub use dataset::{SequenceDataset, Window};
pub use error::{Error, Result};
pub use matrix::GenerationMatrix;
pub use mmc::MmcModel;
pub use model::{SequenceModel, DEFAULT_EPSILON};
pub use sgo::Sgo;
pub use space::StateSpace;

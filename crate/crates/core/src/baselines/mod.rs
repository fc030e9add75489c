//! Comparison models: first-order chain, full high-order chain and the
//! mixture transition distribution approximation.

mod fmc;
mod hmc;
mod mtd;

pub use fmc::{fit_fmc, FmcModel};
pub use hmc::{fit_hmc, fit_hmc_with_cap, HmcModel, DEFAULT_HMC_ALPHA, DEFAULT_HMC_CONTEXT_CAP};
pub use mtd::{fit_mtd, MtdFit, MtdModel, MtdOptions};

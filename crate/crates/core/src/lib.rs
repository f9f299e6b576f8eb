//! Generalized inference on the shape parameters of two Weibull populations
//! observed through upper record values.
//!
//! * [`records`]: record series, extraction, exact record generation
//! * [`weibull`]: closed-form MLEs and observed-information standard errors
//! * [`pivotal`]: shape pivots, percentile intervals, generalized p-values
//! * [`sim`]: coverage and expected-length simulation
//!
//! The crate is `no_std` (with `alloc`). The `parallel` feature runs Monte
//! Carlo replicates on rayon; results do not depend on the thread count.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod hessian;
mod math;
pub mod pivotal;
pub mod records;
pub mod rng;
pub mod root;
pub mod sim;
pub mod weibull;

pub use error::{Error, Result};
pub use pivotal::{
    g_fn, gci_percentile, gpv_one_sided, gpv_two_sided, ln_w_stat, sample_pivotal,
    sample_shape_pivotal, solve_t, w_stat, Estimand, IntervalEstimate, PivotalDraws, PivotalKind,
    PivotalSampler, Sidedness, StreamLayout, TestResult,
};
pub use records::{
    extract_upper_record_indices, extract_upper_records, gen_std_exp_records,
    gen_weibull_records, RecordSeries,
};
pub use rng::RngStream;
pub use sim::{run_cell, run_grid, table1_grid, SimConfig, SimReport};
pub use weibull::{
    mle_records, pooled_loglik, pooled_mle, record_loglik, weibull_cdf, FitModel, PooledFit,
    WeibullFit, WeibullParams,
};
pub use hessian::se_from_hessian;

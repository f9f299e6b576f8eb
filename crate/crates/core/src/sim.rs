//! Coverage study for the percentile interval of `beta1 / beta2`.
//!
//! Each outer replicate draws two Weibull record series with known shapes,
//! samples `M` ratio pivots for them, forms the `1 - gamma` percentile
//! interval and records whether the true ratio lies strictly inside.
//!
//! Seeds: a cell seed is derived from the master seed and the cell's
//! parameters, so a cell gives the same answer alone or inside a grid.
//! Replicate `l` gets `derive_seed(cell_seed, [l])`; its observed data use
//! streams `u64::MAX - 1` (population 1) and `u64::MAX` (population 2), and
//! its pivotal draws use the usual `2m + i - 1` streams of that seed.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pivotal::{
    collect_replicates, gci_percentile, PivotalDraws, PivotalKind, PivotalSampler,
};
use crate::records::gen_weibull_records;
use crate::rng::{derive_seed, RngStream};

/// Record indices of the standard grid rows (each of `n1`, `n2`).
pub const TABLE1_N: [usize; 3] = [3, 7, 14];
/// Shapes of population 1 across the standard grid columns.
pub const TABLE1_BETA1: [f64; 7] = [0.5, 1.0, 1.2, 1.5, 2.0, 3.0, 5.0];
/// Shape of population 2 throughout the standard grid.
pub const TABLE1_BETA2: f64 = 2.0;

pub const DESK_DRAWS: usize = 2000;
pub const DESK_REPLICATIONS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SimConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Record index of population 1 (`n1 + 1` records).
    pub n1: usize,
    pub n2: usize,
    /// Inner pivotal draws `M`.
    pub draws: usize,
    /// Outer replications `N`.
    pub replications: usize,
    pub gamma: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            beta1: 1.0,
            beta2: TABLE1_BETA2,
            alpha1: 1.0,
            alpha2: 1.0,
            n1: 7,
            n2: 7,
            draws: DESK_DRAWS,
            replications: DESK_REPLICATIONS,
            gamma: 0.05,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn cell(n1: usize, n2: usize, beta1: f64, beta2: f64) -> Self {
        Self {
            n1,
            n2,
            beta1,
            beta2,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} = {v} must be positive")));
            }
        }
        if self.n1 < 1 || self.n2 < 1 {
            return Err(Error::invalid("record indices n1, n2 must be at least 1"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::invalid(format!("gamma = {} must lie in (0, 1)", self.gamma)));
        }
        if self.replications < 1 {
            return Err(Error::invalid("replications N must be at least 1"));
        }
        let tail = self.gamma * self.draws as f64 / 2.0;
        if tail < 1.0 - 1e-9 {
            return Err(Error::InsufficientDraws(tail));
        }
        Ok(())
    }

    /// True ratio `beta1 / beta2`.
    pub fn ratio(&self) -> f64 {
        self.beta1 / self.beta2
    }

    fn cell_seed(&self) -> u64 {
        derive_seed(
            self.seed,
            &[
                self.n1 as u64,
                self.n2 as u64,
                self.beta1.to_bits(),
                self.beta2.to_bits(),
                self.alpha1.to_bits(),
                self.alpha2.to_bits(),
            ],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SimReport {
    pub coverage: f64,
    pub expected_length: f64,
    /// Binomial standard error `sqrt(c (1 - c) / N)`.
    pub mc_se_coverage: f64,
    pub covered: usize,
    pub config: SimConfig,
}

/// One outer replicate: returns (covered, width).
fn outer_replicate(config: &SimConfig, cell_seed: u64, l: u64) -> Result<(bool, f64)> {
    let seed = derive_seed(cell_seed, &[l]);
    let s1 = gen_weibull_records(
        config.n1,
        config.alpha1,
        config.beta1,
        &RngStream::new(seed, u64::MAX - 1),
    )?;
    let s2 = gen_weibull_records(
        config.n2,
        config.alpha2,
        config.beta2,
        &RngStream::new(seed, u64::MAX),
    )?;
    let draws: PivotalDraws =
        PivotalSampler::new(PivotalKind::Ratio, config.draws, seed).run_sequential(&s1, &s2)?;
    let ci = gci_percentile(&draws, config.gamma)?;
    Ok((ci.strictly_contains(config.ratio()), ci.width()))
}

/// Coverage and expected length for a single grid cell.
pub fn run_cell(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let cell_seed = config.cell_seed();
    let outcomes = collect_replicates(config.replications, |l, _| {
        outer_replicate(config, cell_seed, l).map_err(|e| e.in_replicate(l))
    })?;
    let n = outcomes.len() as f64;
    let covered = outcomes.iter().filter(|(c, _)| *c).count();
    let total_width: f64 = outcomes.iter().map(|(_, w)| *w).sum();
    let coverage = covered as f64 / n;
    Ok(SimReport {
        coverage,
        expected_length: total_width / n,
        mc_se_coverage: libm::sqrt(coverage * (1.0 - coverage) / n),
        covered,
        config: *config,
    })
}

/// Runs every cell; a failing cell does not stop the others.
pub fn run_grid(grid: &[SimConfig]) -> Result<Vec<Result<SimReport>>> {
    if grid.is_empty() {
        return Err(Error::invalid("simulation grid is empty"));
    }
    Ok(grid.iter().map(run_cell).collect())
}

/// The 63 standard cells in row-major order: rows `(n1, n2)` over
/// `{3, 7, 14}^2`, columns `beta1` over [`TABLE1_BETA1`], `beta2 = 2`.
/// Sizes, `gamma` and seed come from `base`.
pub fn table1_grid(base: &SimConfig) -> Vec<SimConfig> {
    let mut grid = Vec::with_capacity(63);
    for n1 in TABLE1_N {
        for n2 in TABLE1_N {
            for beta1 in TABLE1_BETA1 {
                grid.push(SimConfig {
                    n1,
                    n2,
                    beta1,
                    beta2: TABLE1_BETA2,
                    ..*base
                });
            }
        }
    }
    grid
}

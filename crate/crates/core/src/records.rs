//! Upper record values: validated series, extraction from raw sequences,
//! and exact generation for the standard exponential and Weibull laws.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Upper record values `r_0 < r_1 < ... < r_n` from a single population.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RecordSeries {
    values: Vec<f64>,
}

impl RecordSeries {
    /// Validates positivity, finiteness and strict increase.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("record series is empty"));
        }
        for (j, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!(
                    "record {j} = {v} is not a finite positive value"
                )));
            }
        }
        if let Some(j) = values.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "records are not strictly increasing at index {}: {} >= {}",
                j + 1,
                values[j],
                values[j + 1]
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Record index of the last value; the series holds `n + 1` records.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest (last) record.
    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Fails unless the series has at least two records.
    pub fn require_inference_ready(&self) -> Result<()> {
        if self.n() == 0 {
            return Err(Error::DegenerateData(
                "inference needs at least two records (n >= 1)".into(),
            ));
        }
        Ok(())
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Strict running maxima of `sequence`; the first observation is always a record.
///
/// Ties with the current maximum are not records.
pub fn extract_upper_records(sequence: &[f64]) -> Result<RecordSeries> {
    extract_upper_record_indices(sequence).map(|idx| RecordSeries {
        values: idx.into_iter().map(|i| sequence[i]).collect(),
    })
}

/// Positions in `sequence` at which a new upper record occurs.
pub fn extract_upper_record_indices(sequence: &[f64]) -> Result<Vec<usize>> {
    if sequence.is_empty() {
        return Err(Error::invalid("observation sequence is empty"));
    }
    let mut idx = Vec::new();
    let mut current = f64::NEG_INFINITY;
    for (i, &x) in sequence.iter().enumerate() {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::invalid(format!(
                "observation {i} = {x} is not a finite positive value"
            )));
        }
        if x > current {
            idx.push(i);
            current = x;
        }
    }
    Ok(idx)
}

/// `n + 1` upper records of the unit exponential law.
///
/// By memorylessness the record increments are i.i.d. unit exponential, so
/// the records are the cumulative sums of `n + 1` independent draws.
pub fn gen_std_exp_records(n: usize, stream: &RngStream) -> RecordSeries {
    let mut values = Vec::with_capacity(n + 1);
    fill_std_exp_records(n, stream, &mut values);
    RecordSeries { values }
}

pub(crate) fn fill_std_exp_records(n: usize, stream: &RngStream, out: &mut Vec<f64>) {
    out.clear();
    let mut rng = stream.generator();
    let mut acc = 0.0;
    for _ in 0..=n {
        acc += rng.unit_exponential();
        out.push(acc);
    }
}

/// `n + 1` upper records of Weibull(`alpha`, `beta`), built as
/// `alpha * S_j^(1/beta)` from the exponential records `S_j` of `stream`.
pub fn gen_weibull_records(
    n: usize,
    alpha: f64,
    beta: f64,
    stream: &RngStream,
) -> Result<RecordSeries> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid(format!("alpha = {alpha} must be positive")));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid(format!("beta = {beta} must be positive")));
    }
    let exp = gen_std_exp_records(n, stream);
    let inv = 1.0 / beta;
    let values: Vec<f64> = exp
        .values
        .iter()
        .map(|&s| alpha * libm::pow(s, inv))
        .collect();
    // Extreme shapes can collapse neighbours in floating point.
    RecordSeries::new(values)
}

//! Generalized pivotal quantities for Weibull shape parameters.
//!
//! For a record series `r_0..r_n`,
//!
//! ```text
//! W(b) = sum_j r_j^b / ((n+1) * (prod_j r_j)^(b/(n+1)))
//! ```
//!
//! is the arithmetic over the geometric mean of `r_j^b`. It is strictly
//! increasing in `b`, invariant to rescaling of the records, and at the
//! true shape it is distributed as the same functional (`b = 1`) of standard
//! exponential records `W*`. Solving `W_obs(b) = W*` for a fresh draw of
//! `W*` gives one realization of the shape pivot `T`. Ratios and differences
//! of two independent pivots give the pivots for `b1 / b2` and `b1 - b2`.
//!
//! All evaluation is in log space: `ln W(b) = lse(b * x_j) - ln(n+1)` with
//! `x_j = ln r_j - mean(ln r)`, which stays finite for any `b` the bracketing
//! can reach.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::records::{fill_std_exp_records, RecordSeries};
use crate::rng::RngStream;
use crate::root::bisect_increasing;

/// Lower end of the search interval for `T`.
pub const BETA_MIN: f64 = 1e-8;
/// Cap for the doubling search of the upper end.
pub const BETA_MAX: f64 = 1e6;
/// Relative width at which bisection stops.
pub const ROOT_REL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum PivotalKind {
    /// `G = T1 / T2`
    Ratio,
    /// `H = T1 - T2`
    Difference,
    /// `T` for a single population
    SingleShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Estimand {
    /// `beta1 / beta2`
    Ratio,
    /// `beta1 - beta2`
    Difference,
    Shape,
}

impl PivotalKind {
    pub fn estimand(self) -> Estimand {
        match self {
            PivotalKind::Ratio => Estimand::Ratio,
            PivotalKind::Difference => Estimand::Difference,
            PivotalKind::SingleShape => Estimand::Shape,
        }
    }
}

/// Monte Carlo realizations of a pivot, ordered by replicate index.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PivotalDraws {
    values: Vec<f64>,
    kind: PivotalKind,
    seed: u64,
}

impl PivotalDraws {
    pub fn new(values: Vec<f64>, kind: PivotalKind, seed: u64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("pivotal draws are empty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("draw {i} is not finite")));
        }
        if kind != PivotalKind::Difference {
            if let Some(i) = values.iter().position(|v| *v <= 0.0) {
                return Err(Error::invalid(format!("draw {i} is not positive")));
            }
        }
        Ok(Self { values, kind, seed })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> PivotalKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of draws `M`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Applies `map` to every draw, keeping kind and seed.
    pub fn map<F: Fn(f64) -> f64>(&self, map: F) -> Result<Self> {
        Self::new(self.values.iter().map(|v| map(*v)).collect(), self.kind, self.seed)
    }

    /// Sample median (mean of the middle pair for even `M`).
    pub fn median(&self) -> f64 {
        let s = self.sorted();
        let m = s.len();
        if m % 2 == 1 {
            s[m / 2]
        } else {
            0.5 * (s[m / 2 - 1] + s[m / 2])
        }
    }

    fn sorted(&self) -> Vec<f64> {
        let mut s = self.values.clone();
        s.sort_unstable_by(f64::total_cmp);
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IntervalEstimate {
    pub lower: f64,
    pub upper: f64,
    /// Confidence coefficient `1 - gamma`.
    pub level: f64,
    pub draws: usize,
    pub estimand: Estimand,
    /// 1-based order-statistic ranks of the endpoints.
    pub lower_rank: usize,
    pub upper_rank: usize,
}

impl IntervalEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Strict interior membership.
    pub fn strictly_contains(&self, x: f64) -> bool {
        self.lower < x && x < self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Sidedness {
    /// `H0: pi <= pi0` against `H1: pi > pi0`
    OneSidedGreater,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TestResult {
    pub p_value: f64,
    pub pi0: f64,
    pub sidedness: Sidedness,
    pub draws: usize,
}

/// Centered log records of one series, reused across replicates.
#[derive(Debug, Clone)]
pub(crate) struct CenteredLogs {
    centered: Vec<f64>,
    max: f64,
    /// Largest `|x|` over the centered logs.
    spread: f64,
    count: f64,
    ln_count: f64,
}

impl CenteredLogs {
    pub(crate) fn new(values: &[f64]) -> Self {
        let mut centered: Vec<f64> = values.iter().map(|v| math::ln(*v)).collect();
        let mean = centered.iter().sum::<f64>() / centered.len() as f64;
        centered.iter_mut().for_each(|x| *x -= mean);
        let max = centered.iter().fold(f64::NEG_INFINITY, |m, x| m.max(*x));
        let spread = centered.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        Self {
            centered,
            max,
            spread,
            count: values.len() as f64,
            ln_count: math::ln(values.len() as f64),
        }
    }

    fn n(&self) -> usize {
        self.centered.len() - 1
    }

    /// `ln W(beta)` for `beta > 0`. Near zero `ln W` behaves like
    /// `beta^2 var / 2`, which a plain log-sum-exp loses to cancellation, so
    /// small arguments go through `expm1`/`ln_1p` instead.
    #[inline]
    pub(crate) fn ln_w(&self, beta: f64) -> f64 {
        if beta * self.spread < 0.5 {
            let excess: f64 = self.centered.iter().map(|x| math::expm1(beta * x)).sum();
            return math::ln_1p(excess / self.count);
        }
        let shift = beta * self.max;
        let sum: f64 = self.centered.iter().map(|x| math::exp(beta * x - shift)).sum();
        shift + math::ln(sum) - self.ln_count
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("beta = {beta} must be positive")))
    }
}

/// `ln W(beta)` for the series; finite for every positive `beta`.
pub fn ln_w_stat(series: &RecordSeries, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    series.require_inference_ready()?;
    Ok(CenteredLogs::new(series.values()).ln_w(beta))
}

/// `W(beta)`; may overflow to infinity for very large `beta`, use
/// [`ln_w_stat`] there.
pub fn w_stat(series: &RecordSeries, beta: f64) -> Result<f64> {
    ln_w_stat(series, beta).map(libm::exp)
}

/// `g(beta) = W_obs(beta) - W*`, where `W*` is the unit-shape statistic of
/// the exponential records.
pub fn g_fn(observed: &RecordSeries, exp_records: &RecordSeries, beta: f64) -> Result<f64> {
    check_matching(observed, exp_records)?;
    let w_star = w_stat(exp_records, 1.0)?;
    Ok(w_stat(observed, beta)? - w_star)
}

fn check_matching(observed: &RecordSeries, exp_records: &RecordSeries) -> Result<()> {
    observed.require_inference_ready()?;
    if observed.n() != exp_records.n() {
        return Err(Error::invalid(format!(
            "observed series has n = {} but exponential records have n = {}",
            observed.n(),
            exp_records.n()
        )));
    }
    Ok(())
}

/// Unique root `T` of `g(beta) = 0`.
pub fn solve_t(observed: &RecordSeries, exp_records: &RecordSeries) -> Result<f64> {
    check_matching(observed, exp_records)?;
    let obs = CenteredLogs::new(observed.values());
    let target = ln_w_unit(exp_records.values());
    solve_centered(&obs, target)
}

/// Root of `ln W_obs(beta) = target`; same sign as `g`.
pub(crate) fn solve_centered(obs: &CenteredLogs, target: f64) -> Result<f64> {
    let h = |beta: f64| obs.ln_w(beta) - target;
    let failure = || {
        let g = |beta: f64| libm::exp(obs.ln_w(beta)) - libm::exp(target);
        Error::BracketFailure {
            lower: BETA_MIN,
            upper: BETA_MAX,
            g_lower: g(BETA_MIN),
            g_upper: g(BETA_MAX),
        }
    };
    let h_min = h(BETA_MIN);
    if h_min > 0.0 || h_min.is_nan() {
        return Err(failure());
    }
    if h_min == 0.0 {
        return Ok(BETA_MIN);
    }
    // Walk from 1 by factors of two until the sign changes.
    let (lower, upper) = if h(1.0) > 0.0 {
        let mut upper: f64 = 1.0;
        loop {
            let lower = (0.5 * upper).max(BETA_MIN);
            if lower == BETA_MIN || h(lower) <= 0.0 {
                break (lower, upper);
            }
            upper = lower;
        }
    } else {
        let mut lower = 1.0;
        loop {
            if lower >= BETA_MAX {
                return Err(failure());
            }
            let upper = (2.0 * lower).min(BETA_MAX);
            let v = h(upper);
            if v.is_nan() {
                return Err(failure());
            }
            if v > 0.0 {
                break (lower, upper);
            }
            lower = upper;
        }
    };
    Ok(bisect_increasing(h, lower, upper, ROOT_REL_TOL).root)
}

/// How exponential record streams are assigned to the two populations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum StreamLayout {
    /// Replicate `m`, population `i` (1 or 2) uses stream `2m + i - 1`.
    #[default]
    Independent,
    /// Both populations use stream `2m`; needs `n1 == n2`. Only useful for
    /// checks that want `T1 == T2` by construction.
    Shared,
}

/// Monte Carlo sampler for `G` or `H` with a fixed seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotalSampler {
    pub kind: PivotalKind,
    pub draws: usize,
    pub seed: u64,
    pub layout: StreamLayout,
}

impl PivotalSampler {
    pub fn new(kind: PivotalKind, draws: usize, seed: u64) -> Self {
        Self {
            kind,
            draws,
            seed,
            layout: StreamLayout::Independent,
        }
    }

    pub fn with_layout(mut self, layout: StreamLayout) -> Self {
        self.layout = layout;
        self
    }

    pub fn run(&self, series1: &RecordSeries, series2: &RecordSeries) -> Result<PivotalDraws> {
        let prepared = self.prepare(series1, series2)?;
        let values = collect_replicates(self.draws, |m, scratch| prepared.replicate(m, scratch))?;
        PivotalDraws::new(values, self.kind, self.seed)
    }

    /// Single-threaded variant of [`run`](Self::run); identical output.
    pub fn run_sequential(
        &self,
        series1: &RecordSeries,
        series2: &RecordSeries,
    ) -> Result<PivotalDraws> {
        let prepared = self.prepare(series1, series2)?;
        let mut scratch = Vec::new();
        let values = (0..self.draws as u64)
            .map(|m| prepared.replicate(m, &mut scratch))
            .collect::<Result<Vec<f64>>>()?;
        PivotalDraws::new(values, self.kind, self.seed)
    }

    fn prepare(&self, series1: &RecordSeries, series2: &RecordSeries) -> Result<Prepared> {
        if self.kind == PivotalKind::SingleShape {
            return Err(Error::invalid(
                "two-sample sampler needs a ratio or difference kind",
            ));
        }
        if self.draws == 0 {
            return Err(Error::invalid("number of draws M must be at least 1"));
        }
        series1.require_inference_ready()?;
        series2.require_inference_ready()?;
        if self.layout == StreamLayout::Shared && series1.n() != series2.n() {
            return Err(Error::invalid("shared streams need n1 == n2"));
        }
        Ok(Prepared {
            obs1: CenteredLogs::new(series1.values()),
            obs2: CenteredLogs::new(series2.values()),
            sampler: *self,
        })
    }
}

struct Prepared {
    obs1: CenteredLogs,
    obs2: CenteredLogs,
    sampler: PivotalSampler,
}

impl Prepared {
    fn replicate(&self, m: u64, scratch: &mut Vec<f64>) -> Result<f64> {
        let seed = self.sampler.seed;
        let (id1, id2) = match self.sampler.layout {
            StreamLayout::Independent => (2 * m, 2 * m + 1),
            StreamLayout::Shared => (2 * m, 2 * m),
        };
        let t1 = pivot_draw(&self.obs1, &RngStream::new(seed, id1), scratch)
            .map_err(|e| e.in_replicate(m))?;
        let t2 = pivot_draw(&self.obs2, &RngStream::new(seed, id2), scratch)
            .map_err(|e| e.in_replicate(m))?;
        Ok(match self.sampler.kind {
            PivotalKind::Ratio => t1 / t2,
            _ => t1 - t2,
        })
    }
}

/// One realization of `T` for `obs` from the exponential records of `stream`.
pub(crate) fn pivot_draw(
    obs: &CenteredLogs,
    stream: &RngStream,
    scratch: &mut Vec<f64>,
) -> Result<f64> {
    fill_std_exp_records(obs.n(), stream, scratch);
    solve_centered(obs, ln_w_unit(scratch))
}

/// `ln W(1)`: log of the arithmetic over the geometric mean.
fn ln_w_unit(values: &[f64]) -> f64 {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let mean_ln = values.iter().map(|v| math::ln(*v)).sum::<f64>() / k;
    math::ln(mean) - mean_ln
}

/// Runs `f(m)` for `m in 0..count`, returning results in index order. The
/// first failing index (lowest `m`) wins.
pub(crate) fn collect_replicates<T, F>(count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut Vec<f64>) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let results: Vec<Result<T>> = (0..count as u64)
            .into_par_iter()
            .map_init(Vec::new, |scratch, m| f(m, scratch))
            .collect();
        results.into_iter().collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut scratch = Vec::new();
        (0..count as u64).map(|m| f(m, &mut scratch)).collect()
    }
}

/// `M` draws of `G = T1/T2` or `H = T1 - T2` with independent streams.
pub fn sample_pivotal(
    series1: &RecordSeries,
    series2: &RecordSeries,
    kind: PivotalKind,
    draws: usize,
    seed: u64,
) -> Result<PivotalDraws> {
    PivotalSampler::new(kind, draws, seed).run(series1, series2)
}

/// `M` draws of the single-population shape pivot `T`; replicate `m` uses
/// stream `2m`.
pub fn sample_shape_pivotal(series: &RecordSeries, draws: usize, seed: u64) -> Result<PivotalDraws> {
    if draws == 0 {
        return Err(Error::invalid("number of draws M must be at least 1"));
    }
    series.require_inference_ready()?;
    let obs = CenteredLogs::new(series.values());
    let values = collect_replicates(draws, |m, scratch| {
        pivot_draw(&obs, &RngStream::new(seed, 2 * m), scratch).map_err(|e| e.in_replicate(m))
    })?;
    PivotalDraws::new(values, PivotalKind::SingleShape, seed)
}

fn snap(x: f64) -> f64 {
    let r = libm::round(x);
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// Percentile interval `[G_(ceil(gamma M / 2)), G_(floor((1 - gamma/2) M))]`
/// from exact order statistics (1-based ranks).
pub fn gci_percentile(draws: &PivotalDraws, gamma: f64) -> Result<IntervalEstimate> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid(format!("gamma = {gamma} must lie in (0, 1)")));
    }
    let m = draws.len();
    let tail = gamma * m as f64 / 2.0;
    if snap(tail) < 1.0 {
        return Err(Error::InsufficientDraws(tail));
    }
    let lower_rank = libm::ceil(snap(tail)) as usize;
    let upper_rank = libm::floor(snap((1.0 - gamma / 2.0) * m as f64)) as usize;
    if lower_rank > upper_rank {
        return Err(Error::InsufficientDraws(tail));
    }
    let sorted = draws.sorted();
    Ok(IntervalEstimate {
        lower: sorted[lower_rank - 1],
        upper: sorted[upper_rank - 1],
        level: 1.0 - gamma,
        draws: m,
        estimand: draws.kind().estimand(),
        lower_rank,
        upper_rank,
    })
}

fn tail_counts(draws: &PivotalDraws, pi0: f64) -> (usize, usize) {
    draws.values().iter().fold((0, 0), |(lo, hi), &v| {
        if v < pi0 {
            (lo + 1, hi)
        } else if v > pi0 {
            (lo, hi + 1)
        } else {
            (lo, hi)
        }
    })
}

/// `P(G < pi0)`, the p-value for `H0: pi <= pi0` against `pi > pi0`.
pub fn gpv_one_sided(draws: &PivotalDraws, pi0: f64) -> TestResult {
    let (below, _) = tail_counts(draws, pi0);
    TestResult {
        p_value: below as f64 / draws.len() as f64,
        pi0,
        sidedness: Sidedness::OneSidedGreater,
        draws: draws.len(),
    }
}

/// `2 min(P(G < pi0), P(G > pi0))`, capped at 1.
pub fn gpv_two_sided(draws: &PivotalDraws, pi0: f64) -> TestResult {
    let (below, above) = tail_counts(draws, pi0);
    let p = (2 * below.min(above)) as f64 / draws.len() as f64;
    TestResult {
        p_value: p.min(1.0),
        pi0,
        sidedness: Sidedness::TwoSided,
        draws: draws.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::{gen_std_exp_records, gen_weibull_records};
    use alloc::vec;
    use core::f64::consts::E;

    fn two_point() -> RecordSeries {
        RecordSeries::new(vec![1.0, E]).unwrap()
    }

    #[test]
    fn ln_w_increases_at_tiny_beta_for_clustered_series() {
        let s = RecordSeries::new(vec![1.0, 1.0005, 1.001, 1.003]).unwrap();
        let logs = CenteredLogs::new(s.values());
        let mut prev = 0.0;
        for k in 0..=1000 {
            let beta = libm::pow(10.0, -8.0 + 0.011 * k as f64);
            let lw = logs.ln_w(beta);
            assert!(lw > prev, "beta = {beta}: {lw} <= {prev}");
            prev = lw;
        }
    }

    #[test]
    fn small_and_large_beta_branches_agree() {
        let s = RecordSeries::new(vec![0.5, 2.0, 3.0, 9.0]).unwrap();
        let logs = CenteredLogs::new(s.values());
        let beta = 0.5 / logs.spread;
        let shift = beta * logs.max;
        let sum: f64 = logs.centered.iter().map(|x| libm::exp(beta * x - shift)).sum();
        let lse = shift + libm::log(sum) - logs.ln_count;
        assert!((logs.ln_w(beta * (1.0 - 1e-15)) - lse).abs() < 1e-14 * lse);
    }

    #[test]
    fn w_stat_by_hand() {
        let s = two_point();
        let w1 = w_stat(&s, 1.0).unwrap();
        assert!((w1 - (1.0 + E) / (2.0 * libm::sqrt(E))).abs() < 1e-14);
        assert!((w1 - 1.1276).abs() < 1e-4);
        let w2 = w_stat(&s, 2.0).unwrap();
        assert!((w2 - libm::cosh(1.0)).abs() < 1e-14);
        let w0 = w_stat(&s, 1e-8).unwrap();
        assert!(w0 >= 1.0 && w0 - 1.0 < 1e-8);
    }

    #[test]
    fn w_stat_large_beta_stays_finite_in_logs() {
        let s = RecordSeries::new(vec![1.0, 50.0, 1000.0]).unwrap();
        let l = ln_w_stat(&s, 1e6).unwrap();
        assert!(l.is_finite() && l > 1e6);
        assert!(w_stat(&s, 1e6).unwrap().is_infinite());
    }

    #[test]
    fn w_stat_rejects_bad_beta() {
        let s = two_point();
        assert!(w_stat(&s, 0.0).is_err());
        assert!(w_stat(&s, -1.0).is_err());
        assert!(w_stat(&s, f64::NAN).is_err());
    }

    #[test]
    fn g_negative_near_zero() {
        let exp = gen_std_exp_records(4, &RngStream::new(3, 0));
        let obs = RecordSeries::new(vec![0.2, 0.9, 1.3, 5.0, 6.0]).unwrap();
        let g0 = g_fn(&obs, &exp, 1e-8).unwrap();
        let w_star = w_stat(&exp, 1.0).unwrap();
        assert!(g0 < 0.0);
        assert!((g0 - (1.0 - w_star)).abs() < 1e-6);
    }

    #[test]
    fn g_mismatched_n() {
        let exp = gen_std_exp_records(3, &RngStream::new(3, 0));
        let obs = RecordSeries::new(vec![0.2, 0.9, 1.3]).unwrap();
        assert!(matches!(g_fn(&obs, &exp, 1.0), Err(Error::InvalidInput(_))));
        assert!(matches!(solve_t(&obs, &exp), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn g_vanishes_on_paired_construction() {
        let stream = RngStream::new(5, 1);
        let exp = gen_std_exp_records(6, &stream);
        let obs = gen_weibull_records(6, 3.0, 1.7, &stream).unwrap();
        assert!(g_fn(&obs, &exp, 1.7).unwrap().abs() < 1e-12);
    }

    #[test]
    fn solve_t_recovers_shape() {
        let stream = RngStream::new(8, 9);
        let exp = gen_std_exp_records(5, &stream);
        let obs = gen_weibull_records(5, 1.0, 2.0, &stream).unwrap();
        let t = solve_t(&obs, &exp).unwrap();
        assert!((t - 2.0).abs() < 1e-9, "{t}");
    }

    #[test]
    fn bracket_failure_reports_endpoints() {
        // A near-degenerate observed spread cannot reach a large W* below 1e6.
        let obs = RecordSeries::new(vec![1.0, 1.0 + 1e-12]).unwrap();
        let exp = RecordSeries::new(vec![1e-6, 50.0]).unwrap();
        match solve_t(&obs, &exp) {
            Err(Error::BracketFailure { lower, upper, g_lower, g_upper }) => {
                assert_eq!(lower, BETA_MIN);
                assert_eq!(upper, BETA_MAX);
                assert!(g_lower < 0.0 && g_upper <= 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shared_streams_give_exact_identity() {
        let s = RecordSeries::new(vec![0.5, 1.5, 2.0, 7.0]).unwrap();
        let ratio = PivotalSampler::new(PivotalKind::Ratio, 200, 4)
            .with_layout(StreamLayout::Shared)
            .run(&s, &s)
            .unwrap();
        assert!(ratio.values().iter().all(|g| *g == 1.0));
        let diff = PivotalSampler::new(PivotalKind::Difference, 200, 4)
            .with_layout(StreamLayout::Shared)
            .run(&s, &s)
            .unwrap();
        assert!(diff.values().iter().all(|h| *h == 0.0));
    }

    #[test]
    fn shared_streams_need_equal_n() {
        let a = RecordSeries::new(vec![0.5, 1.5, 2.0]).unwrap();
        let b = RecordSeries::new(vec![0.5, 1.5]).unwrap();
        let r = PivotalSampler::new(PivotalKind::Ratio, 10, 0)
            .with_layout(StreamLayout::Shared)
            .run(&a, &b);
        assert!(r.is_err());
    }

    #[test]
    fn sampler_rejects_zero_draws_and_single_kind() {
        let s = RecordSeries::new(vec![0.5, 1.5, 2.0]).unwrap();
        assert!(sample_pivotal(&s, &s, PivotalKind::Ratio, 0, 1).is_err());
        assert!(sample_pivotal(&s, &s, PivotalKind::SingleShape, 5, 1).is_err());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let a = RecordSeries::new(vec![0.5, 1.5, 2.0, 9.0]).unwrap();
        let b = RecordSeries::new(vec![0.1, 0.3, 3.0]).unwrap();
        let s = PivotalSampler::new(PivotalKind::Difference, 300, 77);
        let x = s.run(&a, &b).unwrap();
        let y = s.run_sequential(&a, &b).unwrap();
        let bits = |d: &PivotalDraws| d.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&x), bits(&y));
    }

    #[test]
    fn percentile_index_arithmetic() {
        let values: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let d = PivotalDraws::new(values, PivotalKind::Ratio, 0).unwrap();
        let ci = gci_percentile(&d, 0.10).unwrap();
        assert_eq!((ci.lower, ci.upper), (5.0, 95.0));
        assert_eq!((ci.lower_rank, ci.upper_rank), (5, 95));
        assert!((ci.level - 0.9).abs() < 1e-15);
        let ci = gci_percentile(&d, 0.05).unwrap();
        assert_eq!((ci.lower_rank, ci.upper_rank), (3, 97));
    }

    #[test]
    fn percentile_ranks_exact_for_round_products() {
        let values: Vec<f64> = (0..2000).map(|i| i as f64 + 1.0).collect();
        let d = PivotalDraws::new(values, PivotalKind::Ratio, 0).unwrap();
        let ci = gci_percentile(&d, 0.05).unwrap();
        assert_eq!((ci.lower_rank, ci.upper_rank), (50, 1950));
    }

    #[test]
    fn percentile_insufficient_draws() {
        let d = PivotalDraws::new(vec![1.0; 10], PivotalKind::Ratio, 0).unwrap();
        assert!(matches!(gci_percentile(&d, 0.05), Err(Error::InsufficientDraws(_))));
        assert!(gci_percentile(&d, 0.0).is_err());
        assert!(gci_percentile(&d, 1.0).is_err());
    }

    #[test]
    fn draws_validation() {
        assert!(PivotalDraws::new(vec![], PivotalKind::Ratio, 0).is_err());
        assert!(PivotalDraws::new(vec![1.0, -1.0], PivotalKind::Ratio, 0).is_err());
        assert!(PivotalDraws::new(vec![1.0, -1.0], PivotalKind::Difference, 0).is_ok());
        assert!(PivotalDraws::new(vec![f64::NAN], PivotalKind::Difference, 0).is_err());
    }

    #[test]
    fn p_values_at_extremes_and_median() {
        let values: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let d = PivotalDraws::new(values, PivotalKind::Ratio, 0).unwrap();
        assert_eq!(gpv_one_sided(&d, 0.5).p_value, 0.0);
        assert_eq!(gpv_one_sided(&d, 11.0).p_value, 1.0);
        let med = d.median();
        assert_eq!(med, 5.5);
        assert_eq!(gpv_one_sided(&d, med).p_value, 0.5);
        assert_eq!(gpv_two_sided(&d, med).p_value, 1.0);
        assert_eq!(gpv_two_sided(&d, 0.5).p_value, 0.0);
        assert_eq!(gpv_two_sided(&d, 20.0).p_value, 0.0);
        // ties count to neither side
        let t = gpv_two_sided(&d, 3.0);
        assert!((t.p_value - 0.4).abs() < 1e-15);
        assert_eq!(t.sidedness, Sidedness::TwoSided);
    }
}

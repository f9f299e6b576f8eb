//! Independent oracles: direct simulation, closed-form cdfs, grid scans and a
//! straight-line reimplementation of the pivotal sampler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use weibrec_core::*;

fn kv34() -> RecordSeries {
    RecordSeries::new(vec![0.96, 4.15, 8.01, 31.75, 33.91, 36.71, 72.89]).unwrap()
}

fn kv36() -> RecordSeries {
    RecordSeries::new(vec![1.97, 2.58, 2.71, 25.50]).unwrap()
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

#[test]
fn exp_record_mean_matches_gamma_mean() {
    let n = 2;
    let last: Vec<f64> = (0..100_000u64)
        .map(|id| gen_std_exp_records(n, &RngStream::new(21, id)).last())
        .collect();
    let (m, v) = mean_var(&last);
    let se = (v / last.len() as f64).sqrt();
    assert!((m - 3.0).abs() < 3.0 * se, "mean {m}, se {se}");
}

#[test]
fn exp_record_spacings_are_unit_exponential() {
    let mut spacings = Vec::with_capacity(100_000);
    for id in 0..25_000u64 {
        let r = gen_std_exp_records(4, &RngStream::new(5, id));
        let v = r.values();
        spacings.extend(v.windows(2).map(|w| w[1] - w[0]));
    }
    let n = spacings.len() as f64;
    let (m, v) = mean_var(&spacings);
    // Exp(1): var of mean = 1/n; var of sample variance = (mu4 - sigma^4)/n = 8/n
    assert!((m - 1.0).abs() < 3.0 / n.sqrt(), "mean {m}");
    assert!((v - 1.0).abs() < 3.0 * (8.0 / n).sqrt(), "var {v}");
    // lag-one correlation within a series should vanish
    let mut pairs = Vec::new();
    for id in 0..25_000u64 {
        let r = gen_std_exp_records(2, &RngStream::new(6, id));
        let v = r.values();
        pairs.push((v[1] - v[0], v[2] - v[1]));
    }
    let k = pairs.len() as f64;
    let cov = pairs.iter().map(|(a, b)| (a - 1.0) * (b - 1.0)).sum::<f64>() / k;
    assert!(cov.abs() < 4.0 / k.sqrt(), "cov {cov}");
}

#[test]
fn first_weibull_record_follows_cdf() {
    let params = WeibullParams::new(2.5, 1.7).unwrap();
    let mut first: Vec<f64> = (0..100_000u64)
        .map(|id| {
            gen_weibull_records(3, params.alpha, params.beta, &RngStream::new(77, id))
                .unwrap()
                .values()[0]
        })
        .collect();
    first.sort_by(f64::total_cmp);
    let n = first.len() as f64;
    let ks = first
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = 1.0 - (-(x / params.alpha).powf(params.beta)).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    // asymptotic 1% critical value
    assert!(ks < 1.628 / n.sqrt(), "KS = {ks}");
}

#[test]
fn g_changes_sign_once_on_dense_grid() {
    for id in 0..5u64 {
        let exp = gen_std_exp_records(6, &RngStream::new(400, id));
        for obs in [kv34(), gen_weibull_records(6, 3.0, 0.8, &RngStream::new(401, id)).unwrap()] {
            let lw_star = ln_w_stat(&exp, 1.0).unwrap();
            let signs: Vec<bool> = (0..10_000)
                .map(|k| {
                    let lb = -8.0 + 14.0 * k as f64 / 9_999.0;
                    ln_w_stat(&obs, lb.exp()).unwrap() > lw_star
                })
                .collect();
            let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
            assert_eq!(changes, 1);
            assert!(!signs[0] && signs[signs.len() - 1]);
        }
    }
}

/// argmin |g| over a log-spaced grid; returns the grid point and spacing ratio.
pub fn grid_root(obs: &RecordSeries, exp: &RecordSeries, points: usize) -> (f64, f64) {
    let (lo, hi) = (-8.0f64 * std::f64::consts::LN_10, 6.0f64 * std::f64::consts::LN_10);
    let step = (hi - lo) / (points - 1) as f64;
    let w_star = w_stat(exp, 1.0).unwrap();
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..points {
        let b = (lo + step * k as f64).exp();
        let w = w_stat(obs, b).unwrap();
        let d = (w - w_star).abs();
        if d < best.0 {
            best = (d, b);
        }
    }
    (best.1, step)
}

#[test]
fn bisection_matches_grid_scan() {
    for id in 0..3u64 {
        let exp = gen_std_exp_records(6, &RngStream::new(500, id));
        let t = solve_t(&kv34(), &exp).unwrap();
        let (g, step) = grid_root(&kv34(), &exp, 1_000_000);
        assert!((t.ln() - g.ln()).abs() <= step, "{t} vs {g}");
    }
}

#[test]
fn pooled_optimum_beats_grid() {
    let (a, b) = (kv34(), kv36());
    let fit = pooled_mle(&a, &b).unwrap();
    let theta = fit.theta();
    let best = pooled_loglik(&a, &b, &theta);
    let axis = |c: f64, k: usize| c * (0.8 + 0.4 * k as f64 / 40.0);
    let mut grid_max = f64::NEG_INFINITY;
    for i in 0..41 {
        for j in 0..41 {
            for k in 0..41 {
                let t = [axis(theta[0], i), axis(theta[1], j), axis(theta[2], k)];
                grid_max = grid_max.max(pooled_loglik(&a, &b, &t));
            }
        }
    }
    assert!(best >= grid_max, "{best} < {grid_max}");
    assert!((fit.loglik - best).abs() < 1e-12);
}

/// Straight-line replica of the sampler: its own generator, direct (non-log)
/// W, and arithmetic-midpoint bisection.
fn straight_line_median(s1: &[f64], s2: &[f64], m: usize, seed: u64) -> (f64, Vec<f64>) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let w = |r: &[f64], b: f64| {
        let k = r.len() as f64;
        let num: f64 = r.iter().map(|x| x.powf(b)).sum();
        let gm = r.iter().map(|x| x.ln()).sum::<f64>() / k;
        num / (k * (b * gm).exp())
    };
    let mut exp_records = |k: usize| {
        let mut acc = 0.0;
        (0..k)
            .map(|_| {
                let u: f64 = rng.random();
                acc += -(1.0 - u).ln();
                acc
            })
            .collect::<Vec<f64>>()
    };
    let mut solve = |r: &[f64]| {
        let e = exp_records(r.len());
        let target = w(&e, 1.0);
        let (mut lo, mut hi) = (1e-8, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if w(r, mid) > target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut g: Vec<f64> = (0..m).map(|_| solve(s1) / solve(s2)).collect();
    g.sort_by(f64::total_cmp);
    (0.5 * (g[m / 2 - 1] + g[m / 2]), g)
}

#[test]
fn sampler_median_matches_straight_line_replica() {
    let s1 = gen_weibull_records(6, 1.0, 2.0, &RngStream::new(900, 0)).unwrap();
    let s2 = gen_weibull_records(6, 1.0, 2.0, &RngStream::new(900, 1)).unwrap();
    let m = 20_000;
    let draws = sample_pivotal(&s1, &s2, PivotalKind::Ratio, m, 31).unwrap();
    let (oracle_median, sorted) = straight_line_median(s1.values(), s2.values(), m, 99);
    // density at the median from the replica's central order statistics
    let q = |p: f64| sorted[(p * m as f64) as usize];
    let f_med = 0.1 / (q(0.55) - q(0.45));
    let se = (0.25 / m as f64).sqrt() / f_med;
    let diff = (draws.median() - oracle_median).abs();
    assert!(diff < 3.0 * std::f64::consts::SQRT_2 * se, "diff {diff}, se {se}");
}

#[test]
fn shape_pivot_quantiles_do_not_shift_with_scale() {
    let quantiles = |alpha: f64| {
        let s = gen_weibull_records(5, alpha, 1.5, &RngStream::new(3, 3)).unwrap();
        let d = sample_shape_pivotal(&s, 2000, 8).unwrap();
        let mut v = d.values().to_vec();
        v.sort_by(f64::total_cmp);
        [v[100], v[1000], v[1900]]
    };
    let base = quantiles(1.0);
    for alpha in [0.1, 10.0] {
        let q = quantiles(alpha);
        for (a, b) in q.iter().zip(&base) {
            assert!((a - b).abs() <= 1e-12 * b, "{a} vs {b}");
        }
    }
}

#[test]
fn shape_interval_covers_at_nominal_rate() {
    // The single-shape pivot interval is exact; check coverage roughly.
    let reps = 300;
    let mut covered = 0;
    for l in 0..reps {
        let s = gen_weibull_records(5, 2.0, 1.3, &RngStream::new(12, l)).unwrap();
        let d = sample_shape_pivotal(&s, 400, 1000 + l).unwrap();
        if gci_percentile(&d, 0.1).unwrap().strictly_contains(1.3) {
            covered += 1;
        }
    }
    let c = covered as f64 / reps as f64;
    assert!((c - 0.9).abs() < 4.0 * (0.09f64 / reps as f64).sqrt(), "coverage {c}");
}

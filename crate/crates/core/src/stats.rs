//! Stylized-fact statistics over simulated price paths.
//!
//! Returns are non-overlapping log returns sampled every `interval` ticks
//! over the post-warm-up window. Fat tails show up as positive excess
//! kurtosis; volatility clustering as positive autocorrelation of squared
//! returns at short lags. Batch reports average these statistics over many
//! independent-seed runs.

use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::MarketConfig;
use crate::error::{Error, Result};
use crate::evolve::run_with_pool;
use crate::market::run_simulation;
use crate::orderbook::Tick;
use crate::price::Price;

/// Reference magnitudes this model family is known to reproduce; reported
/// next to measured values for comparison, never used as a gate.
pub const REFERENCE_STD_RETURNS: f64 = 1.03e-4;
pub const REFERENCE_EXCESS_KURTOSIS: f64 = 11.54;
pub const REFERENCE_ACF_SQ: [f64; 5] = [0.081, 0.041, 0.032, 0.047, 0.018];

/// Non-overlapping log returns.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    values: Vec<f64>,
}

impl ReturnSeries {
    pub fn from_values(values: Vec<f64>) -> ReturnSeries {
        ReturnSeries { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sample standard deviation (n - 1 denominator).
    pub fn std_dev(&self) -> f64 {
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let ss = self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        (ss / (n - 1.0)).sqrt()
    }
}

/// Log returns between consecutive sample points `window.start + k*interval`
/// within the half-open window.
///
/// Windows that end inside the warm-up phase are rejected: warm-up prices
/// are mechanically pinned near the fundamental and would contaminate any
/// variance estimate.
pub fn compute_returns(
    mid_series: &[Price],
    interval: Tick,
    window: Range<Tick>,
    warmup_end: Tick,
) -> Result<ReturnSeries> {
    if interval < 1 {
        return Err(Error::Config("return interval must be at least 1".into()));
    }
    let last_tick = (mid_series.len() - 1) as Tick;
    if window.start >= window.end || window.end > last_tick + 1 {
        return Err(Error::Config(format!(
            "window {}..{} outside recorded ticks 0..={last_tick}",
            window.start, window.end
        )));
    }
    if window.end <= warmup_end {
        return Err(Error::Config(format!(
            "window {}..{} lies entirely within the warm-up phase (through tick {warmup_end})",
            window.start, window.end
        )));
    }
    let points: Vec<f64> = (0..)
        .map(|k| window.start + k * interval)
        .take_while(|&t| t < window.end)
        .map(|t| mid_series[t as usize].as_f64())
        .collect();
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "window {}..{} at interval {interval} yields fewer than 2 sample points",
            window.start, window.end
        )));
    }
    let values = points.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    Ok(ReturnSeries { values })
}

/// Excess kurtosis from population central moments: m4 / m2^2 - 3.
pub fn excess_kurtosis(series: &ReturnSeries) -> Result<f64> {
    let x = &series.values;
    if x.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "kurtosis needs at least 4 observations, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    if m2 == 0.0 {
        return Err(Error::DegenerateSeries("zero variance in return series".into()));
    }
    Ok(m4 / (m2 * m2) - 3.0)
}

/// Sample autocorrelation of the squared series at lags 1..=max_lag.
pub fn acf_squared(series: &ReturnSeries, max_lag: usize) -> Result<Vec<f64>> {
    let x = &series.values;
    if x.len() <= max_lag + 1 {
        return Err(Error::InsufficientData(format!(
            "autocorrelation at lag {max_lag} needs more than {} observations, got {}",
            max_lag + 1,
            x.len()
        )));
    }
    let y: Vec<f64> = x.iter().map(|v| v * v).collect();
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    let denom = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    if denom == 0.0 {
        return Err(Error::DegenerateSeries("zero variance in squared returns".into()));
    }
    Ok((1..=max_lag)
        .map(|lag| {
            let num: f64 =
                (0..n - lag).map(|i| (y[i] - mean) * (y[i + lag] - mean)).sum();
            num / denom
        })
        .collect())
}

/// Statistics of a single run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunStats {
    pub std_returns: f64,
    pub excess_kurtosis: f64,
    pub acf_sq: [f64; 5],
}

/// Statistics of one no-trader run under the post-warm-up window.
pub fn run_stats(cfg: &MarketConfig, seed: u64) -> Result<RunStats> {
    let record = run_simulation(cfg, seed, None)?;
    let returns = compute_returns(&record.mid_series, 100, cfg.t_c..cfg.t_e, cfg.t_c)?;
    let acf = acf_squared(&returns, 5)?;
    Ok(RunStats {
        std_returns: returns.std_dev(),
        excess_kurtosis: excess_kurtosis(&returns)?,
        acf_sq: [acf[0], acf[1], acf[2], acf[3], acf[4]],
    })
}

/// Averages of per-run statistics over a batch of seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StylizedReport {
    pub std_returns: f64,
    pub excess_kurtosis: f64,
    pub acf_sq: [f64; 5],
    /// Number of runs included in the averages.
    pub n_runs: usize,
    /// Seeds whose run was degenerate, with the reason; excluded from the
    /// averages but never silently dropped.
    pub excluded: Vec<ExcludedRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcludedRun {
    pub seed: u64,
    pub reason: String,
}

/// Combines per-seed results into a report. Degenerate runs are excluded
/// and recorded; simulation-level failures still abort.
pub fn aggregate_run_stats(results: Vec<(u64, Result<RunStats>)>) -> Result<StylizedReport> {
    let mut included = Vec::new();
    let mut excluded = Vec::new();
    for (seed, result) in results {
        match result {
            Ok(stats) => included.push(stats),
            Err(e @ (Error::DegenerateSeries(_) | Error::InsufficientData(_))) => {
                excluded.push(ExcludedRun { seed, reason: e.to_string() });
            }
            Err(other) => return Err(other),
        }
    }
    if included.is_empty() {
        return Err(Error::DegenerateSeries("every run in the batch was degenerate".into()));
    }
    let n = included.len() as f64;
    let mut acf_sq = [0.0; 5];
    for stats in &included {
        for (acc, v) in acf_sq.iter_mut().zip(stats.acf_sq) {
            *acc += v / n;
        }
    }
    Ok(StylizedReport {
        std_returns: included.iter().map(|s| s.std_returns).sum::<f64>() / n,
        excess_kurtosis: included.iter().map(|s| s.excess_kurtosis).sum::<f64>() / n,
        acf_sq,
        n_runs: included.len(),
        excluded,
    })
}

/// Runs the no-trader simulation for every seed and averages the
/// statistics.
pub fn stylized_report(
    cfg: &MarketConfig,
    seeds: &[u64],
    workers: Option<usize>,
) -> Result<StylizedReport> {
    if seeds.is_empty() {
        return Err(Error::InsufficientData("at least one seed is required".into()));
    }
    cfg.validate()?;
    let results: Vec<(u64, Result<RunStats>)> = run_with_pool(workers, || {
        seeds.par_iter().map(|&seed| (seed, run_stats(cfg, seed))).collect()
    });
    aggregate_run_stats(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn p(ticks: i64) -> Price {
        Price::from_ticks(ticks).unwrap()
    }

    #[test]
    fn constant_series_gives_zero_returns() {
        let series = vec![p(1_000_000); 1001];
        let r = compute_returns(&series, 100, 0..1000, 0).unwrap();
        assert!(r.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn doubling_series_gives_ln_two() {
        let mut series = Vec::new();
        let mut v: i64 = 1;
        for _ in 0..=8 {
            for _ in 0..100 {
                series.push(p(v));
            }
            v *= 2;
        }
        // Sample points every 100 ticks catch each doubling exactly.
        let r = compute_returns(&series[..801], 100, 0..801, 0).unwrap();
        assert_eq!(r.len(), 8);
        for v in r.values() {
            assert!((v - 2f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn window_length_arithmetic() {
        let series = vec![p(1_000_000); 10_001];
        let r = compute_returns(&series, 100, 2000..10_000, 2000).unwrap();
        assert_eq!(r.len(), 79);
    }

    #[test]
    fn degenerate_windows_rejected() {
        let series = vec![p(1_000_000); 10_001];
        assert!(matches!(
            compute_returns(&series, 100, 2000..2050, 2000),
            Err(Error::Config(_)) | Err(Error::InsufficientData(_))
        ));
        // Window entirely inside warm-up.
        assert!(matches!(
            compute_returns(&series, 100, 0..1500, 2000),
            Err(Error::Config(_))
        ));
        // Window beyond the recorded series.
        assert!(compute_returns(&series, 100, 2000..far(), 2000).is_err());
    }

    fn far() -> Tick {
        20_000
    }

    #[test]
    fn kurtosis_of_two_point_distribution() {
        // Symmetric +-1 sample: m2 = 1, m4 = 1, excess = -2 exactly.
        let r = ReturnSeries::from_values(vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
        assert_eq!(excess_kurtosis(&r).unwrap(), -2.0);
    }

    #[test]
    fn kurtosis_of_gaussian_sample_is_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(12345);
        let values: Vec<f64> =
            (0..1_000_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let k = excess_kurtosis(&ReturnSeries::from_values(values)).unwrap();
        assert!(k.abs() < 0.05, "gaussian excess kurtosis came out {k}");
    }

    #[test]
    fn kurtosis_rejects_degenerate_input() {
        let r = ReturnSeries::from_values(vec![3.0; 10]);
        assert!(matches!(excess_kurtosis(&r), Err(Error::DegenerateSeries(_))));
        let r = ReturnSeries::from_values(vec![1.0, 2.0]);
        assert!(matches!(excess_kurtosis(&r), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn kurtosis_is_affine_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let values: Vec<f64> = (0..5_000).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
        let base = excess_kurtosis(&ReturnSeries::from_values(values.clone())).unwrap();
        for (a, b) in [(2.5, 0.0), (-3.0, 7.0), (0.01, -4.0)] {
            let transformed: Vec<f64> = values.iter().map(|v| a * v + b).collect();
            let k = excess_kurtosis(&ReturnSeries::from_values(transformed)).unwrap();
            assert!((k - base).abs() < 1e-6, "affine ({a}, {b}) moved kurtosis {base} -> {k}");
        }
    }

    #[test]
    fn acf_of_white_noise_is_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let values: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n = values.len() as f64;
        let acf = acf_squared(&ReturnSeries::from_values(values), 5).unwrap();
        for (lag, v) in acf.iter().enumerate() {
            assert!(
                v.abs() < 3.0 / n.sqrt(),
                "white-noise acf at lag {} is {v}",
                lag + 1
            );
        }
    }

    #[test]
    fn acf_detects_volatility_regimes() {
        // Alternating volatility regimes: blocks of large and small
        // magnitudes make squared values positively autocorrelated at lag 1.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut values = Vec::new();
        for block in 0..200 {
            let scale = if block % 2 == 0 { 3.0 } else { 0.3 };
            for _ in 0..10 {
                let z: f64 = StandardNormal.sample(&mut rng);
                values.push(scale * z);
            }
        }
        let acf = acf_squared(&ReturnSeries::from_values(values), 5).unwrap();
        assert!(acf[0] > 0.1, "regime fixture should cluster, got {acf:?}");
        for v in &acf {
            assert!((-1.0..=1.0).contains(v));
        }
    }

    #[test]
    fn acf_rejects_degenerate_and_short_input() {
        let r = ReturnSeries::from_values(vec![2.0; 100]);
        assert!(matches!(acf_squared(&r, 5), Err(Error::DegenerateSeries(_))));
        let r = ReturnSeries::from_values(vec![1.0, 2.0, 3.0]);
        assert!(matches!(acf_squared(&r, 5), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn aggregation_excludes_degenerate_runs_loudly() {
        let good = RunStats { std_returns: 1e-4, excess_kurtosis: 5.0, acf_sq: [0.1; 5] };
        let results = vec![
            (1u64, Ok(good)),
            (2u64, Err(Error::DegenerateSeries("zero variance".into()))),
            (3u64, Ok(good)),
        ];
        let report = aggregate_run_stats(results).unwrap();
        assert_eq!(report.n_runs, 2);
        assert_eq!(report.excluded.len(), 1);
        assert_eq!(report.excluded[0].seed, 2);
        assert!((report.excess_kurtosis - 5.0).abs() < 1e-12);
        // A non-statistical failure aborts instead of being swallowed.
        let results = vec![(1u64, Ok(good)), (2u64, Err(Error::Config("bad".into())))];
        assert!(aggregate_run_stats(results).is_err());
    }

    #[test]
    fn single_seed_report_equals_direct_stats() {
        let cfg = MarketConfig {
            n: 30,
            t_c: 300,
            t_e: 1500,
            delta_t: 10,
            tau_max: 100,
            ..MarketConfig::default()
        };
        let direct = run_stats(&cfg, 5).unwrap();
        let report = stylized_report(&cfg, &[5], None).unwrap();
        assert_eq!(report.n_runs, 1);
        assert_eq!(report.std_returns, direct.std_returns);
        assert_eq!(report.excess_kurtosis, direct.excess_kurtosis);
        assert_eq!(report.acf_sq, direct.acf_sq);
    }
}

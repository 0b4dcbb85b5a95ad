// Temporary exploration harness; removed before release.
use std::time::Instant;

use evomarket::config::MarketConfig;
use evomarket::market::run_simulation;
use evomarket::stats::{run_stats, stylized_report};

fn main() {
    let cfg = MarketConfig::default();

    // Throughput, single core.
    let start = Instant::now();
    let k = 20;
    for seed in 0..k {
        let r = run_simulation(&cfg, seed, None).unwrap();
        assert!(!r.mid_series.is_empty());
    }
    let per_sim = start.elapsed().as_secs_f64() / k as f64;
    println!("per-sim: {:.4}s -> {:.0} sims/s/core", per_sim, 1.0 / per_sim);

    // One run's stats.
    for seed in [1u64, 2, 3] {
        let s = run_stats(&cfg, seed).unwrap();
        println!(
            "seed {seed}: std={:.6e} kurt={:.3} acf={:?}",
            s.std_returns, s.excess_kurtosis, s.acf_sq
        );
    }

    // Batch over 100 seeds.
    let seeds: Vec<u64> = (1..=100).collect();
    let start = Instant::now();
    let report = stylized_report(&cfg, &seeds, None).unwrap();
    println!(
        "batch(100): std={:.6e} kurt={:.3} acf={:?} excluded={} in {:.1}s",
        report.std_returns,
        report.excess_kurtosis,
        report.acf_sq,
        report.excluded.len(),
        start.elapsed().as_secs_f64()
    );

    // Price path snapshot: a few mids along the way.
    let r = run_simulation(&cfg, 1, None).unwrap();
    for t in [1usize, 100, 1000, 2000, 2500, 4000, 6000, 8000, 10_000] {
        println!("mid[{t}] = {}", r.mid_series[t].ticks());
    }
    println!(
        "max |mid - pf| = {} ticks, trades = {}",
        r.max_abs_deviation_ticks(cfg.p_f_price().unwrap()),
        r.trades.len()
    );
}

//! Backtest evaluation: genes scored against a frozen no-impact price path.
//!
//! The baseline is one simulation without the algorithmic trader; its best
//! quotes at every would-be action slot are captured once. A backtested
//! gene then buys at the recorded ask and sells at the recorded bid, so its
//! trades cannot move prices — the only difference from live evaluation.

use crate::agents::draw_profiles;
use crate::config::{GaConfig, MarketConfig};
use crate::error::{Error, Result};
use crate::evolve::{GaOutcome, GaRunner};
use crate::market::{run_simulation_captured, Action, Gene, SimOptions, SlotQuote};
use crate::price::Price;

/// Frozen per-slot quotes and the full mid series of a no-trader run.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineQuotes {
    slots: Vec<SlotQuote>,
    mid_series: Vec<Price>,
    seed: u64,
    fundamental: Price,
}

impl BaselineQuotes {
    pub fn slots(&self) -> &[SlotQuote] {
        &self.slots
    }

    pub fn mid_series(&self) -> &[Price] {
        &self.mid_series
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fundamental(&self) -> Price {
        self.fundamental
    }
}

/// Runs the no-trader simulation for `seed` and captures the quotes at
/// every action slot. A slot with an empty book side stores an absent
/// quote for that side.
pub fn record_baseline(cfg: &MarketConfig, seed: u64) -> Result<BaselineQuotes> {
    let profiles = draw_profiles(seed, cfg);
    let (record, capture) = run_simulation_captured(
        &profiles,
        cfg,
        None,
        SimOptions { capture_slot_quotes: true, capture_draws: false },
    )?;
    Ok(BaselineQuotes {
        slots: capture.slot_quotes,
        mid_series: record.mid_series,
        seed,
        fundamental: cfg.p_f_price()?,
    })
}

/// Profit of a gene executed against the frozen baseline, with the open
/// position marked at the fundamental. Slots with an absent opposite quote
/// are no-ops, mirroring the live market-order rule.
pub fn evaluate_gene_backtest(gene: &Gene, baseline: &BaselineQuotes, fundamental: Price) -> Result<i64> {
    if gene.len() != baseline.slots.len() {
        return Err(Error::GeneLength { expected: baseline.slots.len(), got: gene.len() });
    }
    let mut cash = 0i64;
    let mut position = 0i64;
    for (action, quote) in gene.actions().iter().zip(&baseline.slots) {
        match action {
            Action::Buy => {
                if let Some(ask) = quote.best_ask {
                    cash -= ask.ticks();
                    position += 1;
                }
            }
            Action::Sell => {
                if let Some(bid) = quote.best_bid {
                    cash += bid.ticks();
                    position -= 1;
                }
            }
            Action::Hold => {}
        }
    }
    Ok(cash + position * fundamental.ticks())
}

/// Full optimizer run under backtest fitness. The baseline is recorded once
/// from the same master seed a live run would use and reused for every gene.
pub fn run_ga_backtest(
    ga: &GaConfig,
    market: &MarketConfig,
    seed: u64,
    workers: Option<usize>,
) -> Result<GaOutcome> {
    market.validate()?;
    let baseline = record_baseline(market, seed)?;
    let fundamental = baseline.fundamental();
    let mut runner = GaRunner::new(ga.clone(), market.n_t(), workers, |g: &Gene| {
        evaluate_gene_backtest(g, &baseline, fundamental)
    })?;
    runner.run_to(ga.generations)?;
    runner.into_outcome()
}

/// The best profit any gene can reach against a given baseline: buy every
/// slot whose ask is below the fundamental, sell every slot whose bid is
/// above it. Slots are independent in a backtest, so this bound is exact.
pub fn backtest_optimum(baseline: &BaselineQuotes) -> i64 {
    let f = baseline.fundamental().ticks();
    baseline
        .slots
        .iter()
        .map(|q| {
            let buy_gain = q.best_ask.map_or(0, |a| f - a.ticks()).max(0);
            let sell_gain = q.best_bid.map_or(0, |b| b.ticks() - f).max(0);
            buy_gain.max(sell_gain)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::run_simulation;
    use crate::orderbook::Tick;

    fn micro_cfg() -> MarketConfig {
        MarketConfig {
            n: 5,
            t_c: 20,
            t_e: 60,
            delta_t: 4,
            tau_max: 10,
            ..MarketConfig::default()
        }
    }

    fn p(ticks: i64) -> Price {
        Price::from_ticks(ticks).unwrap()
    }

    fn quote(slot: u32, bid: Option<i64>, ask: Option<i64>) -> SlotQuote {
        SlotQuote {
            slot,
            tick: slot as Tick * 10,
            best_bid: bid.map(p),
            best_ask: ask.map(p),
            mid: p(1_000_000),
        }
    }

    fn hand_baseline(slots: Vec<SlotQuote>) -> BaselineQuotes {
        BaselineQuotes { slots, mid_series: vec![p(1_000_000)], seed: 0, fundamental: p(1_000_000) }
    }

    #[test]
    fn baseline_matches_no_trader_run() {
        let cfg = micro_cfg();
        let baseline = record_baseline(&cfg, 17).unwrap();
        let record = run_simulation(&cfg, 17, None).unwrap();
        assert_eq!(baseline.mid_series(), &record.mid_series[..]);
        assert_eq!(baseline.slots().len(), cfg.n_t());
        let again = record_baseline(&cfg, 17).unwrap();
        assert_eq!(baseline, again);
    }

    #[test]
    fn single_buy_profit_is_fundamental_minus_ask() {
        let baseline = hand_baseline(vec![
            quote(1, Some(989_000), Some(990_000)),
            quote(2, Some(1_000_500), Some(1_001_000)),
        ]);
        let gene = Gene::parse("BN").unwrap();
        let profit = evaluate_gene_backtest(&gene, &baseline, p(1_000_000)).unwrap();
        assert_eq!(profit, 10_000); // bought 990_000, marked at 1_000_000
    }

    #[test]
    fn all_hold_is_zero_and_reevaluation_is_identical() {
        let cfg = micro_cfg();
        let baseline = record_baseline(&cfg, 8).unwrap();
        let fundamental = baseline.fundamental();
        let hold = Gene::all_hold(cfg.n_t());
        assert_eq!(evaluate_gene_backtest(&hold, &baseline, fundamental).unwrap(), 0);
        let mut actions = vec![Action::Hold; cfg.n_t()];
        actions[1] = Action::Buy;
        actions[6] = Action::Sell;
        let gene = Gene::from_actions(actions);
        let before = baseline.clone();
        let a = evaluate_gene_backtest(&gene, &baseline, fundamental).unwrap();
        let b = evaluate_gene_backtest(&gene, &baseline, fundamental).unwrap();
        assert_eq!(a, b);
        assert_eq!(baseline, before, "evaluation must not touch the baseline");
    }

    #[test]
    fn absent_quotes_are_no_ops() {
        let baseline = hand_baseline(vec![
            quote(1, None, None),
            quote(2, Some(1_002_000), None),
        ]);
        let fundamental = p(1_000_000);
        assert_eq!(evaluate_gene_backtest(&Gene::parse("BB").unwrap(), &baseline, fundamental).unwrap(), 0);
        // Sell hits the bid where present.
        assert_eq!(
            evaluate_gene_backtest(&Gene::parse("SS").unwrap(), &baseline, fundamental).unwrap(),
            2_000 - 0
        );
    }

    #[test]
    fn gene_length_must_match_slots() {
        let baseline = hand_baseline(vec![quote(1, Some(999_000), Some(1_001_000))]);
        let err = evaluate_gene_backtest(&Gene::parse("BS").unwrap(), &baseline, p(1_000_000));
        assert!(matches!(err, Err(Error::GeneLength { expected: 1, got: 2 })));
    }

    #[test]
    fn optimum_bounds_every_gene() {
        let baseline = hand_baseline(vec![
            quote(1, Some(989_000), Some(990_000)),  // buy worth 10_000
            quote(2, Some(1_005_000), Some(1_006_000)), // sell worth 5_000
            quote(3, Some(999_000), Some(1_001_000)),   // nothing worth doing
            quote(4, None, Some(995_000)),              // buy worth 5_000
        ]);
        assert_eq!(backtest_optimum(&baseline), 20_000);
        let best = Gene::parse("BSNB").unwrap();
        assert_eq!(
            evaluate_gene_backtest(&best, &baseline, p(1_000_000)).unwrap(),
            20_000
        );
        let worse = Gene::parse("SBNS").unwrap();
        assert!(evaluate_gene_backtest(&worse, &baseline, p(1_000_000)).unwrap() < 20_000);
    }

    #[test]
    fn ga_backtest_is_monotone_and_bounded_by_optimum() {
        let cfg = micro_cfg();
        let ga = GaConfig {
            population: 16,
            elites: 4,
            crossover_prob: 0.65,
            mutation_prob: 0.2,
            generations: 8,
            ga_seed: 2,
        };
        let outcome = run_ga_backtest(&ga, &cfg, 6, None).unwrap();
        for w in outcome.history.windows(2) {
            assert!(w[1].best_ticks >= w[0].best_ticks);
        }
        let baseline = record_baseline(&cfg, 6).unwrap();
        assert!(outcome.best_fitness <= backtest_optimum(&baseline));
    }
}

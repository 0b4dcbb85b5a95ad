//! Artificial financial market with an evolving algorithmic trader.
//!
//! A continuous double auction populated by heterogeneous normal agents
//! forms prices that show the usual stylized facts (fat-tailed returns,
//! volatility clustering). A genetic algorithm evolves an action sequence
//! for an additional trader whose market orders move those prices, and a
//! backtest mode evaluates the same sequences against a frozen no-impact
//! price path for comparison.
//!
//! Everything is deterministic: agents, the market and the optimizer draw
//! from independent seeded streams, so a (config, seed, gene) triple always
//! reproduces the same run, regardless of thread count.

pub mod agents;
pub mod backtest;
pub mod config;
pub mod error;
pub mod evolve;
pub mod export;
pub mod market;
pub mod orderbook;
pub mod price;
pub mod rng;
pub mod stats;

pub use agents::{draw_profiles, NaParams, NaProfile, PriceHistory, ProfileSet};
pub use backtest::{evaluate_gene_backtest, record_baseline, run_ga_backtest, BaselineQuotes};
pub use config::{config_hash, GaConfig, MarketConfig};
pub use error::{Error, Result};
pub use evolve::{crossover, run_ga, GaRunner, GaState, GenerationStats, Population};
pub use market::{
    aggregate_volume, evaluate_gene, run_simulation, Action, AiaState, Gene, MarketRecord,
    SlotQuote, Trade, VolumeBucket,
};
pub use orderbook::{AgentId, Book, Fill, Order, Tick, AIA_OWNER};
pub use price::{Price, PriceScale, Side};
pub use stats::{
    acf_squared, compute_returns, excess_kurtosis, stylized_report, ReturnSeries, StylizedReport,
};

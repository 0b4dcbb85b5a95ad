//! The simulation loop.
//!
//! Ticks run from 1 to `t_e`. At each tick the scheduled normal agent acts
//! (expiry sweep, then its limit order); after warm-up, every `delta_t`
//! ticks the algorithmic trader additionally executes one gene action as a
//! market order at the tick boundary, without consuming a tick of its own.
//! The per-tick mid is recorded after all activity at the tick.

use serde::{Deserialize, Serialize};

use crate::agents::{draw_profiles, PriceHistory, ProfileSet};
use crate::config::MarketConfig;
use crate::error::{Error, Result};
use crate::orderbook::{AgentId, Book, Fill, Tick, AIA_OWNER};
use crate::price::{Price, Side};

/// One action of the algorithmic trader.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Buy,
    Sell,
    /// No action; serialized as `N`.
    Hold,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::Buy, Action::Sell, Action::Hold];

    pub fn as_char(self) -> char {
        match self {
            Action::Buy => 'B',
            Action::Sell => 'S',
            Action::Hold => 'N',
        }
    }

    pub fn from_char(c: char) -> Option<Action> {
        match c {
            'B' => Some(Action::Buy),
            'S' => Some(Action::Sell),
            'N' => Some(Action::Hold),
            _ => None,
        }
    }
}

/// A fixed-length action sequence; the unit the optimizer evolves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gene {
    actions: Vec<Action>,
}

impl Gene {
    pub fn from_actions(actions: Vec<Action>) -> Gene {
        Gene { actions }
    }

    /// All-hold gene: the trader never touches the market.
    pub fn all_hold(len: usize) -> Gene {
        Gene { actions: vec![Action::Hold; len] }
    }

    /// Parses a `B`/`S`/`N` string, reporting the position of the first
    /// offending character.
    pub fn parse(s: &str) -> Result<Gene> {
        let mut actions = Vec::with_capacity(s.len());
        for (pos, ch) in s.chars().enumerate() {
            let action = Action::from_char(ch).ok_or(Error::GeneChar { pos, ch })?;
            actions.push(action);
        }
        Ok(Gene { actions })
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn actions_mut(&mut self) -> &mut [Action] {
        &mut self.actions
    }
}

impl std::fmt::Display for Gene {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for a in &self.actions {
            write!(f, "{}", a.as_char())?;
        }
        Ok(())
    }
}

/// One of the trader's executions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AiaFill {
    pub tick: Tick,
    pub side: Side,
    pub price: Price,
}

/// The trader's running account. Cash starts at zero and may go negative
/// without bound; positions are unlimited in both directions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AiaState {
    pub cash_ticks: i64,
    pub position: i64,
    pub fills: Vec<AiaFill>,
}

impl AiaState {
    fn apply(&mut self, tick: Tick, side: Side, price: Price) {
        match side {
            Side::Buy => {
                self.cash_ticks -= price.ticks();
                self.position += 1;
            }
            Side::Sell => {
                self.cash_ticks += price.ticks();
                self.position -= 1;
            }
        }
        self.fills.push(AiaFill { tick, side, price });
    }

    /// Profit with the open position marked at the fundamental value.
    pub fn profit_ticks(&self, fundamental: Price) -> i64 {
        self.cash_ticks + self.position * fundamental.ticks()
    }
}

/// One executed trade, for the exportable trade log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trade {
    pub tick: Tick,
    pub taker_side: Side,
    pub price: Price,
    pub maker_owner: AgentId,
    pub taker_owner: AgentId,
}

impl Trade {
    fn from_fill(fill: Fill, taker_owner: AgentId) -> Trade {
        Trade {
            tick: fill.tick,
            taker_side: fill.taker_side,
            price: fill.price,
            maker_owner: fill.maker_owner,
            taker_owner,
        }
    }
}

/// Full trace of one simulation run.
#[derive(Debug, Clone)]
pub struct MarketRecord {
    /// Mid per tick; index 0 is the fundamental, index t the mid after all
    /// activity at tick t.
    pub mid_series: Vec<Price>,
    pub aia: AiaState,
    pub profit_ticks: i64,
    pub trades: Vec<Trade>,
    pub seed: u64,
    pub gene: Option<Gene>,
}

impl MarketRecord {
    /// Largest absolute mid deviation from the fundamental, in ticks,
    /// over ticks 1..=t_e.
    pub fn max_abs_deviation_ticks(&self, fundamental: Price) -> i64 {
        self.mid_series[1..]
            .iter()
            .map(|m| (m.ticks() - fundamental.ticks()).abs())
            .max()
            .unwrap_or(0)
    }
}

/// Best quotes at one trader action slot, captured immediately before the
/// trader would act.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotQuote {
    /// 1-based action slot index.
    pub slot: u32,
    pub tick: Tick,
    pub best_bid: Option<Price>,
    pub best_ask: Option<Price>,
    pub mid: Price,
}

/// One stochastic agent decision, for reproducibility audits: the exact
/// random values the scheduled agent consumed at a tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawRecord {
    pub tick: Tick,
    pub agent_id: AgentId,
    pub noise: f64,
    pub raw_price_ticks: f64,
}

/// Optional instrumentation for a run.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimOptions {
    pub capture_slot_quotes: bool,
    pub capture_draws: bool,
}

/// Instrumentation output.
#[derive(Debug, Clone, Default)]
pub struct SimCapture {
    pub slot_quotes: Vec<SlotQuote>,
    pub draws: Vec<DrawRecord>,
}

/// Runs one simulation, drawing a fresh agent population from `seed`.
///
/// Identical (config, seed, gene) inputs produce a bit-identical record.
pub fn run_simulation(cfg: &MarketConfig, seed: u64, gene: Option<&Gene>) -> Result<MarketRecord> {
    let profiles = draw_profiles(seed, cfg);
    run_simulation_with(&profiles, cfg, gene)
}

/// Runs one simulation on a pre-drawn agent population. The population is
/// cloned, so a template can serve any number of evaluations.
pub fn run_simulation_with(
    profiles: &ProfileSet,
    cfg: &MarketConfig,
    gene: Option<&Gene>,
) -> Result<MarketRecord> {
    let (record, _) = run_simulation_captured(profiles, cfg, gene, SimOptions::default())?;
    Ok(record)
}

/// Runs one simulation with instrumentation.
pub fn run_simulation_captured(
    profiles: &ProfileSet,
    cfg: &MarketConfig,
    gene: Option<&Gene>,
    options: SimOptions,
) -> Result<(MarketRecord, SimCapture)> {
    cfg.validate()?;
    let n_t = cfg.n_t();
    if let Some(g) = gene {
        if g.len() != n_t {
            return Err(Error::GeneLength { expected: n_t, got: g.len() });
        }
    }

    let fundamental = cfg.p_f_price()?;
    let mut agents = profiles.clone();
    let mut book = Book::new(fundamental);
    let mut hist = PriceHistory::new(fundamental, cfg.t_e as usize);
    let mut aia = AiaState::default();
    let mut trades = Vec::new();
    let mut capture = SimCapture::default();

    for t in 1..=cfg.t_e {
        book.cancel_expired(t, cfg.t_c);

        // The scheduled agent's turn, anchored on the post-sweep mid.
        let anchor = book.mid_price();
        let agent_idx = ((t - 1) % cfg.n) as usize;
        let owner = agent_idx as AgentId + 1;
        let intent = agents.get_mut(agent_idx).decide_order(&hist, t, anchor, cfg)?;
        if options.capture_draws {
            capture.draws.push(DrawRecord {
                tick: t,
                agent_id: owner,
                noise: intent.noise,
                raw_price_ticks: intent.raw_price_ticks,
            });
        }
        let (_, fill) = book.submit_limit(intent.side, intent.price, owner, t);
        if let Some(f) = fill {
            trades.push(Trade::from_fill(f, owner));
        }

        // Trader action slot at the tick boundary.
        if t > cfg.t_c && (t - cfg.t_c) % cfg.delta_t == 0 {
            let slot = (t - cfg.t_c) / cfg.delta_t;
            if options.capture_slot_quotes {
                capture.slot_quotes.push(SlotQuote {
                    slot,
                    tick: t,
                    best_bid: book.best_bid(),
                    best_ask: book.best_ask(),
                    mid: book.mid_price(),
                });
            }
            if let Some(g) = gene {
                let side = match g.actions()[slot as usize - 1] {
                    Action::Buy => Some(Side::Buy),
                    Action::Sell => Some(Side::Sell),
                    Action::Hold => None,
                };
                if let Some(side) = side {
                    // An empty opposite side is a recorded no-op.
                    if let Some(f) = book.submit_market(side, t) {
                        aia.apply(t, side, f.price);
                        trades.push(Trade::from_fill(f, AIA_OWNER));
                    }
                }
            }
        }

        hist.push(book.mid_price());
    }

    let profit_ticks = aia.profit_ticks(fundamental);
    let record = MarketRecord {
        mid_series: hist.series().to_vec(),
        aia,
        profit_ticks,
        trades,
        seed: profiles.master_seed(),
        gene: gene.cloned(),
    };
    Ok((record, capture))
}

/// Profit of one gene under full market impact; the optimizer's fitness.
pub fn evaluate_gene(cfg: &MarketConfig, seed: u64, gene: &Gene) -> Result<i64> {
    let profiles = draw_profiles(seed, cfg);
    evaluate_gene_with(&profiles, cfg, gene)
}

/// Hot-path variant on a pre-drawn population template.
pub fn evaluate_gene_with(profiles: &ProfileSet, cfg: &MarketConfig, gene: &Gene) -> Result<i64> {
    Ok(run_simulation_with(profiles, cfg, Some(gene))?.profit_ticks)
}

/// Net trader volume per tick bucket: buys minus sells, positive = net
/// buying.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VolumeBucket {
    pub start_tick: Tick,
    pub signed_volume: i64,
}

/// Aggregates the trader's fills into `bucket`-tick buckets covering the
/// whole run. A fill exactly at `t_e` counts toward the final bucket.
pub fn aggregate_volume(record: &MarketRecord, bucket: Tick) -> Result<Vec<VolumeBucket>> {
    if bucket == 0 {
        return Err(Error::ZeroBucket);
    }
    let t_e = (record.mid_series.len() - 1) as Tick;
    let n_buckets = (t_e as usize).div_ceil(bucket as usize).max(1);
    let mut volumes = vec![0i64; n_buckets];
    for fill in &record.aia.fills {
        let idx = ((fill.tick / bucket) as usize).min(n_buckets - 1);
        volumes[idx] += match fill.side {
            Side::Buy => 1,
            Side::Sell => -1,
        };
    }
    Ok(volumes
        .into_iter()
        .enumerate()
        .map(|(i, v)| VolumeBucket { start_tick: i as Tick * bucket, signed_volume: v })
        .collect())
}

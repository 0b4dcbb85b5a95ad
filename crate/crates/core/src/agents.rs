//! Normal agents: heterogeneous background investors.
//!
//! Each agent forms an expected return from three weighted terms —
//! reversion toward the fundamental value, momentum over its own lookback
//! lag, and private Gaussian noise — exponentiates it into an expected
//! price, draws an order price uniformly around that expectation, and buys
//! when the expectation exceeds the drawn price. During warm-up the
//! comparison uses the fundamental value instead, which fills the book with
//! resting orders around it.
//!
//! Every agent owns a private random stream derived from (master seed,
//! agent id). An agent's draws therefore depend only on how often it has
//! acted, never on other agents or on the algorithmic trader, which keeps
//! the agent population bit-identical across every gene evaluation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::config::MarketConfig;
use crate::error::Result;
use crate::orderbook::Tick;
use crate::price::{Price, Side};
use crate::rng::{stream, DOMAIN_AGENT};

/// An agent's drawn strategy parameters. Immutable after creation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NaParams {
    pub agent_id: u32,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub tau: u32,
}

/// An agent: parameters plus its private random stream.
#[derive(Debug, Clone)]
pub struct NaProfile {
    params: NaParams,
    stream: ChaCha8Rng,
    noise: Normal<f64>,
}

/// What an agent decided at its turn. `raw_price_ticks` and `noise` are the
/// stochastic draws behind the decision, kept for reproducibility audits.
#[derive(Debug, Clone, Copy)]
pub struct OrderIntent {
    pub side: Side,
    pub price: Price,
    pub raw_price_ticks: f64,
    pub noise: f64,
}

impl NaProfile {
    /// Draws one agent's parameters from its own stream. A given
    /// (master_seed, agent_id) pair always produces the same profile.
    pub fn draw(master_seed: u64, agent_id: u32, cfg: &MarketConfig) -> NaProfile {
        let mut stream = stream(master_seed, DOMAIN_AGENT, agent_id as u64);
        let w1 = open_uniform(&mut stream, cfg.w1_max);
        let w2 = open_uniform(&mut stream, cfg.w2_max);
        let w3 = open_uniform(&mut stream, cfg.w3_max);
        let tau = stream.gen_range(1..=cfg.tau_max);
        NaProfile {
            params: NaParams { agent_id, w1, w2, w3, tau },
            stream,
            noise: Normal::new(0.0, cfg.sigma_eps).expect("sigma_eps validated non-negative"),
        }
    }

    pub fn params(&self) -> &NaParams {
        &self.params
    }

    /// Number of 128-bit words the stream has produced; draws-consumed
    /// accounting for isolation tests.
    pub fn stream_position(&self) -> u128 {
        self.stream.get_word_pos()
    }

    /// Runs the agent's turn at tick `t`. `anchor` is the mid prevailing at
    /// decision time (after the tick's expiry sweep, before its order);
    /// `hist` holds the stored per-tick mids through `t - 1`.
    ///
    /// Consumes exactly one noise draw and one order-price draw from the
    /// agent's stream regardless of market state.
    pub fn decide_order(
        &mut self,
        hist: &PriceHistory,
        t: Tick,
        anchor: Price,
        cfg: &MarketConfig,
    ) -> Result<OrderIntent> {
        let noise = self.noise.sample(&mut self.stream);
        let r = expected_return(&self.params, hist, t, noise);
        let expected = expected_price(anchor, r);
        let half_band = cfg.p_d_ticks();
        let raw = self.stream.gen_range(expected - half_band..expected + half_band);
        let side = choose_side(expected, raw, t < cfg.t_c, hist.fundamental());
        let price = Price::round_ticks(raw, side)?;
        Ok(OrderIntent { side, price, raw_price_ticks: raw, noise })
    }
}

/// Buy/sell rule: buy when the expectation strictly exceeds the drawn
/// order price; during warm-up, compare against the fundamental instead.
/// Exact ties sell.
pub fn choose_side(expected_ticks: f64, raw_price_ticks: f64, warmup: bool, fundamental: Price) -> Side {
    let reference = if warmup { fundamental.as_f64() } else { expected_ticks };
    if reference > raw_price_ticks {
        Side::Buy
    } else {
        Side::Sell
    }
}

/// Expected return: weighted mix of log-reversion toward the fundamental,
/// log-momentum over the agent's lag, and noise, normalized by the weight
/// sum. The momentum term vanishes while the lagged price would predate the
/// series.
pub fn expected_return(params: &NaParams, hist: &PriceHistory, t: Tick, noise: f64) -> f64 {
    debug_assert!(t >= 1);
    let prev = hist.at(t - 1).as_f64();
    let fundamental_term = (hist.fundamental().as_f64() / prev).ln();
    let momentum_term = if t >= params.tau + 1 {
        (prev / hist.at(t - params.tau - 1).as_f64()).ln()
    } else {
        0.0
    };
    (params.w1 * fundamental_term + params.w2 * momentum_term + params.w3 * noise)
        / (params.w1 + params.w2 + params.w3)
}

/// Expected price in tick units: the decision-time mid scaled by e^r.
pub fn expected_price(anchor: Price, expected_return: f64) -> f64 {
    anchor.as_f64() * expected_return.exp()
}

/// Uniform draw on the open interval (0, max).
fn open_uniform(rng: &mut ChaCha8Rng, max: f64) -> f64 {
    loop {
        let v = rng.gen_range(0.0..max);
        if v > 0.0 {
            return v;
        }
    }
}

/// The full agent population for one master seed.
///
/// Drawn once per seed and cloned per simulation, so every evaluation sees
/// identical agents in their initial state.
#[derive(Debug, Clone)]
pub struct ProfileSet {
    profiles: Vec<NaProfile>,
    master_seed: u64,
}

/// Draws the whole population. Parameters of agent j are a pure function of
/// (master_seed, j).
pub fn draw_profiles(master_seed: u64, cfg: &MarketConfig) -> ProfileSet {
    let profiles = (1..=cfg.n).map(|id| NaProfile::draw(master_seed, id, cfg)).collect();
    ProfileSet { profiles, master_seed }
}

impl ProfileSet {
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn get(&self, idx: usize) -> &NaProfile {
        &self.profiles[idx]
    }

    pub fn get_mut(&mut self, idx: usize) -> &mut NaProfile {
        &mut self.profiles[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = &NaProfile> {
        self.profiles.iter()
    }

    pub fn params(&self) -> Vec<NaParams> {
        self.profiles.iter().map(|p| *p.params()).collect()
    }
}

/// Stored per-tick mid prices. Index 0 holds the fundamental value (the mid
/// quoted before any trading); index t holds the mid recorded at the end of
/// tick t. Append-only.
#[derive(Debug, Clone)]
pub struct PriceHistory {
    series: Vec<Price>,
    fundamental: Price,
}

impl PriceHistory {
    pub fn new(fundamental: Price, capacity_ticks: usize) -> PriceHistory {
        let mut series = Vec::with_capacity(capacity_ticks + 1);
        series.push(fundamental);
        PriceHistory { series, fundamental }
    }

    pub fn push(&mut self, mid: Price) {
        self.series.push(mid);
    }

    pub fn at(&self, t: Tick) -> Price {
        self.series[t as usize]
    }

    /// Ticks recorded so far (excluding the tick-0 fundamental).
    pub fn last_tick(&self) -> Tick {
        (self.series.len() - 1) as Tick
    }

    pub fn fundamental(&self) -> Price {
        self.fundamental
    }

    pub fn series(&self) -> &[Price] {
        &self.series
    }
}

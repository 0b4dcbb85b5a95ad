//! Simulation and optimizer configuration.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::orderbook::Tick;
use crate::price::{Price, PriceScale};

/// Market parameters. `Default` ships the reference configuration used
/// throughout the docs and tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketConfig {
    /// Number of normal agents.
    pub n: u32,
    /// Upper bound of the fundamental-term weight.
    pub w1_max: f64,
    /// Upper bound of the momentum-term weight.
    pub w2_max: f64,
    /// Upper bound of the noise-term weight.
    pub w3_max: f64,
    /// Upper bound of the momentum lookback lag, in ticks.
    pub tau_max: u32,
    /// Standard deviation of the idiosyncratic noise term.
    pub sigma_eps: f64,
    /// Half-width of the order-price band around the expected price.
    pub p_d: f64,
    /// Warm-up length in ticks: order lifetime, and the boundary before
    /// which agents order relative to the fundamental.
    pub t_c: Tick,
    /// Minimum price increment.
    pub delta_p: f64,
    /// Fundamental value; must sit on the tick grid.
    pub p_f: f64,
    /// The algorithmic trader acts every `delta_t` ticks after warm-up.
    pub delta_t: Tick,
    /// Total simulation length in ticks.
    pub t_e: Tick,
}

impl Default for MarketConfig {
    fn default() -> MarketConfig {
        MarketConfig {
            n: 900,
            w1_max: 1.0,
            w2_max: 100.0,
            w3_max: 1.0,
            tau_max: 1000,
            sigma_eps: 0.03,
            p_d: 1000.0,
            t_c: 2000,
            delta_p: 0.01,
            p_f: 10_000.0,
            delta_t: 10,
            t_e: 10_000,
        }
    }
}

impl MarketConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        for (name, v) in [
            ("w1_max", self.w1_max),
            ("w2_max", self.w2_max),
            ("w3_max", self.w3_max),
            ("p_d", self.p_d),
            ("p_f", self.p_f),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.sigma_eps.is_finite() && self.sigma_eps >= 0.0) {
            return Err(Error::Config(format!(
                "sigma_eps must be non-negative, got {}",
                self.sigma_eps
            )));
        }
        if self.tau_max < 1 {
            return Err(Error::Config("tau_max must be at least 1".into()));
        }
        if self.delta_t < 1 {
            return Err(Error::Config("delta_t must be at least 1".into()));
        }
        if self.t_c >= self.t_e {
            return Err(Error::Config(format!(
                "t_c ({}) must be smaller than t_e ({})",
                self.t_c, self.t_e
            )));
        }
        if (self.t_e - self.t_c) % self.delta_t != 0 {
            return Err(Error::Config(format!(
                "t_e - t_c = {} is not a multiple of delta_t = {}",
                self.t_e - self.t_c,
                self.delta_t
            )));
        }
        let scale = self.scale()?;
        let pf_ticks = scale.ticks_of_monetary(self.p_f)?;
        if pf_ticks < 1 {
            return Err(Error::Config("p_f must be at least one tick".into()));
        }
        Ok(())
    }

    pub fn scale(&self) -> Result<PriceScale> {
        PriceScale::from_delta_p(self.delta_p)
    }

    /// Fundamental value as an exact tick count.
    pub fn p_f_price(&self) -> Result<Price> {
        Price::from_ticks(self.scale()?.ticks_of_monetary(self.p_f)?)
    }

    /// Order-price band half-width in tick units (need not be a whole tick).
    pub fn p_d_ticks(&self) -> f64 {
        self.p_d / self.delta_p
    }

    /// Number of trader action slots per simulation.
    pub fn n_t(&self) -> usize {
        ((self.t_e - self.t_c) / self.delta_t) as usize
    }

    pub fn canonical_string(&self) -> String {
        format!(
            "n={};w1_max={};w2_max={};w3_max={};tau_max={};sigma_eps={};p_d={};t_c={};delta_p={};p_f={};delta_t={};t_e={}",
            self.n,
            self.w1_max,
            self.w2_max,
            self.w3_max,
            self.tau_max,
            self.sigma_eps,
            self.p_d,
            self.t_c,
            self.delta_p,
            self.p_f,
            self.delta_t,
            self.t_e
        )
    }
}

/// Genetic-algorithm parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    /// Population size.
    pub population: u32,
    /// Number of top genes copied unchanged each generation.
    pub elites: u32,
    /// Probability that a non-elite slot is replaced by a crossover child.
    pub crossover_prob: f64,
    /// Per-action mutation probability for non-elite genes.
    pub mutation_prob: f64,
    /// Number of inheritance steps.
    pub generations: u32,
    /// Seed of the optimizer's random stream (separate from market seeds).
    pub ga_seed: u64,
}

impl Default for GaConfig {
    fn default() -> GaConfig {
        GaConfig {
            population: 10_000,
            elites: 400,
            crossover_prob: 0.65,
            mutation_prob: 0.2,
            generations: 1500,
            ga_seed: 1,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.elites < 2 || self.elites > self.population {
            return Err(Error::Config(format!(
                "elites must satisfy 2 <= elites <= population, got {} of {}",
                self.elites, self.population
            )));
        }
        for (name, p) in [
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }

    pub fn canonical_string(&self) -> String {
        format!(
            "population={};elites={};crossover_prob={};mutation_prob={};generations={};ga_seed={}",
            self.population,
            self.elites,
            self.crossover_prob,
            self.mutation_prob,
            self.generations,
            self.ga_seed
        )
    }
}

/// Hash identifying an experiment: market and optimizer parameters plus the
/// master market seed. Embedded in every output file and checked on
/// checkpoint resume.
pub fn config_hash(market: &MarketConfig, ga: &GaConfig, seed: u64) -> String {
    let mut hasher = Sha256::new();
    hasher.update(market.canonical_string());
    hasher.update(";");
    hasher.update(ga.canonical_string());
    hasher.update(";");
    hasher.update(format!("seed={seed}"));
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let cfg = MarketConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.n_t(), 800);
        assert_eq!(cfg.p_f_price().unwrap().ticks(), 1_000_000);
        GaConfig::default().validate().unwrap();
    }

    #[test]
    fn slot_arithmetic_must_be_exact() {
        let cfg = MarketConfig { delta_t: 3, ..MarketConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn warmup_must_precede_end() {
        let cfg = MarketConfig { t_c: 10_000, ..MarketConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn fundamental_off_grid_rejected() {
        let cfg = MarketConfig { p_f: 10_000.005, ..MarketConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn ga_bounds() {
        let ga = GaConfig { elites: 1, ..GaConfig::default() };
        assert!(ga.validate().is_err());
        let ga = GaConfig { elites: 10_001, ..GaConfig::default() };
        assert!(ga.validate().is_err());
        let ga = GaConfig { crossover_prob: 1.5, ..GaConfig::default() };
        assert!(ga.validate().is_err());
    }

    #[test]
    fn hash_is_sensitive_to_every_part() {
        let m = MarketConfig::default();
        let g = GaConfig::default();
        let base = config_hash(&m, &g, 42);
        assert_eq!(base, config_hash(&MarketConfig::default(), &GaConfig::default(), 42));
        assert_ne!(base, config_hash(&m, &g, 43));
        let m2 = MarketConfig { n: 901, ..m.clone() };
        assert_ne!(base, config_hash(&m2, &g, 42));
        let g2 = GaConfig { mutation_prob: 0.25, ..g.clone() };
        assert_ne!(base, config_hash(&m, &g2, 42));
    }
}

//! Tick-exact prices.
//!
//! All prices are stored as an integer count of the minimum price increment
//! so that book comparisons are exact. Floating point only appears at the
//! boundary: when an agent's continuous order price is rounded onto the
//! grid, and when prices are rendered as decimals for export.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Buy => Side::Sell,
            Side::Sell => Side::Buy,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Buy => "buy",
            Side::Sell => "sell",
        }
    }
}

/// A price on the tick grid: a strictly positive number of ticks.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Price(i64);

/// Tolerance, in ticks, for snapping a float that is meant to sit exactly
/// on the grid but picked up representation error on the way in.
/// Genuine fractional ticks are many orders of magnitude larger.
const SNAP_TOL: f64 = 1e-6;

impl Price {
    pub const MIN: Price = Price(1);

    /// Builds a price from a tick count. Zero and negative counts are not
    /// admissible book prices.
    pub fn from_ticks(ticks: i64) -> Result<Price> {
        if ticks < 1 {
            return Err(Error::Config(format!("price of {ticks} ticks is below one tick")));
        }
        Ok(Price(ticks))
    }

    pub fn ticks(self) -> i64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Rounds a continuous price (in tick units) onto the grid.
    ///
    /// Buy prices round down and sell prices round up, so rounding alone can
    /// never cross a book. Values within `SNAP_TOL` of a grid point are
    /// treated as being on it. Results below one tick clamp to one tick.
    pub fn round_ticks(raw_ticks: f64, side: Side) -> Result<Price> {
        if !raw_ticks.is_finite() {
            return Err(Error::NonFinitePrice(raw_ticks));
        }
        let nearest = raw_ticks.round();
        let snapped = if (raw_ticks - nearest).abs() < SNAP_TOL {
            nearest
        } else {
            raw_ticks
        };
        let ticks = match side {
            Side::Buy => snapped.floor(),
            Side::Sell => snapped.ceil(),
        } as i64;
        Ok(Price(ticks.max(1)))
    }

    /// Rounds a monetary amount onto the grid of the given scale.
    pub fn round_monetary(raw: f64, side: Side, scale: &PriceScale) -> Result<Price> {
        if !raw.is_finite() {
            return Err(Error::NonFinitePrice(raw));
        }
        Price::round_ticks(raw / scale.delta_p(), side)
    }

    /// Mid of two prices, rounded to the nearest tick with halves up.
    pub fn mid(bid: Price, ask: Price) -> Price {
        Price((bid.0 + ask.0 + 1) / 2)
    }
}

/// Converts between tick counts and decimal price strings for a decimal
/// tick size, without going through floating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceScale {
    /// Tick size expressed as an integer multiple of 10^-decimals.
    scaled_tick: i64,
    decimals: u32,
    delta_p: f64,
}

impl PriceScale {
    /// Derives the scale from a tick size. The tick size must be an exact
    /// decimal (e.g. 0.01 or 0.25) so that prices have a finite decimal form.
    pub fn from_delta_p(delta_p: f64) -> Result<PriceScale> {
        if !(delta_p.is_finite() && delta_p > 0.0) {
            return Err(Error::Config(format!("tick size {delta_p} must be positive")));
        }
        for decimals in 0..=9u32 {
            let scaled = delta_p * 10f64.powi(decimals as i32);
            if (scaled - scaled.round()).abs() < 1e-6 && scaled.round() >= 1.0 {
                return Ok(PriceScale {
                    scaled_tick: scaled.round() as i64,
                    decimals,
                    delta_p,
                });
            }
        }
        Err(Error::Config(format!(
            "tick size {delta_p} is not a decimal fraction; prices would have no exact decimal form"
        )))
    }

    pub fn delta_p(&self) -> f64 {
        self.delta_p
    }

    /// Number of ticks a monetary amount corresponds to, requiring it to sit
    /// on the grid (used for config values such as the fundamental price).
    pub fn ticks_of_monetary(&self, amount: f64) -> Result<i64> {
        let t = amount / self.delta_p;
        let nearest = t.round();
        if (t - nearest).abs() > SNAP_TOL {
            return Err(Error::Config(format!(
                "{amount} is not a multiple of the tick size {}",
                self.delta_p
            )));
        }
        Ok(nearest as i64)
    }

    /// Renders a signed tick count as an exact decimal string.
    pub fn format_ticks(&self, ticks: i64) -> String {
        let total = ticks * self.scaled_tick;
        if self.decimals == 0 {
            return total.to_string();
        }
        let base = 10i64.pow(self.decimals);
        let sign = if total < 0 { "-" } else { "" };
        let abs = total.abs();
        format!(
            "{sign}{}.{:0width$}",
            abs / base,
            abs % base,
            width = self.decimals as usize
        )
    }

    pub fn format_price(&self, price: Price) -> String {
        self.format_ticks(price.ticks())
    }

    /// Monetary value of a signed tick count, for JSON convenience fields.
    pub fn monetary(&self, ticks: i64) -> f64 {
        ticks as f64 * self.delta_p
    }

    /// Monetary value of a fractional tick count (means, medians).
    pub fn monetary_f64(&self, ticks: f64) -> f64 {
        ticks * self.delta_p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cents() -> PriceScale {
        PriceScale::from_delta_p(0.01).unwrap()
    }

    #[test]
    fn buy_rounds_down_sell_rounds_up() {
        let s = cents();
        let buy = Price::round_monetary(100.005, Side::Buy, &s).unwrap();
        assert_eq!(s.format_price(buy), "100.00");
        let sell = Price::round_monetary(100.005, Side::Sell, &s).unwrap();
        assert_eq!(s.format_price(sell), "100.01");
    }

    #[test]
    fn exact_multiple_is_unchanged() {
        let s = cents();
        let buy = Price::round_monetary(100.00, Side::Buy, &s).unwrap();
        assert_eq!(buy.ticks(), 10_000);
        let sell = Price::round_monetary(100.00, Side::Sell, &s).unwrap();
        assert_eq!(sell.ticks(), 10_000);
    }

    #[test]
    fn negative_raw_clamps_to_one_tick() {
        let s = cents();
        let p = Price::round_monetary(-3.2, Side::Buy, &s).unwrap();
        assert_eq!(s.format_price(p), "0.01");
    }

    #[test]
    fn non_finite_rejected() {
        let s = cents();
        assert!(Price::round_monetary(f64::NAN, Side::Buy, &s).is_err());
        assert!(Price::round_ticks(f64::INFINITY, Side::Sell).is_err());
    }

    #[test]
    fn rounding_is_idempotent() {
        let s = cents();
        for raw in [100.005, 99.999, 0.004, 12345.678, -8.0] {
            for side in [Side::Buy, Side::Sell] {
                let once = Price::round_monetary(raw, side, &s).unwrap();
                let twice = Price::round_ticks(once.ticks() as f64, side).unwrap();
                assert_eq!(once, twice);
            }
        }
    }

    #[test]
    fn mid_of_symmetric_book_is_center() {
        let m = Price::mid(Price(9_900), Price(10_100));
        assert_eq!(m.ticks(), 10_000);
        // Odd tick sum rounds the half up.
        let m = Price::mid(Price(100), Price(103));
        assert_eq!(m.ticks(), 102);
    }

    #[test]
    fn quarter_tick_formatting() {
        let s = PriceScale::from_delta_p(0.25).unwrap();
        assert_eq!(s.format_ticks(3), "0.75");
        assert_eq!(s.format_ticks(-5), "-1.25");
        let whole = PriceScale::from_delta_p(1.0).unwrap();
        assert_eq!(whole.format_ticks(42), "42");
    }

    #[test]
    fn non_decimal_tick_rejected() {
        assert!(PriceScale::from_delta_p(1.0 / 3.0).is_err());
        assert!(PriceScale::from_delta_p(0.0).is_err());
    }

    #[test]
    fn monetary_grid_check() {
        let s = cents();
        assert_eq!(s.ticks_of_monetary(10_000.0).unwrap(), 1_000_000);
        assert!(s.ticks_of_monetary(10_000.005).is_err());
    }
}

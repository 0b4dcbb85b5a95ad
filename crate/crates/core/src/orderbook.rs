//! Continuous double auction for one-share limit orders.
//!
//! Orders rest in per-price FIFO queues; an incoming order that crosses the
//! opposite best executes immediately at the resting order's price against
//! the best-priced, oldest opposite order. Since every order is exactly one
//! share, a submission produces at most one fill. Resting orders expire a
//! fixed number of ticks after submission and are swept at the start of
//! each tick.

use std::collections::{BTreeMap, HashSet, VecDeque};

use crate::price::{Price, Side};

/// Tick-time counter (advances when a normal agent orders).
pub type Tick = u32;

/// Agent identifier: 0 is the algorithmic trader, 1..=n are normal agents.
pub type AgentId = u32;

/// The algorithmic trader's owner id in fill logs.
pub const AIA_OWNER: AgentId = 0;

/// A one-share limit order. There is no quantity field by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Order {
    /// Strictly increasing with submission order; the time-priority key.
    pub id: u64,
    pub side: Side,
    pub price: Price,
    pub owner: AgentId,
    pub birth_tick: Tick,
}

/// One executed share. The price is always the resting (maker) order's.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fill {
    pub price: Price,
    pub taker_side: Side,
    pub maker_order_id: u64,
    pub maker_owner: AgentId,
    pub tick: Tick,
}

#[derive(Debug, Clone, Copy)]
struct Resting {
    id: u64,
    owner: AgentId,
    birth_tick: Tick,
}

#[derive(Debug, Clone, Copy)]
struct ExpirySlot {
    id: u64,
    side: Side,
    price: Price,
    birth_tick: Tick,
}

/// The two-sided resting order set.
///
/// `last_mid` tracks the most recent two-sided mid and starts at the
/// caller-supplied fallback so a fresh book still quotes a reference price.
#[derive(Debug, Clone)]
pub struct Book {
    bids: BTreeMap<i64, VecDeque<Resting>>,
    asks: BTreeMap<i64, VecDeque<Resting>>,
    /// Ids currently resting; fills and expiries remove entries.
    live: HashSet<u64>,
    /// Orders in submission (= expiry) order. Entries whose id is no longer
    /// live are skipped when the sweep reaches them.
    expiry_queue: VecDeque<ExpirySlot>,
    next_id: u64,
    last_mid: Price,
    resting_count: usize,
}

impl Book {
    /// `fallback_mid` is quoted until the book has been two-sided once.
    pub fn new(fallback_mid: Price) -> Book {
        Book {
            bids: BTreeMap::new(),
            asks: BTreeMap::new(),
            live: HashSet::new(),
            expiry_queue: VecDeque::new(),
            next_id: 1,
            last_mid: fallback_mid,
            resting_count: 0,
        }
    }

    pub fn best_bid(&self) -> Option<Price> {
        self.bids.keys().next_back().map(|&t| Price::from_ticks(t).expect("book holds valid prices"))
    }

    pub fn best_ask(&self) -> Option<Price> {
        self.asks.keys().next().map(|&t| Price::from_ticks(t).expect("book holds valid prices"))
    }

    /// Mid of the current best quotes, or the last known mid when either
    /// side is empty.
    pub fn mid_price(&self) -> Price {
        match (self.best_bid(), self.best_ask()) {
            (Some(b), Some(a)) => Price::mid(b, a),
            _ => self.last_mid,
        }
    }

    pub fn resting_orders(&self) -> usize {
        self.resting_count
    }

    /// Submits a one-share limit order. Returns the assigned order id and
    /// the fill, if the order crossed.
    pub fn submit_limit(
        &mut self,
        side: Side,
        price: Price,
        owner: AgentId,
        tick: Tick,
    ) -> (u64, Option<Fill>) {
        let id = self.next_id;
        self.next_id += 1;

        let crossed = match side {
            Side::Buy => self.best_ask().is_some_and(|a| price >= a),
            Side::Sell => self.best_bid().is_some_and(|b| price <= b),
        };

        let fill = if crossed {
            Some(self.take_best(side, tick).expect("crossed book has an opposite best"))
        } else {
            self.rest(Order { id, side, price, owner, birth_tick: tick });
            None
        };
        self.refresh_mid();
        (id, fill)
    }

    /// Executes a market order against the opposite best, or returns `None`
    /// (no action) when the opposite side is empty.
    pub fn submit_market(&mut self, side: Side, tick: Tick) -> Option<Fill> {
        let fill = self.take_best(side, tick);
        self.refresh_mid();
        fill
    }

    /// Removes every order older than `max_age` ticks (strictly:
    /// `now - birth_tick > max_age`).
    pub fn cancel_expired(&mut self, now: Tick, max_age: Tick) {
        while let Some(front) = self.expiry_queue.front() {
            if now - front.birth_tick <= max_age {
                break;
            }
            let slot = self.expiry_queue.pop_front().expect("front checked");
            if self.live.remove(&slot.id) {
                self.remove_resting(slot.side, slot.price, slot.id);
            }
        }
        self.refresh_mid();
    }

    fn rest(&mut self, order: Order) {
        let level = match order.side {
            Side::Buy => self.bids.entry(order.price.ticks()).or_default(),
            Side::Sell => self.asks.entry(order.price.ticks()).or_default(),
        };
        level.push_back(Resting {
            id: order.id,
            owner: order.owner,
            birth_tick: order.birth_tick,
        });
        self.live.insert(order.id);
        self.expiry_queue.push_back(ExpirySlot {
            id: order.id,
            side: order.side,
            price: order.price,
            birth_tick: order.birth_tick,
        });
        self.resting_count += 1;
    }

    /// Pops the best-priced, oldest order on the side opposite to `taker`.
    fn take_best(&mut self, taker: Side, tick: Tick) -> Option<Fill> {
        let (price_ticks, maker) = {
            let (price_ticks, level) = match taker {
                Side::Buy => self.asks.iter_mut().next()?,
                Side::Sell => self.bids.iter_mut().next_back()?,
            };
            (*price_ticks, level.pop_front().expect("levels are never empty"))
        };
        let level_now_empty = match taker {
            Side::Buy => self.asks.get(&price_ticks).is_some_and(|l| l.is_empty()),
            Side::Sell => self.bids.get(&price_ticks).is_some_and(|l| l.is_empty()),
        };
        if level_now_empty {
            match taker {
                Side::Buy => self.asks.remove(&price_ticks),
                Side::Sell => self.bids.remove(&price_ticks),
            };
        }
        self.live.remove(&maker.id);
        self.resting_count -= 1;
        Some(Fill {
            price: Price::from_ticks(price_ticks).expect("book holds valid prices"),
            taker_side: taker,
            maker_order_id: maker.id,
            maker_owner: maker.owner,
            tick,
        })
    }

    fn remove_resting(&mut self, side: Side, price: Price, id: u64) {
        let levels = match side {
            Side::Buy => &mut self.bids,
            Side::Sell => &mut self.asks,
        };
        let level = levels.get_mut(&price.ticks()).expect("live order has a level");
        // Ids are assigned in birth order and the sweep runs in id order, so
        // an expiring live order is the oldest at its level.
        debug_assert_eq!(level.front().map(|r| r.id), Some(id));
        if level.front().map(|r| r.id) == Some(id) {
            level.pop_front();
        } else {
            level.retain(|r| r.id != id);
        }
        if level.is_empty() {
            levels.remove(&price.ticks());
        }
        self.resting_count -= 1;
    }

    fn refresh_mid(&mut self) {
        if let (Some(b), Some(a)) = (self.best_bid(), self.best_ask()) {
            debug_assert!(b < a, "book rests crossed: bid {} >= ask {}", b.ticks(), a.ticks());
            self.last_mid = Price::mid(b, a);
        }
    }

    /// All resting orders, in (side, price, time) order. Intended for
    /// audits and differential tests, not the hot path.
    pub fn resting_snapshot(&self) -> Vec<Order> {
        let mut out = Vec::with_capacity(self.resting_count);
        for (&ticks, level) in &self.bids {
            for r in level {
                out.push(Order {
                    id: r.id,
                    side: Side::Buy,
                    price: Price::from_ticks(ticks).expect("book holds valid prices"),
                    owner: r.owner,
                    birth_tick: r.birth_tick,
                });
            }
        }
        for (&ticks, level) in &self.asks {
            for r in level {
                out.push(Order {
                    id: r.id,
                    side: Side::Sell,
                    price: Price::from_ticks(ticks).expect("book holds valid prices"),
                    owner: r.owner,
                    birth_tick: r.birth_tick,
                });
            }
        }
        out
    }
}

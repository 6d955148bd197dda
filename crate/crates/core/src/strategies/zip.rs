use serde::{Deserialize, Serialize};

use super::Strategy;
use crate::env::BrokerView;
use crate::error::EnvError;
use crate::game::{Bid, PlayerBids};
use crate::units::Price;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZipConfig {
    /// Starting profit margin.
    pub margin: f64,
    /// Margin step per auction.
    pub delta: f64,
}

impl Default for ZipConfig {
    fn default() -> Self {
        ZipConfig {
            margin: 0.3,
            delta: 0.05,
        }
    }
}

impl ZipConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        if !(self.delta >= 0.0 && self.margin.is_finite() && self.margin <= 1.0) {
            return Err(EnvError::Config(format!(
                "zip margin {} must be at most 1 and delta {} non-negative",
                self.margin, self.delta
            )));
        }
        Ok(())
    }
}

/// Buyer margin state. The bid price is `limit * (1 - margin)`, so a lower
/// margin means a more aggressive bid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZipState {
    pub margin: f64,
    pub delta: f64,
    pub last_price: Option<Price>,
    pub last_clearing: Option<Price>,
}

impl ZipState {
    pub fn new(config: &ZipConfig) -> Self {
        ZipState {
            margin: config.margin,
            delta: config.delta,
            last_price: None,
            last_clearing: None,
        }
    }

    pub fn price(&self, limit: Price) -> Price {
        limit * (1.0 - self.margin)
    }

    /// Moves the margin after an auction and clamps it so the price for
    /// `limit` stays within `[0, p_max]`.
    pub fn update(&mut self, cleared: bool, limit: Price, p_max: Price) {
        if cleared {
            self.margin += self.delta;
        } else {
            self.margin -= self.delta;
        }
        let lowest = if limit > 0.0 { 1.0 - p_max / limit } else { f64::NEG_INFINITY };
        self.margin = self.margin.clamp(lowest.min(1.0), 1.0);
    }
}

/// Margin-adjusting buyer; its limit price is the last clearing price seen
/// at the same depth in earlier slots.
#[derive(Clone, Debug)]
pub struct ZipStrategy {
    pub state: ZipState,
}

impl ZipStrategy {
    pub const NAME: &'static str = "zip";

    pub fn new(config: ZipConfig) -> Self {
        ZipStrategy {
            state: ZipState::new(&config),
        }
    }
}

impl Strategy for ZipStrategy {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn bids(&mut self, view: &BrokerView<'_>) -> PlayerBids {
        let limit = view
            .last_clearing_price(view.hours_ahead)
            .unwrap_or(view.prior_price);
        if let Some(prev) = view.fills().last() {
            if prev.best_bid.is_some() {
                self.state.last_clearing = prev.clearing_price;
                self.state.update(!prev.bought.is_zero(), limit, view.p_max);
            }
        }
        let q = view.remaining_requirement();
        let mut out = PlayerBids::idle();
        if !q.is_zero() {
            let price = self.state.price(limit).clamp(0.0, view.p_max);
            self.state.last_price = Some(price);
            out.buys.push(Bid::new(price, q));
        }
        out
    }
}

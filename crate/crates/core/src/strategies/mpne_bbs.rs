use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{even_split, Strategy};
use crate::env::BrokerView;
use crate::error::EnvError;
use crate::game::{Bid, PlayerBids};
use crate::units::{Price, Qty};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MpneBbsConfig {
    pub alpha_f: f64,
    pub beta_f: f64,
    pub alpha_c: f64,
    pub beta_c: f64,
    /// Bids per auction.
    pub bids: usize,
    /// Auctions at or below this many hours ahead use the close window.
    pub proximity_threshold: usize,
    /// Undercut applied to sell prices.
    pub epsilon: f64,
}

impl Default for MpneBbsConfig {
    fn default() -> Self {
        MpneBbsConfig {
            alpha_f: 0.7,
            beta_f: 1.0,
            alpha_c: 0.95,
            beta_c: 1.15,
            bids: 5,
            proximity_threshold: 6,
            epsilon: 0.01,
        }
    }
}

impl MpneBbsConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        let ok = 0.0 < self.alpha_f
            && self.alpha_f <= self.beta_f
            && 0.0 < self.alpha_c
            && self.alpha_c <= self.beta_c
            && self.bids >= 1
            && self.epsilon >= 0.0;
        if !ok {
            return Err(EnvError::Config(
                "mpne-bbs needs 0 < alpha <= beta for both windows, at least one bid and epsilon >= 0"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// How the limit price was reached.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriceEstimate {
    pub price: Price,
    /// One-based indices into the previous auction's uncleared asks;
    /// `None` when the estimate came from clearing-price history.
    pub u: Option<usize>,
    pub v: Option<usize>,
    pub v0: Option<usize>,
    pub adequate: Option<bool>,
}

/// Limit price for the current auction from the previous auction's
/// uncleared asks, falling back to the highest clearing price seen at the
/// same depth and then to the configured prior.
pub fn est_bid_price(view: &BrokerView<'_>) -> PriceEstimate {
    let hour = view.hours_ahead;
    let asks = view
        .last_orderbook()
        .map_or(&[][..], |b| b.uncleared_asks.as_slice());
    if asks.is_empty() {
        let price = view
            .past_clearing_prices(hour)
            .iter()
            .copied()
            .reduce(f64::max)
            .unwrap_or(view.prior_price);
        return PriceEstimate {
            price,
            u: None,
            v: None,
            v0: None,
            adequate: None,
        };
    }
    let cum: Vec<u64> = asks
        .iter()
        .scan(0u64, |acc, a| {
            *acc += a.quantity.units();
            Some(*acc)
        })
        .collect();
    let supply = *cum.last().unwrap_or(&0);
    let demand = view.market_remaining().units();
    let last = asks.len();
    let covering = |q: u64| cum.iter().position(|&c| q <= c).map_or(last, |i| i + 1);
    let adequate = supply >= demand;
    let (u, v) = if adequate {
        let own = view.remaining_requirement().units();
        (covering(demand), covering(demand.saturating_sub(own)))
    } else {
        (last, last)
    };
    let v0 = (u + 1).saturating_sub(hour).max(1);
    let price = asks[v0 - 1].price.max(asks[v - 1].price);
    PriceEstimate {
        price,
        u: Some(u),
        v: Some(v),
        v0: Some(v0),
        adequate: Some(adequate),
    }
}

/// Equilibrium-guided buyer: estimates a limit price from the uncleared
/// asks and spreads its requirement over sampled prices around it.
#[derive(Clone, Debug)]
pub struct MpneBbs {
    pub config: MpneBbsConfig,
    rng: ChaCha8Rng,
}

impl MpneBbs {
    pub const NAME: &'static str = "mpne-bbs";

    pub fn new(config: MpneBbsConfig, seed: u64) -> Self {
        MpneBbs {
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Price window for the current depth.
    pub fn window(&self, view: &BrokerView<'_>, est: Price) -> (Price, Price) {
        let c = &self.config;
        let (lo, hi) = if view.hours_ahead > c.proximity_threshold {
            (c.alpha_f, c.beta_f)
        } else {
            (c.alpha_c, c.beta_c)
        };
        (lo * est, hi * est)
    }
}

impl Strategy for MpneBbs {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn bids(&mut self, view: &BrokerView<'_>) -> PlayerBids {
        let mut out = PlayerBids::idle();
        // the first auction of a slot is only observed
        if view.hours_ahead >= view.rounds_per_slot && view.rounds_per_slot > 1 {
            return out;
        }
        let est = est_bid_price(view);
        let need = view.remaining_requirement();
        if !need.is_zero() {
            let (lo, hi) = self.window(view, est.price);
            for q in even_split(need.units(), self.config.bids) {
                let p = if hi > lo { self.rng.gen_range(lo..=hi) } else { lo };
                out.buys.push(Bid::new(p.clamp(0.0, view.p_max), Qty(q)));
            }
        }
        let spare = view.surplus();
        if !spare.is_zero() {
            let p_u = match (est.u, view.last_orderbook()) {
                (Some(u), Some(book)) => book.uncleared_asks[u - 1].price,
                _ => est.price,
            };
            out.sells
                .push(Bid::new((p_u - self.config.epsilon).clamp(0.0, view.p_max), spare));
        }
        out
    }
}

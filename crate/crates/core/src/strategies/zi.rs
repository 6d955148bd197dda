use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Strategy;
use crate::env::BrokerView;
use crate::error::EnvError;
use crate::game::{Bid, PlayerBids};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZiConfig {
    pub low: f64,
    pub high: f64,
}

impl Default for ZiConfig {
    fn default() -> Self {
        ZiConfig { low: 0.0, high: 100.0 }
    }
}

impl ZiConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        if !(self.low >= 0.0 && self.low <= self.high && self.high.is_finite()) {
            return Err(EnvError::Config(format!(
                "zi bounds ({}, {}) must satisfy 0 <= low <= high",
                self.low, self.high
            )));
        }
        Ok(())
    }
}

/// One bid per auction for the remaining requirement at a uniform random price.
#[derive(Clone, Debug)]
pub struct ZeroIntelligence {
    config: ZiConfig,
    rng: ChaCha8Rng,
}

impl ZeroIntelligence {
    pub const NAME: &'static str = "zi";

    pub fn new(config: ZiConfig, seed: u64) -> Self {
        ZeroIntelligence {
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Strategy for ZeroIntelligence {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn bids(&mut self, view: &BrokerView<'_>) -> PlayerBids {
        let q = view.remaining_requirement();
        let mut out = PlayerBids::idle();
        if !q.is_zero() {
            let price = self.rng.gen_range(self.config.low..=self.config.high);
            out.buys.push(Bid::new(price, q));
        }
        out
    }
}

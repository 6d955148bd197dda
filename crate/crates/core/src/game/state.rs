use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::GameConfig;
use crate::error::GameError;
use crate::units::{Price, Qty};

/// One wholesale ask on the supply curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ask {
    pub price: Price,
    pub quantity: Qty,
}

impl Ask {
    pub fn new(price: Price, quantity: Qty) -> Self {
        Ask { price, quantity }
    }
}

impl Eq for Ask {}

impl Hash for Ask {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.price.to_bits().hash(state);
        self.quantity.hash(state);
    }
}

/// Game state at the start of a round: the wholesale supply curve and each
/// player's outstanding demand and sellable supply.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarketState {
    /// One-based round; `horizon + 1` is the settlement state.
    pub round: usize,
    /// Sorted ascending by price, then descending by quantity.
    pub asks: Vec<Ask>,
    pub demand: Vec<Qty>,
    pub supply: Vec<Qty>,
}

impl MarketState {
    /// Round-one state. Asks are sorted into curve order.
    pub fn new(mut asks: Vec<Ask>, demand: Vec<Qty>, supply: Vec<Qty>) -> Self {
        sort_curve(&mut asks);
        MarketState {
            round: 1,
            asks,
            demand,
            supply,
        }
    }

    pub fn n_players(&self) -> usize {
        self.demand.len()
    }

    /// Total outstanding demand of all players.
    pub fn total_demand(&self) -> Qty {
        self.demand.iter().sum()
    }

    /// Total wholesale ask quantity.
    pub fn wholesale_supply(&self) -> Qty {
        self.asks.iter().map(|a| a.quantity).sum()
    }

    /// Total sellable prosumer quantity.
    pub fn prosumer_supply(&self) -> Qty {
        self.supply.iter().sum()
    }

    /// Wholesale supply covers all outstanding demand.
    pub fn is_adequate(&self) -> bool {
        self.wholesale_supply() >= self.total_demand()
    }

    pub fn is_terminal(&self, config: &GameConfig) -> bool {
        self.round > config.horizon
    }

    /// Checks shape against `config` and the strict demand-over-supply
    /// assumption that applies to starting states.
    pub fn validate_initial(&self, config: &GameConfig) -> Result<(), GameError> {
        self.validate_shape(config)?;
        for (b, (d, s)) in self.demand.iter().zip(&self.supply).enumerate() {
            if d <= s {
                return Err(GameError::State(format!(
                    "player {b}: demand {d} must exceed sellable supply {s}"
                )));
            }
        }
        Ok(())
    }

    /// Checks that apply to every state along a trajectory.
    pub fn validate_shape(&self, config: &GameConfig) -> Result<(), GameError> {
        if self.demand.len() != config.n_players || self.supply.len() != config.n_players {
            return Err(GameError::State(format!(
                "expected {} players, state has {} demands and {} supplies",
                config.n_players,
                self.demand.len(),
                self.supply.len()
            )));
        }
        if self.round == 0 || self.round > config.horizon + 1 {
            return Err(GameError::State(format!(
                "round {} outside 1..={}",
                self.round,
                config.horizon + 1
            )));
        }
        for a in &self.asks {
            if a.quantity.is_zero() || !(0.0..=config.p_max).contains(&a.price) {
                return Err(GameError::State(format!(
                    "ask ({}, {}) outside the order bounds",
                    a.price, a.quantity
                )));
            }
            if config.q_max.is_some_and(|cap| a.quantity > cap) {
                return Err(GameError::State(format!("ask quantity {} above cap", a.quantity)));
            }
        }
        Ok(())
    }
}

pub(crate) fn sort_curve(asks: &mut [Ask]) {
    asks.sort_by(|a, b| {
        a.price
            .total_cmp(&b.price)
            .then_with(|| b.quantity.cmp(&a.quantity))
    });
}

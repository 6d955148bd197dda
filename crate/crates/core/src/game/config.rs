use serde::{Deserialize, Serialize};

use super::MarketState;
use crate::auction::{PricingRule, SelfMatchGuard};
use crate::error::GameError;
use crate::units::{Price, Qty, Resolution};

/// How the wholesale supply curve evolves between rounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupplyMode {
    /// Cleared ask quantity is removed; partially cleared asks keep their price.
    #[default]
    Carryover,
    /// The same curve is offered again every round.
    Constant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub n_players: usize,
    pub horizon: usize,
    pub p_max: Price,
    /// Cap on one wholesale ask, if any.
    pub q_max: Option<Qty>,
    /// Per-unit price of demand left unmet after the last round.
    pub balancing_price: Price,
    pub pricing_rule: PricingRule,
    pub resolution: Resolution,
    /// Price tick used by the equilibrium bids.
    pub epsilon: Price,
    pub guard: SelfMatchGuard,
    pub supply_mode: SupplyMode,
    /// Skip the `balancing_price > gamma * p_max` check.
    pub allow_weak_balancing: bool,
}

impl GameConfig {
    /// A configuration with ACPR clearing, unit resolution and a 0.01 tick.
    pub fn new(n_players: usize, horizon: usize, p_max: Price, balancing_price: Price) -> Self {
        GameConfig {
            n_players,
            horizon,
            p_max,
            q_max: None,
            balancing_price,
            pricing_rule: PricingRule::ACPR,
            resolution: Resolution(1.0),
            epsilon: 0.01,
            guard: SelfMatchGuard::On,
            supply_mode: SupplyMode::Carryover,
            allow_weak_balancing: false,
        }
    }

    /// Currency amount for `qty` units at `price` per physical unit.
    pub fn money(&self, price: Price, qty: Qty) -> f64 {
        price * self.resolution.to_physical(qty)
    }

    /// Worst-case multiplier: largest initial demand in resolution units, plus one.
    pub fn gamma(&self, initial: &MarketState) -> f64 {
        let q_max = initial.demand.iter().copied().max().unwrap_or(Qty::ZERO);
        q_max.as_f64() + 1.0
    }

    /// Whether the balancing price clears the `gamma * p_max` bar for `initial`.
    pub fn balancing_premise_holds(&self, initial: &MarketState) -> bool {
        self.balancing_price > self.gamma(initial) * self.p_max
    }

    /// Structural checks plus the balancing-price bar (unless overridden).
    pub fn validate(&self, initial: &MarketState) -> Result<(), GameError> {
        if self.n_players == 0 {
            return Err(GameError::Config("at least one player is required".into()));
        }
        if self.horizon == 0 {
            return Err(GameError::Config("horizon must be at least one round".into()));
        }
        if !(self.p_max.is_finite() && self.p_max > 0.0) {
            return Err(GameError::Config(format!("p_max {} must be positive", self.p_max)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < self.p_max) {
            return Err(GameError::Config(format!("epsilon {} out of range", self.epsilon)));
        }
        if !(self.resolution.0 > 0.0) {
            return Err(GameError::Config("resolution must be positive".into()));
        }
        self.pricing_rule.validate()?;
        initial.validate_initial(self)?;
        if !self.allow_weak_balancing && !self.balancing_premise_holds(initial) {
            return Err(GameError::WeakBalancing {
                upsilon: self.balancing_price,
                bound: self.gamma(initial) * self.p_max,
            });
        }
        Ok(())
    }
}

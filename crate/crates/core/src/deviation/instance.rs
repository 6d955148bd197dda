use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::game::{Ask, GameConfig, MarketState, SupplyMode};
use crate::units::Qty;

/// A game to analyse: starting state plus rules.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub state: MarketState,
    pub config: GameConfig,
}

/// Supply regime requested from the generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupplyCase {
    Adequate,
    Inadequate,
}

/// Bounds for randomly generated small games.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstanceSpec {
    pub players: (usize, usize),
    pub horizon: (usize, usize),
    pub asks: (usize, usize),
    /// Largest single ask quantity.
    pub ask_quantity: u64,
    /// Largest initial player demand.
    pub max_demand: u64,
    /// Probability that a player holds sellable supply.
    pub seller_share: f64,
    pub p_max: f64,
    pub supply_mode: SupplyMode,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec {
            players: (2, 3),
            horizon: (2, 3),
            asks: (2, 8),
            ask_quantity: 6,
            max_demand: 12,
            seller_share: 0.5,
            p_max: 100.0,
            supply_mode: SupplyMode::Carryover,
        }
    }
}

/// Draws an instance with strictly increasing ask prices on a 5-unit price
/// grid, distinct player demands, demand strictly above each player's
/// sellable supply, and a balancing price just above `gamma * p_max`.
pub fn generate_instance<R: Rng>(rng: &mut R, spec: &InstanceSpec, case: SupplyCase) -> Instance {
    loop {
        if let Some(inst) = try_generate(rng, spec, case) {
            return inst;
        }
    }
}

fn try_generate<R: Rng>(rng: &mut R, spec: &InstanceSpec, case: SupplyCase) -> Option<Instance> {
    let n = rng.gen_range(spec.players.0..=spec.players.1);
    let h = rng.gen_range(spec.horizon.0..=spec.horizon.1);
    let n_asks = rng.gen_range(spec.asks.0..=spec.asks.1);
    let steps = (spec.p_max / 5.0) as u32 - 1;
    let mut prices: Vec<u32> = (1..=steps).collect();
    prices.shuffle(rng);
    let mut prices: Vec<u32> = prices.into_iter().take(n_asks).collect();
    prices.sort_unstable();
    let asks: Vec<Ask> = prices
        .iter()
        .map(|&p| Ask::new(f64::from(p) * 5.0, Qty(rng.gen_range(1..=spec.ask_quantity))))
        .collect();
    let q_s: u64 = asks.iter().map(|a| a.quantity.units()).sum();

    let mut pool: Vec<u64> = (2..=spec.max_demand).collect();
    pool.shuffle(rng);
    let demand: Vec<u64> = pool.into_iter().take(n).collect();
    if demand.len() < n {
        return None;
    }
    let q_d: u64 = demand.iter().sum();
    match case {
        SupplyCase::Adequate if q_s < q_d => return None,
        SupplyCase::Inadequate if q_s >= q_d => return None,
        _ => {}
    }
    let supply: Vec<Qty> = demand
        .iter()
        .map(|&d| {
            if rng.gen_bool(spec.seller_share) {
                Qty(rng.gen_range(1..d))
            } else {
                Qty::ZERO
            }
        })
        .collect();
    let state = MarketState::new(asks, demand.into_iter().map(Qty).collect(), supply);
    let mut config = GameConfig::new(n, h, spec.p_max, 0.0);
    config.supply_mode = spec.supply_mode;
    config.balancing_price = (config.gamma(&state) + 1.0) * spec.p_max;
    Some(Instance { state, config })
}

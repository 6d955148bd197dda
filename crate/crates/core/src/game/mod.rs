//! The finite-horizon Markov game over repeated uniform-price clearings.
//!
//! Players are zero-based here; in order books player `b` appears as
//! [`OwnerId::prosumer(b)`](crate::auction::OwnerId::prosumer).

mod action;
mod config;
mod state;
mod trajectory;

pub use action::{Bid, JointAction, PlayerBids};
pub use config::{GameConfig, SupplyMode};
pub use state::{Ask, MarketState};
pub use trajectory::{RoundRecord, Trajectory, TrajectoryLine};

pub(crate) use state::sort_curve;

use crate::auction::{clear, normalize_book, BookLimits, ClearingOutcome, CombinedBook, Order, OwnerId, Side};
use crate::error::GameError;
use crate::units::Qty;

/// Everything one round of play produces.
#[derive(Clone, Debug, PartialEq)]
pub struct StepResult {
    pub book: CombinedBook,
    pub outcome: ClearingOutcome,
    pub bought: Vec<Qty>,
    pub sold: Vec<Qty>,
    /// `price * (bought - sold)` per player.
    pub costs: Vec<f64>,
    pub next: MarketState,
}

/// Orders for one round. Sell bids priced above `p_max` cannot meet any buy
/// bid and are left out of the book.
pub fn round_orders(
    state: &MarketState,
    action: &JointAction,
    config: &GameConfig,
) -> Result<Vec<Order>, GameError> {
    if action.players.len() != config.n_players {
        return Err(GameError::Config(format!(
            "joint action has {} players, expected {}",
            action.players.len(),
            config.n_players
        )));
    }
    let mut orders: Vec<Order> = state
        .asks
        .iter()
        .map(|a| Order::ask(a.price, a.quantity))
        .collect();
    for (b, bids) in action.players.iter().enumerate() {
        let reject = |reason: String| GameError::Action { player: b, reason };
        if bids.buy_quantity() > state.demand[b] {
            return Err(reject(format!(
                "buys {} exceed outstanding demand {}",
                bids.buy_quantity(),
                state.demand[b]
            )));
        }
        if bids.sell_quantity() > state.supply[b] {
            return Err(reject(format!(
                "sells {} exceed sellable supply {}",
                bids.sell_quantity(),
                state.supply[b]
            )));
        }
        for bid in &bids.buys {
            if !(bid.price.is_finite() && (0.0..=config.p_max).contains(&bid.price)) {
                return Err(reject(format!("buy price {} outside [0, p_max]", bid.price)));
            }
            if !bid.quantity.is_zero() {
                orders.push(Order::buy(OwnerId::prosumer(b), bid.price, bid.quantity));
            }
        }
        for bid in &bids.sells {
            if !(bid.price.is_finite() && bid.price >= 0.0) {
                return Err(reject(format!("sell price {} is negative", bid.price)));
            }
            if !bid.quantity.is_zero() && bid.price <= config.p_max {
                orders.push(Order::sell(OwnerId::prosumer(b), bid.price, bid.quantity));
            }
        }
    }
    Ok(orders)
}

/// Plays one round: clears the book, charges each player and moves to the next state.
pub fn step(
    state: &MarketState,
    action: &JointAction,
    config: &GameConfig,
) -> Result<StepResult, GameError> {
    if state.is_terminal(config) {
        return Err(GameError::State(format!(
            "round {} is past the horizon",
            state.round
        )));
    }
    let orders = round_orders(state, action, config)?;
    let limits = BookLimits {
        p_max: config.p_max,
        q_max: config.q_max,
    };
    let book = normalize_book(orders, &limits)?;
    let outcome = clear(&book, config.pricing_rule, config.guard)?;

    let n = config.n_players;
    let mut bought = vec![Qty::ZERO; n];
    let mut sold = vec![Qty::ZERO; n];
    let mut asks = Vec::with_capacity(state.asks.len());
    for o in book.orders() {
        let filled = outcome.cleared(o.tag);
        match (o.side, o.owner.player_index(n)) {
            (Side::Ask, _) => {
                let left = o.quantity - filled;
                if !left.is_zero() {
                    asks.push(Ask::new(o.price, left));
                }
            }
            (Side::Buy, Some(b)) => bought[b] += filled,
            (Side::SellBid, Some(b)) => sold[b] += filled,
            _ => {}
        }
    }
    let price = outcome.clearing_price.unwrap_or(0.0);
    let costs = (0..n)
        .map(|b| config.money(price, bought[b]) - config.money(price, sold[b]))
        .collect();
    let asks = match config.supply_mode {
        SupplyMode::Carryover => {
            sort_curve(&mut asks);
            asks
        }
        SupplyMode::Constant => state.asks.clone(),
    };
    let next = MarketState {
        round: state.round + 1,
        asks,
        demand: (0..n).map(|b| state.demand[b] - bought[b]).collect(),
        supply: (0..n).map(|b| state.supply[b] - sold[b]).collect(),
    };
    Ok(StepResult {
        book,
        outcome,
        bought,
        sold,
        costs,
        next,
    })
}

/// Balancing charge on residual demand at the settlement state.
pub fn settle_balancing(state: &MarketState, config: &GameConfig) -> Result<Vec<f64>, GameError> {
    if state.round != config.horizon + 1 {
        return Err(GameError::State(format!(
            "settlement needs round {}, got {}",
            config.horizon + 1,
            state.round
        )));
    }
    Ok(state
        .demand
        .iter()
        .map(|&d| config.money(config.balancing_price, d))
        .collect())
}

/// A deterministic Markov policy for one player.
pub trait Policy: Sync {
    fn act(&self, state: &MarketState, player: usize, config: &GameConfig) -> Result<PlayerBids, GameError>;
}

impl<F> Policy for F
where
    F: Fn(&MarketState, usize, &GameConfig) -> PlayerBids + Sync,
{
    fn act(&self, state: &MarketState, player: usize, config: &GameConfig) -> Result<PlayerBids, GameError> {
        Ok(self(state, player, config))
    }
}

/// Submits nothing.
#[derive(Clone, Copy, Debug, Default)]
pub struct Idle;

impl Policy for Idle {
    fn act(&self, _: &MarketState, _: usize, _: &GameConfig) -> Result<PlayerBids, GameError> {
        Ok(PlayerBids::idle())
    }
}

/// Joint action of `profile` at `state`.
pub fn joint_action(
    profile: &[&dyn Policy],
    state: &MarketState,
    config: &GameConfig,
) -> Result<JointAction, GameError> {
    if profile.len() != config.n_players {
        return Err(GameError::Config(format!(
            "profile has {} policies, expected {}",
            profile.len(),
            config.n_players
        )));
    }
    let players = profile
        .iter()
        .enumerate()
        .map(|(b, p)| p.act(state, b, config))
        .collect::<Result<_, _>>()?;
    Ok(JointAction { players })
}

/// Plays `profile` from `start` through settlement.
pub fn rollout(
    profile: &[&dyn Policy],
    start: &MarketState,
    config: &GameConfig,
) -> Result<Trajectory, GameError> {
    start.validate_shape(config)?;
    let mut rounds = Vec::with_capacity(config.horizon + 1 - start.round);
    let mut state = start.clone();
    while !state.is_terminal(config) {
        let action = joint_action(profile, &state, config)?;
        let res = step(&state, &action, config)?;
        let next = res.next.clone();
        rounds.push(RoundRecord::new(state, action, res));
        state = next;
    }
    let balancing = settle_balancing(&state, config)?;
    Ok(Trajectory {
        rounds,
        terminal: state,
        balancing,
    })
}

/// Per-player value (total round costs plus balancing) of `profile` from `start`.
pub fn evaluate_value(
    profile: &[&dyn Policy],
    start: &MarketState,
    config: &GameConfig,
) -> Result<Vec<f64>, GameError> {
    Ok(rollout(profile, start, config)?.values())
}

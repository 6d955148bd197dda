use serde::{Deserialize, Serialize};

use super::{compute_indices, EquilibriumIndices};
use crate::error::GameError;
use crate::game::{Bid, GameConfig, MarketState, PlayerBids, Policy};

/// One player's equilibrium bids for a round.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpneBid {
    pub buy: Bid,
    pub sell: Bid,
    /// The sell price was shaded one tick below `p_u`.
    pub epsilon_used: bool,
}

impl MpneBid {
    pub fn to_bids(self) -> PlayerBids {
        PlayerBids::single(self.buy, self.sell)
    }
}

/// Equilibrium bids for `player` given precomputed indices.
pub fn mpne_bid(
    state: &MarketState,
    player: usize,
    config: &GameConfig,
    ix: &EquilibriumIndices,
) -> MpneBid {
    let buy_price = if ix.phi == Some(player) {
        ix.p_z
    } else {
        config.p_max
    };
    let buy = Bid::new(buy_price, state.demand[player]);
    let q_sell = state.supply[player];
    let (sell_price, epsilon_used) = if ix.adequate {
        if q_sell > ix.q_u(state) {
            (ix.p_u, false)
        } else {
            ((ix.p_u - config.epsilon).max(0.0), true)
        }
    } else {
        (config.balancing_price - config.epsilon, true)
    };
    MpneBid {
        buy,
        sell: Bid::new(sell_price, q_sell),
        epsilon_used,
    }
}

/// Equilibrium bids for `player` at `state`.
pub fn mpne_policy(state: &MarketState, player: usize, config: &GameConfig) -> MpneBid {
    mpne_bid(state, player, config, &compute_indices(state, config))
}

/// Every player follows the equilibrium bids.
#[derive(Clone, Copy, Debug, Default)]
pub struct MpnePolicy;

impl Policy for MpnePolicy {
    fn act(&self, state: &MarketState, player: usize, config: &GameConfig) -> Result<PlayerBids, GameError> {
        Ok(mpne_policy(state, player, config).to_bids())
    }
}

/// Joint equilibrium action, computing the indices once.
pub fn mpne_joint_action(state: &MarketState, config: &GameConfig) -> crate::game::JointAction {
    let ix = compute_indices(state, config);
    crate::game::JointAction {
        players: (0..state.n_players())
            .map(|b| mpne_bid(state, b, config, &ix).to_bids())
            .collect(),
    }
}

/// Plays the equilibrium profile from `state` through settlement.
pub fn mpne_rollout(
    state: &MarketState,
    config: &GameConfig,
) -> Result<crate::game::Trajectory, GameError> {
    let profile: Vec<&dyn Policy> = vec![&MpnePolicy; config.n_players];
    crate::game::rollout(&profile, state, config)
}

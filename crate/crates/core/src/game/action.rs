use serde::{Deserialize, Serialize};

use crate::units::{Price, Qty};

/// A priced quantity submitted by a player.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bid {
    pub price: Price,
    pub quantity: Qty,
}

impl Bid {
    pub fn new(price: Price, quantity: Qty) -> Self {
        Bid { price, quantity }
    }
}

/// One player's bids for a round.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlayerBids {
    pub buys: Vec<Bid>,
    pub sells: Vec<Bid>,
}

impl PlayerBids {
    pub fn idle() -> Self {
        PlayerBids::default()
    }

    /// One buy and one sell bid; zero quantities are dropped.
    pub fn single(buy: Bid, sell: Bid) -> Self {
        PlayerBids {
            buys: [buy].into_iter().filter(|b| !b.quantity.is_zero()).collect(),
            sells: [sell].into_iter().filter(|b| !b.quantity.is_zero()).collect(),
        }
    }

    pub fn buy_quantity(&self) -> Qty {
        self.buys.iter().map(|b| b.quantity).sum()
    }

    pub fn sell_quantity(&self) -> Qty {
        self.sells.iter().map(|b| b.quantity).sum()
    }
}

/// Bids of every player, indexed by zero-based player.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct JointAction {
    pub players: Vec<PlayerBids>,
}

impl JointAction {
    pub fn idle(n_players: usize) -> Self {
        JointAction {
            players: vec![PlayerBids::idle(); n_players],
        }
    }
}

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::units::{Price, Qty};

/// Market participant. `0` is the wholesale supplier, `1..=N` are prosumers,
/// and `N + 1` is the bulk (MISO-style) buyer in the simulator.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct OwnerId(pub u32);

impl OwnerId {
    pub const WHOLESALE: OwnerId = OwnerId(0);

    /// Owner id of the zero-based prosumer `player`.
    pub fn prosumer(player: usize) -> OwnerId {
        OwnerId(player as u32 + 1)
    }

    /// Zero-based prosumer index, if this owner is a prosumer among `n_players`.
    pub fn player_index(self, n_players: usize) -> Option<usize> {
        let id = self.0 as usize;
        (1..=n_players).contains(&id).then(|| id - 1)
    }
}

impl fmt::Display for OwnerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which side of the book an order rests on. Declaration order is the
/// canonical side order used for tag assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Wholesale supplier ask.
    Ask,
    /// Prosumer sell bid.
    SellBid,
    /// Prosumer (or bulk buyer) buy bid.
    Buy,
}

impl Side {
    pub fn is_supply(self) -> bool {
        !matches!(self, Side::Buy)
    }

    pub fn token(self) -> &'static str {
        match self {
            Side::Ask => "ask",
            Side::SellBid => "sell",
            Side::Buy => "buy",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Order {
    pub owner: OwnerId,
    pub side: Side,
    pub price: Price,
    pub quantity: Qty,
    /// Sequence number, unique within one round's book. Reassigned by
    /// [`normalize_book`](super::normalize_book).
    pub tag: u64,
}

impl Order {
    pub fn new(owner: OwnerId, side: Side, price: Price, quantity: Qty) -> Self {
        Order {
            owner,
            side,
            price,
            quantity,
            tag: 0,
        }
    }

    pub fn ask(price: Price, quantity: Qty) -> Self {
        Order::new(OwnerId::WHOLESALE, Side::Ask, price, quantity)
    }

    pub fn buy(owner: OwnerId, price: Price, quantity: Qty) -> Self {
        Order::new(owner, Side::Buy, price, quantity)
    }

    pub fn sell(owner: OwnerId, price: Price, quantity: Qty) -> Self {
        Order::new(owner, Side::SellBid, price, quantity)
    }

    /// Canonical order used for tag assignment: side, price, quantity, owner.
    pub(crate) fn canonical_cmp(&self, other: &Order) -> Ordering {
        self.side
            .cmp(&other.side)
            .then(self.price.total_cmp(&other.price))
            .then(self.quantity.cmp(&other.quantity))
            .then(self.owner.cmp(&other.owner))
    }

    /// Matching priority on the supply side: cheaper first, then larger, then tag.
    pub(crate) fn supply_priority(&self, other: &Order) -> Ordering {
        self.price
            .total_cmp(&other.price)
            .then(other.quantity.cmp(&self.quantity))
            .then(self.tag.cmp(&other.tag))
    }

    /// Matching priority on the demand side: dearer first, then larger, then tag.
    pub(crate) fn demand_priority(&self, other: &Order) -> Ordering {
        other
            .price
            .total_cmp(&self.price)
            .then(other.quantity.cmp(&self.quantity))
            .then(self.tag.cmp(&other.tag))
    }
}

use serde::{Deserialize, Serialize};

use crate::units::{Price, Qty, Resolution};

/// One resting order with the owner stripped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub price: Price,
    pub quantity: Qty,
}

/// Public disclosure after one auction of a delivery slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orderbook {
    pub slot: usize,
    pub hours_ahead: usize,
    pub clearing_price: Option<Price>,
    pub net_cleared: Qty,
    /// Ascending by price.
    pub uncleared_asks: Vec<Level>,
    /// Descending by price.
    pub uncleared_bids: Vec<Level>,
}

/// A broker's private result of one auction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OwnFill {
    pub hours_ahead: usize,
    pub bought: Qty,
    pub sold: Qty,
    pub clearing_price: Option<Price>,
    /// Highest buy price submitted, if any.
    pub best_bid: Option<Price>,
}

/// Clearing prices of finished auctions indexed by hours ahead of delivery.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MarketHistory {
    by_depth: Vec<Vec<Price>>,
}

impl MarketHistory {
    pub(crate) fn record(&mut self, hours_ahead: usize, price: Price) {
        if self.by_depth.len() <= hours_ahead {
            self.by_depth.resize(hours_ahead + 1, Vec::new());
        }
        self.by_depth[hours_ahead].push(price);
    }

    /// Prices of earlier slots' auctions held `hours_ahead` before delivery,
    /// oldest first.
    pub fn prices_at(&self, hours_ahead: usize) -> &[Price] {
        self.by_depth.get(hours_ahead).map_or(&[], Vec::as_slice)
    }
}

/// Everything a strategy may see when bidding. Opponent demand, opponent
/// fills and generator parameters are not reachable from here.
#[derive(Clone, Copy, Debug)]
pub struct BrokerView<'a> {
    pub slot: usize,
    /// Auctions left before delivery including this one; the first auction
    /// of a slot has `rounds_per_slot`, the last has 1.
    pub hours_ahead: usize,
    pub rounds_per_slot: usize,
    pub p_max: Price,
    pub resolution: Resolution,
    pub prior_price: Price,
    /// Forecast of the broker's own demand for the slot.
    pub own_forecast: Qty,
    /// Forecast of the whole market's demand for the slot.
    pub market_forecast: Qty,
    pub bought: Qty,
    pub sold: Qty,
    pub(crate) books: &'a [Orderbook],
    pub(crate) fills: &'a [OwnFill],
    pub(crate) history: &'a MarketHistory,
}

impl<'a> BrokerView<'a> {
    /// Builds a view from explicit parts; used by the simulator and by
    /// scripted fixtures.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        slot: usize,
        hours_ahead: usize,
        rounds_per_slot: usize,
        p_max: Price,
        resolution: Resolution,
        prior_price: Price,
        own_forecast: Qty,
        market_forecast: Qty,
        bought: Qty,
        sold: Qty,
        books: &'a [Orderbook],
        fills: &'a [OwnFill],
        history: &'a MarketHistory,
    ) -> Self {
        BrokerView {
            slot,
            hours_ahead,
            rounds_per_slot,
            p_max,
            resolution,
            prior_price,
            own_forecast,
            market_forecast,
            bought,
            sold,
            books,
            fills,
            history,
        }
    }

    pub fn held(&self) -> Qty {
        self.bought.saturating_sub(self.sold)
    }

    /// Forecast demand not yet covered.
    pub fn remaining_requirement(&self) -> Qty {
        self.own_forecast.saturating_sub(self.held())
    }

    /// Holdings above forecast demand.
    pub fn surplus(&self) -> Qty {
        self.held().saturating_sub(self.own_forecast)
    }

    /// Market demand forecast less the volume already traded for the slot.
    pub fn market_remaining(&self) -> Qty {
        let traded: Qty = self.books.iter().map(|b| b.net_cleared).sum();
        self.market_forecast.saturating_sub(traded)
    }

    /// Disclosures of this slot's earlier auctions, oldest first.
    pub fn orderbooks(&self) -> &'a [Orderbook] {
        self.books
    }

    pub fn last_orderbook(&self) -> Option<&'a Orderbook> {
        self.books.last()
    }

    /// Own results in this slot's earlier auctions, oldest first.
    pub fn fills(&self) -> &'a [OwnFill] {
        self.fills
    }

    /// Clearing prices of earlier slots at the same depth.
    pub fn past_clearing_prices(&self, hours_ahead: usize) -> &'a [Price] {
        self.history.prices_at(hours_ahead)
    }

    pub fn last_clearing_price(&self, hours_ahead: usize) -> Option<Price> {
        self.past_clearing_prices(hours_ahead).last().copied()
    }
}

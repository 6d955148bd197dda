use serde::{Deserialize, Serialize};

use super::{Order, OwnerId, Side};
use crate::error::BookError;
use crate::units::{Price, Qty};

/// Bounds applied when a raw order list is normalized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BookLimits {
    pub p_max: Price,
    /// Cap on a single wholesale ask. `None` leaves asks uncapped.
    pub q_max: Option<Qty>,
}

impl BookLimits {
    pub fn new(p_max: Price) -> Self {
        BookLimits { p_max, q_max: None }
    }
}

/// One round's book: supply side (asks and sell bids) ascending by price and
/// demand side descending by price. Equal prices are ordered by descending
/// quantity, then ascending tag.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CombinedBook {
    supply: Vec<Order>,
    demand: Vec<Order>,
}

impl CombinedBook {
    pub fn supply(&self) -> &[Order] {
        &self.supply
    }

    pub fn demand(&self) -> &[Order] {
        &self.demand
    }

    pub fn len(&self) -> usize {
        self.supply.len() + self.demand.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supply.is_empty() && self.demand.is_empty()
    }

    /// Every order, supply side first.
    pub fn orders(&self) -> impl Iterator<Item = &Order> {
        self.supply.iter().chain(self.demand.iter())
    }

    /// Looks up an order by its tag.
    pub fn by_tag(&self, tag: u64) -> Option<&Order> {
        self.orders().find(|o| o.tag == tag)
    }

    /// Some owner when every supply-side order is a sell bid of that single prosumer.
    pub fn sole_seller(&self) -> Option<OwnerId> {
        let first = self.supply.first()?;
        if first.side != Side::SellBid {
            return None;
        }
        self.supply
            .iter()
            .all(|o| o.side == Side::SellBid && o.owner == first.owner)
            .then_some(first.owner)
    }
}

/// Validates orders, assigns canonical tags and sorts both sides into
/// matching priority.
///
/// Tags are assigned by sorting on (side, price, quantity, owner), so the
/// resulting book depends only on the input multiset and not on its order.
pub fn normalize_book(raw: Vec<Order>, limits: &BookLimits) -> Result<CombinedBook, BookError> {
    for (index, order) in raw.iter().enumerate() {
        if order.quantity.is_zero() {
            return Err(BookError::NonPositiveQuantity { index });
        }
        if !order.price.is_finite() || order.price < 0.0 || order.price > limits.p_max {
            return Err(BookError::PriceOutOfRange {
                index,
                price: order.price,
                p_max: limits.p_max,
            });
        }
        if let (Side::Ask, Some(cap)) = (order.side, limits.q_max) {
            if order.quantity > cap {
                return Err(BookError::QuantityAboveCap {
                    index,
                    quantity: order.quantity,
                    cap,
                });
            }
        }
    }

    let mut orders = raw;
    orders.sort_by(Order::canonical_cmp);
    let mut supply = Vec::new();
    let mut demand = Vec::new();
    for (tag, mut order) in orders.into_iter().enumerate() {
        order.tag = tag as u64;
        if order.side.is_supply() {
            supply.push(order);
        } else {
            demand.push(order);
        }
    }
    supply.sort_by(Order::supply_priority);
    demand.sort_by(Order::demand_priority);
    Ok(CombinedBook { supply, demand })
}

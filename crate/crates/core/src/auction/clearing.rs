//! Uniform-price clearing of a [`CombinedBook`].
//!
//! Orders are grouped into priority classes of identical (price, quantity).
//! Classes are served strictly in priority order; within the class that
//! straddles the cleared volume every member gets the same share, and
//! indivisible remainder units go one each to the lowest tags.

use serde::{Deserialize, Serialize};

use super::{CombinedBook, Order, OwnerId};
use crate::error::ClearingError;
use crate::units::{Price, Qty};

/// Which point of the dual interval `[ask, bid]` a merit-order clearing reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualPick {
    LowerAsk,
    Midpoint,
    UpperBid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PricingRule {
    /// `k * ask + (1 - k) * bid`, with `k` in `[0, 1]`.
    KDouble(f64),
    MeritOrderDual(DualPick),
}

impl PricingRule {
    /// Average clearing price rule.
    pub const ACPR: PricingRule = PricingRule::KDouble(0.5);

    pub fn validate(self) -> Result<Self, ClearingError> {
        match self {
            PricingRule::KDouble(k) if !(0.0..=1.0).contains(&k) => {
                Err(ClearingError::InvalidK(k))
            }
            rule => Ok(rule),
        }
    }
}

impl Default for PricingRule {
    fn default() -> Self {
        PricingRule::ACPR
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfMatchGuard {
    /// A prosumer's buys are withheld when the whole supply side is her own sell bids.
    #[default]
    On,
    Off,
}

/// Prices of the last cleared supply order and the last cleared buy bid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalPair {
    pub ask_price: Price,
    pub bid_price: Price,
}

/// Clearing price for a marginal pair under `rule`.
pub fn price_of(pair: Option<MarginalPair>, rule: PricingRule) -> Result<Price, ClearingError> {
    let MarginalPair {
        ask_price: a,
        bid_price: b,
    } = pair.ok_or(ClearingError::NoMarginalPair)?;
    let price = match rule.validate()? {
        PricingRule::KDouble(k) => k * a + (1.0 - k) * b,
        PricingRule::MeritOrderDual(DualPick::LowerAsk) => a,
        PricingRule::MeritOrderDual(DualPick::UpperBid) => b,
        PricingRule::MeritOrderDual(DualPick::Midpoint) => (a + b) / 2.0,
    };
    Ok(price.clamp(a.min(b), b.max(a)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClearingOutcome {
    /// `None` when nothing traded.
    pub clearing_price: Option<Price>,
    pub total_cleared: Qty,
    /// Cleared quantity per order, indexed by tag.
    pub cleared_by_tag: Vec<Qty>,
    pub marginal: Option<MarginalPair>,
    /// Prosumer whose buys were withheld by the self-match guard.
    pub excluded_owner: Option<OwnerId>,
}

impl ClearingOutcome {
    pub fn is_degenerate(&self) -> bool {
        self.total_cleared.is_zero()
    }

    pub fn cleared(&self, tag: u64) -> Qty {
        self.cleared_by_tag
            .get(tag as usize)
            .copied()
            .unwrap_or(Qty::ZERO)
    }

    pub fn last_cleared_ask_price(&self) -> Option<Price> {
        self.marginal.map(|m| m.ask_price)
    }

    pub fn last_cleared_bid_price(&self) -> Option<Price> {
        self.marginal.map(|m| m.bid_price)
    }

    /// Price times quantity for a cleared amount, or zero on a degenerate outcome.
    pub fn value_of(&self, q: Qty) -> f64 {
        self.clearing_price.map_or(0.0, |p| p * q.as_f64())
    }
}

/// Whether a demand order takes part in matching under the guard.
pub(crate) fn participates(order: &Order, excluded: Option<OwnerId>) -> bool {
    excluded != Some(order.owner)
}

pub(crate) fn excluded_owner(book: &CombinedBook, guard: SelfMatchGuard) -> Option<OwnerId> {
    match guard {
        SelfMatchGuard::On => book.sole_seller(),
        SelfMatchGuard::Off => None,
    }
}

/// Consecutive runs of orders sharing (price, quantity).
fn classes<'a>(orders: &[&'a Order]) -> Vec<Vec<&'a Order>> {
    let mut out: Vec<Vec<&Order>> = Vec::new();
    for &o in orders {
        match out.last_mut() {
            Some(class)
                if class[0].price.total_cmp(&o.price).is_eq() && class[0].quantity == o.quantity =>
            {
                class.push(o)
            }
            _ => out.push(vec![o]),
        }
    }
    out
}

/// Hands `volume` to classes in priority order; returns per-tag fills.
fn allocate(classes: &[Vec<&Order>], mut volume: u64, fills: &mut [Qty]) {
    for class in classes {
        if volume == 0 {
            break;
        }
        let each = class[0].quantity.units();
        let total = each * class.len() as u64;
        if volume >= total {
            for o in class {
                fills[o.tag as usize] = o.quantity;
            }
            volume -= total;
        } else {
            let n = class.len() as u64;
            let share = volume / n;
            let extra = volume % n;
            // class members are already in ascending tag order
            for (i, o) in class.iter().enumerate() {
                fills[o.tag as usize] = Qty(share + u64::from((i as u64) < extra));
            }
            volume = 0;
        }
    }
}

/// Clears `book` at a single uniform price.
///
/// A book with no crossing yields a degenerate outcome (`total_cleared == 0`),
/// not an error.
pub fn clear(
    book: &CombinedBook,
    rule: PricingRule,
    guard: SelfMatchGuard,
) -> Result<ClearingOutcome, ClearingError> {
    rule.validate()?;
    let excluded = excluded_owner(book, guard);
    let supply: Vec<&Order> = book.supply().iter().collect();
    let demand: Vec<&Order> = book
        .demand()
        .iter()
        .filter(|o| participates(o, excluded))
        .collect();
    let supply_classes = classes(&supply);
    let demand_classes = classes(&demand);

    // walk the two curves until one is exhausted or they cross
    let mut volume = 0u64;
    let (mut i, mut j) = (0usize, 0usize);
    let total = |c: &Vec<&Order>| c[0].quantity.units() * c.len() as u64;
    let mut rem_d = demand_classes.first().map_or(0, total);
    let mut rem_s = supply_classes.first().map_or(0, total);
    while i < demand_classes.len()
        && j < supply_classes.len()
        && demand_classes[i][0].price >= supply_classes[j][0].price
    {
        let m = rem_d.min(rem_s);
        volume += m;
        rem_d -= m;
        rem_s -= m;
        if rem_d == 0 {
            i += 1;
            rem_d = demand_classes.get(i).map_or(0, total);
        }
        if rem_s == 0 {
            j += 1;
            rem_s = supply_classes.get(j).map_or(0, total);
        }
    }

    let n_tags = book.len();
    let mut fills = vec![Qty::ZERO; n_tags];
    allocate(&supply_classes, volume, &mut fills);
    allocate(&demand_classes, volume, &mut fills);

    let marginal = if volume == 0 {
        None
    } else {
        let last_ask = supply
            .iter()
            .rev()
            .find(|o| !fills[o.tag as usize].is_zero())
            .map(|o| o.price);
        let last_bid = demand
            .iter()
            .rev()
            .find(|o| !fills[o.tag as usize].is_zero())
            .map(|o| o.price);
        last_ask.zip(last_bid).map(|(ask_price, bid_price)| MarginalPair {
            ask_price,
            bid_price,
        })
    };
    let clearing_price = match marginal {
        Some(_) => Some(price_of(marginal, rule)?),
        None => None,
    };
    Ok(ClearingOutcome {
        clearing_price,
        total_cleared: Qty(volume),
        cleared_by_tag: fills,
        marginal,
        excluded_owner: excluded,
    })
}

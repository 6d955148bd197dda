use super::Strategy;
use crate::env::BrokerView;
use crate::game::{Bid, PlayerBids};

/// Buys the whole remaining requirement at `p_max` as soon as it can.
#[derive(Clone, Copy, Debug, Default)]
pub struct MarketOrder;

impl MarketOrder {
    pub const NAME: &'static str = "market-order";
}

impl Strategy for MarketOrder {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn bids(&mut self, view: &BrokerView<'_>) -> PlayerBids {
        let q = view.remaining_requirement();
        let mut out = PlayerBids::idle();
        if !q.is_zero() {
            out.buys.push(Bid::new(view.p_max, q));
        }
        out
    }
}

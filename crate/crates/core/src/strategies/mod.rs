//! Broker bidding strategies for the simulator.

mod market;
mod mpne_bbs;
mod zi;
mod zip;

use serde::{Deserialize, Serialize};

pub use market::MarketOrder;
pub use mpne_bbs::{est_bid_price, MpneBbs, MpneBbsConfig, PriceEstimate};
pub use zi::{ZeroIntelligence, ZiConfig};
pub use zip::{ZipConfig, ZipState, ZipStrategy};

use crate::env::BrokerView;
use crate::error::EnvError;
use crate::game::PlayerBids;

/// A broker's bidding rule. It sees only its own [`BrokerView`] and owns
/// whatever state and randomness it needs.
pub trait Strategy: Send {
    fn name(&self) -> &'static str;

    /// Orders for the current auction of the view's slot.
    fn bids(&mut self, view: &BrokerView<'_>) -> PlayerBids;
}

/// Registered strategy names.
pub const STRATEGY_NAMES: [&str; 4] = [
    MpneBbs::NAME,
    ZeroIntelligence::NAME,
    ZipStrategy::NAME,
    MarketOrder::NAME,
];

/// Hyperparameters for every registered strategy.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrategyParams {
    pub mpne_bbs: MpneBbsConfig,
    pub zi: ZiConfig,
    pub zip: ZipConfig,
}

impl StrategyParams {
    pub fn validate(&self) -> Result<(), EnvError> {
        self.mpne_bbs.validate()?;
        self.zi.validate()?;
        self.zip.validate()
    }
}

/// Builds a strategy by name. `seed` drives its private random stream.
pub fn strategy_by_name(name: &str, seed: u64, params: &StrategyParams) -> Result<Box<dyn Strategy>, EnvError> {
    Ok(match name {
        MpneBbs::NAME => Box::new(MpneBbs::new(params.mpne_bbs.clone(), seed)),
        ZeroIntelligence::NAME => Box::new(ZeroIntelligence::new(params.zi.clone(), seed)),
        ZipStrategy::NAME => Box::new(ZipStrategy::new(params.zip.clone())),
        MarketOrder::NAME => Box::new(MarketOrder),
        _ => return Err(EnvError::UnknownStrategy(name.to_string())),
    })
}

/// Splits `total` units over `parts` bids as evenly as possible, larger
/// shares first.
pub(crate) fn even_split(total: u64, parts: usize) -> Vec<u64> {
    let parts = parts.max(1) as u64;
    let (q, r) = (total / parts, total % parts);
    (0..parts).map(|i| q + u64::from(i < r)).filter(|&x| x > 0).collect()
}

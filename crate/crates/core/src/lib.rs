//! Periodic double auction engine and equilibrium laboratory.
//!
//! * [`auction`]: orders, books, uniform clearing, KKT certificates.
//! * [`game`]: the finite-horizon Markov game over repeated clearings.
//! * [`equilibrium`]: closed-form equilibrium bids, predictions and values.
//! * [`deviation`]: exhaustive unilateral-deviation search on small games.
//! * [`env`]: an incomplete-information day-ahead market simulator.
//! * [`strategies`]: broker bidding strategies for the simulator.
//! * [`harness`]: seeded tournaments and equilibrium suites.

pub mod auction;
pub mod deviation;
pub mod env;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod harness;
pub mod strategies;
pub mod units;

pub use auction::{
    clear, normalize_book, ClearingOutcome, CombinedBook, Order, OwnerId, PricingRule,
    SelfMatchGuard, Side,
};
pub use error::{BookError, ClearingError, EnvError, GameError};
pub use units::{Price, Qty, Resolution};

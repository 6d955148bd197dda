//! Orders, books and the uniform clearing engine.

mod book;
mod clearing;
mod kkt;
mod order;
mod text;

pub use book::{normalize_book, BookLimits, CombinedBook};
pub use clearing::{
    clear, price_of, ClearingOutcome, DualPick, MarginalPair, PricingRule, SelfMatchGuard,
};
pub use kkt::{certify_kkt, kkt_residuals_at, KktCertificate, KktResiduals};
pub use order::{Order, OwnerId, Side};
pub use text::{format_orders, parse_orders};

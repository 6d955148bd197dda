use thiserror::Error;

use crate::units::{Price, Qty};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BookError {
    #[error("order {index}: quantity must be positive")]
    NonPositiveQuantity { index: usize },
    #[error("order {index}: price {price} outside [0, {p_max}]")]
    PriceOutOfRange { index: usize, price: Price, p_max: Price },
    #[error("order {index}: ask quantity {quantity} exceeds cap {cap}")]
    QuantityAboveCap { index: usize, quantity: Qty, cap: Qty },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClearingError {
    #[error("no marginal pair: nothing traded")]
    NoMarginalPair,
    #[error("k-double weight {0} outside [0, 1]")]
    InvalidK(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("player {player}: {reason}")]
    Action { player: usize, reason: String },
    #[error("balancing price {upsilon} does not exceed gamma * p_max = {bound}")]
    WeakBalancing { upsilon: f64, bound: f64 },
    #[error(transparent)]
    Book(#[from] BookError),
    #[error(transparent)]
    Clearing(#[from] ClearingError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
    #[error(transparent)]
    Book(#[from] BookError),
    #[error(transparent)]
    Clearing(#[from] ClearingError),
}

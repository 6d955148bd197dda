//! Exhaustive unilateral-deviation search against the equilibrium profile.

mod grid;
mod instance;
mod replay;
mod search;
mod selfmatch;

pub use grid::{
    check_size, classify, deviation_grid, enumerate_deviations, DeviationClass, DeviationGrid,
    GridConfig, MAX_ASKS, MAX_HORIZON, MAX_PLAYERS, MAX_QUANTITY,
};
pub use instance::{generate_instance, Instance, InstanceSpec, SupplyCase};
pub use replay::{read_violations, replay_violation, write_violations, ReplayOutcome};
pub use search::{
    default_slack, deviation_value, verify_mpne, DeviationReport, StateCheck, Violation,
};
pub use selfmatch::{check_self_match_manipulation, SelfMatchReport, SelfMatchRound};

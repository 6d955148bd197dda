//! Closed-form equilibrium bidding: round indices, the equilibrium policy,
//! predicted clearing statistics and equilibrium values.

mod indices;
mod policy;
mod predict;

pub use indices::{compute_indices, EquilibriumIndices};
pub use policy::{mpne_bid, mpne_joint_action, mpne_policy, mpne_rollout, MpneBid, MpnePolicy};
pub use predict::{mpne_value, mpne_values, predict_clearing, predicted_next, ClearingPrediction};

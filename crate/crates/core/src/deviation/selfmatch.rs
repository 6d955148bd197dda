use serde::{Deserialize, Serialize};

use super::search::{verify_mpne, DeviationReport};
use super::{GridConfig, Instance};
use crate::auction::SelfMatchGuard;
use crate::equilibrium::{compute_indices, mpne_rollout};
use crate::error::GameError;

/// Price test for one round of the wash-trade argument.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfMatchRound {
    pub round: usize,
    pub p_z: f64,
    pub p_z_next: f64,
    /// `p_z * (1 + 0.5 * sell / (sell + buy))` for the seller at this round.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfMatchReport {
    /// Player with the largest sellable supply.
    pub seller: usize,
    pub rounds: Vec<SelfMatchRound>,
    /// Some round satisfies `p_z_next < bound`.
    pub condition_holds: bool,
    pub guarded: DeviationReport,
    pub unguarded: DeviationReport,
    /// Unguarded deviations that beat both the equilibrium and every
    /// guarded deviation from the same state by more than the slack.
    pub manipulations: usize,
}

impl SelfMatchReport {
    pub fn manipulation_found(&self) -> bool {
        self.manipulations > 0
    }
}

/// Runs the deviation search with and without the self-match guard and
/// evaluates the wash-trade price condition along the equilibrium path.
pub fn check_self_match_manipulation(
    instance: &Instance,
    grid: &GridConfig,
    slack: f64,
) -> Result<SelfMatchReport, GameError> {
    let seller = (0..instance.config.n_players)
        .max_by_key(|&b| (instance.state.supply[b], std::cmp::Reverse(b)))
        .unwrap_or(0);

    let mut on = instance.clone();
    on.config.guard = SelfMatchGuard::On;
    let mut off = instance.clone();
    off.config.guard = SelfMatchGuard::Off;

    let path = mpne_rollout(&on.state, &on.config)?;
    let p_z: Vec<f64> = path
        .rounds
        .iter()
        .map(|r| compute_indices(&r.state, &on.config).p_z)
        .collect();
    let rounds: Vec<SelfMatchRound> = path
        .rounds
        .iter()
        .zip(p_z.windows(2))
        .map(|(r, w)| {
            let sell = r.state.supply[seller].units() as f64;
            let buy = r.state.demand[seller].units() as f64;
            let share = if sell + buy > 0.0 { sell / (sell + buy) } else { 0.0 };
            let bound = w[0] * (1.0 + 0.5 * share);
            SelfMatchRound {
                round: r.state.round,
                p_z: w[0],
                p_z_next: w[1],
                bound,
                holds: w[1] < bound,
            }
        })
        .collect();

    let guarded = verify_mpne(&on, grid, slack)?;
    let unguarded = verify_mpne(&off, grid, slack)?;
    let manipulations = unguarded
        .checks
        .iter()
        .zip(&guarded.checks)
        .filter(|(u, g)| {
            u.player == seller
                && u.margin > slack
                && u.best_deviation_value < g.best_deviation_value - slack
        })
        .count();
    Ok(SelfMatchReport {
        seller,
        condition_holds: rounds.iter().any(|r| r.holds),
        rounds,
        guarded,
        unguarded,
        manipulations,
    })
}

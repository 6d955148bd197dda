use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::grid::{check_size, deviation_grid, GridConfig};
use super::Instance;
use crate::equilibrium::{compute_indices, mpne_joint_action, mpne_rollout};
use crate::error::GameError;
use crate::game::{step, GameConfig, MarketState, PlayerBids};

/// Best and worst value a deviator can reach from a state.
#[derive(Clone, Debug)]
struct Entry {
    best: f64,
    worst: f64,
    best_action: PlayerBids,
}

/// Dynamic program over the deviator's Markov policies: every other player
/// follows the equilibrium profile, the deviator picks a grid action at
/// each state it reaches.
pub(crate) struct Search<'a> {
    config: &'a GameConfig,
    grid: &'a GridConfig,
    player: usize,
    memo: HashMap<MarketState, Entry>,
    pub(crate) evaluated: u64,
}

impl<'a> Search<'a> {
    pub(crate) fn new(config: &'a GameConfig, grid: &'a GridConfig, player: usize) -> Self {
        Search {
            config,
            grid,
            player,
            memo: HashMap::new(),
            evaluated: 0,
        }
    }

    fn entry(&mut self, state: &MarketState) -> Result<Entry, GameError> {
        if let Some(e) = self.memo.get(state) {
            return Ok(e.clone());
        }
        let e = if state.is_terminal(self.config) {
            let v = self
                .config
                .money(self.config.balancing_price, state.demand[self.player]);
            Entry {
                best: v,
                worst: v,
                best_action: PlayerBids::idle(),
            }
        } else {
            let mut joint = mpne_joint_action(state, self.config);
            let g = deviation_grid(state, self.player, self.config, self.grid);
            let mut e = Entry {
                best: f64::INFINITY,
                worst: f64::NEG_INFINITY,
                best_action: PlayerBids::idle(),
            };
            for action in g.actions() {
                joint.players[self.player] = action;
                let r = step(state, &joint, self.config)?;
                self.evaluated += 1;
                let tail = self.entry(&r.next)?;
                let cost = r.costs[self.player];
                let best = cost + tail.best;
                let worst = cost + tail.worst;
                if best < e.best {
                    e.best = best;
                    e.best_action = joint.players[self.player].clone();
                }
                e.worst = e.worst.max(worst);
            }
            e
        };
        self.memo.insert(state.clone(), e.clone());
        Ok(e)
    }

    /// Lowest reachable value from `state`.
    pub(crate) fn best_value(&mut self, state: &MarketState) -> Result<f64, GameError> {
        Ok(self.entry(state)?.best)
    }

    /// Highest reachable value from `state`.
    pub(crate) fn worst_value(&mut self, state: &MarketState) -> Result<f64, GameError> {
        Ok(self.entry(state)?.worst)
    }

    /// Best-response actions from `state` to settlement.
    pub(crate) fn best_path(&mut self, state: &MarketState) -> Result<Vec<PlayerBids>, GameError> {
        let mut path = Vec::new();
        let mut s = state.clone();
        while !s.is_terminal(self.config) {
            let action = self.entry(&s)?.best_action;
            let mut joint = mpne_joint_action(&s, self.config);
            joint.players[self.player] = action.clone();
            s = step(&s, &joint, self.config)?.next;
            path.push(action);
        }
        Ok(path)
    }
}

/// Plays `path` for `player` from `state` while everyone else follows the
/// equilibrium profile; returns the deviator's value.
pub fn deviation_value(
    state: &MarketState,
    player: usize,
    path: &[PlayerBids],
    config: &GameConfig,
) -> Result<f64, GameError> {
    let mut s = state.clone();
    let mut total = 0.0;
    for action in path {
        if s.is_terminal(config) {
            break;
        }
        let mut joint = mpne_joint_action(&s, config);
        joint.players[player] = action.clone();
        let r = step(&s, &joint, config)?;
        total += r.costs[player];
        s = r.next;
    }
    while !s.is_terminal(config) {
        let r = step(&s, &mpne_joint_action(&s, config), config)?;
        total += r.costs[player];
        s = r.next;
    }
    Ok(total + config.money(config.balancing_price, s.demand[player]))
}

/// Margin of one player at one equilibrium-path state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateCheck {
    pub player: usize,
    pub round: usize,
    pub equilibrium_value: f64,
    pub best_deviation_value: f64,
    pub worst_deviation_value: f64,
    /// `equilibrium_value - best_deviation_value`; positive means a deviation pays.
    pub margin: f64,
    /// Supply is short and the player is served after the marginal player,
    /// so the equilibrium argument predicts indifference.
    pub trailing: bool,
}

/// A deviation that beats the equilibrium by more than the slack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub instance: Instance,
    pub player: usize,
    pub state: MarketState,
    /// Deviator's actions from `state` onward.
    pub path: Vec<PlayerBids>,
    pub equilibrium_value: f64,
    pub deviation_value: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    /// The balancing price does not clear `gamma * p_max`; no claim is made.
    pub premise_violated: bool,
    pub slack: f64,
    pub grid: GridConfig,
    /// (state, action) pairs cleared during the search.
    pub actions_evaluated: u64,
    pub checks: Vec<StateCheck>,
    pub max_margin: f64,
    pub violations: Vec<Violation>,
}

impl DeviationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Default tolerance: one price tick on the largest demand plus one
/// resolution unit at `p_max`.
pub fn default_slack(instance: &Instance) -> f64 {
    let c = &instance.config;
    let q_max = instance.state.demand.iter().copied().max().unwrap_or_default();
    c.epsilon * c.resolution.to_physical(q_max) + c.resolution.0 * c.p_max
}

/// Searches every player's grid deviations at every equilibrium-path state.
pub fn verify_mpne(instance: &Instance, grid: &GridConfig, slack: f64) -> Result<DeviationReport, GameError> {
    let (state, config) = (&instance.state, &instance.config);
    check_size(state, config)?;
    let mut weak = config.clone();
    weak.allow_weak_balancing = true;
    weak.validate(state)?;
    let premise_violated = !config.balancing_premise_holds(state);

    let path = mpne_rollout(state, config)?;
    let mut report = DeviationReport {
        premise_violated,
        slack,
        grid: grid.clone(),
        actions_evaluated: 0,
        checks: Vec::new(),
        max_margin: f64::NEG_INFINITY,
        violations: Vec::new(),
    };
    for player in 0..config.n_players {
        let mut search = Search::new(config, grid, player);
        for (i, rec) in path.rounds.iter().enumerate() {
            let s = &rec.state;
            let eq = path.values_from(i)[player];
            let best = search.best_value(s)?;
            let worst = search.worst_value(s)?;
            let ix = compute_indices(s, config);
            let trailing = !ix.adequate
                && ix.phi.is_some_and(|phi| {
                    let pos = |b| ix.order.iter().position(|&x| x == b);
                    matches!((pos(player), pos(phi)), (Some(p), Some(f)) if p > f)
                });
            let margin = eq - best;
            report.max_margin = report.max_margin.max(margin);
            if margin > slack {
                report.violations.push(Violation {
                    instance: instance.clone(),
                    player,
                    state: s.clone(),
                    path: search.best_path(s)?,
                    equilibrium_value: eq,
                    deviation_value: best,
                    margin,
                });
            }
            report.checks.push(StateCheck {
                player,
                round: s.round,
                equilibrium_value: eq,
                best_deviation_value: best,
                worst_deviation_value: worst,
                margin,
                trailing,
            });
        }
        report.actions_evaluated += search.evaluated;
    }
    Ok(report)
}

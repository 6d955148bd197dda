//! Seeded tournaments on the simulator and batch equilibrium checks.

mod spec;
mod suite;
mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use spec::{ExperimentSpec, Mode, SuiteSpec};
pub use suite::{run_equilibrium_suite, CaseSummary, SuiteReport};
pub use table::{CostRow, CostTable};

use crate::env::{Environment, SlotResult};
use crate::error::EnvError;
use crate::strategies::{strategy_by_name, Strategy, STRATEGY_NAMES};

/// Seed of a strategy's private stream in one game. Depends only on the
/// game seed and the strategy name, so brokers running the same strategy
/// draw identical streams.
pub fn strategy_seed(game_seed: u64, name: &str) -> u64 {
    let idx = STRATEGY_NAMES.iter().position(|n| *n == name).unwrap_or(STRATEGY_NAMES.len());
    game_seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((idx as u64 + 1).wrapping_mul(0xBF58_476D_1CE4_E5B9))
}

/// One broker's totals over a game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrokerTotals {
    pub strategy: String,
    pub demand: f64,
    pub wholesale_cost: f64,
    pub balancing_cost: f64,
}

impl BrokerTotals {
    pub fn total_cost(&self) -> f64 {
        self.wholesale_cost + self.balancing_cost
    }

    pub fn unit_cost(&self) -> f64 {
        if self.demand > 0.0 {
            self.total_cost() / self.demand
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub seed: u64,
    pub brokers: Vec<BrokerTotals>,
    pub warnings: usize,
    /// Per-slot records; empty unless logs were requested.
    #[serde(skip)]
    pub slots: Vec<SlotResult>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub table: CostTable,
    pub games: Vec<GameResult>,
}

/// Plays one game with one broker per listed strategy.
pub fn run_game(spec: &ExperimentSpec, seed: u64, keep_slots: bool) -> Result<GameResult, EnvError> {
    let mut strategies: Vec<Box<dyn Strategy>> = spec
        .strategies
        .iter()
        .map(|name| strategy_by_name(name, strategy_seed(seed, name), &spec.params))
        .collect::<Result<_, _>>()?;
    let mut env = Environment::new(spec.env_for(seed), strategies.len())?;
    let mut brokers: Vec<BrokerTotals> = spec
        .strategies
        .iter()
        .map(|s| BrokerTotals {
            strategy: s.clone(),
            demand: 0.0,
            wholesale_cost: 0.0,
            balancing_cost: 0.0,
        })
        .collect();
    let mut warnings = 0;
    let mut slots = Vec::new();
    while !env.is_finished() {
        let r = env.advance_slot(&mut strategies)?;
        for (t, b) in brokers.iter_mut().zip(&r.brokers) {
            t.demand += b.demand;
            t.wholesale_cost += b.wholesale_cost;
            t.balancing_cost += b.balancing_cost;
        }
        warnings += r.warnings.len();
        if keep_slots {
            slots.push(r);
        }
    }
    Ok(GameResult {
        seed,
        brokers,
        warnings,
        slots,
    })
}

/// Runs every game of a tournament spec and aggregates unit costs per
/// strategy. Writes `cost_table.csv` (and per-game logs if requested)
/// under `spec.out`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput, EnvError> {
    spec.validate()?;
    if spec.mode == Mode::EquilibriumCheck {
        return Err(EnvError::Config(
            "equilibrium_check mode runs through run_equilibrium_suite".into(),
        ));
    }
    let keep = spec.write_logs && spec.out.is_some();
    let games: Vec<GameResult> = spec
        .game_seeds()
        .into_par_iter()
        .map(|seed| run_game(spec, seed, keep))
        .collect::<Result<_, _>>()?;

    let mut names: Vec<String> = Vec::new();
    for s in &spec.strategies {
        if !names.contains(s) {
            names.push(s.clone());
        }
    }
    let per_strategy = names
        .into_iter()
        .map(|name| {
            let per_game = games
                .iter()
                .map(|g| {
                    let mine = g.brokers.iter().filter(|b| b.strategy == name);
                    let (cost, demand) = mine.fold((0.0, 0.0), |(c, d), b| (c + b.total_cost(), d + b.demand));
                    if demand > 0.0 {
                        cost / demand
                    } else {
                        0.0
                    }
                })
                .collect();
            (name, per_game)
        })
        .collect();
    let table = CostTable::from_games(per_strategy);

    if let Some(dir) = &spec.out {
        let io = |e: std::io::Error| EnvError::Io {
            path: dir.display().to_string(),
            reason: e.to_string(),
        };
        std::fs::create_dir_all(dir).map_err(io)?;
        table.write_csv(&dir.join("cost_table.csv"))?;
        if keep {
            for g in &games {
                write_game_log(&dir.join(format!("game-{}.jsonl", g.seed)), g)?;
            }
        }
    }
    Ok(ExperimentOutput { table, games })
}

pub fn write_game_log(path: &Path, game: &GameResult) -> Result<(), EnvError> {
    let io = |e: std::io::Error| EnvError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    for s in &game.slots {
        s.write_jsonl(&mut w).map_err(io)?;
    }
    w.flush().map_err(io)
}

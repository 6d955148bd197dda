use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{JointAction, MarketState, StepResult};
use crate::auction::ClearingOutcome;
use crate::units::{Price, Qty};

#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord {
    pub state: MarketState,
    pub action: JointAction,
    pub outcome: ClearingOutcome,
    pub bought: Vec<Qty>,
    pub sold: Vec<Qty>,
    pub costs: Vec<f64>,
}

impl RoundRecord {
    pub(crate) fn new(state: MarketState, action: JointAction, res: StepResult) -> Self {
        RoundRecord {
            state,
            action,
            outcome: res.outcome,
            bought: res.bought,
            sold: res.sold,
            costs: res.costs,
        }
    }

    pub fn price(&self) -> Option<Price> {
        self.outcome.clearing_price
    }
}

/// A played game: one record per round plus the settlement state.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub rounds: Vec<RoundRecord>,
    pub terminal: MarketState,
    pub balancing: Vec<f64>,
}

/// One line of the JSON-lines trajectory export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectoryLine {
    Round {
        round: usize,
        price: Option<Price>,
        total_cleared: Qty,
        ask_supply: Qty,
        demand: Vec<Qty>,
        supply: Vec<Qty>,
        bought: Vec<Qty>,
        sold: Vec<Qty>,
        cost: Vec<f64>,
    },
    Settle {
        round: usize,
        demand: Vec<Qty>,
        balancing: Vec<f64>,
        value: Vec<f64>,
    },
}

impl Trajectory {
    /// Total cost per player: every round's cost plus balancing.
    pub fn values(&self) -> Vec<f64> {
        self.values_from(0)
    }

    /// Value from the `i`-th recorded round onward.
    pub fn values_from(&self, i: usize) -> Vec<f64> {
        let mut v = self.balancing.clone();
        for r in self.rounds.iter().skip(i) {
            for (acc, c) in v.iter_mut().zip(&r.costs) {
                *acc += c;
            }
        }
        v
    }

    pub fn prices(&self) -> Vec<Option<Price>> {
        self.rounds.iter().map(RoundRecord::price).collect()
    }

    pub fn lines(&self) -> Vec<TrajectoryLine> {
        let mut out: Vec<TrajectoryLine> = self
            .rounds
            .iter()
            .map(|r| TrajectoryLine::Round {
                round: r.state.round,
                price: r.outcome.clearing_price,
                total_cleared: r.outcome.total_cleared,
                ask_supply: r.state.wholesale_supply(),
                demand: r.state.demand.clone(),
                supply: r.state.supply.clone(),
                bought: r.bought.clone(),
                sold: r.sold.clone(),
                cost: r.costs.clone(),
            })
            .collect();
        out.push(TrajectoryLine::Settle {
            round: self.terminal.round,
            demand: self.terminal.demand.clone(),
            balancing: self.balancing.clone(),
            value: self.values(),
        });
        out
    }

    /// Writes one JSON object per line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for line in self.lines() {
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::EnvError;
use crate::strategies::MpneBbs;

/// Aggregated unit cost of one strategy across games.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub strategy: String,
    pub mean_unit_cost: f64,
    /// Sample standard deviation over games; 0 for a single game.
    pub std_unit_cost: f64,
    /// This strategy's mean divided by the MPNE-BBS mean, when MPNE-BBS
    /// played in the experiment. Above 1 means MPNE-BBS was cheaper.
    pub relative_cost: Option<f64>,
    pub per_game: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostTable {
    pub rows: Vec<CostRow>,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    strategy: String,
    games: usize,
    mean_unit_cost: f64,
    std_unit_cost: f64,
    relative_cost: Option<f64>,
    per_game: String,
}

impl CostTable {
    /// Builds rows from per-game unit costs listed per strategy, keeping
    /// the given strategy order.
    pub fn from_games(per_strategy: Vec<(String, Vec<f64>)>) -> Self {
        let mut rows: Vec<CostRow> = per_strategy
            .into_iter()
            .map(|(strategy, per_game)| {
                let n = per_game.len() as f64;
                let mean = per_game.iter().sum::<f64>() / n;
                let std = if per_game.len() > 1 {
                    (per_game.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
                } else {
                    0.0
                };
                CostRow {
                    strategy,
                    mean_unit_cost: mean,
                    std_unit_cost: std,
                    relative_cost: None,
                    per_game,
                }
            })
            .collect();
        if let Some(base) = rows
            .iter()
            .find(|r| r.strategy == MpneBbs::NAME)
            .map(|r| r.mean_unit_cost)
        {
            for r in &mut rows {
                r.relative_cost = Some(r.mean_unit_cost / base);
            }
        }
        CostTable { rows }
    }

    pub fn row(&self, strategy: &str) -> Option<&CostRow> {
        self.rows.iter().find(|r| r.strategy == strategy)
    }

    pub fn to_csv(&self) -> Result<String, EnvError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            let per_game = r
                .per_game
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(";");
            w.serialize(CsvRow {
                strategy: r.strategy.clone(),
                games: r.per_game.len(),
                mean_unit_cost: r.mean_unit_cost,
                std_unit_cost: r.std_unit_cost,
                relative_cost: r.relative_cost,
                per_game,
            })
            .map_err(|e| EnvError::Config(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| EnvError::Config(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| EnvError::Config(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self, EnvError> {
        let mut rows = Vec::new();
        for rec in csv::Reader::from_reader(text.as_bytes()).deserialize::<CsvRow>() {
            let r = rec.map_err(|e| EnvError::Config(e.to_string()))?;
            let per_game = if r.per_game.is_empty() {
                Vec::new()
            } else {
                r.per_game
                    .split(';')
                    .map(|x| x.parse::<f64>().map_err(|e| EnvError::Config(e.to_string())))
                    .collect::<Result<_, _>>()?
            };
            rows.push(CostRow {
                strategy: r.strategy,
                mean_unit_cost: r.mean_unit_cost,
                std_unit_cost: r.std_unit_cost,
                relative_cost: r.relative_cost,
                per_game,
            });
        }
        Ok(CostTable { rows })
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), EnvError> {
        std::fs::write(path, self.to_csv()?).map_err(|e| EnvError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }
}

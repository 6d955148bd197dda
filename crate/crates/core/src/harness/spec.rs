use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::deviation::{GridConfig, InstanceSpec};
use crate::env::{DemandLevel, EnvConfig};
use crate::error::EnvError;
use crate::strategies::{StrategyParams, STRATEGY_NAMES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// One broker per listed strategy.
    AllPlayer,
    /// Exactly two brokers.
    #[default]
    Pairwise,
    /// Deviation search on generated small games.
    EquilibriumCheck,
}

/// Sizes and seeds for the equilibrium suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSpec {
    pub adequate: usize,
    pub inadequate: usize,
    pub instances: InstanceSpec,
    pub grid: GridConfig,
    /// Overrides the default slack when set.
    pub slack: Option<f64>,
    /// Multiplies every generated balancing price; values below the
    /// premise bound produce premise-violated instances.
    pub balancing_scale: f64,
    pub seed: u64,
    /// Violations kept in the report.
    pub keep_violations: usize,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec {
            adequate: 100,
            inadequate: 100,
            instances: InstanceSpec::default(),
            grid: GridConfig::default(),
            slack: None,
            balancing_scale: 1.0,
            seed: 0,
            keep_violations: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub demand_level: DemandLevel,
    pub miso: bool,
    pub games: usize,
    /// Base seed; game `i` uses `seed + i` unless `seeds` is given.
    pub seed: u64,
    pub seeds: Option<Vec<u64>>,
    pub strategies: Vec<String>,
    /// Directory for the cost table and logs.
    pub out: Option<PathBuf>,
    /// Write one JSON-lines log per game.
    pub write_logs: bool,
    pub env: EnvConfig,
    pub params: StrategyParams,
    pub suite: SuiteSpec,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            mode: Mode::Pairwise,
            demand_level: DemandLevel::Low,
            miso: false,
            games: 10,
            seed: 0,
            seeds: None,
            strategies: vec!["mpne-bbs".into(), "market-order".into()],
            out: None,
            write_logs: false,
            env: EnvConfig::default(),
            params: StrategyParams::default(),
            suite: SuiteSpec::default(),
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self, EnvError> {
        toml::from_str(text).map_err(|e| EnvError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, EnvError> {
        let text = std::fs::read_to_string(path).map_err(|e| EnvError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    /// Per-game seeds in play order.
    pub fn game_seeds(&self) -> Vec<u64> {
        match &self.seeds {
            Some(s) => s.clone(),
            None => (0..self.games as u64).map(|i| self.seed.wrapping_add(i)).collect(),
        }
    }

    /// Environment settings for one game.
    pub fn env_for(&self, seed: u64) -> EnvConfig {
        let mut env = self.env.clone();
        env.demand_level = self.demand_level;
        env.miso.enabled = self.miso;
        env.seed = seed;
        env
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let bad = |m: String| Err(EnvError::Config(m));
        if self.mode == Mode::EquilibriumCheck {
            return Ok(());
        }
        if self.game_seeds().is_empty() {
            return bad("at least one game is required".into());
        }
        if self.strategies.is_empty() {
            return bad("no strategies listed".into());
        }
        if self.mode == Mode::Pairwise && self.strategies.len() != 2 {
            return bad(format!(
                "pairwise mode needs exactly 2 strategies, got {}",
                self.strategies.len()
            ));
        }
        if let Some(name) = self.strategies.iter().find(|s| !STRATEGY_NAMES.contains(&s.as_str())) {
            return Err(EnvError::UnknownStrategy(name.clone()));
        }
        self.params.validate()?;
        self.env_for(0).validate()
    }
}

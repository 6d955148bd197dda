use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::EnvError;
use crate::units::{Price, Resolution};

/// Broker load relative to the base load.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemandLevel {
    #[default]
    Low,
    Mid,
    High,
    Extreme,
}

impl DemandLevel {
    pub const ALL: [DemandLevel; 4] = [
        DemandLevel::Low,
        DemandLevel::Mid,
        DemandLevel::High,
        DemandLevel::Extreme,
    ];

    pub fn multiplier(self) -> f64 {
        match self {
            DemandLevel::Low => 1.0,
            DemandLevel::Mid => 2.0,
            DemandLevel::High => 4.0,
            DemandLevel::Extreme => 8.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DemandLevel::Low => "low",
            DemandLevel::Mid => "mid",
            DemandLevel::High => "high",
            DemandLevel::Extreme => "extreme",
        }
    }
}

impl fmt::Display for DemandLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DemandLevel {
    type Err = EnvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DemandLevel::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                EnvError::Config(format!(
                    "unknown demand level `{s}` (expected low, mid, high or extreme)"
                ))
            })
    }
}

/// Wholesale generator. The ask for the block ending at cumulative quantity
/// `q` (MWh sold into the slot so far plus the block) has base price
/// `a q^2 + b q + c`, scaled by a fresh `U[1 - sigma, 1 + sigma]` draw and
/// clamped to `[0, p_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GencoConfig {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub sigma: f64,
    /// MWh per ask.
    pub block: f64,
    /// MWh offered per delivery slot.
    pub capacity: f64,
}

impl Default for GencoConfig {
    fn default() -> Self {
        GencoConfig {
            a: 0.005,
            b: 0.1,
            c: 15.0,
            sigma: 0.1,
            block: 1.0,
            capacity: 300.0,
        }
    }
}

/// Bulk buyer that buys its estimate plus an overshoot at `p_max` in the
/// first round and sells the excess at price 0 afterwards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MisoConfig {
    pub enabled: bool,
    /// Demand relative to the summed broker demand of the slot.
    pub multiplier: f64,
    /// Fraction bought on top of the estimate in the first round.
    pub overshoot: f64,
}

impl Default for MisoConfig {
    fn default() -> Self {
        MisoConfig {
            enabled: false,
            multiplier: 10.0,
            overshoot: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub rounds_per_slot: usize,
    /// Delivery slots in one game.
    pub slots: usize,
    pub p_max: Price,
    pub balancing_price: Price,
    pub resolution: Resolution,
    /// MWh per broker per slot at the `low` level, before the daily shape.
    pub base_load: f64,
    /// Relative amplitude of the daily load cycle.
    pub daily_swing: f64,
    pub demand_level: DemandLevel,
    pub genco: GencoConfig,
    pub miso: MisoConfig,
    /// Standard deviation of the relative forecast error.
    pub forecast_noise: f64,
    /// Price used by strategies before any clearing has been observed.
    pub prior_price: Price,
    /// Keep uncleared asks and bids in the auction log.
    pub log_orderbook: bool,
    pub seed: u64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            rounds_per_slot: 24,
            slots: 168,
            p_max: 100.0,
            balancing_price: 200.0,
            resolution: Resolution(0.01),
            base_load: 1.0,
            daily_swing: 0.25,
            demand_level: DemandLevel::Low,
            genco: GencoConfig::default(),
            miso: MisoConfig::default(),
            forecast_noise: 0.02,
            prior_price: 50.0,
            log_orderbook: false,
            seed: 0,
        }
    }
}

impl EnvConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, EnvError> {
        let cfg: EnvConfig = toml::from_str(text).map_err(|e| EnvError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, EnvError> {
        let text = std::fs::read_to_string(path).map_err(|e| EnvError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let bad = |m: String| Err(EnvError::Config(m));
        if self.rounds_per_slot == 0 || self.slots == 0 {
            return bad("rounds_per_slot and slots must be positive".into());
        }
        if !(self.p_max.is_finite() && self.p_max > 0.0) {
            return bad(format!("p_max must be positive, got {}", self.p_max));
        }
        if !(self.balancing_price > self.p_max) {
            return bad(format!(
                "balancing_price {} must exceed p_max {}",
                self.balancing_price, self.p_max
            ));
        }
        if !(self.resolution.0 > 0.0) {
            return bad("resolution must be positive".into());
        }
        if !(0.0..=0.5).contains(&self.genco.sigma) {
            return bad(format!("genco.sigma {} outside [0, 0.5]", self.genco.sigma));
        }
        let g = &self.genco;
        if g.a < 0.0 || g.b < 0.0 || g.c < 0.0 {
            return bad("genco coefficients must be non-negative".into());
        }
        if !(g.block > 0.0) || g.capacity < 0.0 {
            return bad("genco.block must be positive and capacity non-negative".into());
        }
        if self.base_load < 0.0 || !(0.0..1.0).contains(&self.daily_swing) {
            return bad("base_load must be non-negative and daily_swing in [0, 1)".into());
        }
        if self.forecast_noise < 0.0 || self.miso.multiplier < 0.0 || self.miso.overshoot < 0.0 {
            return bad("noise, miso multiplier and overshoot must be non-negative".into());
        }
        if !(0.0..=self.p_max).contains(&self.prior_price) {
            return bad(format!("prior_price {} outside [0, p_max]", self.prior_price));
        }
        Ok(())
    }

    /// True per-broker demand of `slot` in MWh.
    pub fn broker_demand(&self, slot: usize) -> f64 {
        let hour = (slot % 24) as f64;
        let shape = 1.0 + self.daily_swing * (std::f64::consts::TAU * (hour - 9.0) / 24.0).sin();
        self.base_load * self.demand_level.multiplier() * shape
    }
}

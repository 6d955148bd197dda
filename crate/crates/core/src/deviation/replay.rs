use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::search::{deviation_value, Violation};
use crate::equilibrium::mpne_rollout;
use crate::error::GameError;

/// Values recomputed from a stored violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub equilibrium_value: f64,
    pub deviation_value: f64,
    pub margin: f64,
    /// Recomputed values agree with the stored ones.
    pub reproduced: bool,
}

/// Replays the stored deviation path against the equilibrium profile.
pub fn replay_violation(v: &Violation) -> Result<ReplayOutcome, GameError> {
    let config = &v.instance.config;
    let eq = mpne_rollout(&v.state, config)?.values()[v.player];
    let dev = deviation_value(&v.state, v.player, &v.path, config)?;
    let tol = 1e-6 * (1.0 + eq.abs().max(dev.abs()));
    Ok(ReplayOutcome {
        equilibrium_value: eq,
        deviation_value: dev,
        margin: eq - dev,
        reproduced: (eq - v.equilibrium_value).abs() <= tol
            && (dev - v.deviation_value).abs() <= tol,
    })
}

pub fn write_violations(path: &Path, violations: &[Violation]) -> Result<(), GameError> {
    let f = File::create(path).map_err(|e| GameError::Config(format!("{}: {e}", path.display())))?;
    serde_json::to_writer_pretty(BufWriter::new(f), violations)
        .map_err(|e| GameError::Config(format!("{}: {e}", path.display())))
}

/// Reads a file written by [`write_violations`]; a single object is accepted too.
pub fn read_violations(path: &Path) -> Result<Vec<Violation>, GameError> {
    let f = File::open(path).map_err(|e| GameError::Config(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_reader(BufReader::new(f))
        .map_err(|e| GameError::Config(format!("{}: {e}", path.display())))?;
    let parsed = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|v| vec![v])
    };
    parsed.map_err(|e| GameError::Config(format!("{}: {e}", path.display())))
}

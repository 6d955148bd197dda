use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SuiteSpec;
use crate::deviation::{
    classify, default_slack, generate_instance, verify_mpne, DeviationClass, DeviationReport,
    SupplyCase, Violation,
};
use crate::equilibrium::{compute_indices, mpne_bid};
use crate::error::GameError;

/// Aggregate over one supply case.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub instances: usize,
    pub premise_violated: usize,
    /// Instances (premise holding) with at least one violation.
    pub failing_instances: usize,
    pub violations: usize,
    pub max_margin: f64,
    pub actions_evaluated: u64,
    /// Checks of players served after the marginal player in short supply.
    pub trailing_checks: usize,
    /// Trailing checks where some deviation changed the value.
    pub trailing_not_indifferent: usize,
    /// Violations keyed by the class of the first deviating buy and sell.
    pub by_class: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub adequate: CaseSummary,
    pub inadequate: CaseSummary,
    /// First violations in instance order, at most `keep_violations`.
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    pub fn holds(&self) -> bool {
        self.adequate.violations == 0 && self.inadequate.violations == 0
    }
}

fn violation_class(v: &Violation) -> String {
    let ix = compute_indices(&v.state, &v.instance.config);
    let eq = mpne_bid(&v.state, v.player, &v.instance.config, &ix);
    let first = v.path.first().cloned().unwrap_or_default();
    let name = |c: DeviationClass| {
        serde_json::to_value(c)
            .ok()
            .and_then(|x| x.as_str().map(str::to_string))
            .unwrap_or_default()
    };
    format!(
        "buy:{}/sell:{}",
        name(classify(&first.buys, eq.buy)),
        name(classify(&first.sells, eq.sell))
    )
}

fn summarize(reports: &[DeviationReport], out: &mut CaseSummary) {
    out.max_margin = f64::NEG_INFINITY;
    for r in reports {
        out.instances += 1;
        if r.premise_violated {
            out.premise_violated += 1;
            continue;
        }
        out.actions_evaluated += r.actions_evaluated;
        out.max_margin = out.max_margin.max(r.max_margin);
        out.violations += r.violations.len();
        if !r.violations.is_empty() {
            out.failing_instances += 1;
        }
        for v in &r.violations {
            *out.by_class.entry(violation_class(v)).or_default() += 1;
        }
        for c in r.checks.iter().filter(|c| c.trailing) {
            out.trailing_checks += 1;
            let tol = 1e-9 * (1.0 + c.equilibrium_value.abs());
            if (c.best_deviation_value - c.equilibrium_value).abs() > tol
                || (c.worst_deviation_value - c.equilibrium_value).abs() > tol
            {
                out.trailing_not_indifferent += 1;
            }
        }
    }
    if out.max_margin == f64::NEG_INFINITY {
        out.max_margin = 0.0;
    }
}

/// Generates adequate and inadequate instances and searches each for
/// profitable unilateral deviations. Premise-violated instances are
/// counted but excluded from the pass/fail tallies.
pub fn run_equilibrium_suite(spec: &SuiteSpec) -> Result<SuiteReport, GameError> {
    let run = |case: SupplyCase, count: usize, offset: u64| -> Result<Vec<DeviationReport>, GameError> {
        (0..count as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(offset + i));
                let mut inst = generate_instance(&mut rng, &spec.instances, case);
                inst.config.balancing_price *= spec.balancing_scale;
                inst.config.allow_weak_balancing = true;
                let slack = spec.slack.unwrap_or_else(|| default_slack(&inst));
                verify_mpne(&inst, &spec.grid, slack)
            })
            .collect()
    };
    let adequate = run(SupplyCase::Adequate, spec.adequate, 0)?;
    let inadequate = run(SupplyCase::Inadequate, spec.inadequate, 1 << 32)?;
    let mut report = SuiteReport::default();
    summarize(&adequate, &mut report.adequate);
    summarize(&inadequate, &mut report.inadequate);
    report.violations = adequate
        .iter()
        .chain(&inadequate)
        .filter(|r| !r.premise_violated)
        .flat_map(|r| r.violations.iter().cloned())
        .take(spec.keep_violations)
        .collect();
    Ok(report)
}

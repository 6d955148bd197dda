//! Post-hoc optimality certificate for a clearing allocation.
//!
//! The allocation is read as a solution of the surplus-maximising LP
//! `min p'a  s.t.  a <= q, -a <= 0, G a = 0`, with `p` holding ask prices and
//! negated bid prices and `G` carrying `-1` for supply and `+1` for demand.
//! Duals are built from the admissibility pattern: fully cleared orders carry
//! only `nu`, uncleared orders only `xi`, partially cleared orders neither.

use serde::{Deserialize, Serialize};

use super::clearing::participates;
use super::{ClearingOutcome, CombinedBook, Order};
use crate::units::Price;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    pub stationarity: f64,
    pub primal_feasibility: f64,
    pub balance: f64,
    pub complementary_slackness: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.stationarity
            .max(self.primal_feasibility)
            .max(self.balance)
            .max(self.complementary_slackness)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KktCertificate {
    /// Capacity multipliers, indexed by tag.
    pub duals_nu: Vec<f64>,
    /// Nonnegativity multipliers, indexed by tag.
    pub duals_xi: Vec<f64>,
    pub lambda: Price,
    pub residuals: KktResiduals,
    pub tolerance: f64,
}

impl KktCertificate {
    pub fn is_valid(&self) -> bool {
        self.residuals.max() <= self.tolerance
    }
}

struct Row<'a> {
    order: &'a Order,
    filled: f64,
    cap: f64,
    /// Objective coefficient `p_i`.
    cost: f64,
    /// Column of the balance row.
    gamma: f64,
}

fn rows<'a>(book: &'a CombinedBook, outcome: &ClearingOutcome) -> Vec<Row<'a>> {
    book.supply()
        .iter()
        .map(|o| (o, 1.0))
        .chain(
            book.demand()
                .iter()
                .filter(|o| participates(o, outcome.excluded_owner))
                .map(|o| (o, -1.0)),
        )
        .map(|(o, sign)| Row {
            order: o,
            filled: outcome.cleared(o.tag).as_f64(),
            cap: o.quantity.as_f64(),
            cost: sign * o.price,
            gamma: -sign,
        })
        .collect()
}

/// Range of market duals compatible with the allocation's fill pattern.
fn admissible_interval(rows: &[Row<'_>]) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for r in rows {
        let full = r.filled >= r.cap;
        let empty = r.filled <= 0.0;
        let p = r.order.price;
        // stationarity: cost + nu - xi + lambda * gamma = 0
        let (needs_lo, needs_hi) = match (r.gamma < 0.0, full, empty) {
            // supply: full needs lambda >= p, empty needs lambda <= p
            (true, true, _) => (true, false),
            (true, _, true) => (false, true),
            // demand: full needs lambda <= p, empty needs lambda >= p
            (false, true, _) => (false, true),
            (false, _, true) => (true, false),
            _ => (true, true),
        };
        if needs_lo {
            lo = lo.max(p);
        }
        if needs_hi {
            hi = hi.min(p);
        }
    }
    (lo, hi)
}

/// Builds duals for a given market price `lambda` and measures every KKT residual.
pub fn kkt_residuals_at(
    book: &CombinedBook,
    outcome: &ClearingOutcome,
    lambda: Price,
    tolerance: f64,
) -> KktCertificate {
    let n = book.len();
    let mut nu = vec![0.0; n];
    let mut xi = vec![0.0; n];
    let mut res = KktResiduals::default();
    let mut balance = 0.0;
    for r in rows(book, outcome) {
        let g = r.cost + lambda * r.gamma;
        let tag = r.order.tag as usize;
        if r.filled >= r.cap {
            nu[tag] = (-g).max(0.0);
        } else if r.filled <= 0.0 {
            xi[tag] = g.max(0.0);
        }
        res.stationarity = res.stationarity.max((g + nu[tag] - xi[tag]).abs());
        res.primal_feasibility = res
            .primal_feasibility
            .max((r.filled - r.cap).max(0.0))
            .max((-r.filled).max(0.0));
        res.complementary_slackness = res
            .complementary_slackness
            .max((nu[tag] * (r.filled - r.cap)).abs())
            .max((xi[tag] * r.filled).abs());
        balance += r.gamma * r.filled;
    }
    res.balance = balance.abs();
    KktCertificate {
        duals_nu: nu,
        duals_xi: xi,
        lambda,
        residuals: res,
        tolerance,
    }
}

/// Certifies that the outcome's allocation solves the merit-order LP.
///
/// The market dual is taken from the interval of prices compatible with the
/// fill pattern, as close as possible to the reported clearing price. An
/// allocation that is not LP-optimal yields a certificate whose residuals
/// show by how much.
pub fn certify_kkt(book: &CombinedBook, outcome: &ClearingOutcome, tolerance: f64) -> KktCertificate {
    let rows = rows(book, outcome);
    let (lo, hi) = admissible_interval(&rows);
    let lambda = if lo <= hi {
        let target = outcome
            .clearing_price
            .unwrap_or(if lo.is_finite() { lo } else { hi.min(0.0) });
        target.clamp(lo, hi)
    } else {
        // empty interval: the midpoint minimises the largest stationarity gap
        (lo + hi) / 2.0
    };
    let lambda = if lambda.is_finite() { lambda } else { 0.0 };
    kkt_residuals_at(book, outcome, lambda, tolerance)
}

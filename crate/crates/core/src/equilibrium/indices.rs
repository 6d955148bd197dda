use serde::{Deserialize, Serialize};

use crate::game::{GameConfig, MarketState};
use crate::units::Price;

/// Equilibrium indices for one round. Ask indices are one-based positions
/// in the state's supply curve; `None` means the curve is empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumIndices {
    /// Wholesale supply covers total demand.
    pub adequate: bool,
    /// Players with outstanding demand, by descending demand then id. This is
    /// the order in which equal-priced buys are served, and the player order
    /// the marginal-player rules refer to.
    pub order: Vec<usize>,
    pub u: Option<usize>,
    /// Per player (by id).
    pub v: Vec<Option<usize>>,
    pub v0: Option<usize>,
    /// `None` when the buy price of the marginal player is the `p_max` sentinel.
    pub z: Option<usize>,
    /// The marginal player, if anyone still has demand.
    pub phi: Option<usize>,
    /// No player met the selection predicate and the default was used.
    pub phi_defaulted: bool,
    pub p_u: Price,
    pub p_z: Price,
}

impl EquilibriumIndices {
    /// Quantity of the ask at index `u`, zero when the curve is empty.
    pub fn q_u(&self, state: &MarketState) -> crate::units::Qty {
        self.u
            .map_or(crate::units::Qty::ZERO, |u| state.asks[u - 1].quantity)
    }
}

/// Cumulative ask quantity through each index: `cum[i]` covers asks `1..=i`.
pub(crate) fn cumulative(state: &MarketState) -> Vec<i64> {
    let mut cum = Vec::with_capacity(state.asks.len() + 1);
    cum.push(0i64);
    for a in &state.asks {
        cum.push(cum.last().unwrap() + a.quantity.units() as i64);
    }
    cum
}

/// Smallest index `i` in `1..=len` with `pred(i)`, else `len` (or `None` if empty).
fn least_index(len: usize, pred: impl Fn(usize) -> bool) -> Option<usize> {
    if len == 0 {
        return None;
    }
    Some((1..=len).find(|&i| pred(i)).unwrap_or(len))
}

/// Computes the round's indices from the supply curve and outstanding positions.
///
/// With adequate supply the prosumers' sell bids sit just ahead of ask `u`,
/// so the supply actually reachable through ask `j` is the ask total plus all
/// prosumer supply once `j >= u`. Both `u` and every `v^b` are measured on
/// that curve. Without adequate supply the sell bids are priced out of the
/// book and only asks count.
pub fn compute_indices(state: &MarketState, config: &GameConfig) -> EquilibriumIndices {
    let n = state.n_players();
    let len = state.asks.len();
    let cum = cumulative(state);
    let q_d = state.total_demand().units() as i64;
    let q_s = state.wholesale_supply().units() as i64;
    let q_sell = state.prosumer_supply().units() as i64;
    let adequate = q_s >= q_d;
    let remaining = (config.horizon + 1).saturating_sub(state.round).saturating_sub(1);

    let mut order: Vec<usize> = (0..n).filter(|&b| !state.demand[b].is_zero()).collect();
    order.sort_by(|&a, &b| state.demand[b].cmp(&state.demand[a]).then(a.cmp(&b)));

    let others = |b: usize| q_d - state.demand[b].units() as i64;
    let price_at = |i: Option<usize>| i.map_or(config.p_max, |i| state.asks[i - 1].price);

    if adequate {
        let u = least_index(len, |i| q_d - q_sell < cum[i]);
        let reach = |j: usize| cum[j] + if u.is_some_and(|u| j >= u) { q_sell } else { 0 };
        let v: Vec<Option<usize>> = (0..n)
            .map(|b| least_index(len, |j| others(b) < reach(j)))
            .collect();
        let v0 = u.map(|u| u.saturating_sub(remaining).max(1));
        let candidate = order
            .iter()
            .rev()
            .find(|&&b| matches!((v[b], v0), (Some(vb), Some(v0)) if vb <= v0))
            .copied();
        let phi = candidate.or_else(|| order.first().copied());
        let z = match (phi, v0) {
            (Some(phi), Some(v0)) => v[phi].map(|vp| vp.max(v0)),
            _ => None,
        };
        EquilibriumIndices {
            adequate,
            phi_defaulted: candidate.is_none() && phi.is_some(),
            order,
            u,
            v,
            v0,
            z,
            phi,
            p_u: price_at(u),
            p_z: price_at(z),
        }
    } else {
        let u = (len > 0).then_some(len);
        let v: Vec<Option<usize>> = (0..n)
            .map(|b| least_index(len, |j| others(b) < cum[j]))
            .collect();
        let v0 = u.map(|u| u.saturating_sub(remaining).max(1));
        // first position whose cumulative demand reaches the wholesale supply
        let mut acc = 0i64;
        let phi = order.iter().copied().find(|&b| {
            acc += state.demand[b].units() as i64;
            q_s <= acc
        });
        let last = order.last().copied();
        let z = match (phi, v0) {
            (Some(phi), Some(v0)) if Some(phi) == last => v[phi].map(|vp| vp.max(v0)),
            _ => None,
        };
        EquilibriumIndices {
            adequate,
            phi_defaulted: false,
            order,
            u,
            v,
            v0,
            z,
            phi,
            p_u: price_at(u),
            p_z: price_at(z),
        }
    }
}

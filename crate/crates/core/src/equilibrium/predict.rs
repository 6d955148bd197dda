use serde::{Deserialize, Serialize};

use super::indices::cumulative;
use super::{compute_indices, EquilibriumIndices};
use crate::auction::{price_of, MarginalPair};
use crate::game::{GameConfig, MarketState, SupplyMode};
use crate::units::{Price, Qty};

/// Clearing statistics implied by the equilibrium profile, derived from the
/// indices alone (no order book is built).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClearingPrediction {
    /// Pricing-rule price at the predicted marginal pair.
    pub lambda: Option<Price>,
    /// Buy price of the marginal player.
    pub p_z: Price,
    pub total: Qty,
    pub bought: Vec<Qty>,
    pub sold: Vec<Qty>,
    pub marginal: Option<MarginalPair>,
}

fn ask_price_at(state: &MarketState, cum: &[i64], units: i64) -> Price {
    let j = cum.iter().position(|&c| c >= units).unwrap_or(cum.len() - 1);
    state.asks[j.max(1) - 1].price
}

/// Predicted outcome when every player bids per the equilibrium policy.
pub fn predict_clearing(state: &MarketState, config: &GameConfig) -> ClearingPrediction {
    predict_with(state, config, &compute_indices(state, config))
}

pub(crate) fn predict_with(
    state: &MarketState,
    config: &GameConfig,
    ix: &EquilibriumIndices,
) -> ClearingPrediction {
    let n = state.n_players();
    let mut p = ClearingPrediction {
        lambda: None,
        p_z: ix.p_z,
        total: Qty::ZERO,
        bought: vec![Qty::ZERO; n],
        sold: vec![Qty::ZERO; n],
        marginal: None,
    };
    let (Some(phi), Some(_)) = (ix.phi, ix.u) else {
        return p;
    };
    let cum = cumulative(state);
    let q_d = state.total_demand().units() as i64;
    let d_phi = state.demand[phi].units() as i64;
    let others = q_d - d_phi;

    let (total, alpha_phi, ask_price) = if ix.adequate {
        let u = ix.u.unwrap();
        let z = ix.z.unwrap_or(u);
        let q_sell = state.prosumer_supply().units() as i64;
        let reach = cum[z] + if z >= u { q_sell } else { 0 };
        let total = reach.min(q_d);
        let alpha_phi = (total - others).clamp(0, d_phi);

        // sell bids rest between ask u-1 and ask u
        let before = cum[u - 1];
        let mut to_sellers = (total - before).clamp(0, q_sell);
        let mut sellers: Vec<usize> = (0..n).filter(|&b| !state.supply[b].is_zero()).collect();
        let q_u = ix.q_u(state);
        sellers.sort_by(|&a, &b| {
            (state.supply[a] > q_u)
                .cmp(&(state.supply[b] > q_u))
                .then(state.supply[b].cmp(&state.supply[a]))
                .then(a.cmp(&b))
        });
        let mut last_sell = None;
        for &b in &sellers {
            let take = to_sellers.min(state.supply[b].units() as i64);
            if take > 0 {
                p.sold[b] = Qty(take as u64);
                to_sellers -= take;
                last_sell = Some(b);
            }
        }
        let ask_price = match last_sell {
            Some(b) if total > before && total <= before + q_sell => {
                if state.supply[b] > q_u {
                    ix.p_u
                } else {
                    (ix.p_u - config.epsilon).max(0.0)
                }
            }
            Some(_) if total > before => ask_price_at(state, &cum, total - q_sell),
            _ => ask_price_at(state, &cum, total),
        };
        (total, alpha_phi, ask_price)
    } else if ix.z.is_none() {
        // everyone bids p_max and is served in priority order
        let q_s = *cum.last().unwrap();
        let mut left = q_s.min(q_d);
        for &b in &ix.order {
            let take = left.min(state.demand[b].units() as i64);
            p.bought[b] = Qty(take as u64);
            left -= take;
        }
        let total = q_s.min(q_d);
        if total > 0 {
            p.total = Qty(total as u64);
            p.marginal = Some(MarginalPair {
                ask_price: ask_price_at(state, &cum, total),
                bid_price: config.p_max,
            });
            p.lambda = price_of(p.marginal, config.pricing_rule).ok();
        }
        return p;
    } else {
        let z = ix.z.unwrap();
        let alpha_phi = (cum[z] - others).clamp(0, d_phi);
        let total = others + alpha_phi;
        (total, alpha_phi, ask_price_at(state, &cum, total))
    };

    for b in 0..n {
        p.bought[b] = if b == phi {
            Qty(alpha_phi as u64)
        } else {
            state.demand[b]
        };
    }
    if total > 0 {
        p.total = Qty(total as u64);
        p.marginal = Some(MarginalPair {
            ask_price,
            bid_price: if alpha_phi > 0 { ix.p_z } else { config.p_max },
        });
        p.lambda = price_of(p.marginal, config.pricing_rule).ok();
    }
    p
}

/// State after a predicted round.
pub fn predicted_next(state: &MarketState, config: &GameConfig, p: &ClearingPrediction) -> MarketState {
    let n = state.n_players();
    let asks = match config.supply_mode {
        SupplyMode::Constant => state.asks.clone(),
        SupplyMode::Carryover => {
            let sold: Qty = p.sold.iter().sum();
            let mut left = (p.total - sold).units();
            let mut asks = Vec::with_capacity(state.asks.len());
            for a in &state.asks {
                let take = left.min(a.quantity.units());
                left -= take;
                if take < a.quantity.units() {
                    asks.push(crate::game::Ask::new(a.price, Qty(a.quantity.units() - take)));
                }
            }
            asks
        }
    };
    MarketState {
        round: state.round + 1,
        asks,
        demand: (0..n).map(|b| state.demand[b] - p.bought[b]).collect(),
        supply: (0..n).map(|b| state.supply[b] - p.sold[b]).collect(),
    }
}

/// Closed-form equilibrium value of every player from `state`: the predicted
/// round payments rolled forward on the residual curve, plus balancing on
/// whatever demand the predictions leave open.
pub fn mpne_values(state: &MarketState, config: &GameConfig) -> Vec<f64> {
    let mut v = vec![0.0; state.n_players()];
    let mut s = state.clone();
    while !s.is_terminal(config) {
        let p = predict_clearing(&s, config);
        let price = p.lambda.unwrap_or(0.0);
        for (b, acc) in v.iter_mut().enumerate() {
            *acc += config.money(price, p.bought[b]) - config.money(price, p.sold[b]);
        }
        s = predicted_next(&s, config, &p);
    }
    for (acc, d) in v.iter_mut().zip(&s.demand) {
        *acc += config.money(config.balancing_price, *d);
    }
    v
}

/// Closed-form equilibrium value of `player` from `state`.
pub fn mpne_value(state: &MarketState, player: usize, config: &GameConfig) -> f64 {
    mpne_values(state, config)[player]
}

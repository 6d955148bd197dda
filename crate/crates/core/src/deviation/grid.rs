use serde::{Deserialize, Serialize};

use crate::equilibrium::{compute_indices, mpne_bid, MpneBid};
use crate::error::GameError;
use crate::game::{Bid, GameConfig, MarketState, PlayerBids};
use crate::units::{Price, Qty};

/// Largest games the deviation search accepts.
pub const MAX_PLAYERS: usize = 3;
pub const MAX_HORIZON: usize = 3;
pub const MAX_ASKS: usize = 8;
pub const MAX_QUANTITY: u64 = 20;

/// Density of the per-round deviation grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    /// Evenly spaced prices over `[0, p_max]`, endpoints included.
    pub uniform_prices: usize,
    /// Add the current ask prices to the price set.
    pub ask_prices: bool,
    /// Add two- and three-bid splits of the full quantity.
    pub splits: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            uniform_prices: 12,
            ask_prices: true,
            splits: true,
        }
    }
}

/// Position of a single bid relative to the equilibrium bid on the same side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationClass {
    Null,
    EqualPriceLowerQty,
    HigherPriceLowerQty,
    HigherPriceEqualQty,
    LowerPriceLowerQty,
    LowerPriceEqualQty,
    /// No bid at all on this side.
    Withdrawn,
    /// The quantity is spread over several bids.
    Split,
}

/// Classifies one side's bids against the equilibrium bid.
pub fn classify(bids: &[Bid], reference: Bid) -> DeviationClass {
    match bids {
        [] if reference.quantity.is_zero() => DeviationClass::Null,
        [] => DeviationClass::Withdrawn,
        [b] => {
            let price = b.price.total_cmp(&reference.price);
            let qty_lower = b.quantity < reference.quantity;
            match (price, qty_lower) {
                (std::cmp::Ordering::Equal, false) => DeviationClass::Null,
                (std::cmp::Ordering::Equal, true) => DeviationClass::EqualPriceLowerQty,
                (std::cmp::Ordering::Greater, true) => DeviationClass::HigherPriceLowerQty,
                (std::cmp::Ordering::Greater, false) => DeviationClass::HigherPriceEqualQty,
                (std::cmp::Ordering::Less, true) => DeviationClass::LowerPriceLowerQty,
                (std::cmp::Ordering::Less, false) => DeviationClass::LowerPriceEqualQty,
            }
        }
        _ => DeviationClass::Split,
    }
}

/// Per-side candidate bid sets for one player at one state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationGrid {
    pub mpne: MpneBid,
    pub buy_prices: Vec<Price>,
    pub sell_prices: Vec<Price>,
    pub buy_quantities: Vec<Qty>,
    pub sell_quantities: Vec<Qty>,
    pub buy_options: Vec<Vec<Bid>>,
    pub sell_options: Vec<Vec<Bid>>,
}

impl DeviationGrid {
    /// Number of joint (buy option, sell option) actions.
    pub fn len(&self) -> usize {
        self.buy_options.len() * self.sell_options.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn actions(&self) -> impl Iterator<Item = PlayerBids> + '_ {
        self.buy_options.iter().flat_map(move |buys| {
            self.sell_options.iter().map(move |sells| PlayerBids {
                buys: buys.clone(),
                sells: sells.clone(),
            })
        })
    }

    /// The equilibrium action itself, as it appears in the grid.
    pub fn null_action(&self) -> PlayerBids {
        self.mpne.to_bids()
    }
}

/// Rejects games too large for exhaustive search.
pub fn check_size(state: &MarketState, config: &GameConfig) -> Result<(), GameError> {
    let too_big = |what: &str, got: u64, cap: u64| {
        Err(GameError::Config(format!(
            "deviation search supports at most {cap} {what}, got {got}"
        )))
    };
    if config.n_players > MAX_PLAYERS {
        return too_big("players", config.n_players as u64, MAX_PLAYERS as u64);
    }
    if config.horizon > MAX_HORIZON {
        return too_big("rounds", config.horizon as u64, MAX_HORIZON as u64);
    }
    if state.asks.len() > MAX_ASKS {
        return too_big("asks", state.asks.len() as u64, MAX_ASKS as u64);
    }
    let q = state
        .demand
        .iter()
        .chain(&state.supply)
        .chain(state.asks.iter().map(|a| &a.quantity))
        .map(|q| q.units())
        .max()
        .unwrap_or(0);
    if q > MAX_QUANTITY {
        return too_big("quantity units per position", q, MAX_QUANTITY);
    }
    Ok(())
}

fn push_price(set: &mut Vec<Price>, p: Price, lo: Price, hi: Price) {
    if p.is_finite() && p >= lo && p <= hi && !set.iter().any(|q| q.to_bits() == p.to_bits()) {
        set.push(p);
    }
}

fn quantity_points(total: Qty) -> Vec<Qty> {
    let t = total.units();
    let mut qs: Vec<u64> = vec![t / 4, t / 2, t.saturating_sub(1), t];
    qs.retain(|&q| q > 0);
    qs.sort_unstable();
    qs.dedup();
    qs.into_iter().map(Qty).collect()
}

/// Builds the candidate bids for `player` at `state`.
pub fn deviation_grid(
    state: &MarketState,
    player: usize,
    config: &GameConfig,
    grid: &GridConfig,
) -> DeviationGrid {
    let ix = compute_indices(state, config);
    let mpne = mpne_bid(state, player, config, &ix);
    let eps = config.epsilon;
    let p_max = config.p_max;

    let mut base = Vec::new();
    for p in [0.0, ix.p_z - eps, ix.p_z, ix.p_z + eps, ix.p_u - eps, ix.p_u, ix.p_u + eps, p_max] {
        push_price(&mut base, p, 0.0, p_max);
    }
    let n = grid.uniform_prices.max(2);
    for k in 0..n {
        push_price(&mut base, p_max * k as f64 / (n - 1) as f64, 0.0, p_max);
    }
    if grid.ask_prices {
        for a in &state.asks {
            push_price(&mut base, a.price, 0.0, p_max);
        }
    }
    let mut buy_prices = base.clone();
    push_price(&mut buy_prices, mpne.buy.price, 0.0, p_max);
    let mut sell_prices = base;
    push_price(&mut sell_prices, mpne.sell.price, 0.0, f64::MAX);
    push_price(&mut sell_prices, config.balancing_price - eps, 0.0, f64::MAX);
    buy_prices.sort_by(f64::total_cmp);
    sell_prices.sort_by(f64::total_cmp);

    let split_prices = |mpne_price: Price| {
        let mut s = Vec::new();
        for p in [mpne_price, ix.p_z, ix.p_u - eps, ix.p_u, p_max, 0.0] {
            push_price(&mut s, p, 0.0, f64::MAX);
        }
        s
    };
    let options = |total: Qty, prices: &[Price], mpne_price: Price| {
        let quantities = quantity_points(total);
        let mut opts: Vec<Vec<Bid>> = vec![Vec::new()];
        for &p in prices {
            for &q in &quantities {
                opts.push(vec![Bid::new(p, q)]);
            }
        }
        let t = total.units();
        if grid.splits && t >= 2 {
            let sp = split_prices(mpne_price);
            for (i, &a) in sp.iter().enumerate() {
                for &b in &sp[i + 1..] {
                    for first in [t / 2, t - 1] {
                        if first == t - 1 && t / 2 == t - 1 {
                            continue;
                        }
                        opts.push(vec![Bid::new(a, Qty(first)), Bid::new(b, Qty(t - first))]);
                    }
                }
            }
        }
        if grid.splits && t >= 3 {
            let sp = split_prices(mpne_price);
            let third = t / 3;
            for (i, &a) in sp.iter().enumerate() {
                for (j, &b) in sp.iter().enumerate().skip(i + 1) {
                    for &c in &sp[j + 1..] {
                        opts.push(vec![
                            Bid::new(a, Qty(third)),
                            Bid::new(b, Qty(third)),
                            Bid::new(c, Qty(t - 2 * third)),
                        ]);
                    }
                }
            }
        }
        (quantities, opts)
    };
    let (buy_quantities, buy_options) = options(state.demand[player], &buy_prices, mpne.buy.price);
    let (sell_quantities, sell_options) =
        options(state.supply[player], &sell_prices, mpne.sell.price);
    DeviationGrid {
        mpne,
        buy_prices,
        sell_prices,
        buy_quantities,
        sell_quantities,
        buy_options,
        sell_options,
    }
}

/// Every action the search substitutes for `player` at `state`, null
/// deviation first.
pub fn enumerate_deviations(
    state: &MarketState,
    player: usize,
    config: &GameConfig,
    grid: &GridConfig,
) -> Result<Vec<PlayerBids>, GameError> {
    check_size(state, config)?;
    if player >= config.n_players {
        return Err(GameError::Config(format!("no player {player}")));
    }
    let g = deviation_grid(state, player, config, grid);
    let null = g.null_action();
    let mut out = vec![null.clone()];
    out.extend(g.actions().filter(|a| *a != null));
    Ok(out)
}

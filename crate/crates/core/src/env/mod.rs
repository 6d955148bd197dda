//! Day-ahead market simulator with incomplete information: a randomized
//! quadratic-cost generator, an optional bulk buyer, a fixed number of
//! auctions per delivery slot and balancing settlement after the last one.

mod config;
mod genco;
mod view;

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub use config::{DemandLevel, EnvConfig, GencoConfig, MisoConfig};
pub use genco::genco_asks;
pub use view::{BrokerView, Level, MarketHistory, OwnFill, Orderbook};

use crate::auction::{clear, normalize_book, BookLimits, Order, OwnerId, PricingRule, SelfMatchGuard, Side};
use crate::error::EnvError;
use crate::game::PlayerBids;
use crate::strategies::Strategy;
use crate::units::{Price, Qty};

/// One auction as recorded in the game log. Quantities are in MWh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuctionRecord {
    pub slot: usize,
    pub round: usize,
    pub hours_ahead: usize,
    pub price: Option<Price>,
    pub total_cleared: f64,
    pub bought: Vec<f64>,
    pub sold: Vec<f64>,
    pub miso_bought: f64,
    pub miso_sold: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub orderbook: Option<Orderbook>,
}

/// A broker's account for one delivery slot. Money in currency, energy in MWh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrokerSlot {
    pub demand: f64,
    pub bought: f64,
    pub sold: f64,
    pub wholesale_cost: f64,
    pub balancing_quantity: f64,
    pub balancing_cost: f64,
}

impl BrokerSlot {
    pub fn total_cost(&self) -> f64 {
        self.wholesale_cost + self.balancing_cost
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotResult {
    pub slot: usize,
    pub brokers: Vec<BrokerSlot>,
    pub auctions: Vec<AuctionRecord>,
    /// Orders that were clipped or dropped before clearing.
    pub warnings: Vec<String>,
}

/// Game log line, tagged by `kind` like the Markov-game trajectory export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvLogLine {
    Auction(AuctionRecord),
    Settle {
        slot: usize,
        brokers: Vec<BrokerSlot>,
    },
}

impl SlotResult {
    pub fn lines(&self) -> impl Iterator<Item = EnvLogLine> + '_ {
        self.auctions
            .iter()
            .cloned()
            .map(EnvLogLine::Auction)
            .chain(std::iter::once(EnvLogLine::Settle {
                slot: self.slot,
                brokers: self.brokers.clone(),
            }))
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for line in self.lines() {
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Per-slot bookkeeping for one broker.
#[derive(Clone, Debug, Default)]
struct Account {
    demand: Qty,
    own_forecast: Qty,
    market_forecast: Qty,
    bought: Qty,
    sold: Qty,
    paid: f64,
    fills: Vec<OwnFill>,
}

pub struct Environment {
    config: EnvConfig,
    n_brokers: usize,
    rng: ChaCha8Rng,
    next_slot: usize,
    history: MarketHistory,
}

impl Environment {
    pub fn new(config: EnvConfig, n_brokers: usize) -> Result<Self, EnvError> {
        config.validate()?;
        if n_brokers == 0 {
            return Err(EnvError::Config("at least one broker is required".into()));
        }
        Ok(Environment {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            n_brokers,
            next_slot: 0,
            history: MarketHistory::default(),
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn n_brokers(&self) -> usize {
        self.n_brokers
    }

    pub fn next_slot(&self) -> usize {
        self.next_slot
    }

    pub fn is_finished(&self) -> bool {
        self.next_slot >= self.config.slots
    }

    pub fn history(&self) -> &MarketHistory {
        &self.history
    }

    fn bulk_owner(&self) -> OwnerId {
        OwnerId(self.n_brokers as u32 + 1)
    }

    fn forecast(&mut self, truth: Qty) -> Qty {
        let sd = self.config.forecast_noise;
        if sd == 0.0 {
            return truth;
        }
        let z: f64 = Normal::new(0.0, sd).expect("finite sd").sample(&mut self.rng);
        let physical = self.config.resolution.to_physical(truth) * (1.0 + z).max(0.0);
        self.config.resolution.to_units(physical)
    }

    /// Runs every auction of the next delivery slot and settles it.
    pub fn advance_slot(&mut self, strategies: &mut [Box<dyn Strategy>]) -> Result<SlotResult, EnvError> {
        if strategies.len() != self.n_brokers {
            return Err(EnvError::Config(format!(
                "{} strategies for {} brokers",
                strategies.len(),
                self.n_brokers
            )));
        }
        if self.is_finished() {
            return Err(EnvError::Config("game is over".into()));
        }
        let slot = self.next_slot;
        let cfg = self.config.clone();
        let res = cfg.resolution;
        let n = self.n_brokers;

        let demand = res.to_units(cfg.broker_demand(slot));
        let miso_demand = if cfg.miso.enabled {
            res.to_units(cfg.miso.multiplier * res.to_physical(demand) * n as f64)
        } else {
            Qty::ZERO
        };
        let market_demand = Qty(demand.units() * n as u64) + miso_demand;
        let mut accounts: Vec<Account> = (0..n)
            .map(|_| Account {
                demand,
                ..Account::default()
            })
            .collect();
        for acc in &mut accounts {
            acc.own_forecast = self.forecast(demand);
            acc.market_forecast = self.forecast(market_demand);
        }

        let limits = BookLimits::new(cfg.p_max);
        let bulk = self.bulk_owner();
        let (mut miso_bought, mut miso_sold) = (Qty::ZERO, Qty::ZERO);
        let mut genco_sold = Qty::ZERO;
        let mut books: Vec<Orderbook> = Vec::new();
        let mut auctions = Vec::new();
        let mut warnings = Vec::new();
        let mut depth_prices = Vec::new();

        for round in 1..=cfg.rounds_per_slot {
            let hours_ahead = cfg.rounds_per_slot - round + 1;
            let mut orders: Vec<Order> = genco_asks(&cfg.genco, genco_sold, res, cfg.p_max, &mut self.rng)
                .into_iter()
                .map(|a| Order::ask(a.price, a.quantity))
                .collect();

            if cfg.miso.enabled {
                let held = miso_bought.saturating_sub(miso_sold);
                if round == 1 {
                    let target = res.to_units(res.to_physical(miso_demand) * (1.0 + cfg.miso.overshoot));
                    if !target.is_zero() {
                        orders.push(Order::buy(bulk, cfg.p_max, target));
                    }
                } else if held > miso_demand {
                    let excess = held - miso_demand;
                    let left = (cfg.rounds_per_slot - round + 1) as u64;
                    let q = Qty(excess.units().div_ceil(left));
                    orders.push(Order::sell(bulk, 0.0, q));
                } else if held < miso_demand {
                    orders.push(Order::buy(bulk, cfg.p_max, miso_demand - held));
                }
            }

            let mut best_bids = vec![None; n];
            for (b, strategy) in strategies.iter_mut().enumerate() {
                let acc = &accounts[b];
                let view = BrokerView::new(
                    slot,
                    hours_ahead,
                    cfg.rounds_per_slot,
                    cfg.p_max,
                    res,
                    cfg.prior_price,
                    acc.own_forecast,
                    acc.market_forecast,
                    acc.bought,
                    acc.sold,
                    &books,
                    &acc.fills,
                    &self.history,
                );
                let cap_buy = view.remaining_requirement();
                let cap_sell = view.held();
                let bids = strategy.bids(&view);
                let owner = OwnerId::prosumer(b);
                let (buys, sells) = sanitize(bids, cap_buy, cap_sell, cfg.p_max, |m| {
                    warnings.push(format!("slot {slot} round {round} broker {b} ({}): {m}", strategy.name()))
                });
                best_bids[b] = buys.iter().map(|o| o.0).reduce(f64::max);
                orders.extend(buys.into_iter().map(|(p, q)| Order::buy(owner, p, q)));
                orders.extend(sells.into_iter().map(|(p, q)| Order::sell(owner, p, q)));
            }

            let book = normalize_book(orders, &limits)?;
            let outcome = clear(&book, PricingRule::ACPR, SelfMatchGuard::On)?;
            let price = outcome.clearing_price;
            let lambda = price.unwrap_or(0.0);

            let mut bought = vec![Qty::ZERO; n];
            let mut sold = vec![Qty::ZERO; n];
            let (mut miso_b, mut miso_s) = (Qty::ZERO, Qty::ZERO);
            let mut uncleared_asks = Vec::new();
            let mut uncleared_bids = Vec::new();
            for o in book.orders() {
                let filled = outcome.cleared(o.tag);
                let rest = o.quantity - filled;
                if !rest.is_zero() {
                    let level = Level {
                        price: o.price,
                        quantity: rest,
                    };
                    if o.side.is_supply() {
                        uncleared_asks.push(level);
                    } else {
                        uncleared_bids.push(level);
                    }
                }
                if filled.is_zero() {
                    continue;
                }
                match (o.side, o.owner.player_index(n)) {
                    (Side::Ask, _) => genco_sold += filled,
                    (Side::Buy, Some(b)) => bought[b] += filled,
                    (Side::SellBid, Some(b)) => sold[b] += filled,
                    (Side::Buy, None) => miso_b += filled,
                    (Side::SellBid, None) => miso_s += filled,
                }
            }
            uncleared_asks.sort_by(|a, b| a.price.total_cmp(&b.price));
            uncleared_bids.sort_by(|a, b| b.price.total_cmp(&a.price));
            miso_bought += miso_b;
            miso_sold += miso_s;

            for (b, acc) in accounts.iter_mut().enumerate() {
                acc.bought += bought[b];
                acc.sold += sold[b];
                acc.paid += lambda * (res.to_physical(bought[b]) - res.to_physical(sold[b]));
                acc.fills.push(OwnFill {
                    hours_ahead,
                    bought: bought[b],
                    sold: sold[b],
                    clearing_price: price,
                    best_bid: best_bids[b],
                });
            }
            if let Some(p) = price {
                depth_prices.push((hours_ahead, p));
            }
            let disclosure = Orderbook {
                slot,
                hours_ahead,
                clearing_price: price,
                net_cleared: outcome.total_cleared,
                uncleared_asks,
                uncleared_bids,
            };
            auctions.push(AuctionRecord {
                slot,
                round,
                hours_ahead,
                price,
                total_cleared: res.to_physical(outcome.total_cleared),
                bought: bought.iter().map(|&q| res.to_physical(q)).collect(),
                sold: sold.iter().map(|&q| res.to_physical(q)).collect(),
                miso_bought: res.to_physical(miso_b),
                miso_sold: res.to_physical(miso_s),
                orderbook: cfg.log_orderbook.then(|| disclosure.clone()),
            });
            books.push(disclosure);
        }

        for (h, p) in depth_prices {
            self.history.record(h, p);
        }
        self.next_slot += 1;

        let brokers = accounts
            .iter()
            .map(|acc| {
                let unmet = acc.demand.saturating_sub(acc.bought.saturating_sub(acc.sold));
                BrokerSlot {
                    demand: res.to_physical(acc.demand),
                    bought: res.to_physical(acc.bought),
                    sold: res.to_physical(acc.sold),
                    wholesale_cost: acc.paid,
                    balancing_quantity: res.to_physical(unmet),
                    balancing_cost: cfg.balancing_price * res.to_physical(unmet),
                }
            })
            .collect();
        Ok(SlotResult {
            slot,
            brokers,
            auctions,
            warnings,
        })
    }

    /// Plays all remaining slots.
    pub fn run(&mut self, strategies: &mut [Box<dyn Strategy>]) -> Result<Vec<SlotResult>, EnvError> {
        let mut out = Vec::with_capacity(self.config.slots - self.next_slot);
        while !self.is_finished() {
            out.push(self.advance_slot(strategies)?);
        }
        Ok(out)
    }
}

/// Clips a strategy's bids to the exchange limits, reporting every change.
fn sanitize(
    bids: PlayerBids,
    cap_buy: Qty,
    cap_sell: Qty,
    p_max: Price,
    mut warn: impl FnMut(String),
) -> (Vec<(Price, Qty)>, Vec<(Price, Qty)>) {
    let mut side = |list: Vec<crate::game::Bid>, cap: Qty, what: &str| {
        let mut left = cap;
        let mut out = Vec::new();
        for bid in list {
            if bid.quantity.is_zero() {
                continue;
            }
            if !bid.price.is_finite() {
                warn(format!("{what} with non-finite price dropped"));
                continue;
            }
            let price = bid.price.clamp(0.0, p_max);
            if price != bid.price {
                warn(format!("{what} price {} clamped to {price}", bid.price));
            }
            let q = bid.quantity.min(left);
            if q < bid.quantity {
                warn(format!("{what} quantity {} clipped to {q}", bid.quantity));
            }
            left -= q;
            if !q.is_zero() {
                out.push((price, q));
            }
        }
        out
    };
    let buys = side(bids.buys, cap_buy, "buy");
    let sells = side(bids.sells, cap_sell, "sell");
    (buys, sells)
}

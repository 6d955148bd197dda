#![allow(dead_code)]

//! Test-only oracles shared by the integration suites.

use pda_core::auction::{
    price_of, ClearingOutcome, CombinedBook, MarginalPair, Order, OwnerId, PricingRule,
    SelfMatchGuard, Side,
};
use pda_core::units::Qty;
use rand::Rng;

/// Clears one resolution unit at a time: best remaining buy against best
/// remaining supply while the buy price covers the supply price.
///
/// "Best" is the highest-priority (price, quantity) class with capacity left;
/// inside a class the least-filled order goes first, then the lowest tag.
pub fn brute_force_clear(
    book: &CombinedBook,
    rule: PricingRule,
    guard: SelfMatchGuard,
) -> ClearingOutcome {
    let supply: Vec<&Order> = book.supply().iter().collect();
    let sole_seller = {
        let first = supply.first();
        match (guard, first) {
            (SelfMatchGuard::On, Some(f))
                if supply
                    .iter()
                    .all(|o| o.side == Side::SellBid && o.owner == f.owner) =>
            {
                Some(f.owner)
            }
            _ => None,
        }
    };
    let demand: Vec<&Order> = book
        .demand()
        .iter()
        .filter(|o| Some(o.owner) != sole_seller)
        .collect();

    let mut fill = vec![0u64; book.len()];
    let better_buy = |a: &Order, b: &Order| {
        a.price > b.price || (a.price == b.price && a.quantity > b.quantity)
    };
    let better_ask = |a: &Order, b: &Order| {
        a.price < b.price || (a.price == b.price && a.quantity > b.quantity)
    };

    let mut total = 0u64;
    let mut last: Option<(f64, f64)> = None;
    loop {
        let (Some(buy), Some(ask)) = (
            pick(&demand, &fill, &better_buy),
            pick(&supply, &fill, &better_ask),
        ) else {
            break;
        };
        if buy.price < ask.price {
            break;
        }
        fill[buy.tag as usize] += 1;
        fill[ask.tag as usize] += 1;
        total += 1;
        last = Some((ask.price, buy.price));
    }
    let marginal = last.map(|(ask_price, bid_price)| MarginalPair {
        ask_price,
        bid_price,
    });
    ClearingOutcome {
        clearing_price: marginal.map(|m| price_of(Some(m), rule).unwrap()),
        total_cleared: Qty(total),
        cleared_by_tag: fill.into_iter().map(Qty).collect(),
        marginal,
        excluded_owner: sole_seller,
    }
}

fn pick<'a>(
    orders: &[&'a Order],
    fill: &[u64],
    better: &dyn Fn(&Order, &Order) -> bool,
) -> Option<&'a Order> {
    let mut best: Option<&'a Order> = None;
    for &o in orders {
        if fill[o.tag as usize] >= o.quantity.units() {
            continue;
        }
        best = match best {
            None => Some(o),
            Some(b) => {
                let same_class = b.price == o.price && b.quantity == o.quantity;
                let o_first = if same_class {
                    let (fo, fb) = (fill[o.tag as usize], fill[b.tag as usize]);
                    fo < fb || (fo == fb && o.tag < b.tag)
                } else {
                    better(o, b)
                };
                Some(if o_first { o } else { b })
            }
        };
    }
    best
}

/// Checks every clearing property (price interval, total volume, priority on
/// both sides, marginal pro-rata split, the self-match rule, conservation).
/// Returns a description of each violated property.
pub fn clearing_property_violations(
    book: &CombinedBook,
    out: &ClearingOutcome,
    guard: SelfMatchGuard,
) -> Vec<String> {
    let mut v = Vec::new();
    let f = |o: &Order| out.cleared(o.tag).units();
    let sole = book.sole_seller().filter(|_| guard == SelfMatchGuard::On);
    let demand: Vec<&Order> = book
        .demand()
        .iter()
        .filter(|o| Some(o.owner) != sole)
        .collect();
    let supply: Vec<&Order> = book.supply().iter().collect();

    if let Some(owner) = sole {
        if book
            .demand()
            .iter()
            .any(|o| o.owner == owner && f(o) > 0)
        {
            v.push("self-match: sole seller's buy was cleared".into());
        }
    }
    let bought: u64 = demand.iter().map(|o| f(o)).sum();
    let sold: u64 = supply.iter().map(|o| f(o)).sum();
    if bought != out.total_cleared.units() || sold != out.total_cleared.units() {
        v.push(format!(
            "conservation: bought {bought}, sold {sold}, total {}",
            out.total_cleared.units()
        ));
    }
    for o in book.orders() {
        if f(o) > o.quantity.units() {
            v.push(format!("tag {} over-filled", o.tag));
        }
    }
    let l = demand.iter().rposition(|o| f(o) > 0);
    let d = supply.iter().rposition(|o| f(o) > 0);
    let (Some(l), Some(d)) = (l, d) else {
        if out.total_cleared.units() != 0 {
            v.push("volume without marginal orders".into());
        }
        // nothing traded: the best remaining pair must not cross
        if let (Some(b), Some(a)) = (demand.first(), supply.first()) {
            if b.price >= a.price {
                v.push("crossing book left uncleared".into());
            }
        }
        return v;
    };
    let p_l = demand[l].price;
    let p_d = supply[d].price;
    match out.clearing_price {
        Some(p) if p >= p_d && p <= p_l => {}
        other => v.push(format!("price {other:?} outside [{p_d}, {p_l}]")),
    }
    let cum_s: u64 = supply[..=d].iter().map(|o| o.quantity.units()).sum();
    let cum_d: u64 = demand[..=l].iter().map(|o| o.quantity.units()).sum();
    if out.total_cleared.units() != cum_s.min(cum_d) {
        v.push(format!(
            "total {} != min({cum_s}, {cum_d})",
            out.total_cleared.units()
        ));
    }

    let side_checks = |orders: &[&Order], marginal: usize, better: &dyn Fn(&Order) -> bool,
                       worse: &dyn Fn(&Order) -> bool, label: &str,
                       v: &mut Vec<String>| {
        let m = orders[marginal];
        for o in orders {
            if better(o) && f(o) != o.quantity.units() {
                v.push(format!("{label}: tag {} ahead of marginal not full", o.tag));
            }
            if worse(o) && f(o) != 0 {
                v.push(format!("{label}: tag {} behind marginal was filled", o.tag));
            }
        }
        // marginal class: same price and quantity as the marginal order
        let class: Vec<&&Order> = orders
            .iter()
            .filter(|o| o.price == m.price && o.quantity == m.quantity)
            .collect();
        let ahead: u64 = orders
            .iter()
            .filter(|o| o.price == m.price && o.quantity > m.quantity)
            .map(|o| o.quantity.units())
            .chain(orders.iter().filter(|o| better(o)).map(|o| o.quantity.units()))
            .sum();
        let behind_same_price = orders
            .iter()
            .filter(|o| o.price == m.price && o.quantity < m.quantity)
            .any(|o| f(o) != 0);
        if behind_same_price {
            v.push(format!("{label}: smaller equal-priced order filled before marginal class"));
        }
        let share = out.total_cleared.units().saturating_sub(ahead);
        let n = class.len() as u64;
        let (lo, hi) = (share / n, share.div_ceil(n));
        for o in class {
            let x = f(o);
            if x < lo || x > hi {
                v.push(format!("{label}: pro-rata share {x} outside [{lo}, {hi}]"));
            }
        }
    };
    side_checks(
        &demand,
        l,
        &|o: &Order| o.price > p_l,
        &|o: &Order| o.price < p_l,
        "demand",
        &mut v,
    );
    side_checks(
        &supply,
        d,
        &|o: &Order| o.price < p_d,
        &|o: &Order| o.price > p_d,
        "supply",
        &mut v,
    );
    v
}

/// Random order list with plenty of price and quantity ties.
pub fn random_orders(rng: &mut impl Rng, max_orders: usize, max_qty: u64) -> Vec<Order> {
    let n = rng.gen_range(0..=max_orders);
    (0..n)
        .map(|_| {
            let price = f64::from(rng.gen_range(0..=20u32)) * 5.0;
            let quantity = Qty(rng.gen_range(1..=max_qty));
            let owner = OwnerId(rng.gen_range(0..=4));
            match rng.gen_range(0..3) {
                0 => Order::ask(price, quantity),
                1 => Order::sell(OwnerId(owner.0.max(1)), price, quantity),
                _ => Order::buy(OwnerId(owner.0.max(1)), price, quantity),
            }
        })
        .collect()
}

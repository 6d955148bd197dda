use pda_core::env::{BrokerView, Level, MarketHistory, Orderbook, OwnFill};
use pda_core::strategies::{
    est_bid_price, strategy_by_name, MarketOrder, MpneBbs, MpneBbsConfig, Strategy, StrategyParams,
    ZeroIntelligence, ZiConfig, ZipConfig, ZipState, ZipStrategy, STRATEGY_NAMES,
};
use pda_core::units::{Qty, Resolution};
use pda_core::EnvError;

fn book(asks: &[(f64, u64)]) -> Vec<Orderbook> {
    vec![Orderbook {
        slot: 0,
        hours_ahead: 24,
        clearing_price: Some(asks.first().map_or(50.0, |a| a.0)),
        net_cleared: Qty(0),
        uncleared_asks: asks
            .iter()
            .map(|&(price, q)| Level { price, quantity: Qty(q) })
            .collect(),
        uncleared_bids: Vec::new(),
    }]
}

#[allow(clippy::too_many_arguments)]
fn view<'a>(
    hour: usize,
    own: u64,
    market: u64,
    bought: u64,
    sold: u64,
    books: &'a [Orderbook],
    fills: &'a [OwnFill],
    history: &'a MarketHistory,
) -> BrokerView<'a> {
    BrokerView::new(
        0,
        hour,
        24,
        100.0,
        Resolution(1.0),
        50.0,
        Qty(own),
        Qty(market),
        Qty(bought),
        Qty(sold),
        books,
        fills,
        history,
    )
}

const ASKS: [(f64, u64); 4] = [(10.0, 5), (20.0, 5), (30.0, 5), (40.0, 5)];

#[test]
fn registry_knows_every_name() {
    for name in STRATEGY_NAMES {
        let s = strategy_by_name(name, 1, &StrategyParams::default()).unwrap();
        assert_eq!(s.name(), name);
    }
    assert!(matches!(
        strategy_by_name("oracle", 1, &StrategyParams::default()),
        Err(EnvError::UnknownStrategy(_))
    ));
}

#[test]
fn market_order_buys_the_gap_at_the_cap() {
    let h = MarketHistory::default();
    let b = book(&ASKS);
    let bids = MarketOrder.bids(&view(5, 8, 20, 3, 0, &b, &[], &h));
    assert_eq!(bids.buys.len(), 1);
    assert_eq!(bids.buys[0].price, 100.0);
    assert_eq!(bids.buys[0].quantity, Qty(5));
    assert!(MarketOrder.bids(&view(5, 8, 20, 8, 0, &b, &[], &h)).buys.is_empty());
}

#[test]
fn zi_prices_stay_in_bounds_and_follow_the_seed() {
    let h = MarketHistory::default();
    let b = book(&ASKS);
    let cfg = ZiConfig { low: 20.0, high: 30.0 };
    let draw = |seed| {
        let mut zi = ZeroIntelligence::new(cfg.clone(), seed);
        (0..200)
            .map(|_| zi.bids(&view(5, 8, 20, 0, 0, &b, &[], &h)).buys[0].price)
            .collect::<Vec<_>>()
    };
    let a = draw(1);
    assert!(a.iter().all(|p| (20.0..=30.0).contains(p)));
    assert_eq!(a, draw(1));
    assert_ne!(a, draw(2));
    assert!(ZiConfig { low: 5.0, high: 1.0 }.validate().is_err());
}

#[test]
fn zip_raises_its_bid_after_missing_and_lowers_after_filling() {
    let cfg = ZipConfig { margin: 0.3, delta: 0.05 };
    let mut s = ZipState::new(&cfg);
    let p0 = s.price(50.0);
    s.update(false, 50.0, 100.0);
    assert!(s.price(50.0) > p0);
    let p1 = s.price(50.0);
    s.update(true, 50.0, 100.0);
    assert!(s.price(50.0) < p1);

    let mut still = ZipState::new(&ZipConfig { margin: 0.3, delta: 0.0 });
    still.update(false, 50.0, 100.0);
    still.update(true, 50.0, 100.0);
    assert_eq!(still.margin, 0.3);
}

#[test]
fn zip_margin_is_clamped_to_the_price_range() {
    let mut s = ZipState::new(&ZipConfig { margin: 0.0, delta: 0.5 });
    for _ in 0..10 {
        s.update(false, 80.0, 100.0);
    }
    assert!((s.price(80.0) - 100.0).abs() < 1e-9);
    for _ in 0..10 {
        s.update(true, 80.0, 100.0);
    }
    assert_eq!(s.price(80.0), 0.0);
}

#[test]
fn zip_reacts_to_its_own_last_fill() {
    let h = MarketHistory::default();
    let b = book(&ASKS);
    let missed = [OwnFill {
        hours_ahead: 6,
        bought: Qty(0),
        sold: Qty(0),
        clearing_price: Some(30.0),
        best_bid: Some(35.0),
    }];
    let mut z = ZipStrategy::new(ZipConfig::default());
    let before = z.bids(&view(6, 8, 20, 0, 0, &b, &[], &h)).buys[0].price;
    let after = z.bids(&view(5, 8, 20, 0, 0, &b, &missed, &h)).buys[0].price;
    assert!(after > before);
}

#[test]
fn mpne_bbs_bids_exactly_its_requirement() {
    let h = MarketHistory::default();
    let b = book(&ASKS);
    let mut s = MpneBbs::new(MpneBbsConfig::default(), 3);
    for (own, bought) in [(8, 0), (8, 5), (13, 1), (2, 0)] {
        let bids = s.bids(&view(10, own, 20, bought, 0, &b, &[], &h));
        assert_eq!(bids.buy_quantity(), Qty(own - bought));
        assert!(bids.buys.len() <= 5);
        assert!(bids.buys.iter().all(|x| (0.0..=100.0).contains(&x.price)));
        assert!(bids.sells.is_empty());
    }
    // the first auction of the slot is observed only
    assert!(s.bids(&view(24, 8, 20, 0, 0, &b, &[], &h)).buys.is_empty());
}

#[test]
fn mpne_bbs_sells_surplus_just_below_the_covering_ask() {
    let h = MarketHistory::default();
    let b = book(&ASKS);
    let mut s = MpneBbs::new(MpneBbsConfig::default(), 3);
    let bids = s.bids(&view(10, 4, 12, 7, 0, &b, &[], &h));
    assert!(bids.buys.is_empty());
    assert_eq!(bids.sell_quantity(), Qty(3));
    // remaining market demand 12 is covered by the third ask
    assert_eq!(bids.sells[0].price, 30.0 - 0.01);
}

#[test]
fn estimate_rises_as_delivery_approaches() {
    let h = MarketHistory::default();
    let b = book(&ASKS);
    let prices: Vec<f64> = (1..=23)
        .rev()
        .map(|hour| est_bid_price(&view(hour, 4, 18, 0, 0, &b, &[], &h)).price)
        .collect();
    assert!(prices.windows(2).all(|w| w[0] <= w[1]), "{prices:?}");
    assert!(prices[0] < prices[22]);
}

#[test]
fn short_supply_estimate_uses_the_last_ask() {
    let h = MarketHistory::default();
    let b = book(&ASKS);
    let est = est_bid_price(&view(1, 4, 50, 0, 0, &b, &[], &h));
    assert_eq!(est.adequate, Some(false));
    assert_eq!(est.price, 40.0);
}

#[test]
fn close_window_bids_higher_than_far_window() {
    let h = MarketHistory::default();
    let b = book(&[(40.0, 50)]);
    let mut s = MpneBbs::new(MpneBbsConfig::default(), 7);
    for _ in 0..50 {
        let far = s.bids(&view(20, 8, 20, 0, 0, &b, &[], &h));
        let close = s.bids(&view(3, 8, 20, 0, 0, &b, &[], &h));
        assert!(far.buys.iter().all(|x| (28.0..=40.0).contains(&x.price)));
        assert!(close.buys.iter().all(|x| (38.0..=46.0).contains(&x.price)));
    }
}

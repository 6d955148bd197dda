use pda_core::deviation::{
    check_self_match_manipulation, classify, default_slack, deviation_value, enumerate_deviations,
    generate_instance, read_violations, replay_violation, verify_mpne, write_violations,
    DeviationClass, GridConfig, Instance, InstanceSpec, SupplyCase,
};
use pda_core::equilibrium::{mpne_policy, mpne_rollout};
use pda_core::game::{Ask, Bid, GameConfig, MarketState};
use pda_core::units::Qty;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(asks: &[(f64, u64)], demand: &[u64], supply: &[u64], horizon: usize) -> Instance {
    let state = MarketState::new(
        asks.iter().map(|&(p, q)| Ask::new(p, Qty(q))).collect(),
        demand.iter().map(|&d| Qty(d)).collect(),
        supply.iter().map(|&s| Qty(s)).collect(),
    );
    let gamma = *demand.iter().max().unwrap() as f64 + 1.0;
    let config = GameConfig::new(demand.len(), horizon, 100.0, (gamma + 1.0) * 100.0);
    Instance { state, config }
}

#[test]
fn null_deviation_reproduces_equilibrium_value() {
    let inst = instance(&[(10.0, 3), (20.0, 3), (30.0, 3), (40.0, 3)], &[4, 6], &[0, 1], 2);
    let t = mpne_rollout(&inst.state, &inst.config).unwrap();
    for b in 0..2 {
        let path: Vec<_> = t.rounds.iter().map(|r| r.action.players[b].clone()).collect();
        let v = deviation_value(&inst.state, b, &path, &inst.config).unwrap();
        assert_eq!(v, t.values()[b]);
    }
}

#[test]
fn enumeration_starts_with_the_equilibrium_action() {
    let inst = instance(&[(10.0, 3), (20.0, 3), (30.0, 3)], &[4, 6], &[2, 0], 2);
    let grid = GridConfig::default();
    let all = enumerate_deviations(&inst.state, 0, &inst.config, &grid).unwrap();
    assert_eq!(all[0], mpne_policy(&inst.state, 0, &inst.config).to_bids());
    assert!(all.len() > 100);
    let mut dedup = all.clone();
    dedup.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
    dedup.dedup();
    assert_eq!(dedup.len(), all.len());

    // every split stays inside the player's position
    for a in &all {
        assert!(a.buy_quantity() <= Qty(4));
        assert!(a.sell_quantity() <= Qty(2));
    }
    let coarse = GridConfig {
        uniform_prices: 3,
        ask_prices: false,
        splits: false,
    };
    let fewer = enumerate_deviations(&inst.state, 0, &inst.config, &coarse).unwrap();
    assert!(fewer.len() < all.len());
    assert!(enumerate_deviations(&inst.state, 2, &inst.config, &grid).is_err());
}

#[test]
fn oversized_games_are_rejected() {
    let inst = instance(&[(10.0, 3)], &[30, 6], &[0, 0], 2);
    assert!(verify_mpne(&inst, &GridConfig::default(), 1.0).is_err());
    let inst = instance(&[(10.0, 3)], &[3, 4], &[0, 0], 5);
    assert!(verify_mpne(&inst, &GridConfig::default(), 1.0).is_err());
}

#[test]
fn classification() {
    let eq = Bid::new(50.0, Qty(4));
    assert_eq!(classify(&[eq], eq), DeviationClass::Null);
    assert_eq!(classify(&[], eq), DeviationClass::Withdrawn);
    assert_eq!(classify(&[Bid::new(50.0, Qty(2))], eq), DeviationClass::EqualPriceLowerQty);
    assert_eq!(classify(&[Bid::new(60.0, Qty(4))], eq), DeviationClass::HigherPriceEqualQty);
    assert_eq!(classify(&[Bid::new(40.0, Qty(1))], eq), DeviationClass::LowerPriceLowerQty);
    assert_eq!(
        classify(&[Bid::new(40.0, Qty(2)), Bid::new(60.0, Qty(2))], eq),
        DeviationClass::Split
    );
}

#[test]
fn weak_balancing_is_labelled_not_failed() {
    let mut inst = instance(&[(10.0, 3), (20.0, 3), (30.0, 3)], &[4, 6], &[0, 0], 2);
    inst.config.balancing_price = 150.0;
    let r = verify_mpne(&inst, &GridConfig::default(), default_slack(&inst)).unwrap();
    assert!(r.premise_violated);
}

#[test]
fn two_buyers_without_supply_have_no_profitable_deviation() {
    let inst = instance(&[(10.0, 3), (20.0, 3), (30.0, 3), (40.0, 3)], &[4, 6], &[0, 0], 2);
    let r = verify_mpne(&inst, &GridConfig::default(), default_slack(&inst)).unwrap();
    assert!(!r.premise_violated);
    assert!(r.holds(), "{:?}", r.violations.first());
    assert!(r.actions_evaluated > 0);
    assert_eq!(r.checks.len(), 2 * mpne_rollout(&inst.state, &inst.config).unwrap().rounds.len());
}

#[test]
fn short_supply_without_sellers_leaves_trailing_players_indifferent() {
    let spec = InstanceSpec {
        seller_share: 0.0,
        ..Default::default()
    };
    for seed in 0..8 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = generate_instance(&mut rng, &spec, SupplyCase::Inadequate);
        let r = verify_mpne(&inst, &GridConfig::default(), default_slack(&inst)).unwrap();
        assert!(r.holds(), "seed {seed}: {:?}", r.violations.first());
        for c in r.checks.iter().filter(|c| c.trailing) {
            assert!((c.best_deviation_value - c.equilibrium_value).abs() < 1e-9);
            assert!((c.worst_deviation_value - c.equilibrium_value).abs() < 1e-9);
        }
    }
}

#[test]
fn wash_trade_pays_only_without_the_guard() {
    // lone prosumer, no wholesale supply: its sell is the only supply
    let inst = instance(&[], &[5], &[2], 2);
    let r = check_self_match_manipulation(&inst, &GridConfig::default(), default_slack(&inst)).unwrap();
    assert_eq!(r.seller, 0);
    assert!(r.condition_holds);
    assert!(r.guarded.holds());
    assert!(r.manipulation_found());
}

#[test]
fn no_wash_trade_when_the_price_condition_fails() {
    let inst = instance(&[(10.0, 3), (90.0, 10)], &[5], &[2], 2);
    let r = check_self_match_manipulation(&inst, &GridConfig::default(), default_slack(&inst)).unwrap();
    assert!(!r.condition_holds);
    assert!(!r.manipulation_found());
}

#[test]
fn violations_round_trip_and_replay() {
    // supply-holding instances from the generator produce violations
    let spec = InstanceSpec::default();
    let found = (0..40)
        .find_map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = generate_instance(&mut rng, &spec, SupplyCase::Inadequate);
            let r = verify_mpne(&inst, &GridConfig::default(), default_slack(&inst)).unwrap();
            r.violations.into_iter().next()
        })
        .expect("no violation in 40 short-supply instances");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.json");
    write_violations(&path, std::slice::from_ref(&found)).unwrap();
    let back = read_violations(&path).unwrap();
    assert_eq!(back, vec![found.clone()]);
    let out = replay_violation(&back[0]).unwrap();
    assert!(out.reproduced);
    assert_eq!(out.deviation_value, found.deviation_value);
    assert_eq!(out.margin, found.margin);
}

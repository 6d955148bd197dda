use pda_core::game::{
    evaluate_value, rollout, settle_balancing, step, Ask, Bid, GameConfig, Idle, JointAction,
    MarketState, PlayerBids, Policy, SupplyMode,
};
use pda_core::units::Qty;
use pda_core::GameError;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg(n: usize, h: usize) -> GameConfig {
    GameConfig::new(n, h, 100.0, 5000.0)
}

#[test]
fn single_buyer_round() {
    let config = cfg(1, 1);
    let s = MarketState::new(vec![Ask::new(10.0, Qty(5))], vec![Qty(4)], vec![Qty(0)]);
    let a = JointAction {
        players: vec![PlayerBids::single(Bid::new(100.0, Qty(4)), Bid::new(0.0, Qty(0)))],
    };
    let r = step(&s, &a, &config).unwrap();
    assert_eq!(r.costs, vec![4.0 * 55.0]);
    assert_eq!(r.next.demand, vec![Qty(0)]);
    assert_eq!(r.next.asks, vec![Ask::new(10.0, Qty(1))]);
    assert_eq!(r.next.round, 2);
}

#[test]
fn idle_round_only_advances() {
    let config = cfg(2, 3);
    let s = MarketState::new(
        vec![Ask::new(10.0, Qty(5))],
        vec![Qty(4), Qty(3)],
        vec![Qty(1), Qty(0)],
    );
    let r = step(&s, &JointAction::idle(2), &config).unwrap();
    assert_eq!(r.costs, vec![0.0, 0.0]);
    let mut expected = s.clone();
    expected.round = 2;
    assert_eq!(r.next, expected);
}

#[test]
fn seller_is_paid_what_buyer_pays() {
    let config = cfg(2, 1);
    let s = MarketState::new(vec![], vec![Qty(3), Qty(2)], vec![Qty(2), Qty(0)]);
    let a = JointAction {
        players: vec![
            PlayerBids::single(Bid::new(0.0, Qty(0)), Bid::new(0.0, Qty(2))),
            PlayerBids::single(Bid::new(100.0, Qty(2)), Bid::new(0.0, Qty(0))),
        ],
    };
    let r = step(&s, &a, &config).unwrap();
    let lambda = r.outcome.clearing_price.unwrap();
    assert_eq!(lambda, 50.0);
    assert_eq!(r.costs, vec![-2.0 * lambda, 2.0 * lambda]);
}

#[test]
fn over_cap_action_names_the_player() {
    let config = cfg(2, 1);
    let s = MarketState::new(vec![], vec![Qty(3), Qty(2)], vec![Qty(0), Qty(0)]);
    let a = JointAction {
        players: vec![
            PlayerBids::idle(),
            PlayerBids::single(Bid::new(50.0, Qty(3)), Bid::new(0.0, Qty(0))),
        ],
    };
    match step(&s, &a, &config) {
        Err(GameError::Action { player, .. }) => assert_eq!(player, 1),
        other => panic!("expected an action error, got {other:?}"),
    }
}

#[test]
fn balancing_settlement() {
    let config = cfg(3, 1);
    let mut s = MarketState::new(vec![], vec![Qty(0), Qty(3), Qty(7)], vec![Qty(0); 3]);
    assert!(settle_balancing(&s, &config).is_err());
    s.round = 2;
    let mut c = config.clone();
    c.balancing_price = 100.0;
    assert_eq!(settle_balancing(&s, &c).unwrap(), vec![0.0, 300.0, 700.0]);
}

#[test]
fn idle_profile_pays_full_balancing() {
    let config = cfg(2, 3);
    let s = MarketState::new(
        vec![Ask::new(10.0, Qty(50))],
        vec![Qty(4), Qty(6)],
        vec![Qty(0), Qty(0)],
    );
    let v = evaluate_value(&[&Idle, &Idle], &s, &config).unwrap();
    assert_eq!(v, vec![4.0 * 5000.0, 6.0 * 5000.0]);
}

#[test]
fn truthful_single_round_value() {
    let config = cfg(1, 1);
    let s = MarketState::new(vec![Ask::new(10.0, Qty(50))], vec![Qty(4)], vec![Qty(0)]);
    let truthful = |st: &MarketState, b: usize, c: &GameConfig| {
        PlayerBids::single(Bid::new(c.p_max, st.demand[b]), Bid::new(0.0, Qty(0)))
    };
    let v = evaluate_value(&[&truthful], &s, &config).unwrap();
    assert_eq!(v, vec![55.0 * 4.0]);
}

#[test]
fn weak_balancing_is_rejected_unless_overridden() {
    let s = MarketState::new(vec![], vec![Qty(20)], vec![Qty(0)]);
    let mut c = GameConfig::new(1, 2, 100.0, 2000.0);
    assert!(matches!(c.validate(&s), Err(GameError::WeakBalancing { .. })));
    c.balancing_price = 2100.5;
    assert!(c.validate(&s).is_ok());
    c.balancing_price = 10.0;
    c.allow_weak_balancing = true;
    assert!(c.validate(&s).is_ok());
}

#[test]
fn initial_state_needs_demand_above_supply() {
    let s = MarketState::new(vec![], vec![Qty(2)], vec![Qty(2)]);
    assert!(matches!(cfg(1, 1).validate(&s), Err(GameError::State(_))));
}

#[test]
fn constant_mode_reoffers_the_curve() {
    let mut config = cfg(1, 2);
    config.supply_mode = SupplyMode::Constant;
    let s = MarketState::new(vec![Ask::new(10.0, Qty(3))], vec![Qty(5)], vec![Qty(0)]);
    let a = JointAction {
        players: vec![PlayerBids::single(Bid::new(100.0, Qty(5)), Bid::new(0.0, Qty(0)))],
    };
    let r = step(&s, &a, &config).unwrap();
    assert_eq!(r.next.asks, s.asks);
    assert_eq!(r.next.demand, vec![Qty(2)]);
}

#[test]
fn jsonl_export_has_one_line_per_round_plus_settlement() {
    let config = cfg(1, 2);
    let s = MarketState::new(vec![Ask::new(10.0, Qty(3))], vec![Qty(5)], vec![Qty(0)]);
    let greedy = |st: &MarketState, b: usize, c: &GameConfig| {
        PlayerBids::single(Bid::new(c.p_max, st.demand[b]), Bid::new(0.0, Qty(0)))
    };
    let t = rollout(&[&greedy], &s, &config).unwrap();
    let mut buf = Vec::new();
    t.write_jsonl(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["kind"], "round");
    assert_eq!(lines[2]["kind"], "settle");
    assert_eq!(lines[2]["balancing"][0], 2.0 * 5000.0);
}

/// Random bids within caps, seeded by state so the policy stays Markov.
struct Noisy(u64);

impl Policy for Noisy {
    fn act(&self, s: &MarketState, b: usize, c: &GameConfig) -> Result<PlayerBids, GameError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0 ^ (s.round as u64 * 31 + b as u64));
        let q_buy = Qty(rng.gen_range(0..=s.demand[b].units()));
        let q_sell = Qty(rng.gen_range(0..=s.supply[b].units()));
        Ok(PlayerBids::single(
            Bid::new(rng.gen_range(0.0..=c.p_max), q_buy),
            Bid::new(rng.gen_range(0.0..=c.p_max), q_sell),
        ))
    }
}

proptest! {
    #[test]
    fn accounting_holds_on_random_play(seed in any::<u64>(), n in 1usize..4, h in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let asks = (0..rng.gen_range(0..6))
            .map(|_| Ask::new(f64::from(rng.gen_range(1..20u32)) * 5.0, Qty(rng.gen_range(1..8))))
            .collect();
        let supply: Vec<Qty> = (0..n).map(|_| Qty(rng.gen_range(0..4))).collect();
        let demand = supply.iter().map(|s| *s + Qty(rng.gen_range(1..10))).collect();
        let s = MarketState::new(asks, demand, supply);
        let config = cfg(n, h);
        let policies: Vec<Noisy> = (0..n).map(|b| Noisy(seed.wrapping_add(b as u64))).collect();
        let profile: Vec<&dyn Policy> = policies.iter().map(|p| p as &dyn Policy).collect();
        let t = rollout(&profile, &s, &config).unwrap();
        for (i, r) in t.rounds.iter().enumerate() {
            let next = t.rounds.get(i + 1).map_or(&t.terminal, |x| &x.state);
            let wholesale_sold = r.state.wholesale_supply() - next.wholesale_supply();
            let price = r.outcome.clearing_price.unwrap_or(0.0);
            let paid: f64 = r.costs.iter().sum();
            // players' net payments equal what the wholesale supplier receives
            prop_assert!((paid - price * wholesale_sold.as_f64()).abs() < 1e-9);
        }
        for w in t.rounds.windows(2) {
            for b in 0..n {
                prop_assert!(w[1].state.demand[b] <= w[0].state.demand[b]);
                prop_assert!(w[1].state.supply[b] <= w[0].state.supply[b]);
            }
        }
        // value additivity: V^h = C^h + V^{h+1}
        for i in 0..t.rounds.len() {
            let here = t.values_from(i);
            let next = t.values_from(i + 1);
            for b in 0..n {
                prop_assert!((here[b] - (t.rounds[i].costs[b] + next[b])).abs() < 1e-9);
            }
        }
    }
}

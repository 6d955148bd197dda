use pda_core::env::{DemandLevel, EnvLogLine};
use pda_core::harness::{
    run_equilibrium_suite, run_experiment, run_game, strategy_seed, CostTable, ExperimentSpec, Mode,
    SuiteSpec,
};
use pda_core::EnvError;

fn spec(strategies: &[&str]) -> ExperimentSpec {
    let mut s = ExperimentSpec {
        demand_level: DemandLevel::Mid,
        miso: true,
        games: 3,
        seed: 100,
        strategies: strategies.iter().map(|s| s.to_string()).collect(),
        ..Default::default()
    };
    s.env.slots = 4;
    s
}

#[test]
fn spec_validation() {
    assert!(spec(&["mpne-bbs", "zi"]).validate().is_ok());
    assert!(matches!(spec(&["mpne-bbs"]).validate(), Err(EnvError::Config(_))));
    assert!(matches!(
        spec(&["mpne-bbs", "nope"]).validate(),
        Err(EnvError::UnknownStrategy(_))
    ));
    let mut all = spec(&["mpne-bbs", "zi", "zip", "market-order"]);
    all.mode = Mode::AllPlayer;
    assert!(all.validate().is_ok());
    let mut eq = spec(&["mpne-bbs", "zi"]);
    eq.mode = Mode::EquilibriumCheck;
    assert!(run_experiment(&eq).is_err());
    let mut none = spec(&["mpne-bbs", "zi"]);
    none.games = 0;
    assert!(none.validate().is_err());
}

#[test]
fn spec_from_toml() {
    let s = ExperimentSpec::from_toml_str(
        r#"
mode = "all_player"
demand_level = "high"
miso = true
games = 2
seeds = [7, 9]
strategies = ["zi", "zip", "market-order"]

[env]
slots = 2

[params.zi]
low = 10.0
high = 90.0

[suite]
adequate = 4
"#,
    )
    .unwrap();
    assert_eq!(s.mode, Mode::AllPlayer);
    assert_eq!(s.game_seeds(), vec![7, 9]);
    assert_eq!(s.env_for(9).seed, 9);
    assert_eq!(s.env_for(9).demand_level, DemandLevel::High);
    assert!(s.env_for(9).miso.enabled);
    assert_eq!(s.params.zi.low, 10.0);
    assert_eq!(s.suite.adequate, 4);
    assert!(ExperimentSpec::from_toml_str("games = \"many\"").is_err());
}

#[test]
fn strategy_streams_depend_on_name_and_game() {
    assert_eq!(strategy_seed(5, "zi"), strategy_seed(5, "zi"));
    assert_ne!(strategy_seed(5, "zi"), strategy_seed(5, "zip"));
    assert_ne!(strategy_seed(5, "zi"), strategy_seed(6, "zi"));
}

#[test]
fn experiments_are_deterministic() {
    let s = spec(&["mpne-bbs", "zi"]);
    let a = run_experiment(&s).unwrap();
    let b = run_experiment(&s).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.games.len(), 3);
    let row = a.table.row("mpne-bbs").unwrap();
    assert_eq!(row.relative_cost, Some(1.0));
    assert_eq!(row.per_game.len(), 3);
}

#[test]
fn a_game_does_not_depend_on_its_neighbours() {
    let mut one = spec(&["mpne-bbs", "zip"]);
    one.seeds = Some(vec![101]);
    let mut many = one.clone();
    many.seeds = Some(vec![100, 101, 102]);
    let a = run_experiment(&one).unwrap();
    let b = run_experiment(&many).unwrap();
    assert_eq!(a.games[0], b.games[1]);
}

#[test]
fn log_accounts_add_up() {
    let s = spec(&["mpne-bbs", "market-order"]);
    let g = run_game(&s, 7, true).unwrap();
    assert_eq!(g.slots.len(), 4);
    let mut wholesale = [0.0; 2];
    let mut settled = [0.0; 2];
    for slot in &g.slots {
        let mut per_slot = [0.0; 2];
        for line in slot.lines() {
            match line {
                EnvLogLine::Auction(a) => {
                    let p = a.price.unwrap_or(0.0);
                    for b in 0..2 {
                        per_slot[b] += p * (a.bought[b] - a.sold[b]);
                    }
                }
                EnvLogLine::Settle { brokers, .. } => {
                    for b in 0..2 {
                        assert!((brokers[b].wholesale_cost - per_slot[b]).abs() < 1e-6);
                        let net = brokers[b].bought - brokers[b].sold;
                        let unmet = (brokers[b].demand - net).max(0.0);
                        assert!((brokers[b].balancing_quantity - unmet).abs() < 1e-6);
                        settled[b] += brokers[b].total_cost();
                    }
                }
            }
        }
        for b in 0..2 {
            wholesale[b] += per_slot[b];
        }
    }
    for b in 0..2 {
        assert!((g.brokers[b].wholesale_cost - wholesale[b]).abs() < 1e-6);
        assert!((g.brokers[b].total_cost() - settled[b]).abs() < 1e-6);
    }
}

#[test]
fn cost_table_csv_round_trip() {
    let t = CostTable::from_games(vec![
        ("mpne-bbs".into(), vec![10.0, 12.0]),
        ("zi".into(), vec![20.0, 22.0]),
    ]);
    let zi = t.row("zi").unwrap();
    assert_eq!(zi.mean_unit_cost, 21.0);
    assert_eq!(zi.relative_cost, Some(21.0 / 11.0));
    assert!((zi.std_unit_cost - 2f64.sqrt()).abs() < 1e-12);
    let text = t.to_csv().unwrap();
    assert!(text.starts_with("strategy,games,mean_unit_cost,std_unit_cost,relative_cost,per_game"));
    assert_eq!(CostTable::from_csv(&text).unwrap(), t);
}

#[test]
fn experiment_writes_table_and_logs() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = spec(&["mpne-bbs", "zi"]);
    s.out = Some(dir.path().to_path_buf());
    s.write_logs = true;
    let out = run_experiment(&s).unwrap();
    let text = std::fs::read_to_string(dir.path().join("cost_table.csv")).unwrap();
    assert_eq!(CostTable::from_csv(&text).unwrap(), out.table);
    for seed in s.game_seeds() {
        let log = std::fs::read_to_string(dir.path().join(format!("game-{seed}.jsonl"))).unwrap();
        assert_eq!(log.lines().count(), 4 * 25);
    }
}

#[test]
fn small_equilibrium_suite() {
    let s = SuiteSpec {
        adequate: 3,
        inadequate: 3,
        ..Default::default()
    };
    let r = run_equilibrium_suite(&s).unwrap();
    assert_eq!(r.adequate.instances, 3);
    assert_eq!(r.inadequate.instances, 3);
    assert!(r.adequate.actions_evaluated > 0);
    assert_eq!(r.violations.len(), r.adequate.violations + r.inadequate.violations);
    assert_eq!(run_equilibrium_suite(&s).unwrap(), r);
}

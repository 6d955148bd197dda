//! `pda`: clear order books, verify equilibrium play, run tournaments and
//! replay recorded deviations.
//!
//! Exit codes: 0 success, 1 invariant violation, 2 bad input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pda_core::auction::{
    certify_kkt, clear, normalize_book, parse_orders, BookLimits, DualPick, PricingRule,
    SelfMatchGuard,
};
use pda_core::deviation::{read_violations, replay_violation, write_violations};
use pda_core::env::DemandLevel;
use pda_core::harness::{run_equilibrium_suite, run_experiment, ExperimentSpec, SuiteReport};
use pda_core::Resolution;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "pda", version, about = "Periodic double auction lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clear one order book read from a file (`side price quantity owner` per line).
    Clear(ClearArgs),
    /// Search generated games for profitable deviations from equilibrium play.
    Verify(RunArgs),
    /// Play a seeded tournament and write the cost table.
    Tournament(RunArgs),
    /// Recompute the values of stored deviation violations.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Acpr,
    KDouble,
    DualLower,
    DualMid,
    DualUpper,
}

#[derive(Args)]
struct ClearArgs {
    book: PathBuf,
    #[arg(long, value_enum, default_value = "acpr")]
    rule: Rule,
    /// Weight on the ask price for `--rule k-double`.
    #[arg(long, default_value_t = 0.5)]
    k: f64,
    #[arg(long, default_value_t = 100.0)]
    p_max: f64,
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    /// Disable the self-match guard.
    #[arg(long)]
    no_guard: bool,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment spec; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Games per tournament, or instances per supply case for `verify`.
    #[arg(long)]
    games: Option<usize>,
    #[arg(long)]
    demand_level: Option<DemandLevel>,
    /// Enable the bulk buyer (`--miso`, `--miso=false`).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    miso: Option<bool>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    /// JSON file with one violation or an array of them.
    file: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// How a command ended when it did not succeed.
enum Failure {
    Input(anyhow::Error),
    Invariant(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Clear(a) => cmd_clear(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Tournament(a) => cmd_tournament(a),
        Command::Replay(a) => cmd_replay(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant violated: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| p.display().to_string()),
        None => Ok(writeln!(std::io::stdout().lock(), "{text}")?),
    }
}

fn cmd_clear(a: ClearArgs) -> Result<(), Failure> {
    let rule = match a.rule {
        Rule::Acpr => PricingRule::ACPR,
        Rule::KDouble => PricingRule::KDouble(a.k),
        Rule::DualLower => PricingRule::MeritOrderDual(DualPick::LowerAsk),
        Rule::DualMid => PricingRule::MeritOrderDual(DualPick::Midpoint),
        Rule::DualUpper => PricingRule::MeritOrderDual(DualPick::UpperBid),
    };
    let rule = rule.validate()?;
    if !(a.resolution > 0.0) {
        return Err(Failure::Input(anyhow::anyhow!("resolution must be positive")));
    }
    let text = std::fs::read_to_string(&a.book).with_context(|| a.book.display().to_string())?;
    let resolution = Resolution(a.resolution);
    let orders = parse_orders(&text, resolution).with_context(|| a.book.display().to_string())?;
    let book = normalize_book(orders, &BookLimits::new(a.p_max))?;
    let guard = if a.no_guard {
        SelfMatchGuard::Off
    } else {
        SelfMatchGuard::On
    };
    let outcome = clear(&book, rule, guard)?;
    let certificate = (!outcome.is_degenerate()).then(|| certify_kkt(&book, &outcome, 1e-6));

    #[derive(Serialize)]
    struct Fill {
        tag: u64,
        owner: u32,
        side: &'static str,
        price: f64,
        quantity: f64,
        cleared: f64,
    }
    #[derive(Serialize)]
    struct Report<'a> {
        clearing_price: Option<f64>,
        total_cleared: f64,
        excluded_owner: Option<u32>,
        fills: Vec<Fill>,
        kkt_valid: Option<bool>,
        kkt: Option<&'a pda_core::auction::KktCertificate>,
    }
    let report = Report {
        clearing_price: outcome.clearing_price,
        total_cleared: resolution.to_physical(outcome.total_cleared),
        excluded_owner: outcome.excluded_owner.map(|o| o.0),
        fills: book
            .orders()
            .map(|o| Fill {
                tag: o.tag,
                owner: o.owner.0,
                side: o.side.token(),
                price: o.price,
                quantity: resolution.to_physical(o.quantity),
                cleared: resolution.to_physical(outcome.cleared(o.tag)),
            })
            .collect(),
        kkt_valid: certificate.as_ref().map(|c| c.is_valid()),
        kkt: certificate.as_ref(),
    };
    emit(&report, a.out.as_deref())?;
    match certificate {
        Some(c) if !c.is_valid() => Err(Failure::Invariant(format!(
            "KKT certificate rejected (max residual {:.3e})",
            c.residuals.max()
        ))),
        _ => Ok(()),
    }
}

fn load_spec(a: &RunArgs) -> Result<ExperimentSpec> {
    let mut spec = match &a.config {
        Some(p) => ExperimentSpec::load(p)?,
        None => ExperimentSpec::default(),
    };
    if let Some(s) = a.seed {
        spec.seed = s;
        spec.suite.seed = s;
        spec.seeds = None;
    }
    if let Some(l) = a.demand_level {
        spec.demand_level = l;
    }
    if let Some(m) = a.miso {
        spec.miso = m;
    }
    if let Some(o) = &a.out {
        spec.out = Some(o.clone());
    }
    Ok(spec)
}

fn summary_line(name: &str, c: &pda_core::harness::CaseSummary) -> String {
    format!(
        "{name}: {} instances, {} premise-violated, {} with violations ({} total, max margin {:.4}), {} trailing checks, {} not indifferent",
        c.instances,
        c.premise_violated,
        c.failing_instances,
        c.violations,
        c.max_margin,
        c.trailing_checks,
        c.trailing_not_indifferent
    )
}

fn cmd_verify(a: RunArgs) -> Result<(), Failure> {
    let mut spec = load_spec(&a)?;
    if let Some(n) = a.games {
        spec.suite.adequate = n;
        spec.suite.inadequate = n;
    }
    let report: SuiteReport = run_equilibrium_suite(&spec.suite)?;
    println!("{}", summary_line("adequate", &report.adequate));
    println!("{}", summary_line("inadequate", &report.inadequate));
    if let Some(dir) = &spec.out {
        std::fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
        emit(&report, Some(&dir.join("suite.json")))?;
        write_violations(&dir.join("violations.json"), &report.violations)?;
    }
    if report.holds() {
        Ok(())
    } else {
        Err(Failure::Invariant(format!(
            "{} profitable deviations found",
            report.adequate.violations + report.inadequate.violations
        )))
    }
}

fn cmd_tournament(a: RunArgs) -> Result<(), Failure> {
    let mut spec = load_spec(&a)?;
    if let Some(n) = a.games {
        spec.games = n;
        spec.seeds = None;
    }
    let out = run_experiment(&spec)?;
    print!("{}", out.table.to_csv()?);
    let warnings: usize = out.games.iter().map(|g| g.warnings).sum();
    if warnings > 0 {
        eprintln!("{warnings} orders were clipped; see the game logs");
    }
    Ok(())
}

fn cmd_replay(a: ReplayArgs) -> Result<(), Failure> {
    let violations = read_violations(&a.file)?;
    let mut outcomes = Vec::with_capacity(violations.len());
    for v in &violations {
        outcomes.push(replay_violation(v)?);
    }
    emit(&outcomes, a.out.as_deref())?;
    if let Some(i) = outcomes.iter().position(|o| !o.reproduced) {
        return Err(Failure::Invariant(format!("violation {i} does not reproduce its stored values")));
    }
    let standing = outcomes.iter().filter(|o| o.margin > 0.0).count();
    if standing > 0 {
        return Err(Failure::Invariant(format!(
            "{standing} of {} replayed deviations beat the equilibrium",
            outcomes.len()
        )));
    }
    Ok(())
}

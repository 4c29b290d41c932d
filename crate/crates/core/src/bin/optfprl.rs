use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use optfprl::harness::config::parse_switch;
use optfprl::harness::verify::{run_checks, VerifyOptions};
use optfprl::harness::{export_csv, render_chart, run_experiment, Algorithm, RunOptions, ScenarioId};
use optfprl::regularizers::StrategyName;
use optfprl::Error;

#[derive(Parser)]
#[command(name = "optfprl", version, about = "Pruned optimistic FTRL experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one learner on one scenario and write its trace.
    Run(RunArgs),
    /// Run the invariant and property suite; exits non-zero on any failure.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value file; command-line flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// 1..6 or random.
    #[arg(long)]
    scenario: Option<ScenarioId>,
    /// optfprl, ftrl, ogd, opt-ftrl or opt-ogd.
    #[arg(long)]
    algo: Option<Algorithm>,
    /// agnostic, known-path, observed-path or recursive.
    #[arg(long)]
    strategy: Option<StrategyName>,
    #[arg(long)]
    path_budget: Option<f64>,
    #[arg(long)]
    cadence: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// on or off.
    #[arg(long, value_parser = parse_switch)]
    check_invariants: Option<bool>,
    /// Prediction noise scale (random scenario).
    #[arg(long)]
    noise: Option<f64>,
    /// Cost vector norm (random scenario).
    #[arg(long)]
    cost_radius: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write the metrics report as JSON.
    #[arg(long)]
    summary: Option<PathBuf>,
}

impl RunArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            scenario: self.scenario,
            algo: self.algo,
            strategy: self.strategy,
            path_budget: self.path_budget,
            cadence: self.cadence,
            horizon: self.horizon,
            dim: self.dim,
            radius: self.radius,
            seed: self.seed,
            check_invariants: self.check_invariants,
            noise: self.noise,
            cost_radius: self.cost_radius,
            out: self.out.clone(),
            svg: self.svg.clone(),
            summary: self.summary.clone(),
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Also run the qualitative orderings on the full-size fixed scenarios.
    #[arg(long)]
    orderings: bool,
    /// Number of random instances for the state-bound suite.
    #[arg(long)]
    instances: Option<usize>,
    /// Number of random instances per strategy for the bound suite.
    #[arg(long)]
    bound_instances: Option<usize>,
    /// Number of grid-oracle mini-runs.
    #[arg(long)]
    oracle_runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn run(args: &RunArgs) -> optfprl::Result<()> {
    let file = match &args.config {
        Some(p) => RunOptions::from_config_file(p)?,
        None => RunOptions::default(),
    };
    let opts = file.overlay(args.options());
    let out = opts
        .out
        .clone()
        .ok_or_else(|| Error::InvalidParameter("--out is required".into()))?;
    let config = opts.to_run_config()?;
    let (trace, report) = run_experiment(&config)?;
    export_csv(&trace, Some(&report), &out)?;
    if let Some(svg) = &opts.svg {
        render_chart(std::slice::from_ref(&trace), svg)?;
    }
    if let Some(path) = &opts.summary {
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| Error::InvalidParameter(format!("summary encoding: {e}")))?;
        std::fs::write(path, json + "\n")?;
    }
    println!(
        "{} on scenario {}: T={} regret={:.6} avg={:.6}",
        report.algo, config.scenario, report.horizon, report.regret_cum, report.regret_avg
    );
    Ok(())
}

fn verify(args: &VerifyArgs) -> bool {
    let d = VerifyOptions::default();
    let opts = VerifyOptions {
        random_instances: args.instances.unwrap_or(d.random_instances),
        bound_instances: args.bound_instances.unwrap_or(d.bound_instances),
        oracle_runs: args.oracle_runs.unwrap_or(d.oracle_runs),
        orderings: args.orderings,
        seed: args.seed.unwrap_or(d.seed),
    };
    let outcomes = run_checks(&opts);
    for c in &outcomes {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    outcomes.iter().all(|c| c.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Verify(args) => {
            if verify(&args) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

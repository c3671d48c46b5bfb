//! Command-line runner for robust ranking-and-selection experiments.
//!
//! `run` measures PCS curves over macro-replications and writes CSV,
//! `ratios` compares a run's empirical sampling ratios against the optimal
//! ones for the true instance, and `bound` Monte Carlo estimates the
//! posterior lower bound on correct selection after warmup alone.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use raoda_core::asymptotics::{empirical_ratios, optimality_residuals, solve_optimal_ratios, AllocationRatios};
use raoda_core::baselines::PolicyKind;
use raoda_core::config::load_config;
use raoda_core::harness::{
    emit_csv, estimate_posterior_pcs_bound, preset_config, run_experiment, run_replication,
    ExperimentConfig, PcsCurve, Preset,
};
use raoda_core::problem::compute_ranking;
use raoda_core::seeding::{substream, StreamKind};
use raoda_core::Ranking;

#[derive(Parser)]
#[command(name = "raoda", version, about = "Robust ranking and selection under input uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run macro-replicated experiments and write the PCS curve as CSV.
    Run(RunArgs),
    /// Compare one run's empirical sampling ratios with the optimal ratios.
    Ratios(RatiosArgs),
    /// Estimate the posterior probability bound of correct selection after
    /// warmup only.
    Bound(BoundArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Experiment config file (key = value lines).
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment: exp1, exp2, or exp3.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

impl SourceArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        match (&self.config, &self.preset) {
            (Some(path), None) => {
                load_config(path).with_context(|| format!("loading {}", path.display()))
            }
            (None, Some(name)) => Preset::from_name(name)
                .map(preset_config)
                .ok_or_else(|| anyhow!("unknown preset {name:?}; expected exp1, exp2, or exp3")),
            _ => bail!("exactly one of --config or --preset is required"),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Policies to run, comma separated: raoda, rocba, ea, ptv.
    #[arg(long, value_delimiter = ',', value_name = "NAME")]
    policy: Vec<String>,
    /// Total simulation budget; overrides the config, clipping checkpoints.
    #[arg(long, value_name = "T")]
    budget: Option<u64>,
    /// Macro-replications; overrides the config.
    #[arg(long, value_name = "N")]
    reps: Option<u64>,
    /// Master seed; overrides the config.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct RatiosArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Policy for the run.
    #[arg(long, value_name = "NAME")]
    policy: Option<String>,
    /// Total simulation budget; overrides the config, clipping checkpoints.
    #[arg(long, value_name = "T")]
    budget: Option<u64>,
    /// Master seed; overrides the config.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Monte Carlo draws from the posterior.
    #[arg(long, value_name = "D", default_value_t = 100_000)]
    draws: u64,
}

fn apply_overrides(
    config: &mut ExperimentConfig,
    budget: Option<u64>,
    reps: Option<u64>,
    seed: Option<u64>,
) {
    if let Some(t) = budget {
        config.total_budget = t;
        config.checkpoints.retain(|&c| c <= t);
        if config.checkpoints.last() != Some(&t) {
            config.checkpoints.push(t);
        }
    }
    if let Some(n) = reps {
        config.macro_reps = n;
    }
    if let Some(s) = seed {
        config.master_seed = s;
    }
}

fn parse_policies(names: &[String], fallback: PolicyKind) -> Result<Vec<PolicyKind>> {
    if names.is_empty() {
        return Ok(vec![fallback]);
    }
    let mut kinds = Vec::with_capacity(names.len());
    for name in names {
        kinds.push(name.parse::<PolicyKind>().map_err(|e| anyhow!(e))?);
    }
    kinds.sort();
    kinds.dedup();
    Ok(kinds)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut config = args.source.load()?;
    apply_overrides(&mut config, args.budget, args.reps, args.seed);
    let policies = parse_policies(&args.policy, config.policy)?;

    let mut curves = Vec::with_capacity(policies.len());
    for &kind in &policies {
        let mut run_config = config.clone();
        run_config.policy = kind;
        run_config.validate()?;
        let curve = run_experiment(&run_config).with_context(|| format!("running {kind}"))?;
        if let Some(p) = curve.final_point(kind) {
            println!(
                "{kind}: pcs {:.4} (stderr {:.4}) at budget {} over {} reps",
                p.pcs, p.stderr, p.budget, p.macro_reps
            );
        }
        curves.push(curve);
    }

    let merged = PcsCurve::merge(curves);
    emit_csv(&merged, &args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_ratios(args: RatiosArgs) -> Result<()> {
    let mut config = args.source.load()?;
    apply_overrides(&mut config, args.budget, None, args.seed);
    if let Some(name) = &args.policy {
        config.policy = name.parse::<PolicyKind>().map_err(|e| anyhow!(e))?;
    }
    config.validate()?;

    let outcome = run_replication(&config, 0)?;
    let problem = &outcome.problem;
    let true_ranking = Ranking::from_means(problem.true_mean())?;
    let targets = solve_optimal_ratios(problem.true_mean(), problem.sampling_var(), &true_ranking)
        .context("no optimal ratios exist for this instance")?;

    let state = &outcome.final_state;
    let total = state.total_steps() as f64;
    let weights: Vec<f64> = true_ranking
        .support()
        .iter()
        .map(|&pair| state.count(pair) as f64 / total)
        .collect();
    let empirical = AllocationRatios::on_support(&true_ranking, &weights);

    println!(
        "instance: k={} m={} budget={} policy={} seed={}",
        config.alternatives, config.scenarios, config.total_budget, config.policy, config.master_seed
    );
    println!(
        "true best: alternative {} (worst scenario {})",
        problem.true_best(),
        problem.true_worst_scenario(problem.true_best())
    );
    println!("{:<10}  {:>10}  {:>10}", "pair", "target", "empirical");
    for &pair in &true_ranking.support() {
        println!("{:<10}  {:>10.6}  {:>10.6}", pair.to_string(), targets.get(pair), empirical.get(pair));
    }
    println!("off-support mass: {:.6}", 1.0 - empirical.sum());
    println!(
        "posterior-ranking off-support mass: {:.6}",
        empirical_ratios(state).off_support_mass
    );

    let residuals =
        optimality_residuals(&empirical, problem.true_mean(), problem.sampling_var(), &true_ranking)?;
    println!(
        "optimality residuals: scenario {:.4}, competitor {:.4}, total {:.4} (max {:.4})",
        residuals.scenario_balance,
        residuals.competitor_balance,
        residuals.total_balance,
        residuals.max()
    );
    if outcome.fallbacks > 0 {
        println!("solver fallbacks to equal allocation: {}", outcome.fallbacks);
    }
    Ok(())
}

fn cmd_bound(args: BoundArgs) -> Result<()> {
    let mut config = args.source.load()?;
    config.total_budget = config.warmup_end();
    config.checkpoints = vec![config.warmup_end()];
    config.validate()?;

    let outcome = run_replication(&config, 0)?;
    let state = &outcome.final_state;
    let ranking = compute_ranking(state)?;
    let mut rng = substream(config.master_seed, 0, StreamKind::BoundDraws, 0);
    let estimate = estimate_posterior_pcs_bound(state, &ranking, args.draws, &mut rng);
    let stderr = (estimate * (1.0 - estimate) / args.draws as f64).sqrt();
    println!(
        "state: k={} m={} after warmup of {} per pair (budget {})",
        config.alternatives,
        config.scenarios,
        config.warmup,
        config.total_budget
    );
    println!("top-ranked alternative: {}", ranking.best());
    println!(
        "posterior lower bound on correct selection: {:.6} (stderr {:.6}, {} draws)",
        estimate, stderr, args.draws
    );
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Ratios(args) => cmd_ratios(args),
        Command::Bound(args) => cmd_bound(args),
    }
}

//! Macro-replicated experiments measuring PCS against budget.
//!
//! One replication instantiates a problem (fixed means, or means drawn from
//! the prior), spends `warmup` observations on every pair, then loops
//! Update -> Allocation -> Simulation one observation at a time until the
//! budget is spent, recording at each checkpoint whether the top-ranked
//! alternative is the true worst-case best. An experiment runs many such
//! replications on independent random streams and reports the fraction
//! correct per checkpoint.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Distribution, Normal};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

use crate::baselines::{build_policy, PolicyKind, SampleVarianceTracker};
use crate::grid::Grid;
use crate::problem::{
    compute_ranking, PairIndex, PosteriorState, ProblemError, ProblemSpec, Ranking,
};
use crate::seeding::{substream, StreamKind};
use crate::vfa::PolicyError;

/// Redraw attempts for prior-sampled instances before giving up; ties are a
/// measure-zero event, so hitting this indicates a broken configuration.
const MAX_MEAN_DRAWS: u64 = 64;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {reason}")]
    InvalidConfig { reason: String },
    #[error("drawn means violated the uniqueness assumptions {attempts} times in a row")]
    MeanDrawsExhausted { attempts: u64 },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Where each replication's true means come from.
#[derive(Clone, Debug)]
pub enum MeanSource {
    /// One fixed mean matrix shared by all replications.
    Fixed(Grid),
    /// Fresh means drawn from the prior every replication (requires finite
    /// prior variances).
    DrawnFromPrior,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub alternatives: usize,
    pub scenarios: usize,
    pub total_budget: u64,
    /// Warmup observations per pair.
    pub warmup: u64,
    pub macro_reps: u64,
    pub master_seed: u64,
    pub policy: PolicyKind,
    pub prior_mean: Grid,
    pub prior_var: Grid,
    pub sampling_var: Grid,
    pub mean_source: MeanSource,
    /// Budgets at which selections are recorded; strictly ascending, within
    /// [warmup_end, total_budget].
    pub checkpoints: Vec<u64>,
    /// ROCBA re-solves its target ratios every this many steps.
    pub rocba_resolve_every: u32,
}

/// Built-in experiment presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Exp1,
    Exp2,
    Exp3,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Exp1, Preset::Exp2, Preset::Exp3];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Exp1 => "exp1",
            Preset::Exp2 => "exp2",
            Preset::Exp3 => "exp3",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }
}

impl ExperimentConfig {
    /// The step count at which warmup ends.
    pub fn warmup_end(&self) -> u64 {
        self.warmup * (self.alternatives * self.scenarios) as u64
    }

    /// Checkpoints every `every` steps from warmup end to the budget,
    /// always including both endpoints.
    pub fn checkpoints_every(&self, every: u64) -> Vec<u64> {
        let start = self.warmup_end();
        let mut cps: Vec<u64> =
            (start..=self.total_budget).step_by(every.max(1) as usize).collect();
        if *cps.last().unwrap_or(&0) != self.total_budget {
            cps.push(self.total_budget);
        }
        cps
    }

    pub fn default_checkpoints(&self) -> Vec<u64> {
        self.checkpoints_every(200)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |reason: String| Err(HarnessError::InvalidConfig { reason });
        let (k, m) = (self.alternatives, self.scenarios);
        if k == 0 || m == 0 {
            return fail("alternatives and scenarios must be nonzero".into());
        }
        for (name, grid) in [
            ("prior_mean", &self.prior_mean),
            ("prior_var", &self.prior_var),
            ("sampling_var", &self.sampling_var),
        ] {
            if grid.alternatives() != k || grid.scenarios() != m {
                return fail(format!("{name} must be {k} x {m}"));
            }
        }
        for (pair, v) in self.sampling_var.iter() {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("sampling_var at {pair} must be positive, got {v}"));
            }
        }
        for (pair, v) in self.prior_var.iter() {
            if !(v > 0.0) || v.is_nan() {
                return fail(format!("prior_var at {pair} must be positive or inf, got {v}"));
            }
        }
        match &self.mean_source {
            MeanSource::Fixed(g) => {
                if g.alternatives() != k || g.scenarios() != m {
                    return fail(format!("true_mean must be {k} x {m}"));
                }
            }
            MeanSource::DrawnFromPrior => {
                if self.prior_var.iter().any(|(_, v)| !v.is_finite()) {
                    return fail("drawing means from the prior requires finite prior_var".into());
                }
            }
        }
        if self.warmup < 2 {
            return fail("warmup must be at least 2 (sample variances need two observations)".into());
        }
        if self.warmup_end() > self.total_budget {
            return fail(format!(
                "warmup consumes {} steps but the budget is {}",
                self.warmup_end(),
                self.total_budget
            ));
        }
        if self.macro_reps == 0 {
            return fail("macro_reps must be at least 1".into());
        }
        if self.checkpoints.is_empty() {
            return fail("at least one checkpoint is required".into());
        }
        if !self.checkpoints.windows(2).all(|w| w[0] < w[1]) {
            return fail("checkpoints must be strictly ascending".into());
        }
        let lo = self.warmup_end();
        let hi = self.total_budget;
        if self.checkpoints[0] < lo || *self.checkpoints.last().unwrap() > hi {
            return fail(format!("checkpoints must lie within [{lo}, {hi}]"));
        }
        if self.rocba_resolve_every == 0 {
            return fail("rocba_resolve_every must be at least 1".into());
        }
        Ok(())
    }
}

/// The three built-in experiment setups: 10 alternatives, 5 scenarios,
/// budget 6000 with 40 warmup observations per pair, true means drawn from
/// the prior each replication. They differ in prior and sampling variances:
///
/// * exp1: sampling variance 1, prior variance 0.01 for alternative 0 and
///   0.02 for the rest;
/// * exp2: sampling variance 64, prior variance (3 − 0.1(i + d + 2))²;
/// * exp3: sampling variance 64, prior variance (i + d + 2)².
pub fn preset_config(preset: Preset) -> ExperimentConfig {
    let (k, m) = (10usize, 5usize);
    let prior_var = match preset {
        Preset::Exp1 => Grid::from_fn(k, m, |i, _| if i == 0 { 0.01 } else { 0.02 }),
        Preset::Exp2 => Grid::from_fn(k, m, |i, d| {
            let s = 3.0 - 0.1 * (i + d + 2) as f64;
            s * s
        }),
        Preset::Exp3 => Grid::from_fn(k, m, |i, d| {
            let s = (i + d + 2) as f64;
            s * s
        }),
    };
    let sampling = match preset {
        Preset::Exp1 => 1.0,
        Preset::Exp2 | Preset::Exp3 => 64.0,
    };
    let mut config = ExperimentConfig {
        alternatives: k,
        scenarios: m,
        total_budget: 6000,
        warmup: 40,
        macro_reps: 2000,
        master_seed: 1720,
        policy: PolicyKind::Raoda,
        prior_mean: Grid::filled(k, m, 0.0),
        prior_var,
        sampling_var: Grid::filled(k, m, sampling),
        mean_source: MeanSource::DrawnFromPrior,
        checkpoints: Vec::new(),
        rocba_resolve_every: 1,
    };
    config.checkpoints = config.default_checkpoints();
    config
}

/// One replication's record.
#[derive(Clone, Debug)]
pub struct ReplicationOutcome {
    /// Top-ranked alternative at each checkpoint.
    pub selections: Vec<usize>,
    /// Whether each selection equals the true best.
    pub correct: Vec<bool>,
    pub final_state: PosteriorState,
    /// The instantiated problem (drawn means included).
    pub problem: ProblemSpec,
    /// Rejected mean draws before a valid instance (always 0 for fixed means).
    pub redraws: u64,
    /// Policy fallbacks to equal allocation (ROCBA solver failures).
    pub fallbacks: u64,
}

fn instantiate_problem(
    config: &ExperimentConfig,
    replication: u64,
) -> Result<(ProblemSpec, u64), HarnessError> {
    match &config.mean_source {
        MeanSource::Fixed(true_mean) => {
            let spec = ProblemSpec::new(
                true_mean.clone(),
                config.sampling_var.clone(),
                config.prior_mean.clone(),
                config.prior_var.clone(),
            )?;
            Ok((spec, 0))
        }
        MeanSource::DrawnFromPrior => {
            for attempt in 0..MAX_MEAN_DRAWS {
                let mut rng =
                    substream(config.master_seed, replication, StreamKind::MeanDraws, attempt);
                let (k, m) = (config.alternatives, config.scenarios);
                let mut data = Vec::with_capacity(k * m);
                for pair in PairIndex::all(k, m) {
                    let normal = Normal::new(
                        config.prior_mean[pair],
                        config.prior_var[pair].sqrt(),
                    )
                    .expect("validated prior variance is finite");
                    data.push(normal.sample(&mut rng));
                }
                let means = Grid::from_rows(k, m, data);
                match ProblemSpec::new(
                    means,
                    config.sampling_var.clone(),
                    config.prior_mean.clone(),
                    config.prior_var.clone(),
                ) {
                    Ok(spec) => return Ok((spec, attempt)),
                    Err(
                        ProblemError::TiedWorstScenario { .. } | ProblemError::TiedBest { .. },
                    ) => continue,
                    Err(other) => return Err(other.into()),
                }
            }
            Err(HarnessError::MeanDrawsExhausted { attempts: MAX_MEAN_DRAWS })
        }
    }
}

/// Run one replication: warmup, then single-observation policy steps, with
/// selections recorded at every checkpoint. Deterministic in (config, r).
pub fn run_replication(
    config: &ExperimentConfig,
    replication: u64,
) -> Result<ReplicationOutcome, HarnessError> {
    config.validate()?;
    let (problem, redraws) = instantiate_problem(config, replication)?;
    let mut obs_rng = substream(config.master_seed, replication, StreamKind::Observations, 0);
    let mut state = PosteriorState::new(&problem);
    let mut tracker = SampleVarianceTracker::new(config.alternatives, config.scenarios);

    for pair in PairIndex::all(config.alternatives, config.scenarios) {
        for _ in 0..config.warmup {
            let x = problem.sample_observation(pair, &mut obs_rng)?;
            state.update(pair, x)?;
            tracker.record(pair, x);
        }
    }

    let mut policy = build_policy(config.policy, config.rocba_resolve_every);
    let mut selections = Vec::with_capacity(config.checkpoints.len());
    let mut correct = Vec::with_capacity(config.checkpoints.len());
    let mut next_checkpoint = 0usize;
    let record = |state: &PosteriorState,
                      selections: &mut Vec<usize>,
                      correct: &mut Vec<bool>|
     -> Result<(), HarnessError> {
        let ranking = compute_ranking(state)?;
        selections.push(ranking.best());
        correct.push(ranking.best() == problem.true_best());
        Ok(())
    };

    let mut t = state.total_steps();
    while next_checkpoint < config.checkpoints.len() && config.checkpoints[next_checkpoint] == t {
        record(&state, &mut selections, &mut correct)?;
        next_checkpoint += 1;
    }
    while t < config.total_budget {
        let ranking = compute_ranking(&state)?;
        let pair = policy.allocate(&state, &ranking, &tracker)?;
        let x = problem.sample_observation(pair, &mut obs_rng)?;
        state.update(pair, x)?;
        tracker.record(pair, x);
        t += 1;
        while next_checkpoint < config.checkpoints.len()
            && config.checkpoints[next_checkpoint] == t
        {
            record(&state, &mut selections, &mut correct)?;
            next_checkpoint += 1;
        }
    }

    let fallbacks = policy.fallbacks();
    Ok(ReplicationOutcome { selections, correct, final_state: state, problem, redraws, fallbacks })
}

/// One PCS estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PcsPoint {
    pub budget: u64,
    pub policy: PolicyKind,
    pub pcs: f64,
    pub stderr: f64,
    pub macro_reps: u64,
}

/// PCS estimates ordered by budget, then policy name.
#[derive(Clone, Debug, Default)]
pub struct PcsCurve {
    points: Vec<PcsPoint>,
}

impl PcsCurve {
    pub fn new(mut points: Vec<PcsPoint>) -> Self {
        points.sort_by(|a, b| (a.budget, a.policy).cmp(&(b.budget, b.policy)));
        PcsCurve { points }
    }

    pub fn points(&self) -> &[PcsPoint] {
        &self.points
    }

    pub fn merge(curves: impl IntoIterator<Item = PcsCurve>) -> PcsCurve {
        PcsCurve::new(curves.into_iter().flat_map(|c| c.points).collect())
    }

    /// The largest-budget point for a policy.
    pub fn final_point(&self, policy: PolicyKind) -> Option<&PcsPoint> {
        self.points.iter().rev().find(|p| p.policy == policy)
    }

    /// Smallest checkpoint at which a policy's PCS reaches `threshold`.
    pub fn first_reaching(&self, policy: PolicyKind, threshold: f64) -> Option<u64> {
        self.points
            .iter()
            .find(|p| p.policy == policy && p.pcs >= threshold)
            .map(|p| p.budget)
    }
}

fn curve_from_flags(
    checkpoints: &[u64],
    policy: PolicyKind,
    correct: &[Vec<bool>],
) -> PcsCurve {
    let reps = correct.len() as u64;
    let points = checkpoints
        .iter()
        .enumerate()
        .map(|(ci, &budget)| {
            let hits = correct.iter().filter(|flags| flags[ci]).count() as f64;
            let pcs = hits / reps as f64;
            PcsPoint {
                budget,
                policy,
                pcs,
                stderr: (pcs * (1.0 - pcs) / reps as f64).sqrt(),
                macro_reps: reps,
            }
        })
        .collect();
    PcsCurve::new(points)
}

/// Run all replications of `config` and aggregate the PCS curve.
///
/// Replications are independent (their randomness is derived from
/// (master_seed, replication) alone) and aggregation is ordered by
/// replication index, so parallel and serial execution produce identical
/// curves.
pub fn run_experiment(config: &ExperimentConfig) -> Result<PcsCurve, HarnessError> {
    config.validate()?;
    let reps: Vec<u64> = (0..config.macro_reps).collect();

    #[cfg(feature = "parallel")]
    let outcomes: Result<Vec<ReplicationOutcome>, HarnessError> =
        reps.par_iter().map(|&r| run_replication(config, r)).collect();
    #[cfg(not(feature = "parallel"))]
    let outcomes: Result<Vec<ReplicationOutcome>, HarnessError> =
        reps.iter().map(|&r| run_replication(config, r)).collect();

    let outcomes = outcomes?;
    let flags: Vec<Vec<bool>> = outcomes.into_iter().map(|o| o.correct).collect();
    Ok(curve_from_flags(&config.checkpoints, config.policy, &flags))
}

/// Monte Carlo estimate of the posterior probability that the top-ranked
/// alternative beats every competitor's worst-case pair across all its own
/// scenarios: each involved mean is drawn independently from its Gaussian
/// posterior and the event
/// `min_l mu[best,l] >= max_i mu[i, worst_i]` is averaged.
pub fn estimate_posterior_pcs_bound(
    state: &PosteriorState,
    ranking: &Ranking,
    draws: u64,
    rng: &mut impl Rng,
) -> f64 {
    assert!(draws >= 1, "at least one draw is required");
    let best = ranking.best();
    let dist_of = |pair: PairIndex| {
        debug_assert!(state.post_var(pair).is_finite(), "posterior at {pair} is undefined");
        Normal::new(state.post_mean(pair), state.post_var(pair).sqrt())
            .expect("posterior moments are finite")
    };
    let best_dists: Vec<Normal<f64>> =
        (0..ranking.scenarios()).map(|l| dist_of(PairIndex::new(best, l))).collect();
    let comp_dists: Vec<Normal<f64>> =
        ranking.competitors().map(|i| dist_of(ranking.worst_pair(i))).collect();

    let mut hits = 0u64;
    for _ in 0..draws {
        let mut best_min = f64::INFINITY;
        for d in &best_dists {
            best_min = best_min.min(d.sample(rng));
        }
        let mut comp_max = f64::NEG_INFINITY;
        for d in &comp_dists {
            comp_max = comp_max.max(d.sample(rng));
        }
        if best_min >= comp_max {
            hits += 1;
        }
    }
    hits as f64 / draws as f64
}

fn significant6(x: f64) -> String {
    if x == 0.0 {
        return "0.000000".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (5 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Write a curve as CSV: header `budget,policy,pcs,stderr,reps`, rows by
/// ascending budget then alphabetical policy, reals with 6 significant
/// digits. Byte-deterministic for a given curve.
pub fn write_csv(curve: &PcsCurve, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "budget,policy,pcs,stderr,reps")?;
    for p in curve.points() {
        writeln!(
            out,
            "{},{},{},{},{}",
            p.budget,
            p.policy,
            significant6(p.pcs),
            significant6(p.stderr),
            p.macro_reps
        )?;
    }
    Ok(())
}

pub fn emit_csv(curve: &PcsCurve, path: &Path) -> Result<(), HarnessError> {
    let mut buf = Vec::new();
    write_csv(curve, &mut buf).expect("writing to memory cannot fail");
    std::fs::write(path, buf).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

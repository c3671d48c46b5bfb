//! EA, PTV, and ROCBA allocation rules behind one sequential-policy trait.
//!
//! All three (and RAODA, which lives in [`crate::vfa`]) share the same
//! per-step contract: given the posterior state, the current ranking, and
//! the running sample-variance tracker, return the next pair to simulate.
//! EA equalizes counts; PTV chases variance-proportional targets; ROCBA
//! chases the optimal ratios of [`crate::asymptotics`] recomputed from
//! plug-in posterior means, both via the most-starving rule (sample the
//! pair furthest below its target share).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::asymptotics::{solve_optimal_ratios, AllocationRatios};
use crate::problem::{PairIndex, PosteriorState, Ranking};
use crate::vfa::{raoda_allocate, PolicyError};

/// The four sequential policies, in alphabetical tag order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    Ea,
    Ptv,
    Raoda,
    Rocba,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [PolicyKind::Ea, PolicyKind::Ptv, PolicyKind::Raoda, PolicyKind::Rocba];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Ea => "ea",
            PolicyKind::Ptv => "ptv",
            PolicyKind::Raoda => "raoda",
            PolicyKind::Rocba => "rocba",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
#[error("unknown policy {0:?}; expected raoda, rocba, ea, or ptv")]
pub struct UnknownPolicy(String);

impl FromStr for PolicyKind {
    type Err = UnknownPolicy;
    fn from_str(s: &str) -> Result<Self, UnknownPolicy> {
        match s.to_ascii_lowercase().as_str() {
            "ea" => Ok(PolicyKind::Ea),
            "ptv" => Ok(PolicyKind::Ptv),
            "raoda" => Ok(PolicyKind::Raoda),
            "rocba" => Ok(PolicyKind::Rocba),
            _ => Err(UnknownPolicy(s.to_string())),
        }
    }
}

/// Running per-pair sample variances via Welford's recurrence; maintained
/// from raw observations, independent of the Bayesian posterior.
#[derive(Clone, Debug)]
pub struct SampleVarianceTracker {
    scenarios: usize,
    count: Vec<u64>,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl SampleVarianceTracker {
    pub fn new(alternatives: usize, scenarios: usize) -> Self {
        let n = alternatives * scenarios;
        SampleVarianceTracker {
            scenarios,
            count: vec![0; n],
            mean: vec![0.0; n],
            m2: vec![0.0; n],
        }
    }

    pub fn record(&mut self, pair: PairIndex, observation: f64) {
        let f = pair.flat(self.scenarios);
        self.count[f] += 1;
        let delta = observation - self.mean[f];
        self.mean[f] += delta / self.count[f] as f64;
        self.m2[f] += delta * (observation - self.mean[f]);
    }

    pub fn count(&self, pair: PairIndex) -> u64 {
        self.count[pair.flat(self.scenarios)]
    }

    pub fn sample_mean(&self, pair: PairIndex) -> Option<f64> {
        (self.count(pair) >= 1).then(|| self.mean[pair.flat(self.scenarios)])
    }

    /// Unbiased sample variance; defined from the second observation on.
    pub fn sample_var(&self, pair: PairIndex) -> Option<f64> {
        let f = pair.flat(self.scenarios);
        (self.count[f] >= 2).then(|| self.m2[f] / (self.count[f] - 1) as f64)
    }
}

/// Equal allocation: the pair with the smallest count, lowest pair first.
pub fn ea_allocate(state: &PosteriorState) -> PairIndex {
    let m = state.scenarios();
    let mut arg = 0usize;
    for (f, &c) in state.counts().iter().enumerate() {
        if c < state.counts()[arg] {
            arg = f;
        }
    }
    PairIndex::new(arg / m, arg % m)
}

/// The pair furthest below its target share; ties toward the lowest pair.
///
/// `counts` is row-major over a grid matching `targets`; `total_steps` is
/// its sum. Pairs off the target support have target share 0.
pub fn most_starving(counts: &[u64], total_steps: u64, targets: &AllocationRatios) -> PairIndex {
    let m = targets.alpha().scenarios();
    let total = total_steps as f64;
    let mut arg = PairIndex::new(0, 0);
    let mut best_deficit = f64::NEG_INFINITY;
    for (f, &c) in counts.iter().enumerate() {
        let pair = PairIndex::new(f / m, f % m);
        let deficit = targets.get(pair) - c as f64 / total;
        if deficit > best_deficit {
            best_deficit = deficit;
            arg = pair;
        }
    }
    arg
}

/// Proportional-to-variance: targets are normalized sample variances.
///
/// Requires a defined sample variance (count ≥ 2) for every pair; when all
/// sample variances are zero the rule degenerates to equal allocation.
pub fn ptv_allocate(
    state: &PosteriorState,
    tracker: &SampleVarianceTracker,
) -> Result<PairIndex, PolicyError> {
    let (k, m) = (state.alternatives(), state.scenarios());
    let mut vars = Vec::with_capacity(k * m);
    for pair in PairIndex::all(k, m) {
        let v = tracker
            .sample_var(pair)
            .ok_or(PolicyError::SampleVarianceUndefined { pair })?;
        vars.push(v);
    }
    let total_var: f64 = vars.iter().sum();
    if total_var == 0.0 {
        return Ok(ea_allocate(state));
    }
    let total = state.total_steps() as f64;
    let mut arg = PairIndex::new(0, 0);
    let mut best_deficit = f64::NEG_INFINITY;
    for (f, &c) in state.counts().iter().enumerate() {
        let pair = PairIndex::new(f / m, f % m);
        let deficit = vars[f] / total_var - c as f64 / total;
        if deficit > best_deficit {
            best_deficit = deficit;
            arg = pair;
        }
    }
    Ok(arg)
}

/// One-shot ROCBA step: solve for the optimal ratios at the current plug-in
/// means, then take the most-starving pair. Solver failure (non-convergence
/// or a degenerate instance, e.g. tied plug-in means) falls back to equal
/// allocation for this step.
pub fn rocba_allocate(
    state: &PosteriorState,
    ranking: &Ranking,
) -> Result<PairIndex, PolicyError> {
    if state.alternatives() < 2 {
        return Err(PolicyError::SingleAlternative);
    }
    match solve_optimal_ratios(&state.post_mean_grid(), &state.sampling_var_grid(), ranking) {
        Ok(targets) => Ok(most_starving(state.counts(), state.total_steps(), &targets)),
        Err(_) => Ok(ea_allocate(state)),
    }
}

/// Per-replication sequential policy. Implementations may keep internal
/// caches; a fresh instance is created for every replication.
pub trait AllocationPolicy {
    fn allocate(
        &mut self,
        state: &PosteriorState,
        ranking: &Ranking,
        tracker: &SampleVarianceTracker,
    ) -> Result<PairIndex, PolicyError>;

    /// Number of steps this policy fell back to equal allocation.
    fn fallbacks(&self) -> u64 {
        0
    }
}

struct EaPolicy;

impl AllocationPolicy for EaPolicy {
    fn allocate(
        &mut self,
        state: &PosteriorState,
        _ranking: &Ranking,
        _tracker: &SampleVarianceTracker,
    ) -> Result<PairIndex, PolicyError> {
        Ok(ea_allocate(state))
    }
}

struct PtvPolicy;

impl AllocationPolicy for PtvPolicy {
    fn allocate(
        &mut self,
        state: &PosteriorState,
        _ranking: &Ranking,
        tracker: &SampleVarianceTracker,
    ) -> Result<PairIndex, PolicyError> {
        ptv_allocate(state, tracker)
    }
}

struct RaodaPolicy;

impl AllocationPolicy for RaodaPolicy {
    fn allocate(
        &mut self,
        state: &PosteriorState,
        ranking: &Ranking,
        _tracker: &SampleVarianceTracker,
    ) -> Result<PairIndex, PolicyError> {
        raoda_allocate(state, ranking)
    }
}

/// ROCBA with a target cache re-solved every `resolve_every` steps.
pub struct RocbaPolicy {
    resolve_every: u32,
    since_solve: u32,
    targets: Option<AllocationRatios>,
    fallbacks: u64,
}

impl RocbaPolicy {
    pub fn new(resolve_every: u32) -> Self {
        assert!(resolve_every >= 1, "resolve period must be at least 1");
        RocbaPolicy { resolve_every, since_solve: u32::MAX, targets: None, fallbacks: 0 }
    }
}

impl AllocationPolicy for RocbaPolicy {
    fn allocate(
        &mut self,
        state: &PosteriorState,
        ranking: &Ranking,
        _tracker: &SampleVarianceTracker,
    ) -> Result<PairIndex, PolicyError> {
        if state.alternatives() < 2 {
            return Err(PolicyError::SingleAlternative);
        }
        if self.targets.is_none() || self.since_solve >= self.resolve_every {
            match solve_optimal_ratios(
                &state.post_mean_grid(),
                &state.sampling_var_grid(),
                ranking,
            ) {
                Ok(targets) => {
                    self.targets = Some(targets);
                    self.since_solve = 0;
                }
                Err(_) => {
                    // Keep since_solve saturated so the next step re-solves.
                    self.fallbacks += 1;
                    return Ok(ea_allocate(state));
                }
            }
        }
        self.since_solve += 1;
        let targets = self.targets.as_ref().expect("targets cached above");
        Ok(most_starving(state.counts(), state.total_steps(), targets))
    }

    fn fallbacks(&self) -> u64 {
        self.fallbacks
    }
}

/// Fresh policy instance for one replication.
pub fn build_policy(kind: PolicyKind, rocba_resolve_every: u32) -> Box<dyn AllocationPolicy> {
    match kind {
        PolicyKind::Ea => Box::new(EaPolicy),
        PolicyKind::Ptv => Box::new(PtvPolicy),
        PolicyKind::Raoda => Box::new(RaodaPolicy),
        PolicyKind::Rocba => Box::new(RocbaPolicy::new(rocba_resolve_every)),
    }
}

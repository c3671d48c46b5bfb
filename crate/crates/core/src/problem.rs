//! Problem definition, simulation oracle, and conjugate posterior state.
//!
//! A problem is `k` alternatives by `m` scenarios, each pair (i, d) having an
//! unknown true mean and a known sampling variance. Observations are
//! `N(true_mean, sampling_var)`. Beliefs are independent conjugate Gaussian
//! posteriors per pair: with prior `N(mu0, v0)` and `n` observations summing
//! to `s`,
//!
//! ```text
//! post_var  = 1 / (1/v0 + n/sv)
//! post_mean = post_var * (mu0/v0 + s/sv)
//! ```
//!
//! The uninformative prior is the zero-precision limit (`v0 = +inf`), under
//! which `post_mean = s/n` and `post_var = sv/n`. Posteriors depend on the
//! observations only through (count, sum), so they are independent of the
//! allocation policy that produced them.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::grid::Grid;

/// One (alternative, scenario) cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairIndex {
    pub alternative: usize,
    pub scenario: usize,
}

impl PairIndex {
    pub fn new(alternative: usize, scenario: usize) -> Self {
        PairIndex { alternative, scenario }
    }

    /// All pairs of a k x m grid in lexicographic (row-major) order.
    pub fn all(alternatives: usize, scenarios: usize) -> impl Iterator<Item = PairIndex> {
        (0..alternatives)
            .flat_map(move |i| (0..scenarios).map(move |d| PairIndex::new(i, d)))
    }

    pub(crate) fn flat(self, scenarios: usize) -> usize {
        self.alternative * scenarios + self.scenario
    }
}

impl std::fmt::Display for PairIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.alternative, self.scenario)
    }
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("pair {pair} out of range for {alternatives} alternatives x {scenarios} scenarios")]
    PairOutOfRange { pair: PairIndex, alternatives: usize, scenarios: usize },
    #[error("{what} matrix must be {alternatives} x {scenarios}")]
    ShapeMismatch { what: &'static str, alternatives: usize, scenarios: usize },
    #[error("{what} at {pair} must be positive{or_inf}, got {value}")]
    InvalidVariance { what: &'static str, pair: PairIndex, value: f64, or_inf: &'static str },
    #[error("{what} at {pair} must be finite, got {value}")]
    NonFiniteValue { what: &'static str, pair: PairIndex, value: f64 },
    #[error("observation must be finite, got {value}")]
    NonFiniteObservation { value: f64 },
    #[error("alternative {alternative} has a tied worst-case scenario; unique worst cases are required")]
    TiedWorstScenario { alternative: usize },
    #[error("alternatives {first} and {second} tie for the worst-case best; a unique best is required")]
    TiedBest { first: usize, second: usize },
    #[error("count at {pair} must be at least 1 to reconstruct moments")]
    ZeroCount { pair: PairIndex },
    #[error("posterior mean at {pair} is NaN")]
    NaNPosteriorMean { pair: PairIndex },
}

/// Ground truth plus prior hyper-parameters for one problem instance.
///
/// Construction validates shapes, positivity of variances, and the
/// uniqueness assumptions on the true means (unique worst-case scenario per
/// alternative, unique worst-case best alternative), so a constructed spec
/// always has a well-defined `true_best`.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    true_mean: Grid,
    sampling_var: Grid,
    prior_mean: Grid,
    prior_var: Grid,
    true_worst_scenario: Vec<usize>,
    true_best: usize,
}

impl ProblemSpec {
    pub fn new(
        true_mean: Grid,
        sampling_var: Grid,
        prior_mean: Grid,
        prior_var: Grid,
    ) -> Result<Self, ProblemError> {
        let (k, m) = (true_mean.alternatives(), true_mean.scenarios());
        for (what, g) in [
            ("sampling variance", &sampling_var),
            ("prior mean", &prior_mean),
            ("prior variance", &prior_var),
        ] {
            if !true_mean.same_shape(g) {
                return Err(ProblemError::ShapeMismatch { what, alternatives: k, scenarios: m });
            }
        }
        for (pair, v) in true_mean.iter() {
            if !v.is_finite() {
                return Err(ProblemError::NonFiniteValue { what: "true mean", pair, value: v });
            }
        }
        for (pair, v) in prior_mean.iter() {
            if !v.is_finite() {
                return Err(ProblemError::NonFiniteValue { what: "prior mean", pair, value: v });
            }
        }
        for (pair, v) in sampling_var.iter() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ProblemError::InvalidVariance {
                    what: "sampling variance",
                    pair,
                    value: v,
                    or_inf: " and finite",
                });
            }
        }
        // prior_var = +inf is the uninformative (zero prior precision) sentinel.
        for (pair, v) in prior_var.iter() {
            if !(v > 0.0) || v.is_nan() {
                return Err(ProblemError::InvalidVariance {
                    what: "prior variance",
                    pair,
                    value: v,
                    or_inf: " (or +inf for uninformative)",
                });
            }
        }

        let mut true_worst_scenario = Vec::with_capacity(k);
        for i in 0..k {
            let row = true_mean.row(i);
            let d = unique_argmin(row).ok_or(ProblemError::TiedWorstScenario { alternative: i })?;
            true_worst_scenario.push(d);
        }
        let true_best = worst_case_best(&true_mean)?;

        Ok(ProblemSpec {
            true_mean,
            sampling_var,
            prior_mean,
            prior_var,
            true_worst_scenario,
            true_best,
        })
    }

    /// Spec with zero prior precision everywhere and prior mean 0.
    pub fn uninformative(true_mean: Grid, sampling_var: Grid) -> Result<Self, ProblemError> {
        let (k, m) = (true_mean.alternatives(), true_mean.scenarios());
        let prior_mean = Grid::filled(k, m, 0.0);
        let prior_var = Grid::filled(k, m, f64::INFINITY);
        ProblemSpec::new(true_mean, sampling_var, prior_mean, prior_var)
    }

    pub fn alternatives(&self) -> usize {
        self.true_mean.alternatives()
    }

    pub fn scenarios(&self) -> usize {
        self.true_mean.scenarios()
    }

    pub fn true_mean(&self) -> &Grid {
        &self.true_mean
    }

    pub fn sampling_var(&self) -> &Grid {
        &self.sampling_var
    }

    pub fn prior_mean(&self) -> &Grid {
        &self.prior_mean
    }

    pub fn prior_var(&self) -> &Grid {
        &self.prior_var
    }

    /// The alternative maximizing the worst-case true mean.
    pub fn true_best(&self) -> usize {
        self.true_best
    }

    /// Each alternative's unique worst-case scenario under the true means.
    pub fn true_worst_scenario(&self, alternative: usize) -> usize {
        self.true_worst_scenario[alternative]
    }

    fn check_pair(&self, pair: PairIndex) -> Result<(), ProblemError> {
        if pair.alternative >= self.alternatives() || pair.scenario >= self.scenarios() {
            return Err(ProblemError::PairOutOfRange {
                pair,
                alternatives: self.alternatives(),
                scenarios: self.scenarios(),
            });
        }
        Ok(())
    }

    /// One observation of pair under the true distribution.
    pub fn sample_observation(
        &self,
        pair: PairIndex,
        rng: &mut impl Rng,
    ) -> Result<f64, ProblemError> {
        self.check_pair(pair)?;
        let normal = Normal::new(self.true_mean[pair], self.sampling_var[pair].sqrt())
            .expect("validated variance is positive and finite");
        Ok(normal.sample(rng))
    }
}

/// argmax over alternatives of the row minimum; errors if the max is tied.
pub fn worst_case_best(means: &Grid) -> Result<usize, ProblemError> {
    let k = means.alternatives();
    let worst: Vec<f64> = (0..k)
        .map(|i| means.row(i).iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    let mut best = 0usize;
    for i in 1..k {
        if worst[i] > worst[best] {
            best = i;
        }
    }
    for i in 0..k {
        if i != best && worst[i] == worst[best] {
            return Err(ProblemError::TiedBest { first: best.min(i), second: best.max(i) });
        }
    }
    Ok(best)
}

fn unique_argmin(row: &[f64]) -> Option<usize> {
    let mut arg = 0usize;
    for (d, &v) in row.iter().enumerate().skip(1) {
        if v < row[arg] {
            arg = d;
        }
    }
    let ties = row.iter().filter(|&&v| v == row[arg]).count();
    (ties == 1).then_some(arg)
}

/// Sufficient statistics and posterior moments for every pair.
///
/// Owns copies of the hyper-parameters so updates need no access to the
/// spec. All per-pair vectors are row-major over (alternative, scenario).
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorState {
    alternatives: usize,
    scenarios: usize,
    count: Vec<u64>,
    sum: Vec<f64>,
    post_mean: Vec<f64>,
    post_var: Vec<f64>,
    sampling_var: Vec<f64>,
    prior_mean: Vec<f64>,
    prior_var: Vec<f64>,
    total_steps: u64,
}

impl PosteriorState {
    /// Fresh state: no observations, posterior equal to the prior.
    pub fn new(spec: &ProblemSpec) -> Self {
        let n = spec.alternatives() * spec.scenarios();
        PosteriorState {
            alternatives: spec.alternatives(),
            scenarios: spec.scenarios(),
            count: vec![0; n],
            sum: vec![0.0; n],
            post_mean: spec.prior_mean().data().to_vec(),
            post_var: spec.prior_var().data().to_vec(),
            sampling_var: spec.sampling_var().data().to_vec(),
            prior_mean: spec.prior_mean().data().to_vec(),
            prior_var: spec.prior_var().data().to_vec(),
            total_steps: 0,
        }
    }

    /// State with prescribed posterior moments under an uninformative prior.
    ///
    /// `counts` is row-major with every entry ≥ 1. The implied sufficient
    /// statistics are `sum = post_mean * count` and `sampling_var =
    /// post_var * count`; the given moments are stored as-is, so later
    /// updates recompute them from the implied statistics (equal up to
    /// rounding).
    pub fn from_moments(
        post_mean: &Grid,
        post_var: &Grid,
        counts: &[u64],
    ) -> Result<Self, ProblemError> {
        let (k, m) = (post_mean.alternatives(), post_mean.scenarios());
        if !post_mean.same_shape(post_var) {
            return Err(ProblemError::ShapeMismatch {
                what: "posterior variance",
                alternatives: k,
                scenarios: m,
            });
        }
        if counts.len() != k * m {
            return Err(ProblemError::ShapeMismatch {
                what: "counts",
                alternatives: k,
                scenarios: m,
            });
        }
        for (pair, v) in post_mean.iter() {
            if !v.is_finite() {
                return Err(ProblemError::NonFiniteValue { what: "posterior mean", pair, value: v });
            }
        }
        for (pair, v) in post_var.iter() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ProblemError::InvalidVariance {
                    what: "posterior variance",
                    pair,
                    value: v,
                    or_inf: " and finite",
                });
            }
        }
        let mut state = PosteriorState {
            alternatives: k,
            scenarios: m,
            count: counts.to_vec(),
            sum: vec![0.0; k * m],
            post_mean: post_mean.data().to_vec(),
            post_var: post_var.data().to_vec(),
            sampling_var: vec![0.0; k * m],
            prior_mean: vec![0.0; k * m],
            prior_var: vec![f64::INFINITY; k * m],
            total_steps: 0,
        };
        for pair in PairIndex::all(k, m) {
            let f = pair.flat(m);
            if counts[f] == 0 {
                return Err(ProblemError::ZeroCount { pair });
            }
            let n = counts[f] as f64;
            state.sum[f] = post_mean[pair] * n;
            state.sampling_var[f] = post_var[pair] * n;
            state.total_steps += counts[f];
        }
        Ok(state)
    }

    pub fn alternatives(&self) -> usize {
        self.alternatives
    }

    pub fn scenarios(&self) -> usize {
        self.scenarios
    }

    pub fn total_steps(&self) -> u64 {
        self.total_steps
    }

    fn flat_checked(&self, pair: PairIndex) -> Result<usize, ProblemError> {
        if pair.alternative >= self.alternatives || pair.scenario >= self.scenarios {
            return Err(ProblemError::PairOutOfRange {
                pair,
                alternatives: self.alternatives,
                scenarios: self.scenarios,
            });
        }
        Ok(pair.flat(self.scenarios))
    }

    /// Absorb one observation of pair.
    pub fn update(&mut self, pair: PairIndex, observation: f64) -> Result<(), ProblemError> {
        let f = self.flat_checked(pair)?;
        if !observation.is_finite() {
            return Err(ProblemError::NonFiniteObservation { value: observation });
        }
        self.count[f] += 1;
        self.sum[f] += observation;
        self.total_steps += 1;

        let n = self.count[f] as f64;
        let sv = self.sampling_var[f];
        if self.prior_var[f].is_infinite() {
            self.post_mean[f] = self.sum[f] / n;
            self.post_var[f] = sv / n;
        } else {
            let prior_prec = 1.0 / self.prior_var[f];
            let prec = prior_prec + n / sv;
            self.post_var[f] = 1.0 / prec;
            self.post_mean[f] = (self.prior_mean[f] * prior_prec + self.sum[f] / sv) / prec;
        }
        Ok(())
    }

    pub fn count(&self, pair: PairIndex) -> u64 {
        self.count[pair.flat(self.scenarios)]
    }

    pub fn post_mean(&self, pair: PairIndex) -> f64 {
        self.post_mean[pair.flat(self.scenarios)]
    }

    pub fn post_var(&self, pair: PairIndex) -> f64 {
        self.post_var[pair.flat(self.scenarios)]
    }

    pub fn sampling_var(&self, pair: PairIndex) -> f64 {
        self.sampling_var[pair.flat(self.scenarios)]
    }

    /// Posterior variance after one more observation of pair: the precision
    /// gains exactly one observation's worth, 1/v' = 1/v + 1/sampling_var,
    /// regardless of count or prior.
    pub fn lookahead_var(&self, pair: PairIndex) -> f64 {
        let f = pair.flat(self.scenarios);
        1.0 / (1.0 / self.post_var[f] + 1.0 / self.sampling_var[f])
    }

    pub fn post_mean_grid(&self) -> Grid {
        Grid::from_rows(self.alternatives, self.scenarios, self.post_mean.clone())
    }

    pub fn sampling_var_grid(&self) -> Grid {
        Grid::from_rows(self.alternatives, self.scenarios, self.sampling_var.clone())
    }

    pub fn counts(&self) -> &[u64] {
        &self.count
    }
}

/// Alternatives ordered by descending worst-case posterior mean.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranking {
    scenarios: usize,
    order: Vec<usize>,
    worst_scenario: Vec<usize>,
}

impl Ranking {
    /// Ranking induced by an arbitrary mean matrix. Ties (in a row's argmin
    /// or in the ordering) break toward the lowest index.
    pub fn from_means(means: &Grid) -> Result<Ranking, ProblemError> {
        for (pair, v) in means.iter() {
            if v.is_nan() {
                return Err(ProblemError::NaNPosteriorMean { pair });
            }
        }
        let (k, m) = (means.alternatives(), means.scenarios());
        let mut worst_scenario = Vec::with_capacity(k);
        let mut worst_mean = Vec::with_capacity(k);
        for i in 0..k {
            let row = means.row(i);
            let mut arg = 0usize;
            for (d, &v) in row.iter().enumerate().skip(1) {
                if v < row[arg] {
                    arg = d;
                }
            }
            worst_scenario.push(arg);
            worst_mean.push(row[arg]);
        }
        let mut order: Vec<usize> = (0..k).collect();
        // Stable sort: equal worst-case means keep ascending alternative order.
        order.sort_by(|&a, &b| worst_mean[b].total_cmp(&worst_mean[a]));
        Ok(Ranking { scenarios: m, order, worst_scenario })
    }

    pub fn alternatives(&self) -> usize {
        self.worst_scenario.len()
    }

    pub fn scenarios(&self) -> usize {
        self.scenarios
    }

    /// The top-ranked alternative.
    pub fn best(&self) -> usize {
        self.order[0]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn worst_scenario(&self, alternative: usize) -> usize {
        self.worst_scenario[alternative]
    }

    /// (alternative, its worst-case scenario).
    pub fn worst_pair(&self, alternative: usize) -> PairIndex {
        PairIndex::new(alternative, self.worst_scenario[alternative])
    }

    /// Alternatives other than the best, in ascending index order.
    pub fn competitors(&self) -> impl Iterator<Item = usize> + '_ {
        let best = self.best();
        (0..self.alternatives()).filter(move |&i| i != best)
    }

    /// The pairs that can receive positive asymptotic allocation: the best
    /// alternative at every scenario plus each competitor at its worst-case
    /// scenario. Lexicographically ordered.
    pub fn support(&self) -> Vec<PairIndex> {
        let best = self.best();
        let mut pairs = Vec::with_capacity(self.scenarios + self.alternatives() - 1);
        for i in 0..self.alternatives() {
            if i == best {
                for l in 0..self.scenarios {
                    pairs.push(PairIndex::new(best, l));
                }
            } else {
                pairs.push(self.worst_pair(i));
            }
        }
        pairs
    }
}

/// Ranking under the current posterior means.
pub fn compute_ranking(state: &PosteriorState) -> Result<Ranking, ProblemError> {
    Ranking::from_means(&state.post_mean_grid())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::seeding::{substream, StreamKind};

    fn unit_spec(true_mean: Grid) -> ProblemSpec {
        let (k, m) = (true_mean.alternatives(), true_mean.scenarios());
        ProblemSpec::uninformative(true_mean, Grid::filled(k, m, 1.0)).unwrap()
    }

    #[test]
    fn true_best_enumerates_worst_cases() {
        let spec = unit_spec(Grid::from_rows(2, 2, vec![1.0, 2.0, 0.0, 5.0]));
        assert_eq!(spec.true_best(), 0);
        assert_eq!(spec.true_worst_scenario(0), 0);
        assert_eq!(spec.true_worst_scenario(1), 0);
    }

    #[test]
    fn single_alternative_is_best() {
        let spec = unit_spec(Grid::from_rows(1, 2, vec![4.0, 7.0]));
        assert_eq!(spec.true_best(), 0);
    }

    #[test]
    fn tied_worst_case_max_is_rejected() {
        let err = ProblemSpec::uninformative(
            Grid::from_rows(2, 2, vec![1.0, 1.0, 1.0, 2.0]),
            Grid::filled(2, 2, 1.0),
        )
        .unwrap_err();
        // Row [1,1] already violates the unique-worst-scenario requirement.
        assert!(matches!(err, ProblemError::TiedWorstScenario { alternative: 0 }));

        let err = worst_case_best(&Grid::from_rows(2, 2, vec![1.0, 2.0, 1.0, 3.0])).unwrap_err();
        assert!(matches!(err, ProblemError::TiedBest { first: 0, second: 1 }));
    }

    #[test]
    fn observation_determinism_and_degenerate_variance() {
        let spec = ProblemSpec::uninformative(
            Grid::from_rows(1, 1, vec![5.0]),
            Grid::from_rows(1, 1, vec![1e-12]),
        )
        .unwrap();
        let draw = |seed| {
            let mut rng = substream(seed, 0, StreamKind::Observations, 0);
            spec.sample_observation(PairIndex::new(0, 0), &mut rng).unwrap()
        };
        assert!((draw(9) - 5.0).abs() < 1e-5);
        assert_eq!(draw(9).to_bits(), draw(9).to_bits());
    }

    #[test]
    fn observation_moments_match_configuration() {
        let spec = ProblemSpec::uninformative(
            Grid::from_rows(1, 1, vec![2.0]),
            Grid::from_rows(1, 1, vec![4.0]),
        )
        .unwrap();
        let mut rng = substream(3, 0, StreamKind::Observations, 0);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let x = spec.sample_observation(PairIndex::new(0, 0), &mut rng).unwrap();
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!((mean - 2.0).abs() < 0.02, "sample mean {mean}");
        assert!((var - 4.0).abs() < 0.05, "sample variance {var}");
    }

    #[test]
    fn out_of_range_pair_is_an_error() {
        let spec = unit_spec(Grid::from_rows(2, 2, vec![1.0, 2.0, 0.0, 5.0]));
        let mut rng = substream(0, 0, StreamKind::Observations, 0);
        let err = spec.sample_observation(PairIndex::new(2, 0), &mut rng).unwrap_err();
        assert!(matches!(err, ProblemError::PairOutOfRange { .. }));
    }

    #[test]
    fn fresh_state_equals_prior() {
        let spec = ProblemSpec::new(
            Grid::from_rows(1, 2, vec![0.0, 1.0]),
            Grid::filled(1, 2, 1.0),
            Grid::from_rows(1, 2, vec![7.0, 8.0]),
            Grid::from_rows(1, 2, vec![2.0, 3.0]),
        )
        .unwrap();
        let state = PosteriorState::new(&spec);
        assert_eq!(state.post_mean(PairIndex::new(0, 1)), 8.0);
        assert_eq!(state.post_var(PairIndex::new(0, 0)), 2.0);
        assert_eq!(state.total_steps(), 0);
    }

    #[test]
    fn informative_update_matches_closed_form() {
        let spec = ProblemSpec::new(
            Grid::from_rows(1, 1, vec![0.0]),
            Grid::filled(1, 1, 1.0),
            Grid::filled(1, 1, 0.0),
            Grid::filled(1, 1, 100.0),
        )
        .unwrap();
        let mut state = PosteriorState::new(&spec);
        let p = PairIndex::new(0, 0);
        for _ in 0..4 {
            state.update(p, 2.0).unwrap();
        }
        assert_relative_eq!(state.post_var(p), 1.0 / (0.01 + 4.0), max_relative = 1e-12);
        assert_relative_eq!(state.post_mean(p), 8.0 / 4.01, max_relative = 1e-12);
    }

    #[test]
    fn uninformative_posterior_is_the_sample_mean() {
        let spec = ProblemSpec::uninformative(
            Grid::from_rows(1, 1, vec![0.0]),
            Grid::filled(1, 1, 1.0),
        )
        .unwrap();
        let mut state = PosteriorState::new(&spec);
        let p = PairIndex::new(0, 0);
        state.update(p, 1.0).unwrap();
        state.update(p, 3.0).unwrap();
        assert_eq!(state.post_mean(p), 2.0);
        assert_eq!(state.post_var(p), 0.5);
    }

    #[test]
    fn non_finite_observation_is_rejected() {
        let spec = unit_spec(Grid::from_rows(2, 2, vec![1.0, 2.0, 0.0, 5.0]));
        let mut state = PosteriorState::new(&spec);
        let err = state.update(PairIndex::new(0, 0), f64::NAN).unwrap_err();
        assert!(matches!(err, ProblemError::NonFiniteObservation { .. }));
    }

    #[test]
    fn lookahead_var_adds_one_observation_of_precision() {
        let spec = ProblemSpec::new(
            Grid::from_rows(1, 1, vec![0.0]),
            Grid::filled(1, 1, 2.0),
            Grid::filled(1, 1, 0.0),
            Grid::filled(1, 1, 5.0),
        )
        .unwrap();
        let mut state = PosteriorState::new(&spec);
        let p = PairIndex::new(0, 0);
        // Before any data: 1/v' = 1/5 + 1/2.
        assert_relative_eq!(state.lookahead_var(p), 1.0 / (0.2 + 0.5), max_relative = 1e-12);
        state.update(p, 1.0).unwrap();
        let v = state.post_var(p);
        assert_relative_eq!(
            1.0 / state.lookahead_var(p) - 1.0 / v,
            0.5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn from_moments_round_trips_accessors() {
        let post_mean = Grid::from_rows(2, 1, vec![1.5, -0.5]);
        let post_var = Grid::from_rows(2, 1, vec![0.25, 0.5]);
        let state = PosteriorState::from_moments(&post_mean, &post_var, &[4, 2]).unwrap();
        let a = PairIndex::new(0, 0);
        let b = PairIndex::new(1, 0);
        assert_eq!(state.post_mean(a), 1.5);
        assert_eq!(state.post_var(b), 0.5);
        assert_eq!(state.sampling_var(a), 1.0);
        assert_eq!(state.total_steps(), 6);
        assert!(PosteriorState::from_moments(&post_mean, &post_var, &[4, 0]).is_err());
    }

    #[test]
    fn ranking_orders_by_worst_case_mean() {
        let means = Grid::from_rows(2, 2, vec![3.0, 1.0, 2.0, 0.0]);
        let r = Ranking::from_means(&means).unwrap();
        assert_eq!(r.worst_scenario(0), 1);
        assert_eq!(r.worst_scenario(1), 1);
        assert_eq!(r.order(), &[0, 1]);
        assert_eq!(r.best(), 0);
    }

    #[test]
    fn ranking_ties_break_to_lowest_index() {
        let means = Grid::filled(3, 2, 1.0);
        let r = Ranking::from_means(&means).unwrap();
        assert_eq!(r.order(), &[0, 1, 2]);
        assert!((0..3).all(|i| r.worst_scenario(i) == 0));
    }

    #[test]
    fn ranking_single_alternative() {
        let means = Grid::from_rows(1, 3, vec![9.0, 4.0, 6.0]);
        let r = Ranking::from_means(&means).unwrap();
        assert_eq!(r.order(), &[0]);
        assert_eq!(r.worst_scenario(0), 1);
    }

    #[test]
    fn ranking_rejects_nan() {
        let means = Grid::from_rows(1, 2, vec![1.0, f64::NAN]);
        assert!(Ranking::from_means(&means).is_err());
    }

    #[test]
    fn support_is_lexicographic() {
        let means = Grid::from_rows(3, 2, vec![1.0, 2.0, 5.0, 4.0, 0.0, 3.0]);
        // Worst means: 1.0, 4.0, 0.0 -> best = 1.
        let r = Ranking::from_means(&means).unwrap();
        assert_eq!(
            r.support(),
            vec![
                PairIndex::new(0, 0),
                PairIndex::new(1, 0),
                PairIndex::new(1, 1),
                PairIndex::new(2, 0),
            ]
        );
    }

    #[test]
    fn ranking_of_true_means_selects_true_best() {
        let mut rng = substream(11, 0, StreamKind::MeanDraws, 0);
        for _ in 0..200 {
            let k = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=4);
            let means = Grid::from_fn(k, m, |_, _| rng.gen_range(-5.0..5.0));
            let Ok(spec) = ProblemSpec::uninformative(means.clone(), Grid::filled(k, m, 1.0))
            else {
                continue;
            };
            let r = Ranking::from_means(&means).unwrap();
            assert_eq!(r.best(), spec.true_best());
            for i in 0..k {
                assert_eq!(r.worst_scenario(i), spec.true_worst_scenario(i));
            }
        }
    }
}

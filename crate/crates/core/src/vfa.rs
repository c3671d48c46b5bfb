//! Radius-based value function approximation and the RAODA policy.
//!
//! For the top-ranked alternative b and each competitor i with worst-case
//! scenario d_i, the squared radius
//!
//! ```text
//! R²(l, i) = (post_mean[b,l] - post_mean[i,d_i])² / (post_var[b,l] + post_var[i,d_i])
//! ```
//!
//! measures how decisively pair (b, l) separates from pair (i, d_i). The
//! value of the current information state is the minimum of R² over all
//! m·(k−1) combinations; the policy scores each candidate pair by the value
//! after one hypothetical extra sample there (its posterior variance shrunk
//! one step, means unchanged) and samples the candidate with the largest
//! one-step-lookahead value.
//!
//! Only pairs in the support set, (b, l) for every scenario l plus (i, d_i)
//! for every competitor, appear in any radius term, so only they can raise
//! the lookahead value; the argmax is restricted to that set.

use thiserror::Error;

use crate::grid::Grid;
use crate::problem::{PairIndex, PosteriorState, ProblemError, Ranking};

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("allocation requires at least two alternatives")]
    SingleAlternative,
    #[error("alternative {alternative} is the current best, not a competitor")]
    NotCompetitor { alternative: usize },
    #[error("zero variance sum between pairs {best_pair} and {competitor_pair}")]
    DegenerateRadius { best_pair: PairIndex, competitor_pair: PairIndex },
    #[error("pair {pair} has no observations; plug-in variance undefined")]
    MissingCount { pair: PairIndex },
    #[error("sample variance undefined at {pair} (fewer than 2 observations)")]
    SampleVarianceUndefined { pair: PairIndex },
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// A candidate pair together with its one-step-lookahead value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LookaheadValue {
    pub pair: PairIndex,
    pub value: f64,
}

/// R²(l, i) for scenario l of the current best versus competitor i at its
/// worst-case scenario.
pub fn radius_squared(
    state: &PosteriorState,
    ranking: &Ranking,
    scenario: usize,
    competitor: usize,
) -> Result<f64, PolicyError> {
    if ranking.alternatives() < 2 {
        return Err(PolicyError::SingleAlternative);
    }
    if competitor == ranking.best() {
        return Err(PolicyError::NotCompetitor { alternative: competitor });
    }
    let best_pair = PairIndex::new(ranking.best(), scenario);
    let competitor_pair = ranking.worst_pair(competitor);
    radius_from_moments(
        state.post_mean(best_pair),
        state.post_var(best_pair),
        state.post_mean(competitor_pair),
        state.post_var(competitor_pair),
    )
    .ok_or(PolicyError::DegenerateRadius { best_pair, competitor_pair })
}

fn radius_from_moments(mean1: f64, var1: f64, mean2: f64, var2: f64) -> Option<f64> {
    let gap = mean1 - mean2;
    let denom = var1 + var2;
    if denom == 0.0 {
        return None;
    }
    Some(gap * gap / denom)
}

/// Minimum radius with at most one pair's variance replaced by its one-step
/// update. `shrink = None` gives the current value.
fn min_radius(
    state: &PosteriorState,
    ranking: &Ranking,
    shrink: Option<PairIndex>,
) -> Result<f64, PolicyError> {
    if ranking.alternatives() < 2 {
        return Err(PolicyError::SingleAlternative);
    }
    let best = ranking.best();
    let mut min = f64::INFINITY;
    for l in 0..ranking.scenarios() {
        let best_pair = PairIndex::new(best, l);
        let best_var = match shrink {
            Some(c) if c == best_pair => state.lookahead_var(best_pair),
            _ => state.post_var(best_pair),
        };
        let best_mean = state.post_mean(best_pair);
        for i in ranking.competitors() {
            let competitor_pair = ranking.worst_pair(i);
            let comp_var = match shrink {
                Some(c) if c == competitor_pair => state.lookahead_var(competitor_pair),
                _ => state.post_var(competitor_pair),
            };
            let r = radius_from_moments(
                best_mean,
                best_var,
                state.post_mean(competitor_pair),
                comp_var,
            )
            .ok_or(PolicyError::DegenerateRadius { best_pair, competitor_pair })?;
            if r < min {
                min = r;
            }
        }
    }
    Ok(min)
}

/// Value of the current state: min over all radius terms.
pub fn current_vfa(state: &PosteriorState, ranking: &Ranking) -> Result<f64, PolicyError> {
    min_radius(state, ranking, None)
}

/// Value after one hypothetical extra sample of `candidate`.
///
/// Candidates outside the support set touch no radius term and return the
/// current value unchanged.
pub fn lookahead_value(
    state: &PosteriorState,
    ranking: &Ranking,
    candidate: PairIndex,
) -> Result<LookaheadValue, PolicyError> {
    if candidate.alternative >= state.alternatives() || candidate.scenario >= state.scenarios() {
        return Err(PolicyError::Problem(ProblemError::PairOutOfRange {
            pair: candidate,
            alternatives: state.alternatives(),
            scenarios: state.scenarios(),
        }));
    }
    let value = min_radius(state, ranking, Some(candidate))?;
    Ok(LookaheadValue { pair: candidate, value })
}

/// The RAODA allocation: argmax of the lookahead value over the support
/// set, ties broken toward the lexicographically lowest pair.
pub fn raoda_allocate(
    state: &PosteriorState,
    ranking: &Ranking,
) -> Result<PairIndex, PolicyError> {
    let mut choice: Option<LookaheadValue> = None;
    for pair in ranking.support() {
        let cand = lookahead_value(state, ranking, pair)?;
        // Support is lexicographically ordered, so strict improvement keeps
        // the lowest pair on ties.
        if choice.map_or(true, |c| cand.value > c.value) {
            choice = Some(cand);
        }
    }
    Ok(choice.expect("support is nonempty for k >= 2").pair)
}

/// Lookahead value in the frequentist-limit (plug-in) form: variances are
/// `sampling_var/count`, and the candidate's count is incremented instead of
/// its posterior variance being updated. Counts are row-major; every pair
/// referenced by a radius term must have count ≥ 1.
pub fn plugin_lookahead_value(
    means: &Grid,
    sampling_var: &Grid,
    counts: &[u64],
    ranking: &Ranking,
    candidate: PairIndex,
) -> Result<f64, PolicyError> {
    if ranking.alternatives() < 2 {
        return Err(PolicyError::SingleAlternative);
    }
    let m = means.scenarios();
    let best = ranking.best();
    let plugin_var = |pair: PairIndex| -> Result<f64, PolicyError> {
        let mut n = counts[pair.flat(m)];
        if pair == candidate {
            n += 1;
        }
        if n == 0 {
            return Err(PolicyError::MissingCount { pair });
        }
        Ok(sampling_var[pair] / n as f64)
    };
    let mut min = f64::INFINITY;
    for l in 0..ranking.scenarios() {
        let best_pair = PairIndex::new(best, l);
        let best_var = plugin_var(best_pair)?;
        for i in ranking.competitors() {
            let competitor_pair = ranking.worst_pair(i);
            let r = radius_from_moments(
                means[best_pair],
                best_var,
                means[competitor_pair],
                plugin_var(competitor_pair)?,
            )
            .ok_or(PolicyError::DegenerateRadius { best_pair, competitor_pair })?;
            if r < min {
                min = r;
            }
        }
    }
    Ok(min)
}

//! Optimal static allocation ratios and their balance conditions.
//!
//! With best alternative b (worst-case scenarios d_i for competitors i), the
//! asymptotic rate at which pair (b, l) separates from competitor i is
//! governed by
//!
//! ```text
//! G(l, i) = gap² / (2·(var_b,l/α_b,l + var_i,d_i/α_i,d_i))
//! ```
//!
//! The optimal allocation maximizes the smallest G subject to Σα = 1 and is
//! characterized by three balance conditions:
//!
//! 1. scenario balance: min_i G(l, i) equal across scenarios l,
//! 2. competitor balance: min_l G(l, i) equal across competitors i,
//! 3. total balance: Σ_l α²_b,l/var_b,l = Σ_i α²_i,d_i/var_i,d_i.
//!
//! `solve_optimal_ratios` exploits the substitution u_l = var_b,l/α_b,l,
//! v_i = var_i,d_i/α_i,d_i: for a target level z, G(l, i) ≥ z is exactly
//! u_l + v_i ≤ gap²_{l,i}/(2z), and conditions 1–2 say each row and column
//! of that constraint system is tight. Tight (u, v) for z = 1 come from a
//! monotone min-plus fixed point; shifting (u − τ, v + τ) preserves
//! tightness and sweeps condition 3 monotonically, so τ is a 1-d root-find;
//! scaling by z then meets Σα = 1 in closed form because the whole system
//! is homogeneous in z.

use thiserror::Error;

use crate::grid::Grid;
use crate::problem::{compute_ranking, PairIndex, PosteriorState, Ranking};

/// Iteration budget across min-plus passes and root-find steps.
const ITERATION_CAP: u64 = 100_000;

/// Tolerance the solver must meet on every balance residual.
const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("optimal ratios require at least two alternatives")]
    SingleAlternative,
    #[error("{what} must be positive and finite, got {value}")]
    BadInput { what: &'static str, value: f64 },
    #[error("non-positive gap between best scenario {scenario} and alternative {alternative}; a strict worst-case best is required")]
    NonPositiveGap { scenario: usize, alternative: usize },
    #[error("allocation ratio at {pair} must be positive, got {value}")]
    ZeroShare { pair: PairIndex, value: f64 },
    #[error("solver exceeded {iterations} iterations; best residuals {residuals:?}")]
    NonConvergence { iterations: u64, best: Box<AllocationRatios>, residuals: Residuals },
}

/// Budget shares per pair; zero outside the support set.
#[derive(Clone, Debug, PartialEq)]
pub struct AllocationRatios {
    alpha: Grid,
    best: usize,
    worst_scenario: Vec<usize>,
}

impl AllocationRatios {
    /// Ratios carried by a ranking's support pairs, in the support's
    /// lexicographic order. All other pairs get zero.
    pub fn on_support(ranking: &Ranking, weights: &[f64]) -> Self {
        let support = ranking.support();
        assert_eq!(weights.len(), support.len(), "one weight per support pair");
        let mut alpha = Grid::filled(ranking.alternatives(), ranking.scenarios(), 0.0);
        for (&pair, &w) in support.iter().zip(weights) {
            alpha[pair] = w;
        }
        AllocationRatios {
            alpha,
            best: ranking.best(),
            worst_scenario: (0..ranking.alternatives()).map(|i| ranking.worst_scenario(i)).collect(),
        }
    }

    pub fn get(&self, pair: PairIndex) -> f64 {
        self.alpha[pair]
    }

    pub fn alpha(&self) -> &Grid {
        &self.alpha
    }

    pub fn best(&self) -> usize {
        self.best
    }

    pub fn worst_scenario(&self, alternative: usize) -> usize {
        self.worst_scenario[alternative]
    }

    /// Support pairs in lexicographic order.
    pub fn support(&self) -> Vec<PairIndex> {
        let k = self.alpha.alternatives();
        let m = self.alpha.scenarios();
        let mut pairs = Vec::with_capacity(m + k - 1);
        for i in 0..k {
            if i == self.best {
                for l in 0..m {
                    pairs.push(PairIndex::new(i, l));
                }
            } else {
                pairs.push(PairIndex::new(i, self.worst_scenario[i]));
            }
        }
        pairs
    }

    /// Total mass on the support.
    pub fn sum(&self) -> f64 {
        self.support().iter().map(|&p| self.alpha[p]).sum()
    }
}

/// Empirical ratios plus the budget fraction spent outside the support.
#[derive(Clone, Debug)]
pub struct EmpiricalRatios {
    pub ratios: AllocationRatios,
    pub off_support_mass: f64,
}

/// Separation rate of one (scenario, competitor) term under shares a1, a2.
pub fn g_function(gap: f64, var1: f64, var2: f64, a1: f64, a2: f64) -> Result<f64, SolveError> {
    for (what, value) in [("share a1", a1), ("share a2", a2)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(SolveError::BadInput { what, value });
        }
    }
    for (what, value) in [("variance var1", var1), ("variance var2", var2)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(SolveError::BadInput { what, value });
        }
    }
    Ok(gap * gap / (2.0 * (var1 / a1 + var2 / a2)))
}

/// Residuals of the three balance conditions; all zero at an exact optimum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residuals {
    /// Relative spread of the per-scenario min-G values.
    pub scenario_balance: f64,
    /// Relative spread of the per-competitor min-G values.
    pub competitor_balance: f64,
    /// Relative mismatch of the total-balance identity.
    pub total_balance: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.scenario_balance.max(self.competitor_balance).max(self.total_balance)
    }
}

/// Geometry of one solve: the best row against competitor columns.
struct Terms {
    best: usize,
    scenarios: usize,
    competitor_alt: Vec<usize>,
    comp_worst: Vec<usize>,
    best_var: Vec<f64>,
    comp_var: Vec<f64>,
    /// gap[l * n_comp + c] = best-row mean at l minus competitor c's
    /// worst-case mean; strictly positive.
    gap: Vec<f64>,
}

impl Terms {
    fn build(means: &Grid, vars: &Grid, ranking: &Ranking) -> Result<Terms, SolveError> {
        let k = ranking.alternatives();
        let m = ranking.scenarios();
        if k < 2 {
            return Err(SolveError::SingleAlternative);
        }
        let best = ranking.best();
        let competitor_alt: Vec<usize> = ranking.competitors().collect();
        let comp_worst: Vec<usize> =
            competitor_alt.iter().map(|&i| ranking.worst_scenario(i)).collect();
        let mut best_var = Vec::with_capacity(m);
        for l in 0..m {
            let v = vars[(best, l)];
            if !(v > 0.0 && v.is_finite()) {
                return Err(SolveError::BadInput { what: "variance", value: v });
            }
            best_var.push(v);
        }
        let mut comp_var = Vec::with_capacity(k - 1);
        for &i in &competitor_alt {
            let v = vars[ranking.worst_pair(i)];
            if !(v > 0.0 && v.is_finite()) {
                return Err(SolveError::BadInput { what: "variance", value: v });
            }
            comp_var.push(v);
        }
        let mut gap = Vec::with_capacity(m * (k - 1));
        for l in 0..m {
            for &i in &competitor_alt {
                let g = means[(best, l)] - means[ranking.worst_pair(i)];
                if !(g > 0.0 && g.is_finite()) {
                    return Err(SolveError::NonPositiveGap { scenario: l, alternative: i });
                }
                gap.push(g);
            }
        }
        Ok(Terms { best, scenarios: m, competitor_alt, comp_worst, best_var, comp_var, gap })
    }

    fn gap(&self, l: usize, c: usize) -> f64 {
        self.gap[l * self.competitor_alt.len() + c]
    }
}

/// Residuals of `ratios` against the balance conditions for the given
/// instance. Ratios must be strictly positive on the support.
pub fn optimality_residuals(
    ratios: &AllocationRatios,
    means: &Grid,
    vars: &Grid,
    ranking: &Ranking,
) -> Result<Residuals, SolveError> {
    let terms = Terms::build(means, vars, ranking)?;
    let m = terms.scenarios;
    let nc = terms.competitor_alt.len();

    let mut best_share = Vec::with_capacity(m);
    for l in 0..m {
        let pair = PairIndex::new(terms.best, l);
        let a = ratios.get(pair);
        if !(a > 0.0) {
            return Err(SolveError::ZeroShare { pair, value: a });
        }
        best_share.push(a);
    }
    let mut comp_share = Vec::with_capacity(nc);
    for (c, &i) in terms.competitor_alt.iter().enumerate() {
        let pair = ranking.worst_pair(i);
        let a = ratios.get(pair);
        if !(a > 0.0) {
            return Err(SolveError::ZeroShare { pair, value: a });
        }
        comp_share.push(a);
        let _ = c;
    }

    let mut g = vec![0.0; m * nc];
    for l in 0..m {
        for c in 0..nc {
            g[l * nc + c] = g_function(
                terms.gap(l, c),
                terms.best_var[l],
                terms.comp_var[c],
                best_share[l],
                comp_share[c],
            )?;
        }
    }
    let row_min: Vec<f64> =
        (0..m).map(|l| (0..nc).map(|c| g[l * nc + c]).fold(f64::INFINITY, f64::min)).collect();
    let col_min: Vec<f64> =
        (0..nc).map(|c| (0..m).map(|l| g[l * nc + c]).fold(f64::INFINITY, f64::min)).collect();

    let spread = |vals: &[f64]| -> f64 {
        let mut worst = 0.0f64;
        for a in 0..vals.len() {
            for b in a + 1..vals.len() {
                let mean = 0.5 * (vals[a] + vals[b]);
                let rel = (vals[a] - vals[b]).abs() / mean;
                worst = worst.max(rel);
            }
        }
        worst
    };

    let lhs: f64 = (0..m).map(|l| best_share[l] * best_share[l] / terms.best_var[l]).sum();
    let rhs: f64 = (0..nc).map(|c| comp_share[c] * comp_share[c] / terms.comp_var[c]).sum();

    Ok(Residuals {
        scenario_balance: spread(&row_min),
        competitor_balance: spread(&col_min),
        total_balance: (lhs - rhs).abs() / lhs.max(rhs),
    })
}

/// Solve the balance conditions for the optimal ratios, normalized to sum 1.
pub fn solve_optimal_ratios(
    means: &Grid,
    vars: &Grid,
    ranking: &Ranking,
) -> Result<AllocationRatios, SolveError> {
    let terms = Terms::build(means, vars, ranking)?;
    let m = terms.scenarios;
    let nc = terms.competitor_alt.len();
    let mut iterations: u64 = 0;

    // Constraint bounds at reference level z = 1: u_l + v_c <= cost(l, c).
    let cost = |l: usize, c: usize| {
        let g = terms.gap(l, c);
        0.5 * g * g
    };

    // Min-plus fixed point. From v = 0, v rises monotonically and u stays
    // nonnegative, and both stabilize exactly after finitely many passes
    // because every value is a finite min-plus combination of the costs.
    let mut v = vec![0.0f64; nc];
    let mut u = vec![0.0f64; m];
    loop {
        iterations += 1;
        for l in 0..m {
            u[l] = (0..nc).map(|c| cost(l, c) - v[c]).fold(f64::INFINITY, f64::min);
        }
        let mut moved = false;
        for c in 0..nc {
            let nv = (0..m).map(|l| cost(l, c) - u[l]).fold(f64::INFINITY, f64::min);
            // v is monotone nondecreasing in exact arithmetic; clamping away
            // sub-ulp regressions keeps that true under rounding so the loop
            // must terminate.
            if nv > v[c] {
                v[c] = nv;
                moved = true;
            }
        }
        if !moved {
            break;
        }
        if iterations > ITERATION_CAP {
            let ratios = shares_from_potentials(&terms, &u, &v, 0.0);
            let residuals = optimality_residuals(&ratios, means, vars, ranking)?;
            return Err(SolveError::NonConvergence {
                iterations,
                best: Box::new(ratios),
                residuals,
            });
        }
    }

    // Shift direction: (u - tau, v + tau) keeps every row/column tight.
    // Total balance F(tau) = sum_l var_b,l/(u_l - tau)^2
    //                      - sum_c var_c/(v_c + tau)^2
    // is strictly increasing with F -> -inf at tau_lo and +inf at tau_hi.
    let tau_lo = -v.iter().copied().fold(f64::INFINITY, f64::min);
    let tau_hi = u.iter().copied().fold(f64::INFINITY, f64::min);
    if !(tau_hi > tau_lo) {
        let ratios = shares_from_potentials(&terms, &u, &v, 0.0);
        let residuals = optimality_residuals(&ratios, means, vars, ranking)?;
        return Err(SolveError::NonConvergence { iterations, best: Box::new(ratios), residuals });
    }
    let balance = |tau: f64| -> f64 {
        let lhs: f64 = (0..m).map(|l| terms.best_var[l] / ((u[l] - tau) * (u[l] - tau))).sum();
        let rhs: f64 = (0..nc).map(|c| terms.comp_var[c] / ((v[c] + tau) * (v[c] + tau))).sum();
        lhs - rhs
    };
    let mut lo = tau_lo;
    let mut hi = tau_hi;
    loop {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval exhausted at f64 resolution
        }
        if balance(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if iterations > ITERATION_CAP {
            let ratios = shares_from_potentials(&terms, &u, &v, 0.5 * (lo + hi));
            let residuals = optimality_residuals(&ratios, means, vars, ranking)?;
            return Err(SolveError::NonConvergence {
                iterations,
                best: Box::new(ratios),
                residuals,
            });
        }
    }
    let tau = 0.5 * (lo + hi);

    let ratios = shares_from_potentials(&terms, &u, &v, tau);
    let residuals = optimality_residuals(&ratios, means, vars, ranking)?;
    if residuals.max() >= RESIDUAL_TOL {
        return Err(SolveError::NonConvergence { iterations, best: Box::new(ratios), residuals });
    }
    Ok(ratios)
}

/// Shares from shifted potentials, normalized to sum 1 (the normalization is
/// exactly the scale freedom in z, so it preserves all balance conditions).
fn shares_from_potentials(terms: &Terms, u: &[f64], v: &[f64], tau: f64) -> AllocationRatios {
    let m = terms.scenarios;
    let nc = terms.competitor_alt.len();
    let k = nc + 1;
    let mut weights = vec![0.0f64; m + nc];
    for l in 0..m {
        weights[l] = terms.best_var[l] / (u[l] - tau);
    }
    for c in 0..nc {
        weights[m + c] = terms.comp_var[c] / (v[c] + tau);
    }
    let total: f64 = weights.iter().sum();
    let mut alpha = Grid::filled(k, m, 0.0);
    for l in 0..m {
        alpha[(terms.best, l)] = weights[l] / total;
    }
    let mut worst_scenario = vec![0usize; k];
    for (c, &i) in terms.competitor_alt.iter().enumerate() {
        worst_scenario[i] = terms.comp_worst[c];
        alpha[(i, terms.comp_worst[c])] = weights[m + c] / total;
    }
    AllocationRatios { alpha, best: terms.best, worst_scenario }
}

/// Observed allocation frequencies count/total, restricted to the support of
/// the current posterior ranking; mass off the support is reported
/// separately.
pub fn empirical_ratios(state: &PosteriorState) -> EmpiricalRatios {
    assert!(state.total_steps() >= 1, "empirical ratios need at least one observation");
    let ranking = compute_ranking(state).expect("posterior means are finite");
    let total = state.total_steps() as f64;
    let support = ranking.support();
    let weights: Vec<f64> =
        support.iter().map(|&p| state.count(p) as f64 / total).collect();
    let on_mass: u64 = support.iter().map(|&p| state.count(p)).sum();
    let ratios = AllocationRatios::on_support(&ranking, &weights);
    EmpiricalRatios {
        ratios,
        off_support_mass: (state.total_steps() - on_mass) as f64 / total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ProblemSpec;
    use approx::assert_relative_eq;

    fn ranking_of(means: &Grid) -> Ranking {
        Ranking::from_means(means).unwrap()
    }

    /// Hand-picked irregular 3x2 instance: best = 0, competitors' worst
    /// scenarios both 0.
    fn instance_3x2() -> (Grid, Grid) {
        let means = Grid::from_rows(3, 2, vec![2.0, 1.4, 0.3, 0.9, -0.2, 0.8]);
        let vars = Grid::from_rows(3, 2, vec![0.8, 1.7, 2.5, 0.6, 1.2, 0.9]);
        (means, vars)
    }

    #[test]
    fn g_function_examples() {
        assert_eq!(g_function(0.0, 1.0, 2.0, 0.3, 0.7).unwrap(), 0.0);
        assert_relative_eq!(g_function(1.0, 1.0, 1.0, 1.0, 1.0).unwrap(), 0.25);
        let g1 = g_function(0.7, 1.3, 0.4, 0.2, 0.5).unwrap();
        let g2 = g_function(0.7, 1.3, 0.4, 0.4, 1.0).unwrap();
        assert_relative_eq!(g2, 2.0 * g1, max_relative = 1e-15);
        assert!(matches!(
            g_function(1.0, 1.0, 1.0, 0.0, 1.0),
            Err(SolveError::BadInput { .. })
        ));
    }

    #[test]
    fn g_is_half_the_plugin_radius_at_count_shares() {
        // With shares taken as raw counts, 2G equals the plug-in radius
        // gap^2 / (var1/n1 + var2/n2).
        let cases = [
            (1.5f64, 2.0f64, 0.5f64, 7u64, 3u64),
            (0.2, 64.0, 64.0, 40, 11),
            (3.0, 0.25, 0.5, 1, 9),
        ];
        for (gap, v1, v2, n1, n2) in cases {
            let g = g_function(gap, v1, v2, n1 as f64, n2 as f64).unwrap();
            let plugin_radius = gap * gap / (v1 / n1 as f64 + v2 / n2 as f64);
            assert_relative_eq!(2.0 * g, plugin_radius, max_relative = 1e-15);
        }
    }

    #[test]
    fn closed_form_two_alternatives_one_scenario() {
        // gap 1, variances 4 and 1: best share = sigma1/(sigma1+sigma2) = 2/3.
        let means = Grid::from_rows(2, 1, vec![1.0, 0.0]);
        let vars = Grid::from_rows(2, 1, vec![4.0, 1.0]);
        let ranking = ranking_of(&means);
        let ratios = solve_optimal_ratios(&means, &vars, &ranking).unwrap();
        assert_relative_eq!(ratios.get(PairIndex::new(0, 0)), 2.0 / 3.0, max_relative = 1e-10);
        assert_relative_eq!(ratios.get(PairIndex::new(1, 0)), 1.0 / 3.0, max_relative = 1e-10);
        assert_relative_eq!(ratios.sum(), 1.0, max_relative = 1e-12);

        let residuals = optimality_residuals(&ratios, &means, &vars, &ranking).unwrap();
        // Single scenario and single competitor: both spreads are vacuous.
        assert_eq!(residuals.scenario_balance, 0.0);
        assert_eq!(residuals.competitor_balance, 0.0);
        assert!(residuals.total_balance < 1e-10);
    }

    #[test]
    fn symmetric_instance_gives_equal_ratios() {
        let means = Grid::from_rows(3, 2, vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let vars = Grid::filled(3, 2, 1.0);
        let ranking = ranking_of(&means);
        let ratios = solve_optimal_ratios(&means, &vars, &ranking).unwrap();
        for pair in ratios.support() {
            assert_relative_eq!(ratios.get(pair), 0.25, max_relative = 1e-10);
        }
    }

    #[test]
    fn solver_meets_residual_contract_on_irregular_instance() {
        let (means, vars) = instance_3x2();
        let ranking = ranking_of(&means);
        let ratios = solve_optimal_ratios(&means, &vars, &ranking).unwrap();
        assert_relative_eq!(ratios.sum(), 1.0, max_relative = 1e-12);
        let residuals = optimality_residuals(&ratios, &means, &vars, &ranking).unwrap();
        assert!(residuals.max() < 1e-8, "residuals {residuals:?}");
    }

    #[test]
    fn uniform_ratios_are_far_from_optimal_on_asymmetric_instance() {
        let means = Grid::from_rows(2, 1, vec![1.0, 0.0]);
        let vars = Grid::from_rows(2, 1, vec![4.0, 1.0]);
        let ranking = ranking_of(&means);
        let uniform = AllocationRatios::on_support(&ranking, &[0.5, 0.5]);
        let residuals = optimality_residuals(&uniform, &means, &vars, &ranking).unwrap();
        assert!(residuals.max() > 0.1, "residuals {residuals:?}");
    }

    #[test]
    fn grid_search_cannot_beat_the_solver() {
        let (means, vars) = instance_3x2();
        let ranking = ranking_of(&means);
        let ratios = solve_optimal_ratios(&means, &vars, &ranking).unwrap();
        let support = ranking.support();

        let objective = |weights: &[f64]| -> f64 {
            let r = AllocationRatios::on_support(&ranking, weights);
            let mut min = f64::INFINITY;
            for l in 0..2 {
                for i in ranking.competitors() {
                    let g = g_function(
                        means[(0, l)] - means[ranking.worst_pair(i)],
                        vars[(0, l)],
                        vars[ranking.worst_pair(i)],
                        r.get(PairIndex::new(0, l)),
                        r.get(ranking.worst_pair(i)),
                    )
                    .unwrap();
                    min = min.min(g);
                }
            }
            min
        };

        let solver_weights: Vec<f64> = support.iter().map(|&p| ratios.get(p)).collect();
        let solver_value = objective(&solver_weights);

        // Coarse sweep over the 4-simplex in steps of 1/20.
        let steps = 20u32;
        let mut best_grid = f64::NEG_INFINITY;
        for a in 1..steps {
            for b in 1..steps - a {
                for c in 1..steps - a - b {
                    let d = steps - a - b - c;
                    if d == 0 {
                        continue;
                    }
                    let w: Vec<f64> =
                        [a, b, c, d].iter().map(|&x| x as f64 / steps as f64).collect();
                    best_grid = best_grid.max(objective(&w));
                }
            }
        }
        assert!(
            solver_value >= best_grid - 1e-9,
            "grid point beats solver: {best_grid} > {solver_value}"
        );
    }

    #[test]
    fn solver_is_equivariant_under_competitor_relabeling() {
        let (means, vars) = instance_3x2();
        let ranking = ranking_of(&means);
        let ratios = solve_optimal_ratios(&means, &vars, &ranking).unwrap();

        // Swap alternatives 1 and 2.
        let swap = |g: &Grid| {
            Grid::from_fn(3, 2, |i, d| {
                let src = match i {
                    1 => 2,
                    2 => 1,
                    _ => i,
                };
                g[(src, d)]
            })
        };
        let (means_p, vars_p) = (swap(&means), swap(&vars));
        let ratios_p = solve_optimal_ratios(&means_p, &vars_p, &ranking_of(&means_p)).unwrap();
        for d in 0..2 {
            assert_relative_eq!(
                ratios.get(PairIndex::new(0, d)),
                ratios_p.get(PairIndex::new(0, d)),
                max_relative = 1e-12
            );
        }
        for (a, b) in [(1usize, 2usize), (2, 1)] {
            let wa = ranking_of(&means).worst_pair(a);
            assert_relative_eq!(
                ratios.get(wa),
                ratios_p.get(PairIndex::new(b, wa.scenario)),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn residuals_grow_linearly_under_perturbation() {
        let (means, vars) = instance_3x2();
        let ranking = ranking_of(&means);
        let ratios = solve_optimal_ratios(&means, &vars, &ranking).unwrap();
        let support = ranking.support();
        for eps in [1e-3, 1e-4, 1e-5] {
            let weights: Vec<f64> = support
                .iter()
                .enumerate()
                .map(|(j, &p)| if j == 0 { ratios.get(p) * (1.0 + eps) } else { ratios.get(p) })
                .collect();
            let perturbed = AllocationRatios::on_support(&ranking, &weights);
            let residuals = optimality_residuals(&perturbed, &means, &vars, &ranking).unwrap();
            assert!(
                residuals.max() <= 20.0 * eps + 1e-12,
                "eps {eps}: residuals {residuals:?}"
            );
        }
    }

    #[test]
    fn zero_share_on_support_is_an_error() {
        let means = Grid::from_rows(2, 1, vec![1.0, 0.0]);
        let vars = Grid::filled(2, 1, 1.0);
        let ranking = ranking_of(&means);
        let bad = AllocationRatios::on_support(&ranking, &[1.0, 0.0]);
        assert!(matches!(
            optimality_residuals(&bad, &means, &vars, &ranking),
            Err(SolveError::ZeroShare { .. })
        ));
    }

    #[test]
    fn tied_best_means_fail_as_non_positive_gap() {
        let means = Grid::from_rows(2, 1, vec![1.0, 1.0]);
        let vars = Grid::filled(2, 1, 1.0);
        let ranking = ranking_of(&means);
        assert!(matches!(
            solve_optimal_ratios(&means, &vars, &ranking),
            Err(SolveError::NonPositiveGap { .. })
        ));
    }

    #[test]
    fn empirical_ratios_report_support_shares_and_off_mass() {
        let spec = ProblemSpec::uninformative(
            Grid::from_rows(2, 2, vec![2.0, 3.0, 0.0, 1.0]),
            Grid::filled(2, 2, 1.0),
        )
        .unwrap();
        let mut state = PosteriorState::new(&spec);
        for pair in PairIndex::all(2, 2) {
            // Observation equal to the true mean keeps the ranking aligned.
            state.update(pair, spec.true_mean()[pair]).unwrap();
        }
        let emp = empirical_ratios(&state);
        // Support = (0,0), (0,1), (1,0); pair (1,1) holds the off mass.
        for pair in emp.ratios.support() {
            assert_relative_eq!(emp.ratios.get(pair), 0.25);
        }
        assert_relative_eq!(emp.off_support_mass, 0.25);

        let mut concentrated = PosteriorState::new(&spec);
        for _ in 0..10 {
            concentrated.update(PairIndex::new(0, 0), 5.0).unwrap();
        }
        let emp = empirical_ratios(&concentrated);
        assert_eq!(emp.ratios.get(PairIndex::new(0, 0)), 1.0);
        assert_eq!(emp.off_support_mass, 0.0);
    }
}

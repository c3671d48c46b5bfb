//! Dense `alternatives x scenarios` matrices of `f64`.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::problem::PairIndex;

/// Row-major matrix keyed by (alternative, scenario).
///
/// Every per-pair quantity in this crate (means, variances, counts converted
/// to ratios) lives on such a grid, so the type is deliberately minimal:
/// construction, shape, and indexing.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    alternatives: usize,
    scenarios: usize,
    data: Vec<f64>,
}

impl Grid {
    /// Grid with every entry set to `fill`. Both dimensions must be nonzero.
    pub fn filled(alternatives: usize, scenarios: usize, fill: f64) -> Self {
        assert!(alternatives > 0 && scenarios > 0, "grid dimensions must be nonzero");
        Grid { alternatives, scenarios, data: vec![fill; alternatives * scenarios] }
    }

    /// Grid from row-major data, one row per alternative.
    ///
    /// Panics if `data.len() != alternatives * scenarios`.
    pub fn from_rows(alternatives: usize, scenarios: usize, data: Vec<f64>) -> Self {
        assert!(alternatives > 0 && scenarios > 0, "grid dimensions must be nonzero");
        assert_eq!(data.len(), alternatives * scenarios, "grid data length mismatch");
        Grid { alternatives, scenarios, data }
    }

    /// Grid whose entry at (i, d) is `f(i, d)`.
    pub fn from_fn(alternatives: usize, scenarios: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(alternatives * scenarios);
        for i in 0..alternatives {
            for d in 0..scenarios {
                data.push(f(i, d));
            }
        }
        Grid::from_rows(alternatives, scenarios, data)
    }

    pub fn alternatives(&self) -> usize {
        self.alternatives
    }

    pub fn scenarios(&self) -> usize {
        self.scenarios
    }

    pub fn row(&self, alternative: usize) -> &[f64] {
        let start = alternative * self.scenarios;
        &self.data[start..start + self.scenarios]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Pairs in row-major order together with their values.
    pub fn iter(&self) -> impl Iterator<Item = (PairIndex, f64)> + '_ {
        let m = self.scenarios;
        self.data
            .iter()
            .enumerate()
            .map(move |(flat, &v)| (PairIndex { alternative: flat / m, scenario: flat % m }, v))
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.alternatives == other.alternatives && self.scenarios == other.scenarios
    }
}

impl Index<(usize, usize)> for Grid {
    type Output = f64;
    fn index(&self, (alternative, scenario): (usize, usize)) -> &f64 {
        debug_assert!(alternative < self.alternatives && scenario < self.scenarios);
        &self.data[alternative * self.scenarios + scenario]
    }
}

impl IndexMut<(usize, usize)> for Grid {
    fn index_mut(&mut self, (alternative, scenario): (usize, usize)) -> &mut f64 {
        debug_assert!(alternative < self.alternatives && scenario < self.scenarios);
        &mut self.data[alternative * self.scenarios + scenario]
    }
}

impl Index<PairIndex> for Grid {
    type Output = f64;
    fn index(&self, pair: PairIndex) -> &f64 {
        &self[(pair.alternative, pair.scenario)]
    }
}

impl IndexMut<PairIndex> for Grid {
    fn index_mut(&mut self, pair: PairIndex) -> &mut f64 {
        &mut self[(pair.alternative, pair.scenario)]
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.alternatives {
            for d in 0..self.scenarios {
                if d > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:.6}", self[(i, d)])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

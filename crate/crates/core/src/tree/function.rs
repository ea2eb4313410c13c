use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonnegative excursion sampled on a grid, read as piecewise linear
/// between samples and zero after the last one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFunction", into = "RawFunction")]
pub struct SampledFunction {
    grid: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunction {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawFunction> for SampledFunction {
    type Error = Error;

    fn try_from(raw: RawFunction) -> Result<Self> {
        SampledFunction::new(raw.grid, raw.values)
    }
}

impl From<SampledFunction> for RawFunction {
    fn from(f: SampledFunction) -> Self {
        RawFunction {
            grid: f.grid,
            values: f.values,
        }
    }
}

impl SampledFunction {
    /// Checks: equal lengths, a strictly increasing grid from 0, finite
    /// nonnegative values, and zero at both ends.
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidFunction(msg));
        if grid.is_empty() {
            return bad("empty grid".into());
        }
        if grid.len() != values.len() {
            return bad(format!("{} grid points but {} values", grid.len(), values.len()));
        }
        if grid[0] != 0.0 {
            return bad(format!("grid starts at {} instead of 0", grid[0]));
        }
        if let Some(k) = grid.windows(2).position(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return bad(format!("grid not strictly increasing at index {}", k + 1));
        }
        if let Some(k) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad(format!("value at index {k} is {}", values[k]));
        }
        if values[0] != 0.0 {
            return bad("f(0) must be 0".into());
        }
        if *values.last().unwrap() != 0.0 {
            return bad("last value must be 0".into());
        }
        Ok(SampledFunction { grid, values })
    }

    /// Uniform grid `0, h, 2h, ...` with the given values.
    pub fn uniform(step: f64, values: Vec<f64>) -> Result<Self> {
        let grid = (0..values.len()).map(|i| i as f64 * step).collect();
        SampledFunction::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Linear interpolation; zero beyond the last grid time.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= *self.grid.last().unwrap() {
            return 0.0;
        }
        let k = self.grid.partition_point(|&g| g <= t) - 1;
        let (t0, t1) = (self.grid[k], self.grid[k + 1]);
        let (v0, v1) = (self.values[k], self.values[k + 1]);
        if t == t0 {
            return v0;
        }
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// The same function sampled on another grid (which must start at 0 and
    /// increase strictly).
    pub fn resample(&self, grid: &[f64]) -> Result<SampledFunction> {
        let mut values: Vec<f64> = grid.iter().map(|&t| self.eval(t)).collect();
        if let Some(v) = values.last_mut() {
            // Extending the grid past the support keeps f zero; a coarser
            // end would not be a valid excursion sample.
            if *v != 0.0 {
                return Err(Error::InvalidFunction(
                    "resampling grid ends inside the support".into(),
                ));
            }
            *v = 0.0;
        }
        SampledFunction::new(grid.to_vec(), values)
    }

    /// Largest slope magnitude between consecutive samples.
    pub fn max_slope(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(g, v)| (v[1] - v[0]).abs() / (g[1] - g[0]))
            .fold(0.0, f64::max)
    }

    pub fn max_step(&self) -> f64 {
        self.grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the last positive sample, if any.
    pub(crate) fn last_positive(&self) -> Option<usize> {
        self.values.iter().rposition(|&v| v > 0.0)
    }

    /// Index of the grid point at `sigma`: the one after the last positive
    /// sample, or 0.
    pub(crate) fn sigma_index(&self) -> usize {
        self.last_positive().map_or(0, |k| k + 1)
    }
}

/// `sup{t : f(t) > 0}` at grid resolution: the grid time where the
/// piecewise-linear function returns to zero after its last positive
/// sample; 0 for `f ≡ 0`.
pub fn sigma(f: &SampledFunction) -> f64 {
    f.grid[f.sigma_index()]
}

/// Sorted union of two grids.
pub fn merge_grids(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = a.iter().chain(b).copied().collect();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Sparse table answering range-minimum queries over sampled values in
/// O(1) after O(n log n) preprocessing.
#[derive(Debug, Clone)]
pub struct SparseTable {
    levels: Vec<Vec<f64>>,
}

impl SparseTable {
    pub fn new(values: &[f64]) -> Self {
        let mut levels = vec![values.to_vec()];
        let mut width = 1;
        while 2 * width <= values.len() {
            let prev = levels.last().unwrap();
            let next = (0..=values.len() - 2 * width)
                .map(|i| prev[i].min(prev[i + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        SparseTable { levels }
    }

    /// Minimum over the inclusive index range `[lo, hi]`.
    pub fn min(&self, lo: usize, hi: usize) -> f64 {
        debug_assert!(lo <= hi);
        let k = (usize::BITS - 1 - (hi - lo + 1).leading_zeros()) as usize;
        self.levels[k][lo].min(self.levels[k][hi + 1 - (1 << k)])
    }
}

/// A sampled function with its range-minimum table.
#[derive(Debug, Clone)]
pub struct TreeMetric<'a> {
    f: &'a SampledFunction,
    rmq: SparseTable,
}

impl<'a> TreeMetric<'a> {
    pub fn new(f: &'a SampledFunction) -> Self {
        TreeMetric {
            f,
            rmq: SparseTable::new(&f.values),
        }
    }

    /// `d^f(s, t) = f(s) + f(t) − 2 min_{[s∧t, s∨t]} f` on grid indices.
    pub fn distance(&self, s: usize, t: usize) -> Result<f64> {
        let len = self.f.len();
        for index in [s, t] {
            if index >= len {
                return Err(Error::IndexOutOfRange { index, len });
            }
        }
        let v = &self.f.values;
        Ok(v[s] + v[t] - 2.0 * self.rmq.min(s.min(t), s.max(t)))
    }
}

/// One-shot [`TreeMetric::distance`].
pub fn tree_distance(f: &SampledFunction, s: usize, t: usize) -> Result<f64> {
    TreeMetric::new(f).distance(s, t)
}

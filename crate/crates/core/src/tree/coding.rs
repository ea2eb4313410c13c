use serde::Serialize;

use crate::error::{Error, Result};
use crate::ghp::Correspondence;
use crate::space::Space;
use crate::tree::function::{SampledFunction, SparseTable};

/// Relative tolerance below which two grid times are identified.
pub const QUOTIENT_TOL: f64 = 1e-12;

/// The measured rooted tree coded by a sampled excursion.
#[derive(Debug, Clone, Serialize)]
pub struct CodedTree {
    pub space: Space,
    /// Grid index of the representative (smallest time) of each point.
    pub representatives: Vec<usize>,
    pub representative_times: Vec<f64>,
    /// Point of the tree for every grid index; indices at or beyond σ map
    /// to the root.
    pub projection: Vec<usize>,
    #[serde(skip)]
    function: SampledFunction,
}

impl CodedTree {
    pub fn function(&self) -> &SampledFunction {
        &self.function
    }

    pub fn grid(&self) -> &[f64] {
        self.function.grid()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    /// Keeps the smaller index as the class root.
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Builds `T^f` with the default quotient tolerance.
pub fn code_tree(f: &SampledFunction) -> Result<CodedTree> {
    code_tree_with(f, QUOTIENT_TOL)
}

/// Builds `T^f`, identifying grid times whose `d^f` is at most
/// `rel_tol · max f`. Near-ties are merged transitively.
pub fn code_tree_with(f: &SampledFunction, rel_tol: f64) -> Result<CodedTree> {
    if !(rel_tol >= 0.0 && rel_tol.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "quotient tolerance",
            value: rel_tol,
        });
    }
    let v = f.values();
    let grid = f.grid();
    let s = f.sigma_index();
    let last = f.last_positive();
    let tol = rel_tol * f.max_value();
    let rmq = SparseTable::new(v);
    let d = |i: usize, j: usize| v[i] + v[j] - 2.0 * rmq.min(i.min(j), i.max(j));

    let mut uf = UnionFind((0..=s).collect());
    for i in 0..=s {
        for j in i + 1..=s {
            if d(i, j) <= tol {
                uf.union(i, j);
            }
        }
    }

    let mut point_of = vec![usize::MAX; s + 1];
    let mut representatives = Vec::new();
    for i in 0..=s {
        let r = uf.find(i);
        if r == i {
            point_of[i] = representatives.len();
            representatives.push(i);
        }
    }
    let mut masses = vec![0.0; representatives.len()];
    for i in 0..=s {
        point_of[i] = point_of[uf.find(i)];
        if Some(i) < last {
            masses[point_of[i]] += grid[i + 1] - grid[i];
        }
    }

    let n = representatives.len();
    let mut dist = vec![0.0; n * n];
    for a in 0..n {
        for b in a + 1..n {
            let x = d(representatives[a], representatives[b]);
            dist[a * n + b] = x;
            dist[b * n + a] = x;
        }
    }
    let labels = representatives.iter().map(|i| format!("t{i}")).collect();
    let space = Space::new(
        labels,
        dist.chunks(n).map(<[f64]>::to_vec).collect(),
        0,
        masses,
    )?;

    let root = point_of[0];
    let projection = (0..f.len())
        .map(|i| if i <= s { point_of[i] } else { root })
        .collect();
    Ok(CodedTree {
        space,
        representative_times: representatives.iter().map(|&i| grid[i]).collect(),
        representatives,
        projection,
        function: f.clone(),
    })
}

/// Pairs `p^f(t)` with `p^g(t)` for every grid time. Both trees must be
/// coded on the same grid; use [`crate::tree::merge_grids`] and
/// [`SampledFunction::resample`] first otherwise.
pub fn time_correspondence(tf: &CodedTree, tg: &CodedTree) -> Result<Correspondence> {
    if tf.grid() != tg.grid() {
        return Err(Error::GridMismatch);
    }
    Correspondence::new(
        &tf.space,
        &tg.space,
        tf.projection.iter().copied().zip(tg.projection.iter().copied()),
    )
}

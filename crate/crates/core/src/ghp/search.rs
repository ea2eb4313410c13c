//! Upper bounds on the compact GHP distance by searching correspondences.
//!
//! Every correspondence `R` yields a gluing (see
//! [`cross_from_correspondence`](crate::ghp::cross_from_correspondence))
//! whose objective bounds the distance from above. Its objective is at least
//! `dis(R)`: the root pair sits at cross-distance `dis/2` and every cross
//! entry is at least `dis/2`, so the Hausdorff term is too. Both searches
//! prune on that.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ghp::correspondence::Correspondence;
use crate::ghp::cross::{cross_data, cross_hausdorff, CrossMetric};
use crate::ghp::gh;
use crate::prokhorov::Bipartite;
use crate::space::Space;

/// Search settings for [`ghp_upper`](crate::ghp::ghp_upper) and everything
/// built on it.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Seed of the local search; required whenever exhaustive search is over
    /// budget.
    pub seed: Option<u64>,
    /// Largest number of correspondences enumerated exhaustively, for both
    /// the upper-bound search and the Gromov-Hausdorff lower bound.
    pub exhaustive_budget: u64,
    pub restarts: usize,
    pub iterations: usize,
    /// A restart ends early after this many moves without strict
    /// improvement.
    pub stagnation: usize,
    /// Certification tolerance, relative to
    /// `max(diameters, total masses, 1)`.
    pub certify_tol: f64,
}

impl SearchConfig {
    pub fn new(seed: u64) -> Self {
        SearchConfig {
            seed: Some(seed),
            ..SearchConfig::unseeded()
        }
    }

    /// Defaults without a seed: fine for pairs small enough to enumerate.
    pub fn unseeded() -> Self {
        SearchConfig {
            seed: None,
            exhaustive_budget: gh::DEFAULT_BUDGET,
            restarts: 64,
            iterations: 2000,
            stagnation: 250,
            certify_tol: 1e-6,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.exhaustive_budget = budget;
        self
    }

    pub fn with_restarts(mut self, restarts: usize, iterations: usize) -> Self {
        self.restarts = restarts;
        self.iterations = iterations;
        self
    }
}

/// Best correspondence found and its objective.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperBound {
    pub value: f64,
    pub correspondence: Correspondence,
    pub cross: CrossMetric,
    /// True when every root-preserving union of two maps was examined.
    pub exhaustive: bool,
    pub evaluations: u64,
}

/// Number of root-preserving map pairs: `|Y|^(|X|-1) · |X|^(|Y|-1)`.
pub fn rooted_mapping_pairs(nx: usize, ny: usize) -> f64 {
    (ny as f64).powi(nx as i32 - 1) * (nx as f64).powi(ny as i32 - 1)
}

struct Evaluator<'a> {
    x: &'a Space,
    y: &'a Space,
    evaluations: u64,
}

impl Evaluator<'_> {
    /// Objective of a sorted, valid pair list if it is below `cutoff`
    /// (`<=` when `inclusive`); `None` once it provably is not.
    fn objective(&mut self, pairs: &[(usize, usize)], dis: f64, cutoff: f64, inclusive: bool) -> Option<f64> {
        let beats = |v: f64| if inclusive { v <= cutoff } else { v < cutoff };
        if !beats(dis) {
            return None;
        }
        self.evaluations += 1;
        let (x, y) = (self.x, self.y);
        let data = cross_data(x, y, pairs, dis);
        let partial = data[x.root() * y.len() + y.root()] + cross_hausdorff(&data, x.len(), y.len());
        if !beats(partial + (x.total_mass() - y.total_mass()).abs()) {
            return None;
        }
        let bip = Bipartite::on_cross(&data, y.len(), x.masses(), y.masses());
        // Infeasible at the remaining slack means d_P is at least that slack.
        if !inclusive && cutoff.is_finite() && !bip.feasibility(cutoff - partial).feasible {
            return None;
        }
        let p = bip.solve().value;
        let total = partial + p;
        beats(total).then_some(total)
    }
}

fn normalize(mut pairs: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

fn finish(x: &Space, y: &Space, pairs: Vec<(usize, usize)>, value: f64, exhaustive: bool, evaluations: u64) -> UpperBound {
    let correspondence = Correspondence::from_valid(x, y, pairs);
    let cross = CrossMetric::unchecked(
        x,
        y,
        cross_data(x, y, correspondence.pairs(), correspondence.distortion()),
    );
    UpperBound {
        value,
        correspondence,
        cross,
        exhaustive,
        evaluations,
    }
}

/// Exhaustive branch and bound over root-preserving unions of two maps.
///
/// The objective of `R` is `dis(R) + d_P` (the root and Hausdorff terms are
/// both `dis/2`), and `d_P` is at least the mass gap, so a partial
/// assignment is cut once its distortion plus the gap reaches the best
/// value. The search starts from the best of `starts`.
pub(crate) fn exhaustive(x: &Space, y: &Space, starts: &[Vec<(usize, usize)>]) -> UpperBound {
    let (nx, ny) = (x.len(), y.len());
    let slots: Vec<(bool, usize)> = (0..nx)
        .filter(|&i| i != x.root())
        .map(|i| (true, i))
        .chain((0..ny).filter(|&j| j != y.root()).map(|j| (false, j)))
        .collect();
    let mut eval = Evaluator { x, y, evaluations: 0 };
    let mut best = f64::INFINITY;
    let mut best_pairs = Vec::new();
    for start in starts {
        let dis = crate::ghp::correspondence::distortion(x, y, start);
        if let Some(v) = eval.objective(start, dis, best, false) {
            best = v;
            best_pairs = start.clone();
        }
    }
    let mut state = Exhaustive {
        eval,
        slots,
        gap: (x.total_mass() - y.total_mass()).abs(),
        pairs: vec![(x.root(), y.root())],
        best,
        best_pairs,
    };
    state.descend(0, 0.0);
    let Exhaustive {
        eval,
        best,
        best_pairs,
        ..
    } = state;
    finish(x, y, best_pairs, best, true, eval.evaluations)
}

struct Exhaustive<'a> {
    eval: Evaluator<'a>,
    slots: Vec<(bool, usize)>,
    gap: f64,
    pairs: Vec<(usize, usize)>,
    best: f64,
    best_pairs: Vec<(usize, usize)>,
}

impl Exhaustive<'_> {
    fn descend(&mut self, slot: usize, dis: f64) {
        if slot == self.slots.len() {
            let pairs = normalize(self.pairs.clone());
            if let Some(v) = self.eval.objective(&pairs, dis, self.best, false) {
                self.best = v;
                self.best_pairs = pairs;
            }
            return;
        }
        let (from_x, k) = self.slots[slot];
        let choices = if from_x { self.eval.y.len() } else { self.eval.x.len() };
        let mut options: Vec<(f64, usize, usize)> = (0..choices)
            .map(|choice| {
                let (i, j) = if from_x { (k, choice) } else { (choice, k) };
                let (rx, ry) = (self.eval.x.row(i), self.eval.y.row(j));
                let d = self
                    .pairs
                    .iter()
                    .fold(dis, |d, &(i2, j2)| d.max((rx[i2] - ry[j2]).abs()));
                (d, i, j)
            })
            .collect();
        options.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (d, i, j) in options {
            if d + self.gap >= self.best {
                break;
            }
            self.pairs.push((i, j));
            self.descend(slot + 1, d);
            self.pairs.pop();
        }
    }
}

/// Correspondences worth trying first: everything paired with the roots,
/// matching by root distance, and the index identity when sizes agree.
pub(crate) fn default_seeds(x: &Space, y: &Space) -> Vec<Vec<(usize, usize)>> {
    let (nx, ny) = (x.len(), y.len());
    let (rx, ry) = (x.root(), y.root());
    let mut seeds = Vec::new();
    seeds.push(normalize(
        (0..nx).map(|i| (i, ry)).chain((0..ny).map(|j| (rx, j))).collect(),
    ));
    let closest = |target: f64, len: usize, dist: &dyn Fn(usize) -> f64| {
        (0..len)
            .map(|k| ((dist(k) - target).abs(), k))
            .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
            .1
    };
    let mut radial: Vec<(usize, usize)> = (0..nx)
        .map(|i| (i, closest(x.root_distance(i), ny, &|j| y.root_distance(j))))
        .collect();
    radial.extend((0..ny).map(|j| (closest(y.root_distance(j), nx, &|i| x.root_distance(i)), j)));
    radial.push((rx, ry));
    seeds.push(normalize(radial));
    if nx == ny && rx == ry {
        seeds.push((0..nx).map(|i| (i, i)).collect());
    }
    seeds
}

/// Relation on `X × Y` as a dense boolean matrix with coverage counts.
#[derive(Clone)]
struct Relation {
    ny: usize,
    cells: Vec<bool>,
    row_count: Vec<usize>,
    col_count: Vec<usize>,
}

impl Relation {
    fn new(nx: usize, ny: usize, pairs: &[(usize, usize)]) -> Self {
        let mut r = Relation {
            ny,
            cells: vec![false; nx * ny],
            row_count: vec![0; nx],
            col_count: vec![0; ny],
        };
        for &(i, j) in pairs {
            r.set(i, j, true);
        }
        r
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.ny + j]
    }

    fn set(&mut self, i: usize, j: usize, on: bool) {
        let cell = &mut self.cells[i * self.ny + j];
        if *cell == on {
            return;
        }
        *cell = on;
        if on {
            self.row_count[i] += 1;
            self.col_count[j] += 1;
        } else {
            self.row_count[i] -= 1;
            self.col_count[j] -= 1;
        }
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.cells.len())
            .filter(|&c| self.cells[c])
            .map(|c| (c / self.ny, c % self.ny))
            .collect()
    }
}

/// Multi-restart local search over relations. Moves: move one end of a
/// pair, add a pair, or drop a pair, always keeping coverage and the root
/// pair. Only non-worsening moves are accepted.
pub(crate) fn local_search(
    x: &Space,
    y: &Space,
    cfg: &SearchConfig,
    seed: u64,
    extra_seeds: &[Vec<(usize, usize)>],
    target: f64,
) -> UpperBound {
    let (nx, ny) = (x.len(), y.len());
    let root = (x.root(), y.root());
    let mut eval = Evaluator { x, y, evaluations: 0 };
    let mut starts: Vec<Vec<(usize, usize)>> = extra_seeds.to_vec();
    starts.extend(default_seeds(x, y));

    let mut best: Option<(f64, Vec<(usize, usize)>)> = None;
    let restarts = cfg.restarts.max(starts.len());
    for restart in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart as u64);
        let start = match starts.get(restart) {
            Some(s) => s.clone(),
            None => {
                let mut p = vec![root];
                for i in 0..nx {
                    if i != root.0 {
                        p.push((i, rng.gen_range(0..ny)));
                    }
                }
                for j in 0..ny {
                    if j != root.1 {
                        p.push((rng.gen_range(0..nx), j));
                    }
                }
                normalize(p)
            }
        };
        let mut rel = Relation::new(nx, ny, &start);
        let mut pairs = rel.pairs();
        let dis = crate::ghp::correspondence::distortion(x, y, &pairs);
        let mut current = eval
            .objective(&pairs, dis, f64::INFINITY, true)
            .expect("finite objective");
        let mut idle = 0;
        for _ in 0..cfg.iterations {
            if idle >= cfg.stagnation || current <= target {
                break;
            }
            idle += 1;
            let mut cand = rel.clone();
            let present: Vec<(usize, usize)> = pairs.iter().copied().filter(|&p| p != root).collect();
            let moved = match rng.gen_range(0..3) {
                0 if !present.is_empty() => {
                    let &(i, j) = present.choose(&mut rng).unwrap();
                    cand.set(i, j, false);
                    if rng.gen_bool(0.5) {
                        cand.set(i, rng.gen_range(0..ny), true);
                    } else {
                        cand.set(rng.gen_range(0..nx), j, true);
                    }
                    cand.row_count[i] > 0 && cand.col_count[j] > 0
                }
                1 => {
                    let (i, j) = (rng.gen_range(0..nx), rng.gen_range(0..ny));
                    let fresh = !cand.get(i, j);
                    cand.set(i, j, true);
                    fresh
                }
                _ if !present.is_empty() => {
                    let &(i, j) = present.choose(&mut rng).unwrap();
                    cand.set(i, j, false);
                    cand.row_count[i] > 0 && cand.col_count[j] > 0
                }
                _ => false,
            };
            if !moved || cand.cells == rel.cells {
                continue;
            }
            let cand_pairs = cand.pairs();
            let dis = crate::ghp::correspondence::distortion(x, y, &cand_pairs);
            if let Some(v) = eval.objective(&cand_pairs, dis, current, true) {
                if v < current {
                    idle = 0;
                }
                current = v;
                rel = cand;
                pairs = cand_pairs;
            }
        }
        let better = match &best {
            None => true,
            Some((v, p)) => current < *v || (current == *v && pairs < *p),
        };
        if better {
            best = Some((current, pairs));
        }
        if current <= target {
            break;
        }
    }
    let (value, pairs) = best.expect("at least one restart");
    finish(x, y, pairs, value, false, eval.evaluations)
}

/// Minimizes the gluing objective over correspondences containing the root
/// pair, exhaustively when the number of root-preserving map pairs fits the
/// budget and by seeded local search otherwise. `seeds` are extra starting
/// correspondences for the local search.
pub fn ghp_upper_seeded(
    x: &Space,
    y: &Space,
    cfg: &SearchConfig,
    seeds: &[Correspondence],
) -> Result<UpperBound> {
    ghp_upper_until(x, y, cfg, seeds, 0.0)
}

/// As [`ghp_upper_seeded`], but the local search stops as soon as it
/// reaches `target` (typically a known lower bound).
pub fn ghp_upper_until(
    x: &Space,
    y: &Space,
    cfg: &SearchConfig,
    seeds: &[Correspondence],
    target: f64,
) -> Result<UpperBound> {
    for s in seeds {
        s.check_against(x, y)?;
    }
    if rooted_mapping_pairs(x.len(), y.len()) <= cfg.exhaustive_budget as f64 {
        // Seeds may lie outside the two-map family and still do better.
        let mut starts: Vec<Vec<(usize, usize)>> = seeds.iter().map(|s| s.pairs().to_vec()).collect();
        starts.extend(default_seeds(x, y));
        return Ok(exhaustive(x, y, &starts));
    }
    let seed = cfg.seed.ok_or(Error::SeedRequired)?;
    let extra: Vec<Vec<(usize, usize)>> = seeds.iter().map(|s| s.pairs().to_vec()).collect();
    Ok(local_search(x, y, cfg, seed, &extra, target))
}

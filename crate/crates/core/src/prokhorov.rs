//! Exact Prokhorov distance between finite measures on a common finite space.
//!
//! For a fixed ε the worst subset violation `max_A μ(A) − ν(A^ε)` is a
//! min-cut quantity: in the bipartite network source → i (capacity μ_i),
//! i → j (unbounded, when `d(i, j) < ε`), j → sink (capacity ν_j), the
//! maximum flow equals `μ(X) − max_A (μ(A) − ν(A^ε))`. Halos only change
//! when ε crosses a pairwise distance, so the violation is a step function
//! and the infimum of feasible ε is found by bisection over those steps.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::space::{sorted_distinct, MeasureVec, MetricView, Space};

/// Absolute slack on cut comparisons.
pub const CUT_SLACK: f64 = 1e-12;

/// Size limit of [`prokhorov_bruteforce`] (it enumerates all subsets).
pub const BRUTEFORCE_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `μ(A) > ν(A^ε) + ε`
    MuToNu,
    /// `ν(A) > μ(A^ε) + ε`
    NuToMu,
}

/// A subset carrying the binding constraint, with the direction in which it
/// binds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProkhorovWitness {
    pub direction: Direction,
    pub subset: Vec<usize>,
    /// `μ(A) − ν(A^ε)` (or the mirrored quantity) at the binding ε.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProkhorovResult {
    pub value: f64,
    pub witness: Option<ProkhorovWitness>,
    /// Candidate ε values examined by the bisection, ascending.
    pub breakpoints: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub violation_mu_nu: f64,
    pub violation_nu_mu: f64,
    pub witness: Option<ProkhorovWitness>,
}

/// Transport problem between `μ` on its support (rows) and `ν` on its
/// support (columns), with a cost matrix over rows × columns.
#[derive(Debug, Clone)]
pub(crate) struct Bipartite {
    rows: Vec<usize>,
    cols: Vec<usize>,
    mu: Vec<f64>,
    nu: Vec<f64>,
    cost: Vec<f64>,
}

fn support(mass: &[f64]) -> Vec<usize> {
    (0..mass.len()).filter(|&i| mass[i] > 0.0).collect()
}

impl Bipartite {
    /// Both measures on one space.
    pub fn on_metric(m: &(impl MetricView + ?Sized), mu: &[f64], nu: &[f64]) -> Self {
        Self::with_cost(mu, nu, |i, j| m.dist(i, j))
    }

    /// `μ` on the rows and `ν` on the columns of a cross matrix.
    pub fn on_cross(cross: &[f64], ncols: usize, mu: &[f64], nu: &[f64]) -> Self {
        Self::with_cost(mu, nu, |i, j| cross[i * ncols + j])
    }

    fn with_cost(mu: &[f64], nu: &[f64], cost: impl Fn(usize, usize) -> f64) -> Self {
        let rows = support(mu);
        let cols = support(nu);
        let mut c = Vec::with_capacity(rows.len() * cols.len());
        for &i in &rows {
            for &j in &cols {
                c.push(cost(i, j));
            }
        }
        Bipartite {
            mu: rows.iter().map(|&i| mu[i]).collect(),
            nu: cols.iter().map(|&j| nu[j]).collect(),
            rows,
            cols,
            cost: c,
        }
    }

    /// Worst-case violation in one direction when a row and a column are
    /// linked iff `linked(cost)`; returns the value and the maximizing
    /// subset in original indices.
    fn violation(&self, direction: Direction, linked: impl Fn(f64) -> bool) -> (f64, Vec<usize>) {
        let (p, q) = (self.rows.len(), self.cols.len());
        let (src_mass, dst_mass, src_idx) = match direction {
            Direction::MuToNu => (&self.mu, &self.nu, &self.rows),
            Direction::NuToMu => (&self.nu, &self.mu, &self.cols),
        };
        let total: f64 = src_mass.iter().sum();
        if src_mass.is_empty() {
            return (0.0, Vec::new());
        }
        let (ns, nd) = (src_mass.len(), dst_mass.len());
        let scale = total + dst_mass.iter().sum::<f64>();
        let source = 0;
        let sink = ns + nd + 1;
        let mut net = FlowNetwork::new(ns + nd + 2, 1e-15 * scale.max(1.0));
        let unbounded = scale + 1.0;
        for (a, &m) in src_mass.iter().enumerate() {
            net.add_edge(source, 1 + a, m);
        }
        for (b, &m) in dst_mass.iter().enumerate() {
            net.add_edge(1 + ns + b, sink, m);
        }
        for a in 0..ns {
            for b in 0..nd {
                let c = match direction {
                    Direction::MuToNu => self.cost[a * q + b],
                    Direction::NuToMu => self.cost[b * q + a],
                };
                if linked(c) {
                    net.add_edge(1 + a, 1 + ns + b, unbounded);
                }
            }
        }
        debug_assert!(p * q == self.cost.len());
        let flow = net.max_flow(source, sink);
        let side = net.source_side(source);
        let witness = (0..ns).filter(|&a| side[1 + a]).map(|a| src_idx[a]).collect();
        ((total - flow).max(0.0), witness)
    }

    /// Violations in both directions with halo radius `eps` (strict).
    pub fn feasibility(&self, eps: f64) -> Feasibility {
        let (fwd, wf) = self.violation(Direction::MuToNu, |c| c < eps);
        let (bwd, wb) = self.violation(Direction::NuToMu, |c| c < eps);
        let feasible = fwd <= eps + CUT_SLACK && bwd <= eps + CUT_SLACK;
        let witness = (!feasible).then(|| {
            if fwd >= bwd {
                ProkhorovWitness {
                    direction: Direction::MuToNu,
                    subset: wf,
                    excess: fwd,
                }
            } else {
                ProkhorovWitness {
                    direction: Direction::NuToMu,
                    subset: wb,
                    excess: bwd,
                }
            }
        });
        Feasibility {
            feasible,
            violation_mu_nu: fwd,
            violation_nu_mu: bwd,
            witness,
        }
    }

    /// Violation on the interval `(threshold, next]`, where halos link
    /// exactly the pairs with cost `<= threshold`.
    fn interval(&self, threshold: f64) -> (f64, ProkhorovWitness) {
        let (fwd, wf) = self.violation(Direction::MuToNu, |c| c <= threshold);
        let (bwd, wb) = self.violation(Direction::NuToMu, |c| c <= threshold);
        if fwd >= bwd {
            (
                fwd,
                ProkhorovWitness {
                    direction: Direction::MuToNu,
                    subset: wf,
                    excess: fwd,
                },
            )
        } else {
            (
                bwd,
                ProkhorovWitness {
                    direction: Direction::NuToMu,
                    subset: wb,
                    excess: bwd,
                },
            )
        }
    }

    pub fn solve(&self) -> ProkhorovResult {
        let mut b = sorted_distinct(self.cost.iter().copied());
        if b.first() != Some(&0.0) {
            b.insert(0, 0.0);
        }
        let m = b.len();
        let mut seen: Vec<Option<(f64, ProkhorovWitness)>> = vec![None; m];
        let mut examined = Vec::new();
        let mut eval = |k: usize, seen: &mut Vec<Option<(f64, ProkhorovWitness)>>| -> f64 {
            if seen[k].is_none() {
                examined.push(b[k]);
                seen[k] = Some(self.interval(b[k]));
            }
            seen[k].as_ref().unwrap().0
        };
        // The violation is nonincreasing in ε and the right endpoints grow,
        // so "violation <= right endpoint" is monotone in k.
        let ok = |k: usize, f: f64| k + 1 == m || f <= b[k + 1] + CUT_SLACK;
        let (mut lo, mut hi) = (0usize, m - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let f = eval(mid, &mut seen);
            if ok(mid, f) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let k = lo;
        let f = eval(k, &mut seen);
        let upper = if k + 1 < m { b[k + 1] } else { f64::INFINITY };
        let value = b[k].max(f.min(upper));
        let witness = if f > b[k] {
            seen[k].take().map(|(_, w)| w)
        } else if k > 0 {
            eval(k - 1, &mut seen);
            seen[k - 1].take().map(|(_, w)| w)
        } else {
            None
        };
        examined.sort_by(f64::total_cmp);
        examined.dedup();
        ProkhorovResult {
            value,
            witness,
            breakpoints: examined,
        }
    }
}

fn check_pair(m: &(impl MetricView + ?Sized), mu: &MeasureVec, nu: &MeasureVec) -> Result<()> {
    for v in [mu, nu] {
        if v.len() != m.len() {
            return Err(Error::MeasureLength {
                expected: m.len(),
                found: v.len(),
            });
        }
    }
    Ok(())
}

/// Decides whether every subset `A` satisfies `μ(A) ≤ ν(A^ε) + ε` and
/// `ν(A) ≤ μ(A^ε) + ε`, using one max-flow per direction.
pub fn prokhorov_feasible(
    space: &(impl MetricView + ?Sized),
    mu: &MeasureVec,
    nu: &MeasureVec,
    eps: f64,
) -> Result<Feasibility> {
    check_pair(space, mu, nu)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter { name: "eps", value: eps });
    }
    Ok(Bipartite::on_metric(space, mu.masses(), nu.masses()).feasibility(eps))
}

/// The Prokhorov distance `inf{ε > 0 : feasible}`.
///
/// Measures need not have equal totals; the value is at least the mass gap.
pub fn prokhorov_exact(
    space: &(impl MetricView + ?Sized),
    mu: &MeasureVec,
    nu: &MeasureVec,
) -> Result<ProkhorovResult> {
    check_pair(space, mu, nu)?;
    Ok(Bipartite::on_metric(space, mu.masses(), nu.masses()).solve())
}

/// Reference Prokhorov distance by enumeration of all subsets on every
/// interval between consecutive pairwise distances. Refuses spaces with more
/// than [`BRUTEFORCE_LIMIT`] points.
pub fn prokhorov_bruteforce(
    space: &(impl MetricView + ?Sized),
    mu: &MeasureVec,
    nu: &MeasureVec,
) -> Result<f64> {
    check_pair(space, mu, nu)?;
    let n = space.len();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge {
            what: "brute-force Prokhorov",
            size: n,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let mut b = vec![0.0];
    for i in 0..n {
        for j in 0..n {
            b.push(space.dist(i, j));
        }
    }
    let b = sorted_distinct(b);
    let (mu, nu) = (mu.masses(), nu.masses());
    let full = 1usize << n;
    let mut mass_mu = vec![0.0; full];
    let mut mass_nu = vec![0.0; full];
    for a in 1..full {
        let low = a.trailing_zeros() as usize;
        mass_mu[a] = mass_mu[a & (a - 1)] + mu[low];
        mass_nu[a] = mass_nu[a & (a - 1)] + nu[low];
    }
    let mut halo = vec![0usize; full];
    for (k, &left) in b.iter().enumerate() {
        // Any ε strictly inside (b_k, b_{k+1}] sees the same halos; use the
        // right endpoint, or a point past the last distance.
        let eps = b.get(k + 1).copied().unwrap_or(left + 1.0);
        let ball: Vec<usize> = (0..n)
            .map(|i| (0..n).filter(|&j| space.dist(i, j) < eps).fold(0, |acc, j| acc | 1 << j))
            .collect();
        let mut worst = 0.0f64;
        for a in 1..full {
            let low = a.trailing_zeros() as usize;
            halo[a] = halo[a & (a - 1)] | ball[low];
            let h = halo[a];
            worst = worst
                .max(mass_mu[a] - mass_nu[h])
                .max(mass_nu[a] - mass_mu[h]);
        }
        if k + 1 == b.len() || worst <= eps {
            return Ok(left.max(worst));
        }
    }
    unreachable!("the loop returns on the last interval")
}

/// `∫_0^∞ e^{-r} (1 ∧ d_P(μ^(r), ν^(r))) dr`, evaluated exactly.
///
/// Restrictions to closed balls are constant on `[b_i, b_{i+1})` between
/// consecutive root distances, so each piece contributes
/// `(e^{-b_i} − e^{-b_{i+1}}) · (1 ∧ d_P)` with `d_P` taken at `b_i`.
pub fn generalized_prokhorov(space: &Space, mu: &MeasureVec, nu: &MeasureVec) -> Result<f64> {
    check_pair(space, mu, nu)?;
    let b = space.root_distance_breakpoints();
    let mut total = 0.0;
    for (k, &lo) in b.iter().enumerate() {
        let weight = match b.get(k + 1) {
            Some(&hi) => (-lo).exp() - (-hi).exp(),
            None => (-lo).exp(),
        };
        let piece = Bipartite::on_metric(
            space,
            mu.restricted(space, lo).masses(),
            nu.restricted(space, lo).masses(),
        )
        .solve()
        .value;
        total += weight * piece.min(1.0);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_points(d: f64) -> Space {
        Space::on_line(&[0.0, d], 0, vec![0.0, 0.0]).unwrap()
    }

    fn m(s: &Space, v: &[f64]) -> MeasureVec {
        MeasureVec::new(s, v.to_vec()).unwrap()
    }

    #[test]
    fn feasible_examples() {
        let s = two_points(1.0);
        let (mu, nu) = (m(&s, &[1.0, 0.0]), m(&s, &[0.0, 1.0]));
        let f = prokhorov_feasible(&s, &mu, &mu, 0.3).unwrap();
        assert!(f.feasible);
        let f = prokhorov_feasible(&s, &mu, &nu, 0.5).unwrap();
        assert!(!f.feasible);
        let w = f.witness.unwrap();
        assert_eq!(w.direction, Direction::MuToNu);
        assert_eq!(w.subset, vec![0]);
        assert!(prokhorov_feasible(&s, &mu, &nu, 1.0).unwrap().feasible);
    }

    #[test]
    fn exact_examples() {
        let s = two_points(1.0);
        let p = |a: &[f64], b: &[f64]| prokhorov_exact(&s, &m(&s, a), &m(&s, b)).unwrap().value;
        assert_eq!(p(&[1.0, 0.0], &[1.0, 0.0]), 0.0);
        assert_eq!(p(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        assert_eq!(p(&[1.0, 0.0], &[0.5, 0.5]), 0.5);
        assert_eq!(p(&[0.0, 0.0], &[0.0, 0.0]), 0.0);
        assert_eq!(p(&[0.0, 0.0], &[0.0, 2.5]), 2.5);
    }

    #[test]
    fn bruteforce_examples() {
        let one = Space::singleton(0.0).unwrap();
        let v = prokhorov_bruteforce(&one, &m(&one, &[2.0]), &m(&one, &[1.0])).unwrap();
        assert_eq!(v, 1.0);
        let s = two_points(1.0);
        let v = prokhorov_bruteforce(&s, &m(&s, &[1.0, 0.0]), &m(&s, &[0.5, 0.5])).unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn bruteforce_refuses_large() {
        let coords: Vec<f64> = (0..13).map(f64::from).collect();
        let s = Space::on_line(&coords, 0, vec![1.0; 13]).unwrap();
        let mu = MeasureVec::of(&s);
        assert!(matches!(
            prokhorov_bruteforce(&s, &mu, &mu),
            Err(Error::TooLarge { size: 13, .. })
        ));
    }

    #[test]
    fn generalized_examples() {
        let s = two_points(2.0);
        let g = generalized_prokhorov(&s, &m(&s, &[1.0, 0.0]), &m(&s, &[1.0, 1.0])).unwrap();
        assert!((g - (-2.0f64).exp()).abs() < 1e-15);
        let one = Space::singleton(0.0).unwrap();
        let g = generalized_prokhorov(&one, &m(&one, &[1.0]), &m(&one, &[1.5])).unwrap();
        assert!((g - 0.5).abs() < 1e-15);
        let mu = m(&s, &[0.3, 0.7]);
        assert_eq!(generalized_prokhorov(&s, &mu, &mu).unwrap(), 0.0);
    }

    #[test]
    fn witness_reports_binding_subset() {
        let s = two_points(1.0);
        let r = prokhorov_exact(&s, &m(&s, &[1.0, 0.0]), &m(&s, &[0.5, 0.5])).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.direction, Direction::MuToNu);
        assert_eq!(w.subset, vec![0]);
        assert_eq!(w.excess, 0.5);
    }
}

//! Exact Gromov-Hausdorff distance for small spaces.
//!
//! `d_GH = ½ · min dis(R)` over correspondences `R`. Restricting to unions
//! of a map `X → Y` and a map `Y → X` loses nothing: any correspondence
//! contains such a union, and dropping pairs never increases a max-based
//! distortion.

use crate::error::{Error, Result};
use crate::space::Space;

/// Default exhaustive budget, in correspondences.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// `|X|^|Y| · |Y|^|X|`, the number of map pairs, as a float (it overflows
/// integers quickly).
pub fn mapping_pairs(nx: usize, ny: usize) -> f64 {
    (nx as f64).powi(ny as i32) * (ny as f64).powi(nx as i32)
}

/// Exact Gromov-Hausdorff distance between the underlying metric spaces
/// (roots and masses ignored). Refuses when the number of map pairs exceeds
/// `budget`.
pub fn gh_exact_small(x: &Space, y: &Space, budget: u64) -> Result<f64> {
    let required = mapping_pairs(x.len(), y.len());
    if required > budget as f64 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    // Slots 0..nx pick φ(i) ∈ Y; slots nx..nx+ny pick ψ(j) ∈ X.
    let (nx, ny) = (x.len(), y.len());
    let mut search = Search {
        x,
        y,
        nx,
        ny,
        pairs: Vec::with_capacity(nx + ny),
        best: x.max_distance().max(y.max_distance()),
    };
    search.descend(0, 0.0);
    Ok(0.5 * search.best)
}

struct Search<'a> {
    x: &'a Space,
    y: &'a Space,
    nx: usize,
    ny: usize,
    pairs: Vec<(usize, usize)>,
    best: f64,
}

impl Search<'_> {
    fn descend(&mut self, slot: usize, dis: f64) {
        if slot == self.nx + self.ny {
            self.best = self.best.min(dis);
            return;
        }
        for choice in 0..if slot < self.nx { self.ny } else { self.nx } {
            let (i, j) = if slot < self.nx {
                (slot, choice)
            } else {
                (choice, slot - self.nx)
            };
            let (rx, ry) = (self.x.row(i), self.y.row(j));
            let mut d = dis;
            for &(i2, j2) in &self.pairs {
                d = d.max((rx[i2] - ry[j2]).abs());
                if d >= self.best {
                    break;
                }
            }
            if d < self.best {
                self.pairs.push((i, j));
                self.descend(slot + 1, d);
                self.pairs.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(d: f64) -> Space {
        Space::on_line(&[0.0, d], 0, vec![0.0; 2]).unwrap()
    }

    /// All relations with onto projections, enumerated as bitmasks.
    fn brute_gh(x: &Space, y: &Space) -> f64 {
        let (nx, ny) = (x.len(), y.len());
        let cells = nx * ny;
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << cells) {
            let pairs: Vec<(usize, usize)> = (0..cells)
                .filter(|c| mask >> c & 1 == 1)
                .map(|c| (c / ny, c % ny))
                .collect();
            let covers_x = (0..nx).all(|i| pairs.iter().any(|p| p.0 == i));
            let covers_y = (0..ny).all(|j| pairs.iter().any(|p| p.1 == j));
            if covers_x && covers_y {
                best = best.min(crate::ghp::correspondence::distortion(x, y, &pairs));
            }
        }
        0.5 * best
    }

    #[test]
    fn examples() {
        let x = Space::on_line(&[0.0, 1.0, 3.0], 0, vec![1.0; 3]).unwrap();
        assert_eq!(gh_exact_small(&x, &x, DEFAULT_BUDGET).unwrap(), 0.0);
        let p = Space::singleton(0.0).unwrap();
        assert_eq!(gh_exact_small(&seg(1.0), &p, DEFAULT_BUDGET).unwrap(), 0.5);
        assert_eq!(gh_exact_small(&seg(1.0), &seg(3.0), DEFAULT_BUDGET).unwrap(), 1.0);
    }

    #[test]
    fn matches_relation_enumeration() {
        let a = Space::on_line(&[0.0, 1.0, 3.0], 0, vec![0.0; 3]).unwrap();
        let b = Space::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.0, 2.0, 2.0],
                vec![2.0, 0.0, 2.0],
                vec![2.0, 2.0, 0.0],
            ],
            0,
            vec![0.0; 3],
        )
        .unwrap();
        let c = seg(1.5);
        for (x, y) in [(&a, &b), (&b, &c), (&a, &c)] {
            let fast = gh_exact_small(x, y, DEFAULT_BUDGET).unwrap();
            assert!((fast - brute_gh(x, y)).abs() < 1e-12);
        }
    }

    #[test]
    fn budget_refusal() {
        let x = Space::on_line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0], 0, vec![0.0; 8]).unwrap();
        assert!(matches!(
            gh_exact_small(&x, &x, DEFAULT_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}

//! Structural defects and pre-compactness quantities of finite spaces.
//!
//! Defects are magnitudes; deciding what counts as zero is left to the
//! caller.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{diameter, greedy_net, restrict, Space};

/// Largest space accepted by the exhaustive four-point enumeration.
pub const FOUR_POINT_LIMIT: usize = 200;

/// Largest minus second largest of the three pair sums of a quadruple.
fn quadruple_defect(d: &Space, i: usize, j: usize, k: usize, l: usize) -> f64 {
    let a = d.dist(i, j) + d.dist(k, l);
    let b = d.dist(i, k) + d.dist(j, l);
    let c = d.dist(i, l) + d.dist(j, k);
    let (hi, mid) = if a >= b { (a, b) } else { (b, a) };
    if c >= hi {
        c - hi
    } else {
        hi - mid.max(c)
    }
}

/// `max (d(x1,x2) + d(x3,x4) − max(d(x1,x3) + d(x2,x4), d(x1,x4) + d(x2,x3)))`
/// over all quadruples, clipped at 0. Zero exactly for tree metrics.
/// Refuses spaces above [`FOUR_POINT_LIMIT`] points; see
/// [`four_point_defect_sampled`].
pub fn four_point_defect(space: &Space) -> Result<f64> {
    let n = space.len();
    if n > FOUR_POINT_LIMIT {
        return Err(Error::TooLarge {
            what: "four-point enumeration",
            size: n,
            limit: FOUR_POINT_LIMIT,
        });
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        let ri = space.row(i);
        for j in i + 1..n {
            let rj = space.row(j);
            let dij = ri[j];
            for k in j + 1..n {
                let rk = space.row(k);
                let (dik, djk) = (ri[k], rj[k]);
                for l in k + 1..n {
                    let a = dij + rk[l];
                    let b = dik + rj[l];
                    let c = ri[l] + djk;
                    let top = a.max(b).max(c);
                    let second = if top == a {
                        b.max(c)
                    } else if top == b {
                        a.max(c)
                    } else {
                        a.max(b)
                    };
                    worst = worst.max(top - second);
                }
            }
        }
    }
    Ok(worst)
}

/// Four-point defect over a seeded sample of quadruples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampledDefect {
    /// A lower estimate of the true defect.
    pub defect: f64,
    pub samples: usize,
    pub seed: u64,
}

pub fn four_point_defect_sampled(space: &Space, samples: usize, seed: u64) -> SampledDefect {
    let n = space.len();
    let mut defect = 0.0f64;
    let mut taken = 0;
    if n >= 4 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let q = sample(&mut rng, n, 4);
            defect = defect.max(quadruple_defect(space, q.index(0), q.index(1), q.index(2), q.index(3)));
            taken += 1;
        }
    }
    SampledDefect {
        defect,
        samples: taken,
        seed,
    }
}

/// `max_{x,y} min_z |2d(x,z) − d(x,y)| + |2d(y,z) − d(x,y)|`; how far the
/// space is from having approximate midpoints. Ignores root and masses.
pub fn midpoint_defect(space: &Space) -> f64 {
    let n = space.len();
    let mut worst = 0.0f64;
    for x in 0..n {
        let rx = space.row(x);
        for y in x + 1..n {
            let ry = space.row(y);
            let dxy = rx[y];
            let best = (0..n)
                .map(|z| (2.0 * rx[z] - dxy).abs() + (2.0 * ry[z] - dxy).abs())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetCardinal {
    pub eps: f64,
    /// Radius of the restriction; `None` for whole spaces.
    pub r: Option<f64>,
    /// Largest greedy net over the family.
    pub cardinal: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallMass {
    pub r: f64,
    pub mass: f64,
}

/// The quantities bounded by the pre-compactness criteria, maximized over a
/// finite family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrecompactReport {
    pub note: &'static str,
    pub family_size: usize,
    pub sup_diameter: f64,
    pub sup_total_mass: f64,
    /// One entry per `eps` with `r = None`, then one per `(eps, r)`.
    pub net_cardinals: Vec<NetCardinal>,
    pub sup_masses: Vec<BallMass>,
}

const REPORT_NOTE: &str = "net cardinals are greedy upper estimates of the minimal \
    eps-net size; all values are exact maxima over this finite family and say nothing \
    about larger families";

pub fn precompactness_report(
    family: &[Space],
    eps_list: &[f64],
    r_list: &[f64],
) -> Result<PrecompactReport> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    for &eps in eps_list {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter { name: "eps", value: eps });
        }
    }
    for &r in r_list {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter { name: "r", value: r });
        }
    }
    let balls: Vec<Vec<Space>> = family
        .iter()
        .map(|x| r_list.iter().map(|&r| restrict(x, r)).collect())
        .collect::<Result<_>>()?;
    fn max_net<'a>(spaces: impl Iterator<Item = &'a Space>, eps: f64) -> Result<usize> {
        spaces.map(|x| Ok(greedy_net(x, eps)?.len())).try_fold(0, |m, c: Result<usize>| Ok(m.max(c?)))
    }

    let mut net_cardinals = Vec::new();
    for &eps in eps_list {
        net_cardinals.push(NetCardinal {
            eps,
            r: None,
            cardinal: max_net(family.iter(), eps)?,
        });
    }
    for &eps in eps_list {
        for (k, &r) in r_list.iter().enumerate() {
            net_cardinals.push(NetCardinal {
                eps,
                r: Some(r),
                cardinal: max_net(balls.iter().map(|b| &b[k]), eps)?,
            });
        }
    }
    let sup_masses = r_list
        .iter()
        .enumerate()
        .map(|(k, &r)| BallMass {
            r,
            mass: balls.iter().map(|b| b[k].total_mass()).fold(0.0, f64::max),
        })
        .collect();
    Ok(PrecompactReport {
        note: REPORT_NOTE,
        family_size: family.len(),
        sup_diameter: family.iter().map(|x| diameter(x, None)).fold(0.0, f64::max),
        sup_total_mass: family.iter().map(Space::total_mass).fold(0.0, f64::max),
        net_cardinals,
        sup_masses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Space {
        let d = vec![
            vec![0.0, 1.0, 2.0, 1.0],
            vec![1.0, 0.0, 1.0, 2.0],
            vec![2.0, 1.0, 0.0, 1.0],
            vec![1.0, 2.0, 1.0, 0.0],
        ];
        Space::new((0..4).map(|i| i.to_string()).collect(), d, 0, vec![1.0; 4]).unwrap()
    }

    #[test]
    fn four_point_examples() {
        assert_eq!(four_point_defect(&square()).unwrap(), 2.0);
        let path = Space::on_line(&[0.0, 1.0, 3.0], 0, vec![1.0; 3]).unwrap();
        assert_eq!(four_point_defect(&path).unwrap(), 0.0);
        let line = Space::on_line(&[0.0, 0.3, 1.1, 2.0, 5.0], 2, vec![0.0; 5]).unwrap();
        assert!(four_point_defect(&line).unwrap() <= 1e-9 * 5.0);
    }

    #[test]
    fn quadruple_helper_agrees_with_enumeration() {
        let s = square();
        assert_eq!(quadruple_defect(&s, 0, 1, 2, 3), 2.0);
        assert_eq!(quadruple_defect(&s, 2, 0, 3, 1), 2.0);
        let sampled = four_point_defect_sampled(&s, 10, 3);
        assert_eq!((sampled.defect, sampled.samples), (2.0, 10));
    }

    #[test]
    fn four_point_refuses_large_spaces() {
        let coords: Vec<f64> = (0..201).map(f64::from).collect();
        let s = Space::on_line(&coords, 0, vec![0.0; 201]).unwrap();
        assert!(matches!(
            four_point_defect(&s),
            Err(Error::TooLarge { size: 201, .. })
        ));
        assert_eq!(four_point_defect_sampled(&s, 100, 1).defect, 0.0);
    }

    #[test]
    fn midpoint_examples() {
        assert_eq!(midpoint_defect(&Space::singleton(1.0).unwrap()), 0.0);
        let two = Space::on_line(&[0.0, 1.0], 0, vec![0.0; 2]).unwrap();
        assert_eq!(midpoint_defect(&two), 2.0);
        let three = Space::on_line(&[0.0, 0.5, 1.0], 0, vec![0.0; 3]).unwrap();
        assert_eq!(midpoint_defect(&three), 1.0);
    }

    #[test]
    fn report_examples() {
        let one = precompactness_report(&[Space::singleton(2.0).unwrap()], &[0.1, 0.5], &[1.0])
            .unwrap();
        assert_eq!(one.sup_diameter, 0.0);
        assert!(one.net_cardinals.iter().all(|e| e.cardinal == 1));
        assert_eq!(one.net_cardinals.len(), 4);
        assert_eq!(one.sup_masses, vec![BallMass { r: 1.0, mass: 2.0 }]);

        let fam: Vec<Space> = [1.0, 10.0, 100.0]
            .iter()
            .map(|&m| Space::singleton(m).unwrap())
            .collect();
        let rep = precompactness_report(&fam, &[0.5], &[0.0, 1.0, 4.0]).unwrap();
        assert!(rep.sup_masses.iter().all(|b| b.mass == 100.0));
        assert_eq!(rep.family_size, 3);

        assert!(matches!(
            precompactness_report(&[], &[0.1], &[1.0]),
            Err(Error::EmptyFamily)
        ));
    }

    #[test]
    fn report_is_monotone_under_extension() {
        let a = Space::on_line(&[0.0, 1.0, 2.0], 0, vec![1.0; 3]).unwrap();
        let b = Space::on_line(&[0.0, 0.5, 3.0, 3.2], 1, vec![2.0; 4]).unwrap();
        let small = precompactness_report(&[a.clone()], &[0.3, 1.0], &[0.5, 2.0]).unwrap();
        let big = precompactness_report(&[a, b], &[0.3, 1.0], &[0.5, 2.0]).unwrap();
        assert!(big.sup_diameter >= small.sup_diameter);
        for (s, l) in small.net_cardinals.iter().zip(&big.net_cardinals) {
            assert!(l.cardinal >= s.cardinal);
        }
        for (s, l) in small.sup_masses.iter().zip(&big.sup_masses) {
            assert!(l.mass >= s.mass);
        }
    }
}

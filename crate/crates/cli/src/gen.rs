//! Seeded random inputs for the suites.

use ghp::{SampledFunction, Space};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random symmetric matrix with entries in `[lo, hi]`, closed under
/// shortest paths so it satisfies the triangle inequality.
pub fn random_metric(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.gen_range(lo..=hi);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

pub fn random_masses(rng: &mut ChaCha8Rng, n: usize, max: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.0..=max)).collect()
}

/// Distances in `[0.1, 10]`, masses in `[0, 5]`, random root.
pub fn random_space(rng: &mut ChaCha8Rng, n: usize) -> Space {
    let d = random_metric(rng, n, 0.1, 10.0);
    let masses = random_masses(rng, n, 5.0);
    let root = rng.gen_range(0..n);
    Space::new((0..n).map(|i| format!("p{i}")).collect(), d, root, masses)
        .expect("shortest-path closure is a metric")
}

/// [`random_space`] with between 1 and `max` points.
pub fn random_space_upto(rng: &mut ChaCha8Rng, max: usize) -> Space {
    let n = rng.gen_range(1..=max);
    random_space(rng, n)
}

/// A nonempty proper-or-full random subset as a sorted index list.
pub fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    loop {
        let s: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

/// Heights of a random lattice excursion with `steps` (even) moves of ±1,
/// never below 0 and back at 0 at the end.
pub fn dyck_heights(rng: &mut ChaCha8Rng, steps: usize) -> Vec<i64> {
    assert!(steps % 2 == 0);
    let mut h = vec![0i64];
    let mut k = 0i64;
    for i in 0..steps {
        let remaining = (steps - i) as i64;
        let up = if k == 0 {
            true
        } else if k >= remaining {
            false
        } else {
            rng.gen_bool(0.5)
        };
        k += if up { 1 } else { -1 };
        h.push(k);
    }
    h
}

/// Samples `heights · unit` on the grid `i · step`, with `pad` trailing
/// zeros.
pub fn lattice_function(heights: &[i64], step: f64, unit: f64, pad: usize) -> SampledFunction {
    let mut values: Vec<f64> = heights.iter().map(|&k| k as f64 * unit).collect();
    values.extend(std::iter::repeat(0.0).take(pad));
    SampledFunction::uniform(step, values).expect("lattice excursions are valid")
}

/// Turns up to `count` random peaks (up then down) at height at least 1
/// into valleys; each flip moves the function by `2 · unit` at one sample.
pub fn flip_peaks(rng: &mut ChaCha8Rng, heights: &[i64], count: usize) -> Vec<i64> {
    let mut h = heights.to_vec();
    for _ in 0..count {
        let peaks: Vec<usize> = (1..h.len() - 1)
            .filter(|&i| h[i] > h[i - 1] && h[i] > h[i + 1] && h[i - 1] >= 1)
            .collect();
        if peaks.is_empty() {
            break;
        }
        let i = peaks[rng.gen_range(0..peaks.len())];
        h[i] -= 2;
    }
    h
}

/// Tent of height `height` on `[0, 2]` sampled with `2 · half + 1` points.
pub fn tent(half: usize, height: f64) -> SampledFunction {
    let step = 1.0 / half as f64;
    let values = (0..=2 * half)
        .map(|i| height * (1.0 - (i as f64 * step - 1.0).abs()))
        .collect();
    SampledFunction::uniform(step, values).expect("tent is a valid excursion")
}

/// `f + amplitude · b`, where `b` is the tent of height 1 on `[0.5, 1.5]`.
pub fn bumped(f: &SampledFunction, amplitude: f64) -> SampledFunction {
    let values = f
        .grid()
        .iter()
        .zip(f.values())
        .map(|(&t, &v)| v + amplitude * (1.0 - 2.0 * (t - 1.0).abs()).max(0.0))
        .collect();
    SampledFunction::new(f.grid().to_vec(), values).expect("adding a bump keeps f valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn dyck_paths_are_excursions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for steps in [0, 2, 10, 200] {
            let h = dyck_heights(&mut rng, steps);
            assert_eq!(h.len(), steps + 1);
            assert_eq!(*h.last().unwrap(), 0);
            assert!(h.iter().all(|&k| k >= 0));
            assert!(h.windows(2).all(|w| (w[1] - w[0]).abs() == 1));
            let f = flip_peaks(&mut rng, &h, 5);
            assert!(f.iter().all(|&k| k >= 0));
        }
    }

    #[test]
    fn random_spaces_are_metrics() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..8 {
            let x = random_space(&mut rng, n);
            assert_eq!(x.len(), n);
        }
    }

    #[test]
    fn bump_stays_on_the_grid() {
        let f = tent(8, 1.0);
        let g = bumped(&f, 0.5);
        assert_eq!(g.values()[8], 1.5);
        assert_eq!(g.values()[4], 0.5);
        assert_eq!(g.values()[2], 0.25);
    }
}

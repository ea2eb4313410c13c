use ghp::diagnostics::{four_point_defect, midpoint_defect};
use ghp::io::{space_from_json, space_to_json};
use ghp::tree::{code_tree, tree_distance, TreeMetric, QUOTIENT_TOL};
use ghp::{
    cross_from_correspondence, diameter, ghp_compact, halo, hausdorff, prokhorov_bruteforce,
    prokhorov_exact, restrict, sigma, Correspondence, MeasureVec, SampledFunction, SearchConfig,
    Space, Subset,
};
use proptest::prelude::*;

fn metric(n: usize, raw: &[f64]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            d[i][j] = raw[k];
            d[j][i] = raw[k];
            k += 1;
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][m] + d[m][j]);
            }
        }
    }
    d
}

prop_compose! {
    fn space(max: usize)(n in 1..=max)(
        n in Just(n),
        raw in prop::collection::vec(0.1f64..10.0, n * (n - 1) / 2),
        masses in prop::collection::vec(0.0f64..5.0, n),
        root in 0..n,
    ) -> Space {
        let labels = (0..n).map(|i| format!("x{i}")).collect();
        Space::new(labels, metric(n, &raw), root, masses).unwrap()
    }
}

prop_compose! {
    fn space_with_measures(max: usize)(x in space(max))(
        mu in prop::collection::vec(0.0f64..5.0, x.len()),
        nu in prop::collection::vec(0.0f64..5.0, x.len()),
        x in Just(x),
    ) -> (Space, MeasureVec, MeasureVec) {
        let mu = MeasureVec::new(&x, mu).unwrap();
        let nu = MeasureVec::new(&x, nu).unwrap();
        (x, mu, nu)
    }
}

prop_compose! {
    /// Lattice excursion: ±unit steps on a uniform grid, nonnegative,
    /// ending at 0, followed by a few zeros.
    fn excursion()(
        moves in prop::collection::vec(any::<bool>(), 2..80),
        step in 0.01f64..0.5,
        unit in 0.01f64..2.0,
        pad in 0usize..4,
    ) -> SampledFunction {
        let mut h = vec![0i64];
        let steps = moves.len() & !1;
        for (i, &up) in moves.iter().take(steps).enumerate() {
            let k = *h.last().unwrap();
            let remaining = (steps - i) as i64;
            let up = if k == 0 { true } else if k >= remaining { false } else { up };
            h.push(k + if up { 1 } else { -1 });
        }
        let mut values: Vec<f64> = h.iter().map(|&k| k as f64 * unit).collect();
        values.extend(std::iter::repeat(0.0).take(pad));
        SampledFunction::uniform(step, values).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn restriction_composes(x in space(7), r1 in 0.0f64..12.0, r2 in 0.0f64..12.0) {
        let twice = restrict(&restrict(&x, r1).unwrap(), r2).unwrap();
        prop_assert_eq!(twice, restrict(&x, r1.min(r2)).unwrap());
    }

    #[test]
    fn halo_is_monotone(x in space(7), e1 in 0.01f64..8.0, e2 in 0.01f64..8.0, bits in any::<u8>()) {
        let a = Subset::new(&x, (0..x.len()).filter(|i| bits >> i & 1 == 1)).unwrap();
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        let small = halo(&x, &a, lo).unwrap();
        let large = halo(&x, &a, hi).unwrap();
        prop_assert!(a.is_subset_of(&small));
        prop_assert!(small.is_subset_of(&large));
    }

    #[test]
    fn prokhorov_matches_enumeration((x, mu, nu) in space_with_measures(8)) {
        let exact = prokhorov_exact(&x, &mu, &nu).unwrap().value;
        let brute = prokhorov_bruteforce(&x, &mu, &nu).unwrap();
        prop_assert!((exact - brute).abs() <= 1e-9, "{} vs {}", exact, brute);
        prop_assert!(exact >= (mu.total() - nu.total()).abs() - 1e-12);
        prop_assert_eq!(exact, prokhorov_exact(&x, &nu, &mu).unwrap().value);
        prop_assert_eq!(prokhorov_exact(&x, &mu, &mu).unwrap().value, 0.0);
    }

    #[test]
    fn hausdorff_is_a_metric_on_subsets(x in space(7), a in any::<u8>(), b in any::<u8>(), c in any::<u8>()) {
        let pick = |bits: u8| {
            let s: Vec<usize> = (0..x.len()).filter(|i| bits >> i & 1 == 1).collect();
            Subset::new(&x, if s.is_empty() { vec![0] } else { s }).unwrap()
        };
        let (a, b, c) = (pick(a), pick(b), pick(c));
        let ab = hausdorff(&x, &a, &b).unwrap();
        prop_assert_eq!(ab, hausdorff(&x, &b, &a).unwrap());
        prop_assert_eq!(hausdorff(&x, &a, &a).unwrap(), 0.0);
        let ac = hausdorff(&x, &a, &c).unwrap();
        let cb = hausdorff(&x, &c, &b).unwrap();
        prop_assert!(ab <= ac + cb + 1e-9);
        prop_assert!(ab <= diameter(&x, None));
    }

    #[test]
    fn ghp_bounds_are_ordered(x in space(4), y in space(4)) {
        let b = ghp_compact(&x, &y, &SearchConfig::new(3)).unwrap();
        prop_assert!(b.lower <= b.upper);
        prop_assert!(b.upper >= (x.total_mass() - y.total_mass()).abs());
        let same = ghp_compact(&x, &x, &SearchConfig::new(3)).unwrap();
        prop_assert_eq!((same.lower, same.upper), (0.0, 0.0));
    }

    #[test]
    fn correspondence_gluings_are_metrics(x in space(5), y in space(5), extra in any::<u64>()) {
        let mut pairs = vec![(x.root(), y.root())];
        for i in 0..x.len() {
            pairs.push((i, (extra as usize >> i) % y.len()));
        }
        for j in 0..y.len() {
            pairs.push(((extra as usize >> (j + 8)) % x.len(), j));
        }
        let r = Correspondence::new(&x, &y, pairs).unwrap();
        prop_assert!(cross_from_correspondence(&x, &y, &r).is_ok());
    }

    #[test]
    fn json_round_trip_is_exact(x in space(6)) {
        prop_assert_eq!(space_from_json(&space_to_json(&x)).unwrap(), x);
    }

    #[test]
    fn coded_trees_are_real_trees(f in excursion()) {
        let t = code_tree(&f).unwrap();
        let scale = t.space.max_distance().max(1.0);
        prop_assert!(four_point_defect(&t.space).unwrap() <= 1e-9 * scale);

        // Mass is σ minus the last grid step (0 for f ≡ 0).
        let grid = f.grid();
        let s = grid.iter().position(|&g| g == sigma(&f)).unwrap();
        let expected = if s == 0 { 0.0 } else { grid[s - 1] };
        prop_assert!((t.space.total_mass() - expected).abs() <= 1e-12 * grid.len() as f64);

        let metric = TreeMetric::new(&f);
        for (p, &i) in t.representatives.iter().enumerate() {
            prop_assert_eq!(t.space.root_distance(p), f.values()[i]);
            for &j in &t.representatives[p + 1..] {
                prop_assert!(metric.distance(i, j).unwrap() > QUOTIENT_TOL * f.max_value());
            }
        }
        for (i, &p) in t.projection.iter().enumerate() {
            if i <= s {
                prop_assert_eq!(tree_distance(&f, i, t.representatives[p]).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn coded_trees_are_nearly_geodesic(f in excursion()) {
        let t = code_tree(&f).unwrap();
        let bound = 2.0 * f.max_slope() * f.max_step() + 1e-9 * t.space.max_distance().max(1.0);
        prop_assert!(midpoint_defect(&t.space) <= bound);
    }
}

#[test]
fn midpoint_ignores_root_and_labels() {
    let d = vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 2.0], vec![3.0, 2.0, 0.0]];
    let labels = |p: &str| (0..3).map(|i| format!("{p}{i}")).collect();
    let a = Space::new(labels("a"), d.clone(), 0, vec![1.0; 3]).unwrap();
    let b = Space::new(labels("b"), d, 2, vec![0.0; 3]).unwrap();
    assert_eq!(midpoint_defect(&a), midpoint_defect(&b));
}

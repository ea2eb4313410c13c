//! The property and oracle suites. Each numbered criterion builds its own
//! seeded inputs, checks every case, and records measured values.

use std::time::{Duration, Instant};

use ghp::diagnostics::four_point_defect;
use ghp::ghp::{curve_value_at, integrate_curve, CurveSegment};
use ghp::tree::CodedTree;
use ghp::{
    code_tree, evaluate_objective, ghp_compact, ghp_compact_seeded, ghp_extended, ghp_lower,
    hausdorff, inclusion_gluing, prokhorov_bruteforce, prokhorov_exact, stability_certificate,
    restrict, restriction_curve, time_correspondence, MeasureVec, SampledFunction,
    SearchConfig, Space, Subset,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{RunConfig, GENERATOR};
use crate::gen;

pub const SUITES: [&str; 4] = ["prokhorov-oracle", "ghp-properties", "tree-stability", "curve-integrity"];

#[derive(Debug, Clone, Serialize)]
pub struct Case {
    pub id: String,
    pub pass: bool,
    pub values: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub number: u32,
    pub title: &'static str,
    pub cases: Vec<Case>,
    pub elapsed_secs: f64,
    pub limit_secs: f64,
}

impl Criterion {
    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.pass).count()
    }

    pub fn within_time(&self) -> bool {
        self.elapsed_secs < self.limit_secs
    }

    pub fn passed(&self) -> bool {
        !self.cases.is_empty() && self.failures() == 0 && self.within_time()
    }

    /// One line: number, verdict, title, case count and runtime.
    pub fn summary(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let mut line = format!(
            "criterion {:>2} {verdict}  {}: {}/{} cases, {:.2}s (limit {}s)",
            self.number,
            self.title,
            self.cases.len() - self.failures(),
            self.cases.len(),
            self.elapsed_secs,
            self.limit_secs
        );
        if let Some(c) = self.cases.iter().find(|c| !c.pass) {
            line.push_str(&format!("; first failure {} {}", c.id, c.values));
        }
        line
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub generator: &'static str,
    pub tolerance_profile: String,
    pub passed: bool,
    pub criteria: Vec<Criterion>,
}

#[derive(Debug)]
pub struct UnknownSuite(pub String);

impl std::fmt::Display for UnknownSuite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "unknown suite {:?}; valid suites: {}", self.0, SUITES.join(", "))
    }
}

impl std::error::Error for UnknownSuite {}

pub fn criteria_of(suite: &str) -> Result<&'static [u32], UnknownSuite> {
    match suite {
        "prokhorov-oracle" => Ok(&[1, 2]),
        "ghp-properties" => Ok(&[3, 4, 5]),
        "tree-stability" => Ok(&[6, 7, 9]),
        "curve-integrity" => Ok(&[8, 10]),
        other => Err(UnknownSuite(other.to_string())),
    }
}

pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<SuiteReport, UnknownSuite> {
    let numbers = criteria_of(name)?;
    let criteria: Vec<Criterion> = numbers.iter().map(|&k| run_criterion(k, cfg)).collect();
    Ok(SuiteReport {
        suite: name.to_string(),
        seed: seed_of(cfg),
        generator: GENERATOR,
        tolerance_profile: cfg.tolerances.profile.to_string(),
        passed: criteria.iter().all(Criterion::passed),
        criteria,
    })
}

/// Runs one numbered criterion (1 to 10).
pub fn run_criterion(number: u32, cfg: &RunConfig) -> Criterion {
    let start = Instant::now();
    let (title, limit, cases) = match number {
        1 => ("Prokhorov max-flow equals brute force", 30, prokhorov_oracle(cfg)),
        2 => ("Prokhorov and Hausdorff metric axioms", 30, metric_axioms(cfg)),
        3 => ("GHP identity and certified toy values", 60, ghp_toy_values(cfg)),
        4 => ("GHP bound ordering", 300, bound_ordering(cfg)),
        5 => ("inclusion gluing of nested balls", 120, inclusion_witness(cfg)),
        6 => ("excursion stability certificate", 300, stability(cfg)),
        7 => ("four-point condition on coded trees", 60, four_point(cfg)),
        8 => ("extended distance integration", 60, extended_consistency(cfg)),
        9 => ("vanishing bump perturbation", 120, bump_convergence(cfg)),
        10 => ("restriction curve structure", 60, curve_structure(cfg)),
        _ => ("unknown criterion", 0, Vec::new()),
    };
    Criterion {
        number,
        title,
        cases,
        elapsed_secs: start.elapsed().as_secs_f64(),
        limit_secs: Duration::from_secs(limit).as_secs_f64(),
    }
}

fn seed_of(cfg: &RunConfig) -> u64 {
    cfg.seed.unwrap_or(7)
}

fn rng_for(cfg: &RunConfig, criterion: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed_of(cfg));
    rng.set_stream(criterion);
    rng
}

fn search(cfg: &RunConfig) -> SearchConfig {
    SearchConfig {
        seed: Some(seed_of(cfg)),
        ..cfg.search()
    }
}

fn case(id: impl Into<String>, pass: bool, values: Value) -> Case {
    Case {
        id: id.into(),
        pass,
        values,
    }
}

fn error_case(id: impl Into<String>, err: impl std::fmt::Display) -> Case {
    case(id, false, json!({ "error": err.to_string() }))
}

fn prokhorov_oracle(cfg: &RunConfig) -> Vec<Case> {
    let mut rng = rng_for(cfg, 1);
    (0..200)
        .map(|k| {
            let n = rng.gen_range(3..=8);
            let x = gen::random_space(&mut rng, n);
            let mu = MeasureVec::new(&x, gen::random_masses(&mut rng, n, 5.0)).unwrap();
            let nu = MeasureVec::new(&x, gen::random_masses(&mut rng, n, 5.0)).unwrap();
            let exact = prokhorov_exact(&x, &mu, &nu).unwrap().value;
            let brute = prokhorov_bruteforce(&x, &mu, &nu).unwrap();
            case(
                format!("space-{k}"),
                (exact - brute).abs() <= 1e-9,
                json!({ "points": n, "exact": exact, "bruteforce": brute }),
            )
        })
        .collect()
}

fn metric_axioms(cfg: &RunConfig) -> Vec<Case> {
    let mut rng = rng_for(cfg, 2);
    let mut cases = Vec::new();
    for k in 0..200 {
        let n = rng.gen_range(3..=8);
        let x = gen::random_space(&mut rng, n);
        let m: Vec<MeasureVec> = (0..3)
            .map(|_| MeasureVec::new(&x, gen::random_masses(&mut rng, n, 5.0)).unwrap())
            .collect();
        let p = |a: usize, b: usize| prokhorov_exact(&x, &m[a], &m[b]).unwrap().value;
        let (p01, p10, p12, p02) = (p(0, 1), p(1, 0), p(1, 2), p(0, 2));
        cases.push(case(
            format!("prokhorov-{k}"),
            p01 == p10 && p02 <= p01 + p12 + 1e-9,
            json!({ "d01": p01, "d10": p10, "d12": p12, "d02": p02 }),
        ));

        let s: Vec<Subset> = (0..3)
            .map(|_| Subset::new(&x, gen::random_subset(&mut rng, n)).unwrap())
            .collect();
        let h = |a: usize, b: usize| hausdorff(&x, &s[a], &s[b]).unwrap();
        let (h01, h10, h12, h02) = (h(0, 1), h(1, 0), h(1, 2), h(0, 2));
        cases.push(case(
            format!("hausdorff-{k}"),
            h01 == h10 && h02 <= h01 + h12 + 1e-9 && h(0, 0) == 0.0,
            json!({ "d01": h01, "d10": h10, "d12": h12, "d02": h02 }),
        ));
    }
    cases
}

fn ghp_toy_values(cfg: &RunConfig) -> Vec<Case> {
    let mut rng = rng_for(cfg, 3);
    let sc = search(cfg);
    let mut cases = Vec::new();
    for k in 0..50 {
        let n = rng.gen_range(1..=8);
        let x = gen::random_space(&mut rng, n);
        match ghp_compact(&x, &x, &sc) {
            Ok(b) => cases.push(case(
                format!("identity-{k}"),
                b.lower == 0.0 && b.upper == 0.0,
                json!({ "points": n, "lower": b.lower, "upper": b.upper }),
            )),
            Err(e) => cases.push(error_case(format!("identity-{k}"), e)),
        }
    }

    let x = Space::on_line(&[0.0, 1.0], 0, vec![0.0, 0.0]).unwrap();
    let y = Space::singleton(0.0).unwrap();
    let b = ghp_compact(&x, &y, &sc).unwrap();
    cases.push(case(
        "segment-vs-point",
        b.certified && (b.lower - 1.0).abs() <= 1e-9 && (b.upper - 1.0).abs() <= 1e-9,
        json!({ "lower": b.lower, "upper": b.upper, "certified": b.certified }),
    ));

    for k in 0..20 {
        let (a, c) = (rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0));
        let b = ghp_compact(&Space::singleton(a).unwrap(), &Space::singleton(c).unwrap(), &sc)
            .unwrap();
        let want = (a - c).abs();
        cases.push(case(
            format!("masses-{k}"),
            b.certified && (b.lower - want).abs() <= 1e-9 && (b.upper - want).abs() <= 1e-9,
            json!({ "a": a, "b": c, "lower": b.lower, "upper": b.upper }),
        ));
    }
    cases
}

fn bound_ordering(cfg: &RunConfig) -> Vec<Case> {
    let mut rng = rng_for(cfg, 4);
    let sc = search(cfg);
    (0..200)
        .map(|k| {
            let x = gen::random_space_upto(&mut rng, 6);
            let y = gen::random_space_upto(&mut rng, 6);
            let id = format!("pair-{k}");
            let b = match ghp_compact(&x, &y, &sc) {
                Ok(b) => b,
                Err(e) => return error_case(id, e),
            };
            let gh = ghp_lower(&x, &y, sc.exhaustive_budget).gromov_hausdorff;
            let gh_ok = gh.map_or(true, |g| b.upper >= g - 1e-9);
            case(
                id,
                b.lower <= b.upper && gh_ok,
                json!({
                    "sizes": [x.len(), y.len()],
                    "lower": b.lower,
                    "upper": b.upper,
                    "gromov_hausdorff": gh,
                }),
            )
        })
        .collect()
}

fn inclusion_witness(cfg: &RunConfig) -> Vec<Case> {
    let mut rng = rng_for(cfg, 5);
    (0..50)
        .map(|k| {
            let steps = 2 * rng.gen_range(16..=64);
            let h = 2.0 / steps as f64;
            let f = gen::lattice_function(&gen::dyck_heights(&mut rng, steps), h, h, 0);
            let tree = code_tree(&f).unwrap();
            let top = f.max_value();
            let r = rng.gen_range(0.0..=top);
            let eps = rng.gen_range(0.0..=0.5 * top).max(f64::MIN_POSITIVE);
            let g = inclusion_gluing(&tree.space, r, r + eps).unwrap();
            let value = evaluate_objective(&g.inner, &g.outer, &g.cross).unwrap();
            let bound = eps + g.annulus_mass + 2.0 * h + 1e-9;
            case(
                format!("tree-{k}"),
                value <= bound,
                json!({ "r": r, "eps": eps, "objective": value, "bound": bound, "grid_step": h }),
            )
        })
        .collect()
}

/// Pairs of lattice excursions on 64 to 256 samples: a rescaled copy, an
/// independent path (possibly on a finer grid), a copy with flipped peaks,
/// and a delayed copy.
pub fn stability_corpus(seed: u64) -> Vec<(SampledFunction, SampledFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(6);
    (0..500)
        .map(|k| {
            let samples = rng.gen_range(64..=256);
            let steps = (samples - 1) & !1;
            let pad = samples - 1 - steps;
            let h = rng.gen_range(0.005..0.05);
            let unit = h * rng.gen_range(0.25..4.0);
            let heights = gen::dyck_heights(&mut rng, steps);
            let f = gen::lattice_function(&heights, h, unit, pad);
            let g = match k % 4 {
                0 => {
                    let c = rng.gen_range(0.5..1.5);
                    SampledFunction::new(
                        f.grid().to_vec(),
                        f.values().iter().map(|v| c * v).collect(),
                    )
                    .unwrap()
                }
                1 => {
                    let other = rng.gen_range(64..=256);
                    let steps = (other - 1) & !1;
                    let hg = if rng.gen_bool(0.5) { h } else { h / 2.0 };
                    let hs = gen::dyck_heights(&mut rng, steps);
                    gen::lattice_function(&hs, hg, unit, other - 1 - steps)
                }
                2 => {
                    let flips = rng.gen_range(1..=6);
                    gen::lattice_function(&gen::flip_peaks(&mut rng, &heights, flips), h, unit, pad)
                }
                _ => {
                    let delay = rng.gen_range(1..=8);
                    let mut hs = vec![0i64; delay];
                    hs.extend(&heights);
                    gen::lattice_function(&hs, h, unit, pad)
                }
            };
            (f, g)
        })
        .collect()
}

fn stability(cfg: &RunConfig) -> Vec<Case> {
    stability_corpus(seed_of(cfg))
        .iter()
        .enumerate()
        .map(|(k, (f, g))| match stability_certificate(f, g) {
            Ok(c) => case(format!("pair-{k}"), c.ok, serde_json::to_value(c).unwrap()),
            Err(e) => error_case(format!("pair-{k}"), e),
        })
        .collect()
}

fn four_point(cfg: &RunConfig) -> Vec<Case> {
    let mut cases: Vec<Case> = stability_corpus(seed_of(cfg))
        .iter()
        .enumerate()
        .flat_map(|(k, (f, g))| [(format!("pair-{k}-f"), f), (format!("pair-{k}-g"), g)])
        .map(|(id, f)| {
            let tree = code_tree(f).unwrap();
            let scale = tree.space.max_distance().max(1.0);
            match four_point_defect(&tree.space) {
                Ok(d) => case(
                    id,
                    d <= 1e-9 * scale,
                    json!({ "points": tree.space.len(), "defect": d }),
                ),
                Err(e) => error_case(id, e),
            }
        })
        .collect();
    let d = vec![
        vec![0.0, 1.0, 2.0, 1.0],
        vec![1.0, 0.0, 1.0, 2.0],
        vec![2.0, 1.0, 0.0, 1.0],
        vec![1.0, 2.0, 1.0, 0.0],
    ];
    let square = Space::new((0..4).map(|i| i.to_string()).collect(), d, 0, vec![1.0; 4]).unwrap();
    let defect = four_point_defect(&square).unwrap();
    cases.push(case("four-cycle", defect == 2.0, json!({ "defect": defect })));
    cases
}

fn segment_value(curve: &[CurveSegment], r: f64) -> (f64, f64) {
    let seg = curve.iter().find(|s| s.contains(r)).expect("curve tiles [0, inf)");
    (seg.bound.lower.min(1.0), seg.bound.upper.min(1.0))
}

/// Trapezoid rule on 10^4 uniform nodes over `[0, 20]` merged with the
/// breakpoints, plus the exact tail beyond 20. The integrand is constant
/// in value on each `[lo, hi)`, so each panel uses the value at its left
/// node.
pub fn trapezoid(curve: &[CurveSegment]) -> (f64, f64) {
    const T: f64 = 20.0;
    let mut nodes: Vec<f64> = (0..=10_000).map(|i| T * i as f64 / 10_000.0).collect();
    nodes.extend(curve.iter().map(|s| s.r_lo).filter(|&r| r < T));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let (mut lo, mut up) = (0.0, 0.0);
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (vl, vu) = segment_value(curve, a);
        let panel = 0.5 * (b - a) * ((-a).exp() + (-b).exp());
        lo += panel * vl;
        up += panel * vu;
    }
    let (vl, vu) = segment_value(curve, T);
    (lo + (-T).exp() * vl, up + (-T).exp() * vu)
}

fn extended_consistency(cfg: &RunConfig) -> Vec<Case> {
    let mut rng = rng_for(cfg, 8);
    let sc = search(cfg);
    let mut cases = Vec::new();
    for k in 0..10 {
        let x = gen::random_space_upto(&mut rng, 6);
        let e = ghp_extended(&x, &x, &sc).unwrap();
        cases.push(case(
            format!("identity-{k}"),
            e.lower == 0.0 && e.upper == 0.0,
            json!({ "lower": e.lower, "upper": e.upper }),
        ));
    }
    for k in 0..20 {
        let (a, b) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
        let e = ghp_extended(&Space::singleton(a).unwrap(), &Space::singleton(b).unwrap(), &sc)
            .unwrap();
        let want = (a - b).abs().min(1.0);
        cases.push(case(
            format!("masses-{k}"),
            e.lower == want && e.upper == want,
            json!({ "a": a, "b": b, "lower": e.lower, "upper": e.upper }),
        ));
    }
    for k in 0..10 {
        let x = gen::random_space_upto(&mut rng, 5);
        let y = gen::random_space_upto(&mut rng, 5);
        let curve = restriction_curve(&x, &y, &sc).unwrap();
        let exact = integrate_curve(&curve);
        let (tl, tu) = trapezoid(&curve);
        cases.push(case(
            format!("quadrature-{k}"),
            (exact.lower - tl).abs() <= 1e-6 && (exact.upper - tu).abs() <= 1e-6,
            json!({
                "segments": curve.len(),
                "exact": [exact.lower, exact.upper],
                "trapezoid": [tl, tu],
            }),
        ));
    }
    cases
}

fn bump_convergence(cfg: &RunConfig) -> Vec<Case> {
    let sc = search(cfg).with_restarts(16, 1000);
    let f = gen::tent(8, 1.0);
    let tf = code_tree(&f).unwrap();
    let mut cases = Vec::new();
    let mut last = (f64::INFINITY, f64::INFINITY);
    for n in [1u32, 2, 4, 8, 16, 32] {
        let fnn = gen::bumped(&f, 1.0 / f64::from(n));
        let tn: CodedTree = code_tree(&fnn).unwrap();
        let seed = time_correspondence(&tn, &tf).unwrap();
        let compact = ghp_compact_seeded(&tn.space, &tf.space, &sc, &[seed]).unwrap();
        let extended = ghp_extended(&tn.space, &tf.space, &sc).unwrap();
        let values = (compact.upper, extended.upper);
        let decreasing = values.0 <= last.0 + 1e-12 && values.1 <= last.1 + 1e-12;
        let small = n < 32 || (values.0 < 0.05 && values.1 < 0.05);
        cases.push(case(
            format!("n-{n}"),
            decreasing && small,
            json!({ "n": n, "compact_upper": values.0, "extended_upper": values.1 }),
        ));
        last = values;
    }
    cases
}

fn curve_structure(cfg: &RunConfig) -> Vec<Case> {
    let mut rng = rng_for(cfg, 10);
    let sc = search(cfg);
    (0..20)
        .map(|k| {
            let x = gen::random_space_upto(&mut rng, 5);
            let y = gen::random_space_upto(&mut rng, 5);
            let curve = restriction_curve(&x, &y, &sc).unwrap();
            let tiles = curve.first().map(|s| s.r_lo) == Some(0.0)
                && curve.last().map(|s| s.r_hi) == Some(f64::INFINITY)
                && curve.windows(2).all(|w| w[0].r_hi == w[1].r_lo)
                && curve.iter().all(|s| s.r_lo < s.r_hi && s.contains(s.r_lo) && !s.contains(s.r_hi));
            let mut consistent = true;
            for s in &curve {
                let inside = if s.r_hi.is_finite() {
                    0.5 * (s.r_lo + s.r_hi)
                } else {
                    s.r_lo + 1.0
                };
                let at = curve_value_at(&x, &y, s.r_lo, &sc).unwrap();
                let mid = curve_value_at(&x, &y, inside, &sc).unwrap();
                let same_balls = restrict(&x, inside).unwrap() == restrict(&x, s.r_lo).unwrap()
                    && restrict(&y, inside).unwrap() == restrict(&y, s.r_lo).unwrap();
                consistent &= at.lower == s.bound.lower
                    && at.upper == s.bound.upper
                    && mid.upper == s.bound.upper
                    && same_balls;
            }
            case(
                format!("pair-{k}"),
                tiles && consistent,
                json!({ "segments": curve.len(), "tiles": tiles, "consistent": consistent }),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_lists_valid_names() {
        let err = run_suite("nope", &RunConfig::new(Some(1))).unwrap_err();
        let msg = err.to_string();
        assert!(SUITES.iter().all(|s| msg.contains(s)));
    }

    #[test]
    fn trapezoid_on_a_constant_curve() {
        let x = Space::singleton(1.0).unwrap();
        let y = Space::singleton(1.25).unwrap();
        let curve = restriction_curve(&x, &y, &SearchConfig::new(1)).unwrap();
        let (lo, up) = trapezoid(&curve);
        assert!((lo - 0.25).abs() < 1e-6 && (up - 0.25).abs() < 1e-6);
    }
}

//! Finite rooted weighted metric spaces and the set-level operations on them.
//!
//! A [`Space`] is a distance matrix over labeled points with a distinguished
//! root and a nonnegative mass per point. Construction always goes through
//! [`validate_space`], which reports every violated invariant at once.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the triangle inequality, scaled by the largest
/// distance entry.
pub const TRIANGLE_TOL: f64 = 1e-9;

/// Read access to a finite (pseudo-)metric.
///
/// Implemented by [`Space`] and by the glued union of two spaces
/// ([`crate::ghp::GluedSpace`]), so the Prokhorov routines run on either.
pub trait MetricView {
    fn len(&self) -> usize;

    fn dist(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A finite rooted weighted metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    labels: Vec<String>,
    n: usize,
    dist: Vec<f64>,
    root: usize,
    mass: Vec<f64>,
}

impl Serialize for Space {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_raw().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Space {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        validate_space(RawSpace::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// A point label as it appears in JSON: either a string or a number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawLabel {
    Text(String),
    Number(serde_json::Number),
}

impl RawLabel {
    fn into_string(self) -> String {
        match self {
            RawLabel::Text(s) => s,
            RawLabel::Number(n) => n.to_string(),
        }
    }
}

/// Unvalidated space data, mirroring the JSON file format.
///
/// Keys are declared in lexicographic order so serialization is canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpace {
    pub distances: Vec<Vec<f64>>,
    pub labels: Vec<RawLabel>,
    pub masses: Vec<f64>,
    pub root: i64,
}

/// One violated invariant found by [`validate_space`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Empty,
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    NonFiniteDistance { i: usize, j: usize },
    NegativeDistance { i: usize, j: usize },
    NonzeroDiagonal { i: usize },
    Asymmetry { i: usize, j: usize },
    Indefinite { i: usize, j: usize },
    TriangleViolation { i: usize, j: usize, k: usize },
    NegativeMass { i: usize },
    NonFiniteMass { i: usize },
    InvalidRoot { root: i64, len: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Empty => write!(f, "space has no points"),
            Violation::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "dimension mismatch: {what} has length {found}, expected {expected}"),
            Violation::NonFiniteDistance { i, j } => write!(f, "non-finite distance at ({i},{j})"),
            Violation::NegativeDistance { i, j } => write!(f, "negative distance at ({i},{j})"),
            Violation::NonzeroDiagonal { i } => write!(f, "nonzero diagonal at ({i},{i})"),
            Violation::Asymmetry { i, j } => write!(f, "asymmetry: d({i},{j}) != d({j},{i})"),
            Violation::Indefinite { i, j } => {
                write!(f, "definiteness: d({i},{j}) = 0 for distinct points")
            }
            Violation::TriangleViolation { i, j, k } => {
                write!(f, "triangle violation: d({i},{k}) > d({i},{j}) + d({j},{k})")
            }
            Violation::NegativeMass { i } => write!(f, "negative mass at {i}"),
            Violation::NonFiniteMass { i } => write!(f, "non-finite mass at {i}"),
            Violation::InvalidRoot { root, len } => {
                write!(f, "invalid root {root} for {len} points")
            }
        }
    }
}

/// Every invariant violation found in a candidate space.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// Checks every invariant of a rooted weighted metric space.
///
/// Returns the space if all hold, otherwise a report naming each violation
/// with its indices. Dimension problems are reported alone since the matrix
/// cannot be inspected further.
pub fn validate_space(raw: RawSpace) -> std::result::Result<Space, ValidationReport> {
    validate_space_with(raw, TRIANGLE_TOL)
}

/// [`validate_space`] with an explicit relative triangle tolerance.
pub fn validate_space_with(
    raw: RawSpace,
    triangle_tol: f64,
) -> std::result::Result<Space, ValidationReport> {
    let n = raw.distances.len();
    let mut report = ValidationReport::default();
    if n == 0 {
        report.violations.push(Violation::Empty);
        return Err(report);
    }
    for (what, found) in [("labels", raw.labels.len()), ("masses", raw.masses.len())] {
        if found != n {
            report.violations.push(Violation::DimensionMismatch {
                what,
                expected: n,
                found,
            });
        }
    }
    for row in &raw.distances {
        if row.len() != n {
            report.violations.push(Violation::DimensionMismatch {
                what: "distance row",
                expected: n,
                found: row.len(),
            });
        }
    }
    if !report.is_empty() {
        return Err(report);
    }

    let d = &raw.distances;
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v = d[i][j];
            if !v.is_finite() {
                report.violations.push(Violation::NonFiniteDistance { i, j });
                continue;
            }
            scale = scale.max(v);
            if v < 0.0 {
                report.violations.push(Violation::NegativeDistance { i, j });
            }
            if i == j && v != 0.0 {
                report.violations.push(Violation::NonzeroDiagonal { i });
            }
            if i < j {
                if v != d[j][i] {
                    report.violations.push(Violation::Asymmetry { i, j });
                }
                if v == 0.0 {
                    report.violations.push(Violation::Indefinite { i, j });
                }
            }
        }
    }
    // Triangle checks only make sense on finite entries.
    if !report
        .violations
        .iter()
        .any(|v| matches!(v, Violation::NonFiniteDistance { .. }))
    {
        let tol = triangle_tol * scale;
        for i in 0..n {
            for k in (i + 1)..n {
                for j in 0..n {
                    if j != i && j != k && d[i][k] > d[i][j] + d[j][k] + tol {
                        report.violations.push(Violation::TriangleViolation { i, j, k });
                    }
                }
            }
        }
    }
    for (i, &m) in raw.masses.iter().enumerate() {
        if !m.is_finite() {
            report.violations.push(Violation::NonFiniteMass { i });
        } else if m < 0.0 {
            report.violations.push(Violation::NegativeMass { i });
        }
    }
    if raw.root < 0 || raw.root as usize >= n {
        report.violations.push(Violation::InvalidRoot { root: raw.root, len: n });
    }
    if !report.is_empty() {
        return Err(report);
    }
    Ok(Space {
        labels: raw.labels.into_iter().map(RawLabel::into_string).collect(),
        n,
        dist: raw.distances.into_iter().flatten().collect(),
        root: raw.root as usize,
        mass: raw.masses,
    })
}

impl Space {
    /// Builds and validates a space from labels, a full distance matrix, a
    /// root index and masses.
    pub fn new(
        labels: Vec<String>,
        distances: Vec<Vec<f64>>,
        root: usize,
        masses: Vec<f64>,
    ) -> Result<Space> {
        validate_space(RawSpace {
            distances,
            labels: labels.into_iter().map(RawLabel::Text).collect(),
            masses,
            root: root as i64,
        })
        .map_err(Error::InvalidSpace)
    }

    /// Points on the real line at the given coordinates, labeled by index.
    pub fn on_line(coords: &[f64], root: usize, masses: Vec<f64>) -> Result<Space> {
        let distances = coords
            .iter()
            .map(|a| coords.iter().map(|b| (a - b).abs()).collect())
            .collect();
        Space::new(index_labels(coords.len()), distances, root, masses)
    }

    /// A single massive point.
    pub fn singleton(mass: f64) -> Result<Space> {
        Space::new(vec!["0".into()], vec![vec![0.0]], 0, vec![mass])
    }

    pub fn to_raw(&self) -> RawSpace {
        RawSpace {
            distances: self.dist.chunks(self.n).map(<[f64]>::to_vec).collect(),
            labels: self.labels.iter().cloned().map(RawLabel::Text).collect(),
            masses: self.mass.clone(),
            root: self.root as i64,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.mass[i]
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn root_distance(&self, i: usize) -> f64 {
        self.dist(self.root, i)
    }

    /// Largest entry of the distance matrix.
    pub fn max_distance(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Sorted distinct distances from the root, starting with 0.
    pub fn root_distance_breakpoints(&self) -> Vec<f64> {
        sorted_distinct(self.row(self.root).iter().copied())
    }

    /// Indices of the closed ball of radius `r` around the root, ascending.
    pub fn ball_indices(&self, r: f64) -> Vec<usize> {
        (0..self.n).filter(|&i| self.root_distance(i) <= r).collect()
    }

    /// Induced sub-space on the given ascending index list, which must
    /// contain the root.
    pub(crate) fn induced(&self, keep: &[usize]) -> Space {
        let m = keep.len();
        let mut dist = Vec::with_capacity(m * m);
        for &i in keep {
            for &j in keep {
                dist.push(self.dist(i, j));
            }
        }
        let root = keep
            .iter()
            .position(|&i| i == self.root)
            .expect("induced sub-space must keep the root");
        Space {
            labels: keep.iter().map(|&i| self.labels[i].clone()).collect(),
            n: m,
            dist,
            root,
            mass: keep.iter().map(|&i| self.mass[i]).collect(),
        }
    }

    /// Stable 64-bit fingerprint of the geometry, root and masses.
    pub fn fingerprint(&self) -> u64 {
        // FNV-1a over the bit patterns; independent of the std hasher seed.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        eat(self.n as u64);
        eat(self.root as u64);
        for v in self.dist.iter().chain(&self.mass) {
            eat(v.to_bits());
        }
        h
    }
}

impl MetricView for Space {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }
}

pub(crate) fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

pub(crate) fn sorted_distinct(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// A set of point indices into a host space, stored ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Subset {
    indices: Vec<usize>,
}

impl Subset {
    /// Validates indices against a host of `len` points; duplicates are an
    /// error.
    pub fn new(host: &impl MetricView, indices: impl IntoIterator<Item = usize>) -> Result<Subset> {
        let len = host.len();
        let mut v: Vec<usize> = indices.into_iter().collect();
        if let Some(&index) = v.iter().find(|&&i| i >= len) {
            return Err(Error::IndexOutOfRange { index, len });
        }
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateIndex(w[0]));
        }
        Ok(Subset { indices: v })
    }

    pub fn all(host: &impl MetricView) -> Subset {
        Subset {
            indices: (0..host.len()).collect(),
        }
    }

    pub fn empty() -> Subset {
        Subset::default()
    }

    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Subset {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Subset { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }
}

/// A nonnegative mass vector over the points of a host space.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureVec {
    mass: Vec<f64>,
}

impl MeasureVec {
    pub fn new(host: &impl MetricView, mass: Vec<f64>) -> Result<MeasureVec> {
        if mass.len() != host.len() {
            return Err(Error::MeasureLength {
                expected: host.len(),
                found: mass.len(),
            });
        }
        check_masses(&mass)?;
        Ok(MeasureVec { mass })
    }

    /// The space's own measure.
    pub fn of(space: &Space) -> MeasureVec {
        MeasureVec {
            mass: space.mass.clone(),
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Mass of a subset.
    pub fn of_subset(&self, a: &Subset) -> f64 {
        a.indices().iter().map(|&i| self.mass[i]).sum()
    }

    /// The restriction to the closed ball of radius `r` around the root of
    /// `space`; masses outside are zeroed.
    pub fn restricted(&self, space: &Space, r: f64) -> MeasureVec {
        MeasureVec {
            mass: self
                .mass
                .iter()
                .enumerate()
                .map(|(i, &m)| if space.root_distance(i) <= r { m } else { 0.0 })
                .collect(),
        }
    }
}

pub(crate) fn check_masses(mass: &[f64]) -> Result<()> {
    match mass.iter().position(|m| !(m.is_finite() && *m >= 0.0)) {
        Some(index) => Err(Error::InvalidMass {
            index,
            value: mass[index],
        }),
        None => Ok(()),
    }
}

/// The ε-halo of `a`: points at distance strictly less than `eps` from `a`.
///
/// The halo of the empty set is empty.
pub fn halo(space: &impl MetricView, a: &Subset, eps: f64) -> Result<Subset> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter { name: "eps", value: eps });
    }
    let out = (0..space.len())
        .filter(|&i| a.indices().iter().any(|&j| space.dist(i, j) < eps))
        .collect();
    Ok(Subset::from_sorted_unchecked(out))
}

/// Restriction to the closed ball of radius `r` around the root, keeping
/// induced distances, the root and the masses of surviving points.
pub fn restrict(space: &Space, r: f64) -> Result<Space> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter { name: "r", value: r });
    }
    Ok(space.induced(&space.ball_indices(r)))
}

/// Largest pairwise distance over `subset`, or over the whole space when
/// `None`. Zero for singletons and for the empty subset.
pub fn diameter(space: &impl MetricView, subset: Option<&Subset>) -> f64 {
    let all;
    let idx = match subset {
        Some(s) => s.indices(),
        None => {
            all = (0..space.len()).collect::<Vec<_>>();
            &all
        }
    };
    let mut best = 0.0f64;
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            best = best.max(space.dist(i, j));
        }
    }
    best
}

/// Greedy farthest-point ε-net containing the root.
///
/// Starts from the root and keeps adding the point farthest from the current
/// net (lowest index on ties) while that distance is at least `eps`. Every
/// point of the space ends up strictly within `eps` of the result.
pub fn greedy_net(space: &Space, eps: f64) -> Result<Subset> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter { name: "eps", value: eps });
    }
    let n = space.len();
    let mut net = vec![space.root()];
    let mut gap: Vec<f64> = space.row(space.root()).to_vec();
    loop {
        let (far, d) = gap
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, d)| if d > best.1 { (i, d) } else { best });
        if n == 0 || d < eps {
            break;
        }
        net.push(far);
        for (g, &dj) in gap.iter_mut().zip(space.row(far)) {
            *g = g.min(dj);
        }
    }
    net.sort_unstable();
    Ok(Subset::from_sorted_unchecked(net))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(coords: &[f64]) -> Space {
        Space::on_line(coords, 0, vec![1.0; coords.len()]).unwrap()
    }

    fn raw(d: Vec<Vec<f64>>, root: i64, masses: Vec<f64>) -> RawSpace {
        let n = d.len();
        RawSpace {
            distances: d,
            labels: (0..n).map(|i| RawLabel::Text(i.to_string())).collect(),
            masses,
            root,
        }
    }

    #[test]
    fn singleton_is_valid() {
        let s = validate_space(raw(vec![vec![0.0]], 0, vec![1.0])).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.total_mass(), 1.0);
    }

    #[test]
    fn line_is_valid() {
        let s = line(&[0.0, 1.0, 3.0]);
        assert_eq!(s.dist(0, 2), 3.0);
    }

    #[test]
    fn triangle_violation_is_named() {
        let d = vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ];
        let err = validate_space(raw(d, 0, vec![1.0; 3])).unwrap_err();
        assert_eq!(
            err.violations,
            vec![Violation::TriangleViolation { i: 0, j: 1, k: 2 }]
        );
    }

    #[test]
    fn each_error_kind_is_distinct() {
        let err = validate_space(raw(vec![vec![0.0, 1.0]], 0, vec![1.0])).unwrap_err();
        assert!(matches!(err.violations[0], Violation::DimensionMismatch { .. }));

        let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        let err = validate_space(raw(asym, 0, vec![1.0, 1.0])).unwrap_err();
        assert!(err.violations.contains(&Violation::Asymmetry { i: 0, j: 1 }));

        let ok = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let err = validate_space(raw(ok.clone(), 0, vec![1.0, -1.0])).unwrap_err();
        assert_eq!(err.violations, vec![Violation::NegativeMass { i: 1 }]);

        let err = validate_space(raw(ok.clone(), 2, vec![1.0, 1.0])).unwrap_err();
        assert_eq!(err.violations, vec![Violation::InvalidRoot { root: 2, len: 2 }]);

        let zero = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        let err = validate_space(raw(zero, 0, vec![1.0, 1.0])).unwrap_err();
        assert_eq!(err.violations, vec![Violation::Indefinite { i: 0, j: 1 }]);

        let nan = vec![vec![0.0, f64::NAN], vec![f64::NAN, 0.0]];
        let err = validate_space(raw(nan, 0, vec![1.0, 1.0])).unwrap_err();
        assert!(err.violations.contains(&Violation::NonFiniteDistance { i: 0, j: 1 }));
    }

    #[test]
    fn halo_is_strict() {
        let s = line(&[0.0, 1.0, 3.0]);
        let a = Subset::new(&s, [0]).unwrap();
        assert_eq!(halo(&s, &a, 1.0).unwrap().indices(), &[0]);
        assert_eq!(halo(&s, &a, 1.5).unwrap().indices(), &[0, 1]);
        let all = Subset::all(&s);
        assert_eq!(halo(&s, &all, 0.01).unwrap(), all);
        assert!(halo(&s, &Subset::empty(), 1.0).unwrap().is_empty());
    }

    #[test]
    fn restrict_closed_ball() {
        let s = line(&[0.0, 1.0, 2.0]);
        let r = restrict(&s, 1.0).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.masses(), &[1.0, 1.0]);
        assert_eq!(restrict(&s, 5.0).unwrap(), s);
        let z = restrict(&s, 0.0).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(z.masses(), &[1.0]);
    }

    #[test]
    fn restrict_keeps_non_first_root() {
        let s = Space::on_line(&[0.0, 1.0, 2.0], 2, vec![1.0, 2.0, 3.0]).unwrap();
        let r = restrict(&s, 1.0).unwrap();
        assert_eq!(r.labels(), &["1".to_string(), "2".to_string()]);
        assert_eq!(r.root(), 1);
        assert_eq!(r.masses(), &[2.0, 3.0]);
    }

    #[test]
    fn diameters() {
        assert_eq!(diameter(&Space::singleton(1.0).unwrap(), None), 0.0);
        let s = line(&[0.0, 1.0, 3.0]);
        assert_eq!(diameter(&s, None), 3.0);
        let sub = Subset::new(&s, [1, 2]).unwrap();
        assert_eq!(diameter(&s, Some(&sub)), 2.0);
        assert_eq!(diameter(&s, Some(&Subset::empty())), 0.0);
    }

    #[test]
    fn greedy_net_examples() {
        let s = line(&[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(greedy_net(&s, 10.0).unwrap().indices(), &[0]);
        assert_eq!(greedy_net(&s, 1.1).unwrap().indices(), &[0, 3]);
        assert_eq!(greedy_net(&s, 0.5).unwrap().indices(), &[0, 1, 2, 3]);
    }

    #[test]
    fn measure_checks() {
        let s = line(&[0.0, 1.0]);
        assert!(matches!(
            MeasureVec::new(&s, vec![1.0]),
            Err(Error::MeasureLength { expected: 2, found: 1 })
        ));
        assert!(matches!(
            MeasureVec::new(&s, vec![1.0, -0.5]),
            Err(Error::InvalidMass { index: 1, .. })
        ));
    }
}

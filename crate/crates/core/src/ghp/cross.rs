//! Gluings of two spaces: cross-distance matrices defining a pseudo-metric
//! on the disjoint union, and the objective `d(root_X, root_Y) + d_H + d_P`
//! evaluated inside that union.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ghp::correspondence::Correspondence;
use crate::prokhorov::Bipartite;
use crate::space::{MetricView, Space};

/// Relative tolerance of the mixed triangle inequalities.
pub const MIXED_TRIANGLE_TOL: f64 = 1e-9;

/// Cross distances `c[i][j]` between the points of `X` (rows) and `Y`
/// (columns). Zeros are allowed, so the glued object is a pseudo-metric.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossMetric {
    rows: usize,
    cols: usize,
    left: u64,
    right: u64,
    data: Vec<f64>,
}

impl Serialize for CrossMetric {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.data.chunks(self.cols.max(1)))
    }
}

impl CrossMetric {
    /// Validates dimensions, finiteness, nonnegativity and the mixed
    /// triangle inequalities.
    pub fn new(x: &Space, y: &Space, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != x.len() || rows.iter().any(|r| r.len() != y.len()) {
            return Err(Error::InvalidCrossMetric(format!(
                "expected a {}x{} matrix",
                x.len(),
                y.len()
            )));
        }
        let c = CrossMetric::unchecked(x, y, rows.into_iter().flatten().collect());
        c.validate(x, y)?;
        Ok(c)
    }

    pub(crate) fn unchecked(x: &Space, y: &Space, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), x.len() * y.len());
        CrossMetric {
            rows: x.len(),
            cols: y.len(),
            left: x.fingerprint(),
            right: y.fingerprint(),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub(crate) fn data(&self) -> &[f64] {
        &self.data
    }

    /// Errors unless this matrix was built for exactly `x` and `y`.
    pub fn check_spaces(&self, x: &Space, y: &Space) -> Result<()> {
        if self.left != x.fingerprint() || self.right != y.fingerprint() {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    fn validate(&self, x: &Space, y: &Space) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidCrossMetric(msg));
        let scale = self
            .data
            .iter()
            .copied()
            .fold(x.max_distance().max(y.max_distance()), f64::max);
        let tol = MIXED_TRIANGLE_TOL * scale.max(1.0);
        for (k, &v) in self.data.iter().enumerate() {
            if !(v.is_finite() && v >= 0.0) {
                return invalid(format!("entry ({},{}) = {v}", k / self.cols, k % self.cols));
            }
        }
        for j in 0..self.cols {
            for i in 0..self.rows {
                for i2 in (i + 1)..self.rows {
                    if (self.get(i, j) - self.get(i2, j)).abs() > x.dist(i, i2) + tol {
                        return invalid(format!("|c({i},{j}) - c({i2},{j})| > d_X({i},{i2})"));
                    }
                }
            }
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                for j2 in (j + 1)..self.cols {
                    if (self.get(i, j) - self.get(i, j2)).abs() > y.dist(j, j2) + tol {
                        return invalid(format!("|c({i},{j}) - c({i},{j2})| > d_Y({j},{j2})"));
                    }
                }
            }
        }
        Ok(())
    }

    /// The transposed gluing, from `Y` to `X`.
    pub fn transposed(&self) -> CrossMetric {
        let mut data = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        CrossMetric {
            rows: self.cols,
            cols: self.rows,
            left: self.right,
            right: self.left,
            data,
        }
    }
}

/// The disjoint union `X ⊔ Y` under a gluing; indices `0..|X|` are the
/// points of `X`, the rest those of `Y`.
#[derive(Debug, Clone, Copy)]
pub struct GluedSpace<'a> {
    pub x: &'a Space,
    pub y: &'a Space,
    pub cross: &'a CrossMetric,
}

impl<'a> GluedSpace<'a> {
    pub fn new(x: &'a Space, y: &'a Space, cross: &'a CrossMetric) -> Result<Self> {
        cross.check_spaces(x, y)?;
        Ok(GluedSpace { x, y, cross })
    }

    /// The measure of `X` padded with zeros on `Y`, and vice versa.
    pub fn measures(&self) -> (Vec<f64>, Vec<f64>) {
        let (nx, ny) = (self.x.len(), self.y.len());
        let mut mu = self.x.masses().to_vec();
        mu.resize(nx + ny, 0.0);
        let mut nu = vec![0.0; nx];
        nu.extend_from_slice(self.y.masses());
        (mu, nu)
    }
}

impl MetricView for GluedSpace<'_> {
    fn len(&self) -> usize {
        self.x.len() + self.y.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        let nx = self.x.len();
        match (i < nx, j < nx) {
            (true, true) => self.x.dist(i, j),
            (false, false) => self.y.dist(i - nx, j - nx),
            (true, false) => self.cross.get(i, j - nx),
            (false, true) => self.cross.get(j, i - nx),
        }
    }
}

/// `c[i][j] = min over (i', j') in R of d_X(i, i') + d_Y(j, j') + dis(R)/2`.
pub fn cross_from_correspondence(x: &Space, y: &Space, r: &Correspondence) -> Result<CrossMetric> {
    r.check_against(x, y)?;
    let c = CrossMetric::unchecked(x, y, cross_data(x, y, r.pairs(), r.distortion()));
    c.validate(x, y)?;
    Ok(c)
}

pub(crate) fn cross_data(x: &Space, y: &Space, pairs: &[(usize, usize)], dis: f64) -> Vec<f64> {
    let (nx, ny) = (x.len(), y.len());
    let half = 0.5 * dis;
    let mut data = vec![f64::INFINITY; nx * ny];
    let mut from_x = vec![0.0; pairs.len()];
    for i in 0..nx {
        let rx = x.row(i);
        for (p, &(i2, _)) in pairs.iter().enumerate() {
            from_x[p] = rx[i2];
        }
        let out = &mut data[i * ny..(i + 1) * ny];
        for (j, slot) in out.iter_mut().enumerate() {
            let ry = y.row(j);
            let mut best = f64::INFINITY;
            for (p, &(_, j2)) in pairs.iter().enumerate() {
                best = best.min(from_x[p] + ry[j2]);
            }
            *slot = best + half;
        }
    }
    data
}

/// The three terms of the gluing objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Objective {
    pub root: f64,
    pub hausdorff: f64,
    pub prokhorov: f64,
    pub total: f64,
}

pub(crate) fn cross_hausdorff(data: &[f64], rows: usize, cols: usize) -> f64 {
    let mut row_min = vec![f64::INFINITY; rows];
    let mut col_min = vec![f64::INFINITY; cols];
    for i in 0..rows {
        for j in 0..cols {
            let v = data[i * cols + j];
            row_min[i] = row_min[i].min(v);
            col_min[j] = col_min[j].min(v);
        }
    }
    row_min.into_iter().chain(col_min).fold(0.0, f64::max)
}

pub(crate) fn objective_of(x: &Space, y: &Space, data: &[f64]) -> Objective {
    let root = data[x.root() * y.len() + y.root()];
    let hausdorff = cross_hausdorff(data, x.len(), y.len());
    let prokhorov = Bipartite::on_cross(data, y.len(), x.masses(), y.masses()).solve().value;
    Objective {
        root,
        hausdorff,
        prokhorov,
        total: root + hausdorff + prokhorov,
    }
}

/// `c(root_X, root_Y) + d_H(X, Y) + d_P(μ_X, μ_Y)` in the glued union.
///
/// With zero cross-distances the union is only a pseudo-metric; the value is
/// then the limit of the objective over genuine metrics `c + δ` as `δ → 0`.
pub fn evaluate_objective(x: &Space, y: &Space, c: &CrossMetric) -> Result<f64> {
    Ok(objective_parts(x, y, c)?.total)
}

/// [`evaluate_objective`] with the individual terms.
pub fn objective_parts(x: &Space, y: &Space, c: &CrossMetric) -> Result<Objective> {
    c.check_spaces(x, y)?;
    Ok(objective_of(x, y, c.data()))
}

/// Composes gluings `X1–X2` and `X2–X3` into `X1–X3` through the shared
/// middle space: `c13[i][k] = min_j c12[i][j] + c23[j][k]`.
pub fn compose_cross(c12: &CrossMetric, c23: &CrossMetric) -> Result<CrossMetric> {
    if c12.right != c23.left || c12.cols != c23.rows {
        return Err(Error::SpaceMismatch);
    }
    let (n1, n2, n3) = (c12.rows, c12.cols, c23.cols);
    let mut data = vec![f64::INFINITY; n1 * n3];
    for i in 0..n1 {
        for j in 0..n2 {
            let a = c12.get(i, j);
            for k in 0..n3 {
                let v = a + c23.get(j, k);
                let slot = &mut data[i * n3 + k];
                if v < *slot {
                    *slot = v;
                }
            }
        }
    }
    Ok(CrossMetric {
        rows: n1,
        cols: n3,
        left: c12.left,
        right: c23.right,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prokhorov::prokhorov_bruteforce;
    use crate::space::MeasureVec;

    fn seg(d: f64) -> Space {
        Space::on_line(&[0.0, d], 0, vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn identity_gluing() {
        let x = Space::on_line(&[0.0, 1.0, 3.0], 0, vec![1.0, 2.0, 0.5]).unwrap();
        let r = Correspondence::identity(&x, &x).unwrap();
        assert_eq!(r.distortion(), 0.0);
        let c = cross_from_correspondence(&x, &x, &r).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c.get(i, j), x.dist(i, j));
            }
        }
        assert_eq!(evaluate_objective(&x, &x, &c).unwrap(), 0.0);
    }

    #[test]
    fn segment_vs_point() {
        let x = seg(1.0);
        let y = Space::singleton(0.0).unwrap();
        let r = Correspondence::new(&x, &y, [(0, 0), (1, 0)]).unwrap();
        let c = cross_from_correspondence(&x, &y, &r).unwrap();
        assert_eq!(c.to_rows(), vec![vec![0.5], vec![0.5]]);
        let o = objective_parts(&x, &y, &c).unwrap();
        assert_eq!((o.root, o.hausdorff, o.prokhorov, o.total), (0.5, 0.5, 0.0, 1.0));
    }

    #[test]
    fn two_segments() {
        let (x, y) = (seg(1.0), seg(3.0));
        let r = Correspondence::new(&x, &y, [(0, 0), (1, 1)]).unwrap();
        let c = cross_from_correspondence(&x, &y, &r).unwrap();
        assert_eq!(c.get(0, 0), 1.0);
    }

    #[test]
    fn one_point_masses_limit() {
        // Gluing at distance t gives 2t + d_P; the d_P term at t = 0 is the
        // mass gap, confirmed by brute force on the glued union.
        let x = Space::singleton(1.0).unwrap();
        let y = Space::singleton(3.0).unwrap();
        for t in [0.5, 0.1, 0.0] {
            let c = CrossMetric::new(&x, &y, vec![vec![t]]).unwrap();
            let o = objective_parts(&x, &y, &c).unwrap();
            let glued = GluedSpace::new(&x, &y, &c).unwrap();
            let (mu, nu) = glued.measures();
            let brute = prokhorov_bruteforce(
                &glued,
                &MeasureVec::new(&glued, mu).unwrap(),
                &MeasureVec::new(&glued, nu).unwrap(),
            )
            .unwrap();
            assert_eq!(o.prokhorov, brute);
            assert!((o.total - (2.0 * t + 2.0)).abs() < 1e-12, "t={t}: {o:?}");
        }
    }

    #[test]
    fn compose_singletons_and_identity() {
        let p = Space::singleton(1.0).unwrap();
        let one = CrossMetric::new(&p, &p, vec![vec![1.0]]).unwrap();
        assert_eq!(compose_cross(&one, &one).unwrap().get(0, 0), 2.0);

        let x = Space::on_line(&[0.0, 1.0, 3.0], 0, vec![1.0; 3]).unwrap();
        let id = cross_from_correspondence(&x, &x, &Correspondence::identity(&x, &x).unwrap())
            .unwrap();
        let c = compose_cross(&id, &id).unwrap();
        assert_eq!(c, id);
    }

    #[test]
    fn compose_rejects_middle_mismatch() {
        let a = Space::singleton(1.0).unwrap();
        let b = Space::singleton(2.0).unwrap();
        let ab = CrossMetric::new(&a, &b, vec![vec![1.0]]).unwrap();
        let aa = CrossMetric::new(&a, &a, vec![vec![1.0]]).unwrap();
        assert!(matches!(compose_cross(&ab, &aa), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn mixed_triangle_is_validated() {
        let x = seg(1.0);
        let y = Space::singleton(0.0).unwrap();
        assert!(CrossMetric::new(&x, &y, vec![vec![0.0], vec![3.0]]).is_err());
        assert!(CrossMetric::new(&x, &y, vec![vec![0.0]]).is_err());
        assert!(CrossMetric::new(&x, &y, vec![vec![-1.0], vec![0.0]]).is_err());
    }

    #[test]
    fn objective_checks_spaces() {
        let x = seg(1.0);
        let y = Space::singleton(0.0).unwrap();
        let c = CrossMetric::new(&x, &y, vec![vec![0.5], vec![0.5]]).unwrap();
        assert!(matches!(evaluate_objective(&y, &x, &c), Err(Error::SpaceMismatch)));
    }
}

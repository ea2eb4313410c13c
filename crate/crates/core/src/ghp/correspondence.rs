use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::Space;

/// A relation between the points of two spaces whose projections are onto
/// and which contains the root pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correspondence {
    pairs: Vec<(usize, usize)>,
    distortion: f64,
}

impl Correspondence {
    pub fn new(x: &Space, y: &Space, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        check_pairs(x, y, &pairs)?;
        let distortion = distortion(x, y, &pairs);
        Ok(Correspondence { pairs, distortion })
    }

    /// Pairs every point with the same index; `x` and `y` must have equal
    /// sizes and roots.
    pub fn identity(x: &Space, y: &Space) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidCorrespondence(format!(
                "identity needs equal sizes, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        Correspondence::new(x, y, (0..x.len()).map(|i| (i, i)))
    }

    /// Caller guarantees sorted, deduplicated, valid pairs.
    pub(crate) fn from_valid(x: &Space, y: &Space, pairs: Vec<(usize, usize)>) -> Self {
        debug_assert!(check_pairs(x, y, &pairs).is_ok());
        let distortion = distortion(x, y, &pairs);
        Correspondence { pairs, distortion }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn distortion(&self) -> f64 {
        self.distortion
    }

    /// The same relation seen from `y` to `x`.
    pub fn transposed(&self) -> Correspondence {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(i, j)| (j, i)).collect();
        pairs.sort_unstable();
        Correspondence {
            pairs,
            distortion: self.distortion,
        }
    }

    pub(crate) fn check_against(&self, x: &Space, y: &Space) -> Result<()> {
        check_pairs(x, y, &self.pairs)
    }
}

pub(crate) fn check_pairs(x: &Space, y: &Space, pairs: &[(usize, usize)]) -> Result<()> {
    let invalid = |msg: String| Err(Error::InvalidCorrespondence(msg));
    let mut seen_x = vec![false; x.len()];
    let mut seen_y = vec![false; y.len()];
    for &(i, j) in pairs {
        if i >= x.len() || j >= y.len() {
            return invalid(format!("pair ({i},{j}) out of range"));
        }
        seen_x[i] = true;
        seen_y[j] = true;
    }
    if let Some(i) = seen_x.iter().position(|s| !s) {
        return invalid(format!("point {i} of the first space is not covered"));
    }
    if let Some(j) = seen_y.iter().position(|s| !s) {
        return invalid(format!("point {j} of the second space is not covered"));
    }
    if !pairs.contains(&(x.root(), y.root())) {
        return invalid("root pair missing".into());
    }
    Ok(())
}

/// `max |d_X(i, i') − d_Y(j, j')|` over all pairs of pairs.
pub fn distortion(x: &Space, y: &Space, pairs: &[(usize, usize)]) -> f64 {
    let mut worst = 0.0f64;
    for (a, &(i, j)) in pairs.iter().enumerate() {
        let (rx, ry) = (x.row(i), y.row(j));
        for &(i2, j2) in &pairs[a + 1..] {
            worst = worst.max((rx[i2] - ry[j2]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coverage_and_root_are_checked() {
        let x = Space::on_line(&[0.0, 1.0], 0, vec![0.0; 2]).unwrap();
        let y = Space::singleton(0.0).unwrap();
        assert!(Correspondence::new(&x, &y, [(0, 0)]).is_err());
        assert!(Correspondence::new(&x, &y, [(1, 0)]).is_err());
        let r = Correspondence::new(&x, &y, [(0, 0), (1, 0)]).unwrap();
        assert_eq!(r.distortion(), 1.0);
        let x2 = Space::on_line(&[0.0, 1.0], 1, vec![0.0; 2]).unwrap();
        let y2 = Space::on_line(&[0.0, 3.0], 0, vec![0.0; 2]).unwrap();
        assert!(Correspondence::new(&x2, &y2, [(0, 0), (1, 1)]).is_err());
    }

    #[test]
    fn two_point_distortion() {
        let x = Space::on_line(&[0.0, 1.0], 0, vec![0.0; 2]).unwrap();
        let y = Space::on_line(&[0.0, 3.0], 0, vec![0.0; 2]).unwrap();
        let r = Correspondence::new(&x, &y, [(0, 0), (1, 1)]).unwrap();
        assert_eq!(r.distortion(), 2.0);
        assert_eq!(r.transposed().pairs(), &[(0, 0), (1, 1)]);
    }
}

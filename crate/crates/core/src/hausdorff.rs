use crate::error::{Error, Result};
use crate::space::{MetricView, Subset};

/// Hausdorff distance between two nonempty subsets of a common space.
///
/// Under strict halos the defining infimum is not attained; the value
/// returned is that infimum, `max(sup_a d(a, B), sup_b d(b, A))`.
pub fn hausdorff(space: &impl MetricView, a: &Subset, b: &Subset) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySubset);
    }
    let one_sided = |from: &Subset, to: &Subset| {
        from.indices()
            .iter()
            .map(|&i| {
                to.indices()
                    .iter()
                    .map(|&j| space.dist(i, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(one_sided(a, b).max(one_sided(b, a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;

    #[test]
    fn line_examples() {
        let s = Space::on_line(&[0.0, 1.0, 3.0], 0, vec![1.0; 3]).unwrap();
        let sub = |v: &[usize]| Subset::new(&s, v.iter().copied()).unwrap();
        assert_eq!(hausdorff(&s, &sub(&[0, 1]), &sub(&[0, 1])).unwrap(), 0.0);
        assert_eq!(hausdorff(&s, &sub(&[0, 1]), &sub(&[2])).unwrap(), 3.0);
        assert_eq!(hausdorff(&s, &sub(&[0, 2]), &sub(&[1])).unwrap(), 2.0);
    }

    #[test]
    fn empty_is_rejected() {
        let s = Space::singleton(1.0).unwrap();
        let err = hausdorff(&s, &Subset::empty(), &Subset::all(&s)).unwrap_err();
        assert_eq!(err.to_string(), "Hausdorff undefined for empty set");
    }
}

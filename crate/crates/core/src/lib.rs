//! Distances between finite rooted measured metric spaces.
//!
//! - [`space`]: spaces, subsets, measures, halos, balls and nets.
//! - [`hausdorff()`] and [`prokhorov`]: exact set and measure distances.
//! - [`ghp`]: certified bounds on the Gromov-Hausdorff-Prokhorov distance
//!   and its extended, ball-by-ball form.
//! - [`tree`]: real trees coded by sampled excursions.
//! - [`diagnostics`]: four-point, midpoint and pre-compactness checks.
//! - [`io`]: JSON and CSV formats.
//!
//! ```
//! use ghp::{ghp_compact, SearchConfig, Space};
//!
//! let x = Space::on_line(&[0.0, 1.0], 0, vec![0.0, 0.0])?;
//! let y = Space::singleton(0.0)?;
//! let b = ghp_compact(&x, &y, &SearchConfig::new(7))?;
//! assert!(b.certified);
//! assert!((b.upper - 1.0).abs() < 1e-9);
//! # Ok::<(), ghp::Error>(())
//! ```

pub mod diagnostics;
pub mod error;
mod flow;
pub mod ghp;
mod hausdorff;
pub mod io;
pub mod prokhorov;
pub mod space;
pub mod tolerance;
pub mod tree;

pub use error::{Error, Result};
pub use ghp::{
    compose_cross, cross_from_correspondence, evaluate_objective, gh_exact_small, ghp_compact,
    ghp_compact_seeded, ghp_extended, ghp_lower, ghp_upper, ghp_upper_seeded, inclusion_gluing,
    restriction_curve, Correspondence, CrossMetric, GhpBound, SearchConfig,
};
pub use hausdorff::hausdorff;
pub use prokhorov::{generalized_prokhorov, prokhorov_bruteforce, prokhorov_exact, prokhorov_feasible};
pub use space::{
    diameter, greedy_net, halo, restrict, validate_space, MeasureVec, RawSpace, Space, Subset,
};
pub use tree::{code_tree, stability_certificate, sigma, time_correspondence, tree_distance, SampledFunction};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    mod spaces {}
    #[doc = include_str!("../../../book/src/prokhorov.md")]
    mod prokhorov {}
    #[doc = include_str!("../../../book/src/ghp.md")]
    mod ghp {}
    #[doc = include_str!("../../../book/src/extended.md")]
    mod extended {}
    #[doc = include_str!("../../../book/src/trees.md")]
    mod trees {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

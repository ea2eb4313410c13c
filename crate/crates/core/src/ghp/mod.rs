//! Gromov-Hausdorff-Prokhorov distances between rooted measured spaces.
//!
//! The compact distance is an infimum over gluings of the two spaces. It is
//! not computed exactly in general; instead [`ghp_compact`] returns an
//! interval whose lower end comes from diameter, mass and Gromov-Hausdorff
//! bounds and whose upper end is the objective of the best correspondence
//! found. When the ends meet the value is certified.

mod bounds;
mod correspondence;
mod cross;
mod curve;
mod gh;
mod search;

pub use bounds::{
    certification_scale, ghp_compact, ghp_compact_seeded, ghp_lower, ghp_upper, GhpBound,
    LowerBound,
};
pub use correspondence::{distortion, Correspondence};
pub use cross::{
    compose_cross, cross_from_correspondence, evaluate_objective, objective_parts, CrossMetric,
    GluedSpace, Objective, MIXED_TRIANGLE_TOL,
};
pub use curve::{
    curve_breakpoints, curve_value_at, ghp_extended, inclusion_gluing, integrate_curve,
    restriction_curve, CurveSegment, ExtendedBound, InclusionGluing,
};
pub use gh::{gh_exact_small, mapping_pairs, DEFAULT_BUDGET};
pub use search::{ghp_upper_seeded, ghp_upper_until, rooted_mapping_pairs, SearchConfig, UpperBound};

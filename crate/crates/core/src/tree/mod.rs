//! Measured rooted trees coded by sampled excursions.
//!
//! A nonnegative function `f` with `f(0) = 0` and compact support codes the
//! tree `T^f = [0, σ^f] / ~` with `d^f(s, t) = f(s) + f(t) − 2 min_{[s,t]} f`,
//! rooted at the class of 0 and carrying the image of Lebesgue measure.

mod certificate;
mod coding;
mod function;

pub use certificate::{stability_certificate, StabilityCertificate};
pub use coding::{code_tree, code_tree_with, time_correspondence, CodedTree, QUOTIENT_TOL};
pub use function::{merge_grids, sigma, tree_distance, SampledFunction, SparseTable, TreeMetric};

use serde::Serialize;

use crate::error::Result;
use crate::ghp::correspondence::Correspondence;
use crate::ghp::cross::CrossMetric;
use crate::ghp::gh::gh_exact_small;
use crate::ghp::search::{ghp_upper_seeded, ghp_upper_until, SearchConfig, UpperBound};
use crate::space::{diameter, Space};

/// Certified interval for the compact GHP distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhpBound {
    pub lower: f64,
    pub upper: f64,
    pub certified: bool,
    pub witness: Correspondence,
    pub cross: CrossMetric,
}

/// The lower bound and the ingredients it was taken from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    /// `|diam X − diam Y| + |μ(X) − ν(Y)|`
    pub diameter_mass: f64,
    /// Exact Gromov-Hausdorff distance, when within budget.
    pub gromov_hausdorff: Option<f64>,
}

/// `max(|diam X − diam Y| + |μ(X) − ν(Y)|, d_GH(X, Y))`, the second term
/// only when exhaustive enumeration fits `budget`.
pub fn ghp_lower(x: &Space, y: &Space, budget: u64) -> LowerBound {
    let diameter_mass = (diameter(x, None) - diameter(y, None)).abs()
        + (x.total_mass() - y.total_mass()).abs();
    let gromov_hausdorff = gh_exact_small(x, y, budget).ok();
    LowerBound {
        value: diameter_mass.max(gromov_hausdorff.unwrap_or(0.0)),
        diameter_mass,
        gromov_hausdorff,
    }
}

/// Upper bound with the default seeds only.
pub fn ghp_upper(x: &Space, y: &Space, cfg: &SearchConfig) -> Result<UpperBound> {
    ghp_upper_seeded(x, y, cfg, &[])
}

/// Scale used by the certification tolerance.
pub fn certification_scale(x: &Space, y: &Space) -> f64 {
    [
        diameter(x, None),
        diameter(y, None),
        x.total_mass(),
        y.total_mass(),
        1.0,
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Lower and upper bounds on the compact GHP distance, certified when they
/// agree to `cfg.certify_tol` relative to [`certification_scale`].
pub fn ghp_compact(x: &Space, y: &Space, cfg: &SearchConfig) -> Result<GhpBound> {
    ghp_compact_seeded(x, y, cfg, &[])
}

pub fn ghp_compact_seeded(
    x: &Space,
    y: &Space,
    cfg: &SearchConfig,
    seeds: &[Correspondence],
) -> Result<GhpBound> {
    let lower = ghp_lower(x, y, cfg.exhaustive_budget).value;
    let tol = cfg.certify_tol * certification_scale(x, y);
    let up = ghp_upper_until(x, y, cfg, seeds, lower + tol)?;
    Ok(GhpBound {
        lower,
        upper: up.value,
        certified: up.value - lower <= tol,
        witness: up.correspondence,
        cross: up.cross,
    })
}

use serde::Serialize;

use crate::error::Result;
use crate::ghp::{cross_from_correspondence, evaluate_objective};
use crate::tree::coding::{code_tree, time_correspondence};
use crate::tree::function::{merge_grids, sigma, SampledFunction};

/// Stability check `d_GHP(T^f, T^g) <= 6‖f − g‖∞ + |σ^f − σ^g|`, with the
/// left side bounded by the time-correspondence gluing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityCertificate {
    pub ub: f64,
    pub rhs: f64,
    pub slack: f64,
    pub ok: bool,
    /// Distortion of the time correspondence.
    pub distortion: f64,
    pub sup_diff: f64,
    pub sigma_f: f64,
    pub sigma_g: f64,
}

/// Both functions are resampled on the union of their grids, coded, and
/// glued along `p^f(t) ~ p^g(t)`. The slack `8·h·L` uses the largest step
/// of the merged grid and the largest slope of either function.
pub fn stability_certificate(f: &SampledFunction, g: &SampledFunction) -> Result<StabilityCertificate> {
    let grid = merge_grids(f.grid(), g.grid());
    let fm = f.resample(&grid)?;
    let gm = g.resample(&grid)?;
    let tf = code_tree(&fm)?;
    let tg = code_tree(&gm)?;
    let corr = time_correspondence(&tf, &tg)?;
    let cross = cross_from_correspondence(&tf.space, &tg.space, &corr)?;
    let ub = evaluate_objective(&tf.space, &tg.space, &cross)?;

    let sup_diff = fm
        .values()
        .iter()
        .zip(gm.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let (sigma_f, sigma_g) = (sigma(f), sigma(g));
    let rhs = 6.0 * sup_diff + (sigma_f - sigma_g).abs();
    let h = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let slack = 8.0 * h * f.max_slope().max(g.max_slope());
    Ok(StabilityCertificate {
        ub,
        rhs,
        slack,
        ok: ub <= rhs + slack,
        distortion: corr.distortion(),
        sup_diff,
        sigma_f,
        sigma_g,
    })
}

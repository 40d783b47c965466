//! Partial derivatives of the solved scale.
//!
//! On the segment containing the solution, the saturated set `S` contributes
//! the constant `R = sum_S |c_i - x_i|^p` and the active set `A` the slope
//! `M = sum_A |delta_i|^p`, so `eta^p = (eps^p - R) / M`. Differentiating
//! that identity gives closed forms for every partial. At a breakpoint the
//! active set changes and `eta` has a kink; the result is flagged there.

use crate::domain::ProblemInstance;
use crate::error::{Error, Result};
use crate::solver::{BreakpointProfile, EtaSolution};

/// Relative distance between `t = eta^p` and a threshold below which the
/// solution is reported as sitting on a kink.
pub const BREAKPOINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct EtaGradient {
    /// `d eta / d eps`
    pub d_eps: f64,
    /// `d eta / d x_i`, non-zero only on saturated coordinates.
    pub d_x: Vec<f64>,
    /// `d eta / d delta_i`, non-zero only on active coordinates.
    pub d_delta: Vec<f64>,
    /// `t` coincides with a threshold; the partials are one-sided.
    pub at_breakpoint: bool,
}

/// Gradient of `eta` at a solution returned by [`solve_eta`](crate::solve_eta).
///
/// Coordinates whose threshold equals `t` exactly count as saturated, as in
/// the solver.
pub fn gradient_eta(inst: &ProblemInstance, sol: &EtaSolution) -> Result<EtaGradient> {
    if inst.eps() == 0.0 {
        return Err(Error::DegenerateGradient);
    }
    let profile = BreakpointProfile::build(inst)?;
    let p = inst.p();
    let eta = sol.eta;
    let t = p.pow(eta);
    let mass = sol.active_mass;
    // M * eta^(p-1)
    let denom = mass * p.pow_minus_one(eta);

    let n = inst.len();
    let mut d_x = vec![0.0; n];
    let mut d_delta = vec![0.0; n];
    let (saturated, active) = profile.order().split_at(sol.saturated_count);
    for &i in saturated {
        let sign = inst.delta()[i].signum();
        d_x[i] = sign * p.pow_minus_one(inst.face_distance(i)) / denom;
    }
    for &i in active {
        let d = inst.delta()[i];
        d_delta[i] = -eta * d.signum() * p.pow_minus_one(d.abs()) / mass;
    }

    let thresholds = profile.thresholds();
    let nearest = thresholds.partition_point(|&ti| ti < t);
    let gap = [nearest.checked_sub(1), Some(nearest)]
        .into_iter()
        .flatten()
        .filter_map(|k| thresholds.get(k))
        .map(|&ti| (t - ti).abs())
        .fold(f64::INFINITY, f64::min);

    Ok(EtaGradient {
        d_eps: p.pow_minus_one(inst.eps()) / denom,
        d_x,
        d_delta,
        at_breakpoint: gap <= BREAKPOINT_TOL * t.max(1.0),
    })
}

//! Analytic inversion of the clipped norm.
//!
//! With `t = eta^p`, the p-th power of the effective norm
//!
//! ```text
//! f(t) = sum_i min(|delta_i|^p * t, |c_i - x_i|^p)
//! ```
//!
//! is piecewise linear and concave in `t`. Coordinate `i` saturates at the
//! threshold `t_i = |c_i - x_i|^p / |delta_i|^p`; past it the coordinate
//! stops contributing slope. Sorting the thresholds and taking suffix sums
//! of `|delta_i|^p` gives the slope of every segment, and a running sum of
//! `slope * width` gives `f` at each threshold. Inverting `f` at `eps^p`
//! then needs one search over the sorted thresholds and one division.

use rayon::prelude::*;

use crate::domain::{effective_norm, DomainBounds, NormOrder, ProblemInstance};
use crate::error::{Error, Result};

/// Sorted saturation thresholds of one `(x, delta)` pair together with the
/// piecewise-linear function they define.
///
/// A profile does not depend on `eps`, so it can be built once and inverted
/// for many target norms.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakpointProfile {
    p: NormOrder,
    thresholds: Vec<f64>,
    slopes: Vec<f64>,
    cumulative: Vec<f64>,
    order: Vec<usize>,
    max_norm: f64,
}

/// Where `f(t) = eps^p` lands on a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    /// `t = eta^p`.
    pub t: f64,
    pub eta: f64,
    /// Index of the segment `(thresholds[j-1], thresholds[j]]` containing `t`.
    pub segment: usize,
    /// Number of thresholds `<= t`.
    pub saturated_count: usize,
    /// Slope of the segment, `sum |delta_i|^p` over the coordinates still
    /// moving on it.
    pub active_mass: f64,
}

/// Solved scale for one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaSolution {
    pub eta: f64,
    /// `|| clip(x + eta * delta) - x ||_p` recomputed at `eta`.
    pub achieved_norm: f64,
    /// Coordinates sitting on a face at `eta`.
    pub saturated_count: usize,
    /// Slope mass of the segment the solution lies on.
    pub active_mass: f64,
}

impl BreakpointProfile {
    pub fn build(inst: &ProblemInstance) -> Result<Self> {
        let p = inst.p();
        // (threshold, |delta_i|^p, i); coordinates whose |delta_i|^p is zero
        // (including underflow) never move and are left out.
        let mut entries: Vec<(f64, f64, usize)> = Vec::with_capacity(inst.len());
        let mut max_pow = 0.0;
        for (i, &d) in inst.delta().iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let mass = p.pow(d.abs());
            if mass == 0.0 {
                continue;
            }
            let face = p.pow(inst.face_distance(i));
            max_pow += face;
            entries.push((face / mass, mass, i));
        }
        if entries.is_empty() {
            return Err(Error::ZeroDelta);
        }
        // Ties broken by coordinate index, i.e. a stable sort on thresholds.
        entries.sort_unstable_by(|l, r| l.0.total_cmp(&r.0).then(l.2.cmp(&r.2)));

        let m = entries.len();
        let mut thresholds = Vec::with_capacity(m);
        let mut order = Vec::with_capacity(m);
        let mut slopes = vec![0.0; m];
        for &(t, _, i) in &entries {
            thresholds.push(t);
            order.push(i);
        }
        let mut acc = 0.0;
        for (slope, entry) in slopes.iter_mut().zip(&entries).rev() {
            acc += entry.1;
            *slope = acc;
        }
        let mut cumulative = Vec::with_capacity(m);
        let (mut prev, mut y) = (0.0, 0.0);
        for (&t, &slope) in thresholds.iter().zip(&slopes) {
            y += slope * (t - prev);
            prev = t;
            cumulative.push(y);
        }

        Ok(Self {
            p,
            thresholds,
            slopes,
            cumulative,
            order,
            max_norm: p.root(max_pow),
        })
    }

    pub fn p(&self) -> NormOrder {
        self.p
    }

    /// Number of moving coordinates.
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Original coordinate index of each profile position.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Largest attainable effective norm.
    pub fn max_norm(&self) -> f64 {
        self.max_norm
    }

    /// Evaluates `f(t)`, the p-th power of the effective norm at `eta = t^(1/p)`.
    pub fn eval(&self, t: f64) -> f64 {
        let j = self.thresholds.partition_point(|&ti| ti < t);
        if j == self.len() {
            return self.cumulative[j - 1];
        }
        self.cumulative[j] - self.slopes[j] * (self.thresholds[j] - t)
    }

    /// Smallest `t = eta^p` with `f(t) = eps^p`.
    pub fn invert(&self, eps: f64) -> Result<Inversion> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidEps(eps));
        }
        if eps == 0.0 {
            return Ok(Inversion {
                t: 0.0,
                eta: 0.0,
                segment: 0,
                saturated_count: 0,
                active_mass: self.slopes[0],
            });
        }
        if eps > self.max_norm {
            return Err(Error::Unreachable {
                max_norm: self.max_norm,
            });
        }
        let m = self.len();
        let target = self.p.pow(eps);
        let mut j = self.cumulative.partition_point(|&y| y < target);
        let t = if j == m {
            // eps^p rounded above the last cumulative value although eps
            // itself is attainable: the solution is the start of the plateau.
            j = m - 1;
            self.thresholds[j]
        } else {
            let slope = self.slopes[j];
            assert!(slope > 0.0, "zero slope below the plateau");
            let (lo, y_lo) = match j {
                0 => (0.0, 0.0),
                _ => (self.thresholds[j - 1], self.cumulative[j - 1]),
            };
            let hi = self.thresholds[j];
            // Interpolate from the nearer end of the segment; the far-end
            // form cancels badly when t is close to the other breakpoint.
            let above = target - y_lo;
            let below = self.cumulative[j] - target;
            let t = if above < below {
                lo + above / slope
            } else {
                hi - below / slope
            };
            t.clamp(lo, hi)
        };
        Ok(Inversion {
            t,
            eta: self.p.root(t),
            segment: j,
            saturated_count: self.thresholds.partition_point(|&ti| ti <= t),
            active_mass: self.slopes[j],
        })
    }
}

/// Builds the breakpoint profile of an instance.
pub fn build_profile(inst: &ProblemInstance) -> Result<BreakpointProfile> {
    BreakpointProfile::build(inst)
}

/// Minimal `eta >= 0` with `|| clip(x + eta * delta) - x ||_p = eps`.
pub fn solve_eta(inst: &ProblemInstance) -> Result<EtaSolution> {
    let profile = BreakpointProfile::build(inst)?;
    let inv = profile.invert(inst.eps())?;
    Ok(EtaSolution {
        eta: inv.eta,
        achieved_norm: effective_norm(inst, inv.eta),
        saturated_count: inv.saturated_count,
        active_mass: inv.active_mass,
    })
}

/// Solves a slice of independent instances in parallel, preserving order.
pub fn solve_many(instances: &[ProblemInstance]) -> Vec<Result<EtaSolution>> {
    instances.par_iter().map(solve_eta).collect()
}

/// Solves row-major batches that share `p` and `bounds`.
///
/// `x_rows` and `delta_rows` hold `eps.len()` rows of `width` values each.
/// A row that fails validation or is unreachable yields its own error
/// without affecting the others; only a shape mismatch fails the whole call.
pub fn solve_eta_batch(
    x_rows: &[f64],
    delta_rows: &[f64],
    eps: &[f64],
    width: usize,
    p: f64,
    bounds: DomainBounds,
) -> Result<Vec<Result<EtaSolution>>> {
    if width == 0 {
        return Err(Error::BatchShape("row width must be positive".into()));
    }
    let rows = eps.len();
    if x_rows.len() != rows * width || delta_rows.len() != rows * width {
        return Err(Error::BatchShape(format!(
            "expected {rows} rows of {width}: x has {}, delta has {} values",
            x_rows.len(),
            delta_rows.len()
        )));
    }
    Ok(x_rows
        .par_chunks_exact(width)
        .zip(delta_rows.par_chunks_exact(width))
        .zip(eps.par_iter())
        .map(|((x, delta), &eps)| {
            ProblemInstance::new(x.to_vec(), delta.to_vec(), eps, p, bounds)
                .and_then(|inst| solve_eta(&inst))
        })
        .collect())
}

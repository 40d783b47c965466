//! Reference implementations that do not use the breakpoint profile:
//! the literal clip-then-norm evaluation and a bisection search over `eta`.
//! They exist to cross-check and benchmark the analytic path.

use crate::domain::{effective_norm, max_effective_norm, unconstrained_eta, ProblemInstance};
use crate::error::{Error, Result};

/// Bracket doublings allowed before giving up on finding an upper bound.
const MAX_DOUBLINGS: usize = 2048;

/// `|| clip(x + eta * delta) - x ||_p` computed literally: perturb, clip,
/// subtract and take the norm.
pub fn naive_effective_norm(inst: &ProblemInstance, eta: f64) -> f64 {
    let bounds = inst.bounds();
    let p = inst.p();
    let total: f64 = inst
        .x()
        .iter()
        .zip(inst.delta())
        .map(|(&x, &d)| p.pow((bounds.clamp(x + eta * d) - x).abs()))
        .sum();
    p.root(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub eta: f64,
    /// Norm evaluations spent halving the bracket.
    pub iterations: usize,
}

/// Finds `eta` with `|effective_norm(eta) - eps| <= tol` by bisection.
///
/// The bracket starts at `[0, eps / ||delta||_p]` and its upper end doubles
/// until the norm there reaches `eps`. `tol` is a residual on the norm, not
/// on `eta`.
pub fn solve_eta_bisect(inst: &ProblemInstance, tol: f64, max_iter: usize) -> Result<Bisection> {
    let eps = inst.eps();
    if eps == 0.0 {
        return Ok(Bisection {
            eta: 0.0,
            iterations: 0,
        });
    }
    let max_norm = max_effective_norm(inst);
    if eps > max_norm {
        return Err(Error::Unreachable { max_norm });
    }
    let mut lo = 0.0;
    let mut hi = unconstrained_eta(inst)?;
    let mut f_hi = effective_norm(inst, hi);
    let mut doublings = 0;
    while f_hi < eps {
        if (eps - f_hi).abs() <= tol {
            return Ok(Bisection {
                eta: hi,
                iterations: 0,
            });
        }
        lo = hi;
        hi *= 2.0;
        f_hi = effective_norm(inst, hi);
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::NonConvergence { iterations: 0 });
        }
    }
    if (f_hi - eps).abs() <= tol {
        return Ok(Bisection {
            eta: hi,
            iterations: 0,
        });
    }
    for iterations in 1..=max_iter {
        let mid = 0.5 * (lo + hi);
        let residual = effective_norm(inst, mid) - eps;
        if residual.abs() <= tol {
            return Ok(Bisection {
                eta: mid,
                iterations,
            });
        }
        if residual < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
    })
}

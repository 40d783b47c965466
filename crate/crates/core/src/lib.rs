//! Exact clipping-aware rescaling.
//!
//! Given a point `x` in a box `[a, b]^n`, a direction `delta` and a target
//! norm `eps`, find the scale `eta` such that the perturbation that survives
//! clipping has the requested size:
//!
//! ```text
//! || clip(x + eta * delta, a, b) - x ||_p = eps
//! ```
//!
//! The p-th power of the left side is piecewise linear in `eta^p`, so `eta`
//! is found with one sort and one linear scan instead of a search, for any
//! finite `p >= 1`. The crate also provides the partial derivatives of
//! `eta`, a bisection reference solver, batch solving and a seeded noise
//! generator.
//!
//! ```
//! use clipscale::{DomainBounds, ProblemInstance, solve_eta};
//!
//! let inst = ProblemInstance::new(vec![0.9, 0.5], vec![1.0, 1.0], 0.5, 2.0, DomainBounds::unit())?;
//! let sol = solve_eta(&inst)?;
//! assert!((sol.eta - 0.24f64.sqrt()).abs() < 1e-12);
//! assert_eq!(sol.saturated_count, 1);
//! # Ok::<(), clipscale::Error>(())
//! ```

pub mod bench;
pub mod cli;
pub mod domain;
pub mod error;
pub mod grad;
pub mod noise;
pub mod oracle;
pub mod solver;

pub use domain::{
    clip, effective_norm, max_effective_norm, unconstrained_eta, DomainBounds, NormOrder,
    ProblemInstance,
};
pub use error::{Error, Result};
pub use grad::{gradient_eta, EtaGradient};
pub use oracle::{naive_effective_norm, solve_eta_bisect, Bisection};
pub use solver::{
    build_profile, solve_eta, solve_eta_batch, solve_many, BreakpointProfile, EtaSolution,
    Inversion,
};

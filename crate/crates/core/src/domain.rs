//! Domain types, element-wise clipping and forward evaluation of the
//! effective perturbation norm.
//!
//! For a direction `delta` and scale `eta`, only the coordinates with
//! `delta_i != 0` move. Coordinate `i` travels towards the face
//! `c_i = b` (if `delta_i > 0`) or `c_i = a` (if `delta_i < 0`) and
//! saturates once `eta * |delta_i|` exceeds its distance to that face, so
//! its contribution to the p-th power of the effective norm is
//! `min(|delta_i|^p * eta^p, |c_i - x_i|^p)`.

use crate::error::{Error, Result};

/// The clipping box `[a, b]` shared by every coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainBounds {
    a: f64,
    b: f64,
}

impl DomainBounds {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidBounds { a, b });
        }
        Ok(Self { a, b })
    }

    /// The unit box `[0, 1]`.
    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    pub fn contains(&self, v: f64) -> bool {
        self.a <= v && v <= self.b
    }

    #[inline]
    pub fn clamp(&self, v: f64) -> f64 {
        self.a.max(self.b.min(v))
    }
}

impl Default for DomainBounds {
    fn default() -> Self {
        Self::unit()
    }
}

/// Order `p` of the norm, finite and at least 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NormOrder(f64);

impl NormOrder {
    pub const L1: NormOrder = NormOrder(1.0);
    pub const L2: NormOrder = NormOrder(2.0);

    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidNorm(p));
        }
        Ok(Self(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `v^p` for `v >= 0`.
    #[inline]
    pub fn pow(self, v: f64) -> f64 {
        let p = self.0;
        if p == 1.0 {
            v
        } else if p == 2.0 {
            v * v
        } else if p.fract() == 0.0 && p <= i32::MAX as f64 {
            v.powi(p as i32)
        } else {
            v.powf(p)
        }
    }

    /// `v^(p - 1)` for `v >= 0`, with `0^0 = 1`.
    #[inline]
    pub fn pow_minus_one(self, v: f64) -> f64 {
        let p = self.0;
        if p == 1.0 {
            1.0
        } else if p == 2.0 {
            v
        } else {
            NormOrder(p - 1.0).pow_any(v)
        }
    }

    // Like `pow` but valid for exponents in [0, 1) as well.
    #[inline]
    fn pow_any(self, v: f64) -> f64 {
        if self.0 >= 1.0 {
            self.pow(v)
        } else {
            v.powf(self.0)
        }
    }

    /// `v^(1/p)` for `v >= 0`.
    #[inline]
    pub fn root(self, v: f64) -> f64 {
        let p = self.0;
        if p == 1.0 {
            v
        } else if p == 2.0 {
            v.sqrt()
        } else {
            v.powf(p.recip())
        }
    }

    /// The p-norm of `v`.
    pub fn norm(self, v: &[f64]) -> f64 {
        self.root(v.iter().map(|&vi| self.pow(vi.abs())).sum())
    }
}

/// One instance of the rescaling problem: find `eta >= 0` such that
/// `|| clip(x + eta * delta) - x ||_p = eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    x: Vec<f64>,
    delta: Vec<f64>,
    eps: f64,
    p: NormOrder,
    bounds: DomainBounds,
}

impl ProblemInstance {
    /// Validates and builds an instance.
    ///
    /// `x` must lie inside the box (compared exactly), every value must be
    /// finite and `delta` must have at least one non-zero coordinate.
    pub fn new(
        x: Vec<f64>,
        delta: Vec<f64>,
        eps: f64,
        p: f64,
        bounds: DomainBounds,
    ) -> Result<Self> {
        let p = NormOrder::new(p)?;
        if x.is_empty() {
            return Err(Error::Empty);
        }
        if x.len() != delta.len() {
            return Err(Error::LengthMismatch {
                x: x.len(),
                delta: delta.len(),
            });
        }
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidEps(eps));
        }
        for (index, &value) in x.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { field: "x", index });
            }
            if !bounds.contains(value) {
                return Err(Error::OutsideDomain {
                    index,
                    value,
                    a: bounds.lower(),
                    b: bounds.upper(),
                });
            }
        }
        if let Some(index) = delta.iter().position(|d| !d.is_finite()) {
            return Err(Error::NonFinite {
                field: "delta",
                index,
            });
        }
        if delta.iter().all(|&d| d == 0.0) {
            return Err(Error::ZeroDelta);
        }
        Ok(Self {
            x,
            delta,
            eps,
            p,
            bounds,
        })
    }

    /// Same point and direction with a different target norm.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidEps(eps));
        }
        Ok(Self {
            eps,
            ..self.clone()
        })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn p(&self) -> NormOrder {
        self.p
    }

    pub fn bounds(&self) -> DomainBounds {
        self.bounds
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Distance from `x_i` to the face that `delta_i` points at:
    /// `b - x_i` for `delta_i > 0` and `x_i - a` otherwise.
    #[inline]
    pub fn face_distance(&self, i: usize) -> f64 {
        if self.delta[i] > 0.0 {
            self.bounds.upper() - self.x[i]
        } else {
            self.x[i] - self.bounds.lower()
        }
    }

    /// `clip(x + eta * delta)`.
    pub fn perturbed(&self, eta: f64) -> Vec<f64> {
        self.x
            .iter()
            .zip(&self.delta)
            .map(|(&xi, &di)| self.bounds.clamp(xi + eta * di))
            .collect()
    }

    pub(crate) fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.x, self.delta)
    }
}

/// Element-wise `max(a, min(b, v_i))`.
pub fn clip(v: &[f64], bounds: DomainBounds) -> Vec<f64> {
    v.iter().map(|&vi| bounds.clamp(vi)).collect()
}

/// `|| clip(x + eta * delta) - x ||_p`, evaluated through the saturation
/// form `sum_i min(|delta_i|^p eta^p, |c_i - x_i|^p)` over `delta_i != 0`.
///
/// `eta` must be non-negative.
pub fn effective_norm(inst: &ProblemInstance, eta: f64) -> f64 {
    debug_assert!(eta >= 0.0, "eta must be non-negative");
    let p = inst.p();
    let eta_p = p.pow(eta);
    let total: f64 = inst
        .delta()
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != 0.0)
        .map(|(i, &d)| (p.pow(d.abs()) * eta_p).min(p.pow(inst.face_distance(i))))
        .sum();
    p.root(total)
}

/// The scale `eps / ||delta||_p` that ignores clipping.
pub fn unconstrained_eta(inst: &ProblemInstance) -> Result<f64> {
    let norm = inst.p().norm(inst.delta());
    if norm == 0.0 {
        return Err(Error::ZeroDelta);
    }
    Ok(inst.eps() / norm)
}

/// Largest attainable effective norm: every moving coordinate sits on the
/// face it points at.
pub fn max_effective_norm(inst: &ProblemInstance) -> f64 {
    let p = inst.p();
    let total: f64 = inst
        .delta()
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != 0.0)
        .map(|(i, _)| p.pow(inst.face_distance(i)))
        .sum();
    p.root(total)
}

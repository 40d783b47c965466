#![allow(dead_code)]

use clipscale::{max_effective_norm, DomainBounds, ProblemInstance};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub enum Direction {
    /// Standard normal entries.
    Gaussian,
    /// Random sign times a magnitude in `[lo, hi]`.
    Bounded { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Fuzz {
    pub n_max: usize,
    pub ps: &'static [f64],
    pub direction: Direction,
    /// Probability that a coordinate of delta is exactly zero.
    pub zero_prob: f64,
    /// Probability that a coordinate of x sits exactly on a face.
    pub face_prob: f64,
    /// Random box instead of `[0, 1]`.
    pub random_bounds: bool,
    /// Keep x at least this fraction of the box width away from the faces.
    pub interior_margin: f64,
}

impl Default for Fuzz {
    fn default() -> Self {
        Self {
            n_max: 64,
            ps: &[1.0, 1.5, 2.0, 3.0],
            direction: Direction::Gaussian,
            zero_prob: 0.1,
            face_prob: 0.02,
            random_bounds: true,
            interior_margin: 0.0,
        }
    }
}

impl Fuzz {
    pub fn bounds<R: Rng>(&self, rng: &mut R) -> DomainBounds {
        if self.random_bounds {
            let a = rng.random_range(-2.0..1.0);
            let width = rng.random_range(0.5..3.0);
            DomainBounds::new(a, a + width).unwrap()
        } else {
            DomainBounds::unit()
        }
    }

    /// Instance with `eps = 0`.
    pub fn instance<R: Rng>(&self, rng: &mut R) -> ProblemInstance {
        loop {
            let n = rng.random_range(1..=self.n_max);
            let p = self.ps[rng.random_range(0..self.ps.len())];
            let bounds = self.bounds(rng);
            let (a, b) = (bounds.lower(), bounds.upper());
            let margin = self.interior_margin * (b - a);
            let x: Vec<f64> = (0..n)
                .map(|_| {
                    let u: f64 = rng.random();
                    if u < self.face_prob / 2.0 {
                        a
                    } else if u < self.face_prob {
                        b
                    } else {
                        rng.random_range((a + margin)..=(b - margin))
                    }
                })
                .collect();
            let delta: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.random::<f64>() < self.zero_prob {
                        return 0.0;
                    }
                    match self.direction {
                        Direction::Gaussian => rng.sample(StandardNormal),
                        Direction::Bounded { lo, hi } => {
                            let m = rng.random_range(lo..=hi);
                            if rng.random::<bool>() {
                                m
                            } else {
                                -m
                            }
                        }
                    }
                })
                .collect();
            if let Ok(inst) = ProblemInstance::new(x, delta, 0.0, p, bounds) {
                return inst;
            }
        }
    }

    /// Instance with `eps` uniform in `(0, max_effective_norm]`.
    pub fn solvable<R: Rng>(&self, rng: &mut R) -> ProblemInstance {
        loop {
            let inst = self.instance(rng);
            let max = max_effective_norm(&inst);
            if max > 0.0 {
                let frac = 1.0 - rng.random::<f64>();
                return inst.with_eps(frac * max).unwrap();
            }
        }
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Line-by-line port of the reference NumPy routine for `p = 2` on `[0, 1]`:
///
/// ```text
/// delta2 = np.square(delta)
/// space = np.where(delta >= 0, 1 - x, x)
/// f2 = np.square(space) / delta2
/// ks = np.argsort(f2)
/// f2_sorted = f2[ks]
/// m = np.cumsum(delta2[ks[::-1]])[::-1]
/// dx = np.ediff1d(f2_sorted, to_begin=f2_sorted[0])
/// dy = m * dx
/// y = np.cumsum(dy)
/// j = np.flatnonzero(y >= eps**2)[0]
/// eta2 = f2_sorted[j] - (y[j] - eps**2) / m[j]
/// eta = np.sqrt(eta2).item()
/// ```
pub fn listing_reference(x: &[f64], delta: &[f64], eps: f64) -> Option<f64> {
    let n = x.len();
    let delta2: Vec<f64> = delta.iter().map(|d| d * d).collect();
    let space: Vec<f64> = x
        .iter()
        .zip(delta)
        .map(|(&x, &d)| if d >= 0.0 { 1.0 - x } else { x })
        .collect();
    let f2: Vec<f64> = space
        .iter()
        .zip(&delta2)
        .map(|(s, d2)| s * s / d2)
        .collect();
    let mut ks: Vec<usize> = (0..n).collect();
    ks.sort_by(|&i, &j| f2[i].total_cmp(&f2[j]));
    let f2_sorted: Vec<f64> = ks.iter().map(|&k| f2[k]).collect();
    let mut m: Vec<f64> = ks
        .iter()
        .rev()
        .map(|&k| delta2[k])
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    m.reverse();
    let dx: Vec<f64> = (0..n)
        .map(|i| {
            if i == 0 {
                f2_sorted[0]
            } else {
                f2_sorted[i] - f2_sorted[i - 1]
            }
        })
        .collect();
    let dy: Vec<f64> = m.iter().zip(&dx).map(|(m, dx)| m * dx).collect();
    let y: Vec<f64> = dy
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    let eps2 = eps * eps;
    let j = y.iter().position(|&yi| yi >= eps2)?;
    let eta2 = f2_sorted[j] - (y[j] - eps2) / m[j];
    Some(eta2.sqrt())
}

/// Central difference with step `1e-6` scaled by the operand magnitude.
pub fn central_difference(f: impl Fn(f64) -> f64, at: f64) -> f64 {
    let h = 1e-6 * at.abs().max(1.0);
    (f(at + h) - f(at - h)) / (2.0 * h)
}

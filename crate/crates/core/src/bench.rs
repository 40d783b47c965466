//! Timing harness comparing the analytic solver with bisection on the same
//! seeded instances.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::domain::{max_effective_norm, DomainBounds, ProblemInstance};
use crate::error::{Error, Result};
use crate::noise::{draw_direction, record_rng, NoiseDistribution};
use crate::oracle::solve_eta_bisect;
use crate::solver::solve_eta;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Coordinates per instance.
    pub n: usize,
    /// Instances per trial.
    pub batch: usize,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    /// Bisection residual tolerance on the norm.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n: 1024,
            batch: 16,
            p: 2.0,
            trials: 5,
            seed: 0,
            tol: 1e-12,
            max_iter: 10_000,
        }
    }
}

/// One machine-readable line per trial and method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub trial: usize,
    pub n: usize,
    pub batch: usize,
    pub method: &'static str,
    /// Mean wall time per solve.
    pub nanos: u128,
    /// Scale solved for the first instance of the trial.
    pub eta: f64,
    /// Mean iterations per solve; the analytic path is a single pass.
    pub iterations: f64,
    /// Largest `|eta_analytic - eta_bisect| / eta_analytic` in the trial.
    pub max_rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub records: Vec<BenchRecord>,
}

impl BenchReport {
    fn total(&self, method: &str) -> u128 {
        self.records
            .iter()
            .filter(|r| r.method == method)
            .map(|r| r.nanos * r.batch as u128)
            .sum()
    }

    /// Total analytic wall time over all solves.
    pub fn analytic_nanos(&self) -> u128 {
        self.total("analytic")
    }

    pub fn bisection_nanos(&self) -> u128 {
        self.total("bisection")
    }

    pub fn max_rel_diff(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.max_rel_diff)
            .fold(0.0, f64::max)
    }

    /// Plain-text table, one row per trial.
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = format!(
            "n={} batch={} p={} trials={} seed={} tol={:e}\n{:>5} {:>14} {:>14} {:>10} {:>10} {:>12}\n",
            c.n, c.batch, c.p, c.trials, c.seed, c.tol,
            "trial", "analytic_ns", "bisect_ns", "iters_an", "iters_bi", "max_rel_diff"
        );
        for pair in self.records.chunks(2) {
            let (a, b) = (&pair[0], &pair[1]);
            out.push_str(&format!(
                "{:>5} {:>14} {:>14} {:>10.1} {:>10.1} {:>12.3e}\n",
                a.trial, a.nanos, b.nanos, a.iterations, b.iterations, a.max_rel_diff
            ));
        }
        let (an, bi) = (self.analytic_nanos(), self.bisection_nanos());
        out.push_str(&format!(
            "total analytic {an} ns, bisection {bi} ns, speedup {:.2}x, max rel diff {:.3e}\n",
            bi as f64 / an.max(1) as f64,
            self.max_rel_diff()
        ));
        out
    }
}

/// Random solvable instance in `[0, 1]^n` with a Gaussian direction and
/// `eps` uniform in `(0, max]`.
pub fn random_instance<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<ProblemInstance> {
    let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let delta = draw_direction(NoiseDistribution::Gaussian, n, rng);
    let inst = ProblemInstance::new(x, delta, 0.0, p, DomainBounds::unit())?;
    let max = max_effective_norm(&inst);
    // random() is in [0, 1); flip it to (0, 1].
    let frac = 1.0 - rng.random::<f64>();
    inst.with_eps(frac * max)
}

pub fn run(config: &BenchConfig) -> Result<BenchReport> {
    if config.n == 0 || config.batch == 0 || config.trials == 0 {
        return Err(Error::InvalidParameter(
            "n, batch and trials must be positive".into(),
        ));
    }
    if config.tol.is_nan() || config.tol <= 0.0 || config.max_iter == 0 {
        return Err(Error::InvalidParameter(
            "tolerance and max_iter must be positive".into(),
        ));
    }
    let mut records = Vec::with_capacity(2 * config.trials);
    for trial in 0..config.trials {
        let mut rng = record_rng(config.seed, trial as u64);
        let instances = (0..config.batch)
            .map(|_| random_instance(config.n, config.p, &mut rng))
            .collect::<Result<Vec<_>>>()?;

        let start = Instant::now();
        let analytic = instances
            .iter()
            .map(|inst| solve_eta(inst).map(|s| s.eta))
            .collect::<Result<Vec<_>>>()?;
        let analytic_ns = start.elapsed().as_nanos();

        let start = Instant::now();
        let bisected = instances
            .iter()
            .map(|inst| solve_eta_bisect(inst, config.tol, config.max_iter))
            .collect::<Result<Vec<_>>>()?;
        let bisect_ns = start.elapsed().as_nanos();

        let max_rel_diff = analytic
            .iter()
            .zip(&bisected)
            .map(|(&a, b)| (a - b.eta).abs() / a.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        let batch = config.batch as u128;
        let mean_iters =
            bisected.iter().map(|b| b.iterations as f64).sum::<f64>() / config.batch as f64;
        records.push(BenchRecord {
            trial,
            n: config.n,
            batch: config.batch,
            method: "analytic",
            nanos: analytic_ns / batch,
            eta: analytic[0],
            iterations: 1.0,
            max_rel_diff,
        });
        records.push(BenchRecord {
            trial,
            n: config.n,
            batch: config.batch,
            method: "bisection",
            nanos: bisect_ns / batch,
            eta: bisected[0].eta,
            iterations: mean_iters,
            max_rel_diff,
        });
    }
    Ok(BenchReport {
        config: config.clone(),
        records,
    })
}

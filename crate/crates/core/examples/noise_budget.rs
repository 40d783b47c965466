//! Random noise on points near the edge of the box: rescale-then-clip loses
//! part of the budget, clipping-aware rescaling spends all of it.
//!
//! `cargo run --example noise_budget`

use clipscale::noise::{clipping_aware_noise, record_rng, rescale_then_clip, NoiseDistribution};
use clipscale::{DomainBounds, ProblemInstance};
use rand::Rng;

pub fn main() -> clipscale::Result<()> {
    let bounds = DomainBounds::unit();
    let eps = 1.0;
    let n = 256;
    println!("{:>6} {:>14} {:>14}", "draw", "rescale+clip", "clip-aware");
    for draw in 0..8u64 {
        let mut rng = record_rng(2024, draw);
        // A mostly saturated image: values close to 0 or 1.
        let x: Vec<f64> = (0..n)
            .map(|_| {
                if rng.random::<bool>() {
                    rng.random_range(0.0..0.03)
                } else {
                    rng.random_range(0.97..1.0)
                }
            })
            .collect();
        let sample =
            clipping_aware_noise(&x, eps, 2.0, bounds, NoiseDistribution::Gaussian, &mut rng)?;
        let inst = ProblemInstance::new(x, sample.delta.clone(), eps, 2.0, bounds)?;
        let (_, naive) = rescale_then_clip(&inst)?;
        println!(
            "{draw:>6} {naive:>14.6} {:>14.6}",
            sample.solution.achieved_norm
        );
    }
    Ok(())
}

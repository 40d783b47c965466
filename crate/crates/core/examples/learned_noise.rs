//! Gradient ascent on the noise direction under a fixed post-clipping
//! budget. The score is `w . clip(x + eta(delta) delta)`; its gradient with
//! respect to `delta` flows through both the clip and the solved `eta`.
//!
//! `cargo run --example learned_noise`

use clipscale::noise::{draw_direction, record_rng, NoiseDistribution};
use clipscale::{gradient_eta, solve_eta, DomainBounds, ProblemInstance};

pub fn main() -> clipscale::Result<()> {
    let bounds = DomainBounds::unit();
    let n = 16;
    let eps = 0.8;
    let mut rng = record_rng(7, 0);
    let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    let w: Vec<f64> = (0..n)
        .map(|i| if i % 3 == 0 { -1.0 } else { 0.5 })
        .collect();
    let mut delta = draw_direction(NoiseDistribution::Gaussian, n, &mut rng);

    for step in 0..=60 {
        let inst = ProblemInstance::new(x.clone(), delta.clone(), eps, 2.0, bounds)?;
        let sol = solve_eta(&inst)?;
        let v = inst.perturbed(sol.eta);
        let score: f64 = w.iter().zip(&v).map(|(w, v)| w * v).sum();
        if step % 10 == 0 {
            println!(
                "step {step:>2}: score {score:.5}, achieved norm {:.9}, saturated {}",
                sol.achieved_norm, sol.saturated_count
            );
        }
        let g = gradient_eta(&inst, &sol)?;
        // Coordinates strictly inside the box move with x_i + eta delta_i.
        let active: Vec<bool> = (0..n)
            .map(|i| {
                delta[i] != 0.0
                    && v[i] == x[i] + sol.eta * delta[i]
                    && bounds.lower() < v[i]
                    && v[i] < bounds.upper()
            })
            .collect();
        let coupling: f64 = (0..n).filter(|&i| active[i]).map(|i| w[i] * delta[i]).sum();
        for j in 0..n {
            let direct = if active[j] { sol.eta * w[j] } else { 0.0 };
            delta[j] += 0.5 * (direct + coupling * g.d_delta[j]);
        }
    }
    Ok(())
}

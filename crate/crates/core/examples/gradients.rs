//! Partial derivatives of eta, checked against central differences.
//!
//! `cargo run --example gradients`

use clipscale::{gradient_eta, solve_eta, DomainBounds, ProblemInstance};

fn eta(x: &[f64], delta: &[f64], eps: f64) -> f64 {
    let inst =
        ProblemInstance::new(x.to_vec(), delta.to_vec(), eps, 2.0, DomainBounds::unit()).unwrap();
    solve_eta(&inst).unwrap().eta
}

pub fn main() -> clipscale::Result<()> {
    let x = [0.9, 0.5, 0.3];
    let delta = [1.0, 1.0, -0.4];
    let eps = 0.5;
    let inst = ProblemInstance::new(x.to_vec(), delta.to_vec(), eps, 2.0, DomainBounds::unit())?;
    let sol = solve_eta(&inst)?;
    let g = gradient_eta(&inst, &sol)?;
    println!(
        "eta = {:.6} ({} saturated, kink: {})",
        sol.eta, sol.saturated_count, g.at_breakpoint
    );

    let h = 1e-6;
    let fd_eps = (eta(&x, &delta, eps + h) - eta(&x, &delta, eps - h)) / (2.0 * h);
    println!(
        "d eta/d eps      analytic {:>12.8}  numeric {fd_eps:>12.8}",
        g.d_eps
    );
    for i in 0..x.len() {
        let (mut xp, mut xm) = (x, x);
        xp[i] += h;
        xm[i] -= h;
        let fd = (eta(&xp, &delta, eps) - eta(&xm, &delta, eps)) / (2.0 * h);
        println!(
            "d eta/d x[{i}]     analytic {:>12.8}  numeric {fd:>12.8}",
            g.d_x[i]
        );
    }
    for i in 0..x.len() {
        let (mut dp, mut dm) = (delta, delta);
        dp[i] += h;
        dm[i] -= h;
        let fd = (eta(&x, &dp, eps) - eta(&x, &dm, eps)) / (2.0 * h);
        println!(
            "d eta/d delta[{i}] analytic {:>12.8}  numeric {fd:>12.8}",
            g.d_delta[i]
        );
    }
    Ok(())
}

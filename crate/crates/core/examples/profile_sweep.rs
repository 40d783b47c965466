//! Build the profile once and invert it for a sweep of target norms.
//!
//! `cargo run --example profile_sweep`

use clipscale::{build_profile, DomainBounds, ProblemInstance};

pub fn main() -> clipscale::Result<()> {
    let bounds = DomainBounds::new(0.0, 255.0)?;
    let x = vec![10.0, 128.0, 250.0, 200.0, 40.0];
    let delta = vec![-3.0, 1.0, 2.0, -0.5, 4.0];
    let inst = ProblemInstance::new(x, delta, 0.0, 1.5, bounds)?;
    let profile = build_profile(&inst)?;

    println!(
        "{:>10} {:>12} {:>10} {:>12}",
        "eps", "eta", "saturated", "slope"
    );
    for k in 1..=10 {
        let eps = profile.max_norm() * k as f64 / 10.0;
        let inv = profile.invert(eps)?;
        println!(
            "{eps:>10.3} {:>12.5} {:>10} {:>12.4}",
            inv.eta, inv.saturated_count, inv.active_mass
        );
    }
    Ok(())
}

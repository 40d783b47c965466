//! Solve one instance and look at the breakpoint profile behind it.
//!
//! `cargo run --example solve_basic`

use clipscale::{
    build_profile, max_effective_norm, solve_eta, unconstrained_eta, DomainBounds, ProblemInstance,
};

pub fn main() -> clipscale::Result<()> {
    let inst = ProblemInstance::new(
        vec![0.9, 0.5],
        vec![1.0, 1.0],
        0.5,
        2.0,
        DomainBounds::unit(),
    )?;

    let profile = build_profile(&inst)?;
    println!(
        "thresholds (eta^p at which each coordinate saturates): {:?}",
        profile.thresholds()
    );
    println!(
        "segment slopes:                                        {:?}",
        profile.slopes()
    );
    println!(
        "f at each threshold:                                   {:?}",
        profile.cumulative()
    );
    println!("max attainable norm: {:.6}", max_effective_norm(&inst));

    let naive = unconstrained_eta(&inst)?;
    let sol = solve_eta(&inst)?;
    println!("eps / ||delta||      = {naive:.6}");
    println!("clipping-aware eta   = {:.6}", sol.eta);
    println!("achieved norm        = {:.12}", sol.achieved_norm);
    println!("saturated coordinates: {}", sol.saturated_count);
    println!("perturbed point: {:?}", inst.perturbed(sol.eta));

    match solve_eta(&inst.with_eps(1.0)?) {
        Err(e) => println!("eps = 1.0: {e}"),
        Ok(sol) => println!("eps = 1.0: eta = {}", sol.eta),
    }
    Ok(())
}

//! Solve a row-major batch; failing rows do not abort the others.
//!
//! `cargo run --example batch_solve`

use clipscale::{solve_eta_batch, DomainBounds};

pub fn main() -> clipscale::Result<()> {
    let width = 3;
    #[rustfmt::skip]
    let x = [
        0.2, 0.5, 0.8,
        0.9, 0.9, 0.9,
        0.5, 0.5, 0.5,
    ];
    #[rustfmt::skip]
    let delta = [
        1.0, -1.0, 0.5,
        1.0,  1.0, 1.0,
        0.0,  0.0, 0.0,
    ];
    let eps = [0.6, 0.5, 0.1];
    let results = solve_eta_batch(&x, &delta, &eps, width, 2.0, DomainBounds::unit())?;
    for (row, res) in results.iter().enumerate() {
        match res {
            Ok(sol) => println!(
                "row {row}: eta = {:.6}, saturated = {}",
                sol.eta, sol.saturated_count
            ),
            Err(e) => println!("row {row}: {e}"),
        }
    }
    Ok(())
}

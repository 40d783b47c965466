//! Time the analytic solver against bisection on the same seeded instances.
//!
//! `cargo run --release --example bisection_vs_analytic -- 1000000`

use clipscale::bench::{self, BenchConfig};

pub fn main() -> clipscale::Result<()> {
    let n = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(4096);
    let config = BenchConfig {
        n,
        batch: 4,
        trials: 3,
        seed: 1,
        ..BenchConfig::default()
    };
    let report = bench::run(&config)?;
    print!("{}", report.to_text());
    Ok(())
}

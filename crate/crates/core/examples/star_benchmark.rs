//! Times the six searches on the star / displaced-star pair and reports
//! evaluated points, steps, relative time and residual entropy.
//!
//! Run with `cargo run --release --example star_benchmark`.

use blockmatch::bench::BenchError;
use blockmatch::{
    generate_displaced_star, generate_star, render_report, run_benchmark, BenchOptions,
    BenchReport, Matcher, ReportFormat, SearchConfig, StarSpec,
};

pub fn run(repeats: usize) -> Result<BenchReport, BenchError> {
    let spec = StarSpec::default();
    let star = generate_star(&spec).expect("default star is valid");
    let displaced = generate_displaced_star(&spec).expect("default star is valid");
    // Squares move by up to 7 pixels, so widen the window accordingly.
    let config = SearchConfig {
        dm: 7,
        ..SearchConfig::default()
    };
    run_benchmark(
        &star,
        &displaced,
        &config,
        &Matcher::standard_suite(),
        BenchOptions { repeats },
    )
}

#[allow(dead_code)]
fn main() -> Result<(), BenchError> {
    let report = run(5)?;
    print!("{}", render_report(&report, ReportFormat::Table));
    Ok(())
}

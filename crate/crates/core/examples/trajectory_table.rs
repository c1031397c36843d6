//! Points and steps each search needs on a synthetic bowl-shaped cost
//! surface: for target (2,6) and for the worst target in the window.
//!
//! Run with `cargo run --example trajectory_table -- [dm]`.

use blockmatch::{run_trajectory_table, ReportFormat};

pub fn run(dm: u32) -> String {
    run_trajectory_table(dm).render(ReportFormat::Table)
}

#[allow(dead_code)]
fn main() {
    let dm = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(6);
    print!("{}", run(dm));
}

//! Writes the star and displaced-star test frames as PGM files.
//!
//! Run with `cargo run --example star_frames -- <output-dir>`.

use std::path::{Path, PathBuf};

use blockmatch::frame::FrameError;
use blockmatch::{generate_displaced_star, generate_star, save_pgm, StarSpec};

pub fn run(dir: &Path) -> Result<(PathBuf, PathBuf), FrameError> {
    let spec = StarSpec::default();
    let star = generate_star(&spec)?;
    let displaced = generate_displaced_star(&spec)?;

    let squares = spec.squares(true)?;
    let moved = squares.iter().filter(|s| s.shift != (0, 0)).count();
    println!(
        "{}x{} star: {} squares, {} of them displaced (max shift {} px)",
        star.width(),
        star.height(),
        squares.len(),
        moved,
        spec.max_displacement
    );

    let star_path = dir.join("star.pgm");
    let displaced_path = dir.join("star_displaced.pgm");
    save_pgm(&star, &star_path)?;
    save_pgm(&displaced, &displaced_path)?;
    Ok((star_path, displaced_path))
}

#[allow(dead_code)]
fn main() -> Result<(), FrameError> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| ".".into());
    let (a, b) = run(&dir)?;
    println!("wrote {} and {}", a.display(), b.display());
    Ok(())
}

//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::bench::{parse_algorithms, render_report, run_benchmark, run_trajectory_table, BenchError, BenchOptions, ReportFormat};
use crate::compensation::{build_prediction, estimate_field, residual, CompensationError, VectorField};
use crate::frame::{export_residual_view, generate_displaced_star, generate_star, load_pgm, save_pgm, FrameError, StarSpec};
use crate::matchers::{AlgorithmId, Matcher, ModConjOptions};
use crate::metrics::{MetricReport, MetricsError};
use crate::search::{Criterion, SearchConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Compensation(#[from] CompensationError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Usage(#[from] clap::Error),
}

/// Block-matching motion estimation toolkit.
#[derive(Debug, Parser)]
#[command(name = "blockmatch", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the star test image and optionally its displaced version.
    Genstar {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        displaced: Option<PathBuf>,
        #[arg(long, default_value_t = 512)]
        size: usize,
        #[arg(long, default_value_t = 16)]
        block: usize,
        #[arg(long, default_value_t = 32)]
        pitch: usize,
        #[arg(long = "max-disp", default_value_t = 7)]
        max_disp: usize,
    },
    /// Print points/steps for target (2,6) and the worst case over the window.
    Trajectory {
        #[arg(long, default_value_t = 6)]
        dm: u32,
        #[arg(long, default_value = "table")]
        format: ReportFormat,
    },
    /// Estimate a vector field between two frames.
    Estimate {
        #[command(flatten)]
        pair: FramePair,
        #[arg(long)]
        algo: AlgorithmId,
        #[arg(long)]
        variation1: bool,
        #[arg(long)]
        variation2: bool,
        #[arg(long = "full-cda")]
        full_cda: bool,
        #[arg(long, default_value_t = 6)]
        dm: u32,
        #[arg(long, default_value_t = 16)]
        block: usize,
        #[arg(long, default_value = "mad")]
        criterion: Criterion,
        #[arg(long = "no-zero-stop")]
        no_zero_stop: bool,
        /// Output vector field CSV.
        #[arg(long)]
        field: PathBuf,
        /// Optional summary statistics.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Build the motion-compensated prediction from a vector field.
    Compensate {
        #[arg(long)]
        prev: PathBuf,
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Current frame; required for --residual-view.
        #[arg(long)]
        cur: Option<PathBuf>,
        #[arg(long = "residual-view", requires = "cur")]
        residual_view: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        block: usize,
    },
    /// Entropy, variance and PSNR of cur - pred.
    Metrics {
        #[arg(long)]
        cur: PathBuf,
        #[arg(long)]
        pred: PathBuf,
    },
    /// Time algorithms on a frame pair and report points, steps and entropy.
    Bench {
        #[command(flatten)]
        pair: FramePair,
        #[arg(long, default_value = "all")]
        algos: String,
        #[arg(long, default_value_t = 6)]
        dm: u32,
        #[arg(long, default_value_t = 16)]
        block: usize,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value = "table")]
        format: ReportFormat,
    },
}

#[derive(Debug, Args)]
struct FramePair {
    #[arg(long)]
    prev: PathBuf,
    #[arg(long)]
    cur: PathBuf,
}

fn write_file(path: &PathBuf, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses `args` (including the program name) and runs the subcommand,
/// writing normal output to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let stdout_err = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    match cli.command {
        Command::Genstar {
            out: star_path,
            displaced,
            size,
            block,
            pitch,
            max_disp,
        } => {
            let spec = StarSpec {
                image_size: size,
                square_size: block,
                pitch,
                max_displacement: max_disp,
            };
            save_pgm(&generate_star(&spec)?, &star_path)?;
            if let Some(path) = displaced {
                save_pgm(&generate_displaced_star(&spec)?, &path)?;
            }
        }
        Command::Trajectory { dm, format } => {
            let table = run_trajectory_table(dm);
            out.write_all(table.render(format).as_bytes()).map_err(stdout_err)?;
        }
        Command::Estimate {
            pair,
            algo,
            variation1,
            variation2,
            full_cda,
            dm,
            block,
            criterion,
            no_zero_stop,
            field,
            stats,
        } => {
            let prev = load_pgm(&pair.prev)?;
            let cur = load_pgm(&pair.cur)?;
            let config = SearchConfig {
                block_size: block,
                dm,
                criterion,
                stop_on_zero: !no_zero_stop,
            };
            let matcher = Matcher::with_options(
                algo,
                ModConjOptions {
                    variation1,
                    variation2,
                    full_cda,
                },
            );
            let vf = estimate_field(&prev, &cur, &config, matcher)?;
            let mut buf = Vec::new();
            vf.write_csv(&mut buf)?;
            write_file(&field, &buf)?;
            let summary = format!(
                "method={}\nblocks={}\npoints={}\nsteps={}\ncost={}\n",
                matcher.label(),
                vf.entries().len(),
                vf.total_points(),
                vf.total_steps(),
                vf.total_cost()
            );
            match stats {
                Some(path) => write_file(&path, summary.as_bytes())?,
                None => out.write_all(summary.as_bytes()).map_err(stdout_err)?,
            }
        }
        Command::Compensate {
            prev,
            field,
            pred,
            cur,
            residual_view,
            block,
        } => {
            let prev = load_pgm(&prev)?;
            let file = fs::File::open(&field).map_err(|source| CliError::Io {
                path: field.display().to_string(),
                source,
            })?;
            let vf = VectorField::read_csv(file, block)?;
            let prediction = build_prediction(&prev, &vf)?;
            save_pgm(&prediction, &pred)?;
            if let (Some(cur), Some(view)) = (cur, residual_view) {
                let cur = load_pgm(&cur)?;
                save_pgm(&export_residual_view(&residual(&cur, &prediction)?), &view)?;
            }
        }
        Command::Metrics { cur, pred } => {
            let cur = load_pgm(&cur)?;
            let pred = load_pgm(&pred)?;
            let report = MetricReport::of_frames(&cur, &pred)?;
            writeln!(out, "{}", report.to_json()).map_err(stdout_err)?;
        }
        Command::Bench {
            pair,
            algos,
            dm,
            block,
            repeats,
            format,
        } => {
            let prev = load_pgm(&pair.prev)?;
            let cur = load_pgm(&pair.cur)?;
            let matchers = parse_algorithms(&algos)?;
            let config = SearchConfig {
                block_size: block,
                dm,
                ..SearchConfig::default()
            };
            let report = run_benchmark(&prev, &cur, &config, &matchers, BenchOptions { repeats })?;
            out.write_all(render_report(&report, format).as_bytes()).map_err(stdout_err)?;
        }
    }
    Ok(())
}

/// Entry point used by the binary: 0 on success, 2 for usage errors, 1 otherwise.
pub fn cli_main<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(args, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

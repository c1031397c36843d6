//! Benchmark harness: point/step trajectory tables on a synthetic unimodal
//! surface, and timed whole-frame runs with residual entropy.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::compensation::{build_prediction, estimate_field, plain_difference, residual, CompensationError};
use crate::frame::Frame;
use crate::matchers::{AlgorithmId, Matcher, ModConjOptions};
use crate::metrics::{entropy, MetricsError};
use crate::search::{CostProbe, DistanceCost, MotionVector, SearchConfig};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Compensation(#[from] CompensationError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{0}")]
    UnknownAlgorithm(String),
    #[error("empty algorithm list")]
    NoAlgorithms,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Table,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown format {other:?} (expected table or csv)")),
        }
    }
}

/// Counts for one matcher on one synthetic target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrajectoryCase {
    pub target: MotionVector,
    pub dm: u32,
    pub found: MotionVector,
    pub points: usize,
    pub steps: usize,
}

/// Trace of one matcher against the distance-to-target surface, with stop-on-zero off.
pub fn trace_target(matcher: Matcher, target: MotionVector, dm: u32) -> TrajectoryCase {
    let mut probe = CostProbe::new(DistanceCost::new(target), dm, false);
    let r = matcher.search(&mut probe);
    TrajectoryCase {
        target,
        dm,
        found: r.vector,
        points: r.points,
        steps: r.steps,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryRow {
    pub matcher: Matcher,
    /// `None` when the reference target lies outside the window.
    pub at_target: Option<TrajectoryCase>,
    /// Case with the most points over every target in the window.
    pub worst_points: TrajectoryCase,
    /// Case with the most steps over every target in the window.
    pub worst_steps: TrajectoryCase,
    pub min_points: usize,
    /// Targets the matcher does not land on exactly.
    pub misses: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryTable {
    pub dm: u32,
    pub target: MotionVector,
    pub rows: Vec<TrajectoryRow>,
}

/// The six algorithms followed by the modified conjugate variations and full CDA.
pub fn trajectory_matchers() -> Vec<Matcher> {
    let mut out = Matcher::standard_suite();
    let mc = |variation1, variation2| {
        Matcher::with_options(
            AlgorithmId::ModifiedConjugate,
            ModConjOptions {
                variation1,
                variation2,
                full_cda: false,
            },
        )
    };
    out.push(mc(true, false));
    out.push(mc(false, true));
    out.push(mc(true, true));
    out.push(Matcher::with_options(
        AlgorithmId::ConjugateOts,
        ModConjOptions {
            full_cda: true,
            ..Default::default()
        },
    ));
    out
}

/// Point and step counts at target (2,6) and over every target in the window.
pub fn run_trajectory_table(dm: u32) -> TrajectoryTable {
    run_trajectory_table_with(dm, MotionVector::new(2, 6), &trajectory_matchers())
}

pub fn run_trajectory_table_with(dm: u32, target: MotionVector, matchers: &[Matcher]) -> TrajectoryTable {
    let dm = dm.max(1);
    let d = dm as i32;
    let targets: Vec<MotionVector> = (-d..=d)
        .flat_map(|dy| (-d..=d).map(move |dx| MotionVector::new(dx, dy)))
        .collect();
    let rows = matchers
        .iter()
        .map(|&m| {
            let cases: Vec<TrajectoryCase> = targets.iter().map(|&t| trace_target(m, t, dm)).collect();
            // First maximum in raster order.
            let worst_by = |key: fn(&TrajectoryCase) -> usize| {
                *cases
                    .iter()
                    .fold(None::<&TrajectoryCase>, |acc, c| match acc {
                        Some(a) if key(a) >= key(c) => Some(a),
                        _ => Some(c),
                    })
                    .expect("window is non-empty")
            };
            TrajectoryRow {
                matcher: m,
                at_target: target.within(dm).then(|| trace_target(m, target, dm)),
                worst_points: worst_by(|c| c.points),
                worst_steps: worst_by(|c| c.steps),
                min_points: cases.iter().map(|c| c.points).min().unwrap_or(0),
                misses: cases.iter().filter(|c| c.found != c.target).count(),
            }
        })
        .collect();
    TrajectoryTable { dm, target, rows }
}

impl TrajectoryTable {
    pub fn row(&self, matcher: Matcher) -> Option<&TrajectoryRow> {
        self.rows.iter().find(|r| r.matcher == matcher)
    }

    pub fn render(&self, format: ReportFormat) -> String {
        let mut out = String::new();
        let cell = |c: &Option<TrajectoryCase>, f: fn(&TrajectoryCase) -> usize| {
            c.as_ref().map_or_else(|| "-".to_string(), |c| f(c).to_string())
        };
        match format {
            ReportFormat::Csv => {
                out.push_str("method,target_points,target_steps,worst_points,worst_steps,min_points,misses\n");
                for r in &self.rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        r.matcher.label(),
                        cell(&r.at_target, |c| c.points),
                        cell(&r.at_target, |c| c.steps),
                        r.worst_points.points,
                        r.worst_steps.steps,
                        r.min_points,
                        r.misses
                    );
                }
            }
            ReportFormat::Table => {
                let _ = writeln!(
                    out,
                    "dm = {}   A) target {}   B) worst case over {} targets",
                    self.dm,
                    self.target,
                    (2 * self.dm + 1).pow(2)
                );
                let _ = writeln!(
                    out,
                    "{:<26} {:>8} {:>8} {:>8} {:>8} {:>7}",
                    "METHOD", "POINTS A", "POINTS B", "STEPS A", "STEPS B", "MISSES"
                );
                for r in &self.rows {
                    let _ = writeln!(
                        out,
                        "{:<26} {:>8} {:>8} {:>8} {:>8} {:>7}",
                        r.matcher.label(),
                        cell(&r.at_target, |c| c.points),
                        r.worst_points.points,
                        cell(&r.at_target, |c| c.steps),
                        r.worst_steps.steps,
                        r.misses
                    );
                }
            }
        }
        out
    }
}

/// Parses `all` or a comma-separated list of algorithm names.
pub fn parse_algorithms(list: &str) -> Result<Vec<Matcher>, BenchError> {
    if list.trim().eq_ignore_ascii_case("all") {
        return Ok(Matcher::standard_suite());
    }
    let out = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<AlgorithmId>().map(Matcher::new))
        .collect::<Result<Vec<_>, _>>()
        .map_err(BenchError::UnknownAlgorithm)?;
    if out.is_empty() {
        return Err(BenchError::NoAlgorithms);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchOptions {
    /// Timed repetitions per algorithm; the median is reported.
    pub repeats: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { repeats: 5 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub matcher: Matcher,
    pub points: usize,
    pub steps: usize,
    pub wall_time: Duration,
    /// Percent of the LOG2D wall time, when LOG2D was run.
    pub relative_time: Option<f64>,
    /// Entropy of the motion-compensated residual, bits/pixel.
    pub entropy: f64,
    pub total_cost: u64,
    /// Total cost divided by the full-search total, when full search was run.
    pub normalized_cost: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub config: SearchConfig,
    pub rows: Vec<BenchRow>,
    /// Entropy of the difference without motion compensation.
    pub plain_entropy: f64,
}

impl BenchReport {
    pub fn row(&self, algorithm: AlgorithmId) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.matcher.algorithm == algorithm)
    }
}

fn median(mut samples: Vec<Duration>) -> Duration {
    samples.sort();
    samples[samples.len() / 2]
}

/// Runs every matcher over the frame pair single-threaded, timing
/// `opts.repeats` estimations each.
pub fn run_benchmark(
    prev: &Frame,
    cur: &Frame,
    config: &SearchConfig,
    matchers: &[Matcher],
    opts: BenchOptions,
) -> Result<BenchReport, BenchError> {
    if matchers.is_empty() {
        return Err(BenchError::NoAlgorithms);
    }
    let plain_entropy = entropy(plain_difference(prev, cur)?.values())?;
    let mut rows = Vec::with_capacity(matchers.len());
    for &m in matchers {
        let mut samples = Vec::with_capacity(opts.repeats.max(1));
        let mut field = None;
        for _ in 0..opts.repeats.max(1) {
            let start = Instant::now();
            let f = estimate_field(prev, cur, config, m)?;
            samples.push(start.elapsed());
            field = Some(f);
        }
        let field = field.expect("at least one repetition");
        let pred = build_prediction(prev, &field)?;
        let res = residual(cur, &pred)?;
        rows.push(BenchRow {
            matcher: m,
            points: field.total_points(),
            steps: field.total_steps(),
            wall_time: median(samples),
            relative_time: None,
            entropy: entropy(res.values())?,
            total_cost: field.total_cost(),
            normalized_cost: None,
        });
    }

    let reference = rows
        .iter()
        .find(|r| r.matcher.algorithm == AlgorithmId::Log2d)
        .map(|r| r.wall_time);
    let full_cost = rows
        .iter()
        .find(|r| r.matcher.algorithm == AlgorithmId::FullSearch)
        .map(|r| r.total_cost);
    for r in &mut rows {
        r.relative_time = reference.map(|t| {
            if r.matcher.algorithm == AlgorithmId::Log2d {
                100.0
            } else {
                100.0 * r.wall_time.as_secs_f64() / t.as_secs_f64().max(f64::MIN_POSITIVE)
            }
        });
        r.normalized_cost = full_cost.map(|full| match (r.total_cost, full) {
            (0, 0) => 1.0,
            (c, 0) => c as f64 / 0.0,
            (c, full) => c as f64 / full as f64,
        });
    }
    Ok(BenchReport {
        config: *config,
        rows,
        plain_entropy,
    })
}

/// Renders a report with columns method, points, steps, time, relative %, entropy, normalized cost.
pub fn render_report(report: &BenchReport, format: ReportFormat) -> String {
    let opt = |v: Option<f64>, prec: usize| v.map_or_else(|| "-".to_string(), |v| format!("{v:.prec$}"));
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str("method,points,steps,time_us,relative_pct,entropy_bits,normalized_cost\n");
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{:.4},{}",
                    r.matcher.label(),
                    r.points,
                    r.steps,
                    r.wall_time.as_micros(),
                    opt(r.relative_time, 2),
                    r.entropy,
                    opt(r.normalized_cost, 4)
                );
            }
        }
        ReportFormat::Table => {
            let _ = writeln!(
                out,
                "{:<26} {:>10} {:>10} {:>12} {:>10} {:>9} {:>10}",
                "METHOD", "POINTS", "STEPS", "TIME (us)", "REL. (%)", "ENTROPY", "NORM.COST"
            );
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "{:<26} {:>10} {:>10} {:>12} {:>10} {:>9.4} {:>10}",
                    r.matcher.label(),
                    r.points,
                    r.steps,
                    r.wall_time.as_micros(),
                    opt(r.relative_time, 2),
                    r.entropy,
                    opt(r.normalized_cost, 4)
                );
            }
            let _ = writeln!(out, "plain difference entropy: {:.4}", report.plain_entropy);
        }
    }
    out
}

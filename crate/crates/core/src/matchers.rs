//! Block-matching search strategies.
//!
//! Each matcher drives a fresh [`CostProbe`] and returns a [`MatchResult`].
//! A *step* is one decision stage: a pattern evaluation, a single-point walk
//! extension, a half-axis pair or a refine. Stages whose candidates all fall
//! outside the window are not counted.

use std::fmt;
use std::str::FromStr;

use crate::search::{CostProbe, CostSource, Flow, MatchResult, MotionVector, Scored};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmId {
    FullSearch,
    Log2d,
    ThreeStep,
    ConjugateOts,
    Orthogonal,
    ModifiedConjugate,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 6] = [
        AlgorithmId::FullSearch,
        AlgorithmId::Log2d,
        AlgorithmId::ThreeStep,
        AlgorithmId::ConjugateOts,
        AlgorithmId::Orthogonal,
        AlgorithmId::ModifiedConjugate,
    ];

    /// Short command-line name.
    pub fn short_name(self) -> &'static str {
        match self {
            AlgorithmId::FullSearch => "full",
            AlgorithmId::Log2d => "log2d",
            AlgorithmId::ThreeStep => "tss",
            AlgorithmId::ConjugateOts => "ots",
            AlgorithmId::Orthogonal => "osa",
            AlgorithmId::ModifiedConjugate => "modconj",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AlgorithmId::FullSearch => "FULL_SEARCH",
            AlgorithmId::Log2d => "LOG2D",
            AlgorithmId::ThreeStep => "THREE_STEP",
            AlgorithmId::ConjugateOts => "CONJUGATE_OTS",
            AlgorithmId::Orthogonal => "ORTHOGONAL",
            AlgorithmId::ModifiedConjugate => "MODIFIED_CONJUGATE",
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AlgorithmId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        let id = match key.as_str() {
            "full" | "full_search" | "fs" => AlgorithmId::FullSearch,
            "log2d" | "log" | "2dlog" | "logarithmic" => AlgorithmId::Log2d,
            "tss" | "three_step" | "threestep" => AlgorithmId::ThreeStep,
            "ots" | "cda" | "conjugate" | "conjugate_ots" => AlgorithmId::ConjugateOts,
            "osa" | "orthogonal" => AlgorithmId::Orthogonal,
            "modconj" | "modified_conjugate" | "mod_conj" => AlgorithmId::ModifiedConjugate,
            _ => {
                return Err(format!(
                    "unknown algorithm {s:?} (expected full, log2d, tss, ots, osa or modconj)"
                ))
            }
        };
        Ok(id)
    }
}

/// Option flags; `variation1`/`variation2` apply to the modified conjugate
/// search and `full_cda` to the one-at-a-time search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ModConjOptions {
    /// Defer the step-1 X adjustment until after the coarse Y phase.
    pub variation1: bool,
    /// Refine by probing only the neighbour on the side of the cheaper coarse flank.
    pub variation2: bool,
    /// Keep alternating X and Y walks until neither axis moves.
    pub full_cda: bool,
}

/// An algorithm together with its option flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Matcher {
    pub algorithm: AlgorithmId,
    pub options: ModConjOptions,
}

impl Matcher {
    pub fn new(algorithm: AlgorithmId) -> Self {
        Self {
            algorithm,
            options: ModConjOptions::default(),
        }
    }

    pub fn with_options(algorithm: AlgorithmId, options: ModConjOptions) -> Self {
        Self { algorithm, options }
    }

    /// The six algorithms with default options.
    pub fn standard_suite() -> Vec<Matcher> {
        AlgorithmId::ALL.into_iter().map(Matcher::new).collect()
    }

    /// Label including any active option flags, e.g. `MODIFIED_CONJUGATE+V1+V2`.
    pub fn label(&self) -> String {
        let mut label = self.algorithm.label().to_string();
        match self.algorithm {
            AlgorithmId::ModifiedConjugate => {
                if self.options.variation1 {
                    label.push_str("+V1");
                }
                if self.options.variation2 {
                    label.push_str("+V2");
                }
            }
            AlgorithmId::ConjugateOts if self.options.full_cda => label.push_str("+CDA"),
            _ => {}
        }
        label
    }

    /// Runs the search on `probe`, which must be fresh.
    pub fn search<S: CostSource>(&self, probe: &mut CostProbe<S>) -> MatchResult {
        match self.algorithm {
            AlgorithmId::FullSearch => full_search(probe),
            AlgorithmId::Log2d => log2d_search(probe),
            AlgorithmId::ThreeStep => three_step_search(probe),
            AlgorithmId::ConjugateOts => ots_search(probe, self.options.full_cda),
            AlgorithmId::Orthogonal => orthogonal_search(probe),
            AlgorithmId::ModifiedConjugate => modified_conjugate_search(probe, self.options),
        }
    }
}

impl From<AlgorithmId> for Matcher {
    fn from(algorithm: AlgorithmId) -> Self {
        Matcher::new(algorithm)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Axis {
    X,
    Y,
}

impl Axis {
    #[inline]
    fn shift(self, mv: MotionVector, by: i32) -> MotionVector {
        match self {
            Axis::X => mv.offset(by, 0),
            Axis::Y => mv.offset(0, by),
        }
    }

    #[inline]
    fn coord(self, mv: MotionVector) -> i32 {
        match self {
            Axis::X => mv.dx,
            Axis::Y => mv.dy,
        }
    }
}

/// Step schedule shared by the three-step and orthogonal searches:
/// `ceil(dm/2)` halved (rounding up) down to 1. For `dm = 6` this is 3, 2, 1.
pub fn halving_schedule(dm: u32) -> Vec<i32> {
    let mut s = dm.div_ceil(2).max(1) as i32;
    let mut out = vec![s];
    while s > 1 {
        s = (s + 1) / 2;
        out.push(s);
    }
    out
}

/// Initial cross spacing of the 2-D logarithmic search, `2^(floor(log2 dm) - 1)`.
pub fn log2d_initial_step(dm: u32) -> i32 {
    let n = dm.max(1).ilog2();
    if n == 0 {
        1
    } else {
        1 << (n - 1)
    }
}

fn square_ring(center: MotionVector, s: i32) -> Vec<MotionVector> {
    let mut out = Vec::with_capacity(8);
    for oy in [-s, 0, s] {
        for ox in [-s, 0, s] {
            if ox != 0 || oy != 0 {
                out.push(center.offset(ox, oy));
            }
        }
    }
    out
}

fn cross(center: MotionVector, s: i32) -> [MotionVector; 4] {
    [
        center.offset(-s, 0),
        center.offset(s, 0),
        center.offset(0, -s),
        center.offset(0, s),
    ]
}

/// Exhaustive search over the whole window. The zero vector is evaluated
/// first, then the remaining candidates in raster order (`dy` outer).
pub fn full_search<S: CostSource>(probe: &mut CostProbe<S>) -> MatchResult {
    let dm = probe.dm() as i32;
    let mut candidates = vec![MotionVector::ZERO];
    for dy in -dm..=dm {
        for dx in -dm..=dm {
            let mv = MotionVector::new(dx, dy);
            if mv != MotionVector::ZERO && probe.is_valid(mv) {
                candidates.push(mv);
            }
        }
    }
    let outcome = probe.open(&candidates);
    probe.finish(outcome)
}

/// Keeps stepping from `from` toward `best` (one stage per new point) while
/// each new point is strictly cheaper and stays inside the window.
fn extend<S: CostSource>(
    probe: &mut CostProbe<S>,
    from: MotionVector,
    mut best: Scored,
    axis: Axis,
    step: i32,
) -> Flow<Scored> {
    if best.mv == from {
        return Ok(best);
    }
    let dir = (axis.coord(best.mv) - axis.coord(from)).signum() * step;
    loop {
        let next = axis.shift(best.mv, dir);
        if !probe.is_valid(next) {
            return Ok(best);
        }
        let moved = probe.stage(&[next], best)?;
        if moved.mv == best.mv {
            return Ok(best);
        }
        best = moved;
    }
}

/// Examines both flanks of `center` along `axis` and walks toward the cheaper one.
fn axis_walk<S: CostSource>(
    probe: &mut CostProbe<S>,
    center: Scored,
    axis: Axis,
    step: i32,
) -> Flow<Scored> {
    let flanks = [axis.shift(center.mv, -step), axis.shift(center.mv, step)];
    let best = probe.stage(&flanks, center)?;
    extend(probe, center.mv, best, axis, step)
}

/// One-at-a-time search (the simplified conjugate direction method): a unit
/// walk along X to a local minimum, then along Y. With `full_cda` the walks
/// alternate until neither axis moves.
pub fn ots_search<S: CostSource>(probe: &mut CostProbe<S>, full_cda: bool) -> MatchResult {
    let outcome = (|| {
        let origin = MotionVector::ZERO;
        let opening = probe.open(&[origin, origin.offset(-1, 0), origin.offset(1, 0)])?;
        let mut best = extend(probe, origin, opening, Axis::X, 1)?;
        best = axis_walk(probe, best, Axis::Y, 1)?;
        if full_cda {
            loop {
                let before = best.mv;
                best = axis_walk(probe, best, Axis::X, 1)?;
                best = axis_walk(probe, best, Axis::Y, 1)?;
                if best.mv == before {
                    break;
                }
            }
        }
        Ok(best)
    })();
    probe.finish(outcome)
}

/// 2-D logarithmic search: a cross of spacing `s` around the incumbent,
/// recentred on the winner; `s` halves whenever the centre wins or the winner
/// sits on the window boundary, and a 3×3 pattern at spacing 1 concludes.
pub fn log2d_search<S: CostSource>(probe: &mut CostProbe<S>) -> MatchResult {
    let dm = probe.dm() as i32;
    let on_boundary = |mv: MotionVector| mv.dx.abs() == dm || mv.dy.abs() == dm;
    let outcome = (|| {
        let mut s = log2d_initial_step(probe.dm());
        let mut center = MotionVector::ZERO;
        let mut candidates = vec![center];
        candidates.extend(cross(center, s));
        let mut best = probe.open(&candidates)?;
        while s > 1 {
            if best.mv == center || on_boundary(best.mv) {
                s /= 2;
                center = best.mv;
                if s == 1 {
                    break;
                }
            } else {
                center = best.mv;
            }
            best = probe.stage(&cross(center, s), best)?;
        }
        probe.stage(&square_ring(best.mv, 1), best)
    })();
    probe.finish(outcome)
}

/// Three-step search: 3×3 patterns with the halving step schedule.
pub fn three_step_search<S: CostSource>(probe: &mut CostProbe<S>) -> MatchResult {
    let schedule = halving_schedule(probe.dm());
    let outcome = (|| {
        let mut candidates = vec![MotionVector::ZERO];
        candidates.extend(square_ring(MotionVector::ZERO, schedule[0]));
        let mut best = probe.open(&candidates)?;
        for &s in &schedule[1..] {
            best = probe.stage(&square_ring(best.mv, s), best)?;
        }
        Ok(best)
    })();
    probe.finish(outcome)
}

/// Orthogonal search: for each step size, a horizontal pair then a vertical pair.
pub fn orthogonal_search<S: CostSource>(probe: &mut CostProbe<S>) -> MatchResult {
    let schedule = halving_schedule(probe.dm());
    let outcome = (|| {
        let origin = MotionVector::ZERO;
        let s0 = schedule[0];
        let mut best = probe.open(&[origin, origin.offset(-s0, 0), origin.offset(s0, 0)])?;
        for (i, &s) in schedule.iter().enumerate() {
            if i > 0 {
                best = probe.stage(&[best.mv.offset(-s, 0), best.mv.offset(s, 0)], best)?;
            }
            best = probe.stage(&[best.mv.offset(0, -s), best.mv.offset(0, s)], best)?;
        }
        Ok(best)
    })();
    probe.finish(outcome)
}

/// Unit-step refine along `axis`.
///
/// The full refine examines both neighbours. The single-sided refine probes
/// only the neighbour facing the cheaper spacing-2 flank, with flank costs read
/// from the memo at `flank_row` (unevaluated flanks count as infinite, a tie
/// goes to the minus side).
fn refine<S: CostSource>(
    probe: &mut CostProbe<S>,
    best: Scored,
    axis: Axis,
    single_sided: bool,
    flank_row: MotionVector,
) -> Flow<Scored> {
    if !single_sided {
        let neighbours = [axis.shift(best.mv, -1), axis.shift(best.mv, 1)];
        return probe.stage(&neighbours, best);
    }
    let flank = |by: i32| {
        probe
            .memoized(axis.shift(flank_row, by))
            .map_or(u128::MAX, u128::from)
    };
    let side = if flank(2) < flank(-2) { 1 } else { -1 };
    probe.stage(&[axis.shift(best.mv, side)], best)
}

/// Modified conjugate direction search.
///
/// Coarse walks use spacing 2 (one new point per extension, since the
/// opposite flank is already memoized) and fall back to a unit-step refine
/// once the centre wins or the window edge is reached. X is handled first,
/// then Y.
pub fn modified_conjugate_search<S: CostSource>(
    probe: &mut CostProbe<S>,
    opts: ModConjOptions,
) -> MatchResult {
    let outcome = (|| {
        let origin = MotionVector::ZERO;
        let opening = probe.open(&[origin, origin.offset(-2, 0), origin.offset(2, 0)])?;
        let mut best = extend(probe, origin, opening, Axis::X, 2)?;
        // Single-sided refines read flanks on the row (X) or column (Y)
        // that the corresponding coarse walk visited.
        let x_row = best.mv;
        if !opts.variation1 {
            best = refine(probe, best, Axis::X, opts.variation2, x_row)?;
        }
        best = axis_walk(probe, best, Axis::Y, 2)?;
        let y_column = best.mv.dx;
        if opts.variation1 {
            if opts.variation2 {
                let row = MotionVector::new(best.mv.dx, x_row.dy);
                best = refine(probe, best, Axis::X, true, row)?;
                let column = MotionVector::new(y_column, best.mv.dy);
                best = refine(probe, best, Axis::Y, true, column)?;
            } else {
                best = axis_walk(probe, best, Axis::X, 1)?;
                best = axis_walk(probe, best, Axis::Y, 1)?;
            }
        } else {
            best = refine(probe, best, Axis::Y, opts.variation2, best.mv)?;
        }
        Ok(best)
    })();
    probe.finish(outcome)
}

//! Matching criteria, the bounded search window and the memoizing cost probe.
//!
//! Every matcher talks to the block being estimated only through a
//! [`CostProbe`]. The probe memoizes costs per displacement, so the number of
//! unique evaluated points is simply the size of its memo, and it carries the
//! step counter the matchers advance once per decision stage.
//!
//! Costs are exact integer sums (of absolute or squared differences). The
//! division by the block area happens only when a cost is reported, so two
//! candidates never swap order through rounding.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::frame::Frame;

/// Integer displacement of a block between two frames.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MotionVector {
    pub dx: i32,
    pub dy: i32,
}

impl MotionVector {
    pub const ZERO: MotionVector = MotionVector { dx: 0, dy: 0 };

    #[inline]
    pub const fn new(dx: i32, dy: i32) -> Self {
        Self { dx, dy }
    }

    #[inline]
    pub fn offset(self, ddx: i32, ddy: i32) -> Self {
        Self::new(self.dx + ddx, self.dy + ddy)
    }

    /// True when both components lie in `[-dm, dm]`.
    #[inline]
    pub fn within(self, dm: u32) -> bool {
        self.dx.unsigned_abs() <= dm && self.dy.unsigned_abs() <= dm
    }
}

impl fmt::Display for MotionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.dx, self.dy)
    }
}

impl From<(i32, i32)> for MotionVector {
    fn from((dx, dy): (i32, i32)) -> Self {
        Self::new(dx, dy)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// Mean absolute difference.
    #[default]
    Mad,
    /// Mean squared difference.
    Mse,
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mad" => Ok(Criterion::Mad),
            "mse" => Ok(Criterion::Mse),
            other => Err(format!("unknown criterion {other:?} (expected mad or mse)")),
        }
    }
}

/// `SQUARES[d + 255] == d * d` for every pixel difference `d` in `[-255, 255]`.
static SQUARES: [u32; 511] = {
    let mut table = [0u32; 511];
    let mut i = 0;
    while i < 511 {
        let d = i as i32 - 255;
        table[i] = (d * d) as u32;
        i += 1;
    }
    table
};

#[inline]
fn square_of_difference(a: u8, b: u8) -> u64 {
    SQUARES[(a as i32 - b as i32 + 255) as usize] as u64
}

impl Criterion {
    /// Integer criterion sum over two equal-length pixel sequences.
    #[inline]
    pub fn sum<'a>(self, a: impl IntoIterator<Item = &'a u8>, b: impl IntoIterator<Item = &'a u8>) -> u64 {
        let pairs = a.into_iter().zip(b);
        match self {
            Criterion::Mad => pairs.map(|(&x, &y)| x.abs_diff(y) as u64).sum(),
            Criterion::Mse => pairs.map(|(&x, &y)| square_of_difference(x, y)).sum(),
        }
    }

    /// Criterion value of two equal-size blocks, i.e. the sum divided by the pixel count.
    pub fn evaluate(self, block_a: &[u8], block_b: &[u8]) -> Result<f64, SearchError> {
        if block_a.len() != block_b.len() {
            return Err(SearchError::DimensionMismatch {
                left: block_a.len(),
                right: block_b.len(),
            });
        }
        if block_a.is_empty() {
            return Ok(0.0);
        }
        Ok(self.sum(block_a, block_b) as f64 / block_a.len() as f64)
    }
}

/// Mean absolute difference of two equal-size blocks.
pub fn mad(block_a: &[u8], block_b: &[u8]) -> Result<f64, SearchError> {
    Criterion::Mad.evaluate(block_a, block_b)
}

/// Mean squared difference of two equal-size blocks, squares taken from a lookup table.
pub fn mse(block_a: &[u8], block_b: &[u8]) -> Result<f64, SearchError> {
    Criterion::Mse.evaluate(block_a, block_b)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("block sizes differ: {left} vs {right} pixels")]
    DimensionMismatch { left: usize, right: usize },
    #[error("candidate {0} lies outside the search window")]
    InvalidCandidate(MotionVector),
    #[error("no valid candidate and no incumbent")]
    NoCandidates,
    #[error("block at ({x},{y}) does not fit inside the frame")]
    BlockOutsideFrame { x: usize, y: usize },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

/// Search parameters shared by every matcher.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Block side length N.
    pub block_size: usize,
    /// Maximum displacement per axis.
    pub dm: u32,
    pub criterion: Criterion,
    /// Terminate a search as soon as any evaluation returns cost 0.
    pub stop_on_zero: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            block_size: 16,
            dm: 6,
            criterion: Criterion::Mad,
            stop_on_zero: true,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.block_size == 0 {
            return Err(SearchError::InvalidConfig("block size must be at least 1".into()));
        }
        if self.dm == 0 {
            return Err(SearchError::InvalidConfig(
                "maximum displacement must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Number of candidate displacements in the window, `(2dm+1)^2`.
    pub fn candidate_count(&self) -> usize {
        let side = 2 * self.dm as usize + 1;
        side * side
    }

    /// Side length in pixels of the area a full search scans, `2dm+N`.
    pub fn search_area_extent(&self) -> usize {
        2 * self.dm as usize + self.block_size
    }
}

/// True iff `mv` is inside the `dm` window and the displaced `n`×`n` window at
/// `origin + mv` lies fully inside a `frame_w`×`frame_h` frame.
pub fn candidate_valid(
    mv: MotionVector,
    origin: (usize, usize),
    frame_dims: (usize, usize),
    block_size: usize,
    dm: u32,
) -> bool {
    if !mv.within(dm) {
        return false;
    }
    let x = origin.0 as i64 + mv.dx as i64;
    let y = origin.1 as i64 + mv.dy as i64;
    let n = block_size as i64;
    x >= 0 && y >= 0 && x + n <= frame_dims.0 as i64 && y + n <= frame_dims.1 as i64
}

/// Anything that can price a displacement for one block.
///
/// Matchers never see pixels; they see this trait through a [`CostProbe`].
pub trait CostSource {
    /// Extra validity beyond the `dm` window (frame edges for real blocks).
    fn admits(&self, mv: MotionVector) -> bool;

    /// Exact integer cost of `mv`. Only called for admitted displacements.
    fn cost(&self, mv: MotionVector) -> u64;
}

/// Cost of moving a previous-frame block forward into the current frame.
#[derive(Clone, Copy, Debug)]
pub struct BlockCost<'a> {
    prev: &'a Frame,
    cur: &'a Frame,
    origin: (usize, usize),
    block_size: usize,
    criterion: Criterion,
}

impl<'a> BlockCost<'a> {
    pub fn new(
        prev: &'a Frame,
        cur: &'a Frame,
        origin: (usize, usize),
        block_size: usize,
        criterion: Criterion,
    ) -> Result<Self, SearchError> {
        if !prev.same_dims(cur) {
            return Err(SearchError::DimensionMismatch {
                left: prev.pixels().len(),
                right: cur.pixels().len(),
            });
        }
        if origin.0 + block_size > prev.width() || origin.1 + block_size > prev.height() {
            return Err(SearchError::BlockOutsideFrame {
                x: origin.0,
                y: origin.1,
            });
        }
        Ok(Self {
            prev,
            cur,
            origin,
            block_size,
            criterion,
        })
    }

    pub fn origin(&self) -> (usize, usize) {
        self.origin
    }
}

impl CostSource for BlockCost<'_> {
    fn admits(&self, mv: MotionVector) -> bool {
        candidate_valid(
            mv,
            self.origin,
            (self.cur.width(), self.cur.height()),
            self.block_size,
            u32::MAX,
        )
    }

    fn cost(&self, mv: MotionVector) -> u64 {
        let (bx, by) = self.origin;
        let n = self.block_size;
        let cx = (bx as i64 + mv.dx as i64) as usize;
        let cy = (by as i64 + mv.dy as i64) as usize;
        (0..n)
            .map(|j| {
                let a = &self.prev.row(by + j)[bx..bx + n];
                let b = &self.cur.row(cy + j)[cx..cx + n];
                self.criterion.sum(a, b)
            })
            .sum()
    }
}

/// Synthetic unimodal surface: squared Euclidean distance to a target.
///
/// Squaring keeps the ordering of the Euclidean distance while staying exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistanceCost {
    pub target: MotionVector,
}

impl DistanceCost {
    pub fn new(target: impl Into<MotionVector>) -> Self {
        Self {
            target: target.into(),
        }
    }
}

impl CostSource for DistanceCost {
    fn admits(&self, _mv: MotionVector) -> bool {
        true
    }

    fn cost(&self, mv: MotionVector) -> u64 {
        let ex = (mv.dx - self.target.dx) as i64;
        let ey = (mv.dy - self.target.dy) as i64;
        (ex * ex + ey * ey) as u64
    }
}

/// A displacement together with its cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Scored {
    pub mv: MotionVector,
    pub cost: u64,
}

/// Outcome of one block search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchResult {
    pub vector: MotionVector,
    /// Integer criterion sum at `vector`.
    pub cost: u64,
    /// Unique displacements evaluated.
    pub points: usize,
    /// Decision stages taken.
    pub steps: usize,
    pub early_stopped: bool,
    /// Successive incumbents, starting with the first evaluated point.
    pub path: Vec<MotionVector>,
}

/// Signals that a zero-cost evaluation ended the search (stop-on-zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZeroHit(pub MotionVector);

pub(crate) type Flow<T> = Result<T, ZeroHit>;

/// Memoizing cost evaluator for one block; source of truth for point and step counts.
pub struct CostProbe<S> {
    source: S,
    dm: u32,
    stop_on_zero: bool,
    side: usize,
    memo: Vec<Option<u64>>,
    order: Vec<MotionVector>,
    steps: usize,
    zero_hit: Option<MotionVector>,
    path: Vec<MotionVector>,
}

impl<S: CostSource> CostProbe<S> {
    pub fn new(source: S, dm: u32, stop_on_zero: bool) -> Self {
        let side = 2 * dm as usize + 1;
        Self {
            source,
            dm,
            stop_on_zero,
            side,
            memo: vec![None; side * side],
            order: Vec::new(),
            steps: 0,
            zero_hit: None,
            path: Vec::new(),
        }
    }

    pub fn dm(&self) -> u32 {
        self.dm
    }

    pub fn source(&self) -> &S {
        &self.source
    }

    pub fn stop_on_zero(&self) -> bool {
        self.stop_on_zero
    }

    pub fn is_valid(&self, mv: MotionVector) -> bool {
        mv.within(self.dm) && self.source.admits(mv)
    }

    #[inline]
    fn slot(&self, mv: MotionVector) -> usize {
        let d = self.dm as i32;
        (mv.dy + d) as usize * self.side + (mv.dx + d) as usize
    }

    /// Cost of `mv` if it has already been evaluated.
    pub fn memoized(&self, mv: MotionVector) -> Option<u64> {
        if !mv.within(self.dm) {
            return None;
        }
        self.memo[self.slot(mv)]
    }

    /// Evaluates `mv`, memoizing the result. Repeated requests are free.
    pub fn eval(&mut self, mv: MotionVector) -> Result<u64, SearchError> {
        if !self.is_valid(mv) {
            return Err(SearchError::InvalidCandidate(mv));
        }
        Ok(self.eval_valid(mv))
    }

    fn eval_valid(&mut self, mv: MotionVector) -> u64 {
        let slot = self.slot(mv);
        if let Some(cost) = self.memo[slot] {
            return cost;
        }
        let cost = self.source.cost(mv);
        self.memo[slot] = Some(cost);
        self.order.push(mv);
        if cost == 0 && self.stop_on_zero && self.zero_hit.is_none() {
            self.zero_hit = Some(mv);
        }
        cost
    }

    pub fn points_evaluated(&self) -> usize {
        self.order.len()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn zero_hit(&self) -> Option<MotionVector> {
        self.zero_hit
    }

    /// Displacements in first-evaluation order.
    pub fn evaluated(&self) -> &[MotionVector] {
        &self.order
    }

    /// Lowest memoized cost, earliest evaluation winning ties.
    pub fn memo_min(&self) -> Option<Scored> {
        let mut best: Option<Scored> = None;
        for &mv in &self.order {
            let cost = self.memo[self.slot(mv)].expect("ordered entries are memoized");
            if best.is_none_or(|b| cost < b.cost) {
                best = Some(Scored { mv, cost });
            }
        }
        best
    }

    /// Evaluates `candidates` in order and returns the cheapest entry.
    ///
    /// Invalid candidates are skipped. A candidate replaces the running best
    /// only when strictly cheaper, so ties keep the incumbent and then the
    /// earliest candidate. This does not stop on zero cost; matchers use the
    /// stage helpers for that.
    pub fn best_of(
        &mut self,
        candidates: &[MotionVector],
        incumbent: Option<Scored>,
    ) -> Result<Scored, SearchError> {
        let mut best = incumbent;
        for &mv in candidates {
            if !self.is_valid(mv) {
                continue;
            }
            let cost = self.eval_valid(mv);
            if best.is_none_or(|b| cost < b.cost) {
                best = Some(Scored { mv, cost });
            }
        }
        best.ok_or(SearchError::NoCandidates)
    }

    /// Evaluates a single valid point, honoring stop-on-zero.
    pub(crate) fn probe(&mut self, mv: MotionVector) -> Flow<u64> {
        let cost = self.eval_valid(mv);
        if cost == 0 && self.stop_on_zero {
            return Err(ZeroHit(mv));
        }
        Ok(cost)
    }

    /// One decision stage: evaluates the valid candidates in order against the
    /// incumbent. Counts a step only when at least one candidate is valid.
    pub(crate) fn stage(&mut self, candidates: &[MotionVector], incumbent: Scored) -> Flow<Scored> {
        if !candidates.iter().any(|&mv| self.is_valid(mv)) {
            return Ok(incumbent);
        }
        self.steps += 1;
        self.scan(candidates, incumbent)
    }

    /// Opening stage with no incumbent yet; the first candidate must be valid.
    pub(crate) fn open(&mut self, candidates: &[MotionVector]) -> Flow<Scored> {
        let first = candidates[0];
        debug_assert!(self.is_valid(first));
        self.steps += 1;
        let cost = self.probe(first)?;
        self.path.push(first);
        self.scan(&candidates[1..], Scored { mv: first, cost })
    }

    fn scan(&mut self, candidates: &[MotionVector], incumbent: Scored) -> Flow<Scored> {
        let mut best = incumbent;
        for &mv in candidates {
            if !self.is_valid(mv) {
                continue;
            }
            let cost = self.probe(mv)?;
            if cost < best.cost {
                best = Scored { mv, cost };
            }
        }
        self.accept(best);
        Ok(best)
    }

    fn accept(&mut self, best: Scored) {
        if self.path.last() != Some(&best.mv) {
            self.path.push(best.mv);
        }
    }

    /// Turns a matcher's final incumbent (or zero hit) into a [`MatchResult`].
    pub(crate) fn finish(&mut self, outcome: Flow<Scored>) -> MatchResult {
        let (best, early_stopped) = match outcome {
            Ok(best) => (best, false),
            Err(ZeroHit(mv)) => {
                if self.path.last() != Some(&mv) {
                    self.path.push(mv);
                }
                (Scored { mv, cost: 0 }, true)
            }
        };
        debug_assert_eq!(self.memo_min().map(|s| s.cost), Some(best.cost));
        MatchResult {
            vector: best.mv,
            cost: best.cost,
            points: self.points_evaluated(),
            steps: self.steps,
            early_stopped,
            path: std::mem::take(&mut self.path),
        }
    }
}

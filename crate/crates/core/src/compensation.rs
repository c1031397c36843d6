//! Motion-compensated differential prediction.
//!
//! Blocks partition the previous frame and are pushed forward into the
//! current frame along their vectors. Pixels reached by several blocks take
//! the rounded average, pixels reached once take that value, and pixels no
//! block reaches keep the previous frame's value.

use std::io::{Read, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::frame::Frame;
use crate::matchers::Matcher;
use crate::search::{BlockCost, CostProbe, MotionVector, SearchConfig, SearchError};

#[derive(Debug, Error)]
pub enum CompensationError {
    #[error("frame size mismatch: {a_w}x{a_h} vs {b_w}x{b_h}")]
    DimensionMismatch {
        a_w: usize,
        a_h: usize,
        b_w: usize,
        b_h: usize,
    },
    #[error("block size {block} exceeds frame {width}x{height}")]
    BlockTooLarge {
        block: usize,
        width: usize,
        height: usize,
    },
    #[error("vector field does not fit the frame: {0}")]
    FieldMismatch(String),
    #[error("reconstruction out of range at pixel {index}: {pred} + {residual}")]
    OutOfRange {
        index: usize,
        pred: u8,
        residual: i16,
    },
    #[error("residual holds {actual} values, expected {expected}")]
    ResidualSize { expected: usize, actual: usize },
    #[error("residual value {0} outside [-255, 255]")]
    ResidualRange(i16),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("vector field CSV: {0}")]
    Csv(#[from] csv::Error),
}

fn check_dims(a: &Frame, b: &Frame) -> Result<(), CompensationError> {
    if a.same_dims(b) {
        Ok(())
    } else {
        Err(CompensationError::DimensionMismatch {
            a_w: a.width(),
            a_h: a.height(),
            b_w: b.width(),
            b_h: b.height(),
        })
    }
}

/// Vector and search statistics for one block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockEstimate {
    pub vector: MotionVector,
    pub cost: u64,
    pub points: usize,
    pub steps: usize,
    pub early_stopped: bool,
}

/// Per-block motion vectors over an N×N block grid, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    blocks_x: usize,
    blocks_y: usize,
    block_size: usize,
    entries: Vec<BlockEstimate>,
}

impl VectorField {
    pub fn new(
        blocks_x: usize,
        blocks_y: usize,
        block_size: usize,
        entries: Vec<BlockEstimate>,
    ) -> Result<Self, CompensationError> {
        if entries.len() != blocks_x * blocks_y {
            return Err(CompensationError::FieldMismatch(format!(
                "{} entries for a {blocks_x}x{blocks_y} grid",
                entries.len()
            )));
        }
        if block_size == 0 {
            return Err(CompensationError::FieldMismatch("block size 0".into()));
        }
        Ok(Self {
            blocks_x,
            blocks_y,
            block_size,
            entries,
        })
    }

    /// All-zero field for `width`×`height` frames.
    pub fn zero(width: usize, height: usize, block_size: usize) -> Self {
        let (bx, by) = (width / block_size, height / block_size);
        let entry = BlockEstimate {
            vector: MotionVector::ZERO,
            cost: 0,
            points: 0,
            steps: 0,
            early_stopped: false,
        };
        Self {
            blocks_x: bx,
            blocks_y: by,
            block_size,
            entries: vec![entry; bx * by],
        }
    }

    pub fn blocks_x(&self) -> usize {
        self.blocks_x
    }

    pub fn blocks_y(&self) -> usize {
        self.blocks_y
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn entries(&self) -> &[BlockEstimate] {
        &self.entries
    }

    pub fn get(&self, block_x: usize, block_y: usize) -> &BlockEstimate {
        &self.entries[block_y * self.blocks_x + block_x]
    }

    /// Entries paired with their top-left pixel origin in the previous frame.
    pub fn iter_blocks(&self) -> impl Iterator<Item = ((usize, usize), &BlockEstimate)> + '_ {
        let n = self.block_size;
        self.entries
            .iter()
            .enumerate()
            .map(move |(i, e)| (((i % self.blocks_x) * n, (i / self.blocks_x) * n), e))
    }

    pub fn total_points(&self) -> usize {
        self.entries.iter().map(|e| e.points).sum()
    }

    pub fn total_steps(&self) -> usize {
        self.entries.iter().map(|e| e.steps).sum()
    }

    pub fn total_cost(&self) -> u64 {
        self.entries.iter().map(|e| e.cost).sum()
    }

    /// Writes `block_x,block_y,dx,dy,cost,points,steps`, one row per block.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), CompensationError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["block_x", "block_y", "dx", "dy", "cost", "points", "steps"])?;
        for (i, e) in self.entries.iter().enumerate() {
            w.write_record([
                (i % self.blocks_x).to_string(),
                (i / self.blocks_x).to_string(),
                e.vector.dx.to_string(),
                e.vector.dy.to_string(),
                e.cost.to_string(),
                e.points.to_string(),
                e.steps.to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Parses the CSV written by [`write_csv`](Self::write_csv). The grid
    /// shape comes from the largest block indices; every cell must appear once.
    pub fn read_csv<R: Read>(reader: R, block_size: usize) -> Result<Self, CompensationError> {
        #[derive(serde::Deserialize)]
        struct Row {
            block_x: usize,
            block_y: usize,
            dx: i32,
            dy: i32,
            cost: u64,
            points: usize,
            steps: usize,
        }
        let mut rdr = csv::Reader::from_reader(reader);
        let expected = ["block_x", "block_y", "dx", "dy", "cost", "points", "steps"];
        if rdr.headers()?.iter().ne(expected.iter().copied()) {
            return Err(CompensationError::FieldMismatch(format!(
                "unexpected header, want {}",
                expected.join(",")
            )));
        }
        let rows: Vec<Row> = rdr.deserialize().collect::<Result<_, _>>()?;
        if rows.is_empty() {
            return Err(CompensationError::FieldMismatch("no rows".into()));
        }
        let blocks_x = rows.iter().map(|r| r.block_x).max().unwrap_or(0) + 1;
        let blocks_y = rows.iter().map(|r| r.block_y).max().unwrap_or(0) + 1;
        let mut cells: Vec<Option<BlockEstimate>> = vec![None; blocks_x * blocks_y];
        for r in rows {
            let cell = &mut cells[r.block_y * blocks_x + r.block_x];
            if cell.is_some() {
                return Err(CompensationError::FieldMismatch(format!(
                    "duplicate block ({},{})",
                    r.block_x, r.block_y
                )));
            }
            *cell = Some(BlockEstimate {
                vector: MotionVector::new(r.dx, r.dy),
                cost: r.cost,
                points: r.points,
                steps: r.steps,
                early_stopped: false,
            });
        }
        let entries = cells
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| {
                    CompensationError::FieldMismatch(format!(
                        "missing block ({},{})",
                        i % blocks_x,
                        i / blocks_x
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        Self::new(blocks_x, blocks_y, block_size, entries)
    }
}

fn estimate_block(
    prev: &Frame,
    cur: &Frame,
    origin: (usize, usize),
    config: &SearchConfig,
    matcher: Matcher,
) -> Result<BlockEstimate, SearchError> {
    let source = BlockCost::new(prev, cur, origin, config.block_size, config.criterion)?;
    let mut probe = CostProbe::new(source, config.dm, config.stop_on_zero);
    let r = matcher.search(&mut probe);
    Ok(BlockEstimate {
        vector: r.vector,
        cost: r.cost,
        points: r.points,
        steps: r.steps,
        early_stopped: r.early_stopped,
    })
}

fn grid(prev: &Frame, cur: &Frame, config: &SearchConfig) -> Result<(usize, usize), CompensationError> {
    check_dims(prev, cur)?;
    config.validate()?;
    let n = config.block_size;
    if n > prev.width() || n > prev.height() {
        return Err(CompensationError::BlockTooLarge {
            block: n,
            width: prev.width(),
            height: prev.height(),
        });
    }
    Ok((prev.width() / n, prev.height() / n))
}

/// Estimates one vector per N×N block of `prev`, matched forward into `cur`.
/// Right and bottom remainders smaller than a block are not estimated.
pub fn estimate_field(
    prev: &Frame,
    cur: &Frame,
    config: &SearchConfig,
    matcher: impl Into<Matcher>,
) -> Result<VectorField, CompensationError> {
    let (bx, by) = grid(prev, cur, config)?;
    let matcher = matcher.into();
    let n = config.block_size;
    let entries = (0..bx * by)
        .map(|i| estimate_block(prev, cur, ((i % bx) * n, (i / bx) * n), config, matcher))
        .collect::<Result<_, _>>()?;
    VectorField::new(bx, by, n, entries)
}

/// Same as [`estimate_field`], with blocks searched on the rayon pool.
pub fn estimate_field_par(
    prev: &Frame,
    cur: &Frame,
    config: &SearchConfig,
    matcher: impl Into<Matcher>,
) -> Result<VectorField, CompensationError> {
    let (bx, by) = grid(prev, cur, config)?;
    let matcher = matcher.into();
    let n = config.block_size;
    let entries = (0..bx * by)
        .into_par_iter()
        .map(|i| estimate_block(prev, cur, ((i % bx) * n, (i / bx) * n), config, matcher))
        .collect::<Result<_, _>>()?;
    VectorField::new(bx, by, n, entries)
}

/// Per-pixel sums and hit counts of moved block pixels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictionAccumulator {
    width: usize,
    height: usize,
    sum: Vec<u32>,
    count: Vec<u32>,
}

impl PredictionAccumulator {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            sum: vec![0; width * height],
            count: vec![0; width * height],
        }
    }

    pub fn add(&mut self, x: usize, y: usize, value: u8) {
        let i = y * self.width + x;
        self.sum[i] += value as u32;
        self.count[i] += 1;
    }

    pub fn counts(&self) -> &[u32] {
        &self.count
    }

    /// Averages multiply-hit pixels (ties round up), keeps single hits, and
    /// falls back to `fallback` where nothing landed.
    pub fn finalize(&self, fallback: &Frame) -> Frame {
        let pixels = self
            .sum
            .iter()
            .zip(&self.count)
            .zip(fallback.pixels())
            .map(|((&s, &c), &prev)| match c {
                0 => prev,
                1 => s as u8,
                c => ((2 * s + c) / (2 * c)) as u8,
            })
            .collect();
        Frame::new(self.width, self.height, pixels).expect("accumulator matches fallback frame")
    }
}

/// Accumulates every block of `prev` at its displaced position.
pub fn accumulate(prev: &Frame, field: &VectorField) -> Result<PredictionAccumulator, CompensationError> {
    let n = field.block_size();
    if field.blocks_x() * n > prev.width() || field.blocks_y() * n > prev.height() {
        return Err(CompensationError::FieldMismatch(format!(
            "{}x{} grid of {n}px blocks exceeds {}x{} frame",
            field.blocks_x(),
            field.blocks_y(),
            prev.width(),
            prev.height()
        )));
    }
    let mut acc = PredictionAccumulator::new(prev.width(), prev.height());
    for ((bx, by), e) in field.iter_blocks() {
        let tx = bx as i64 + e.vector.dx as i64;
        let ty = by as i64 + e.vector.dy as i64;
        if tx < 0 || ty < 0 || tx as usize + n > prev.width() || ty as usize + n > prev.height() {
            return Err(CompensationError::FieldMismatch(format!(
                "block at ({bx},{by}) moved by {} leaves the frame",
                e.vector
            )));
        }
        let (tx, ty) = (tx as usize, ty as usize);
        for j in 0..n {
            let src = &prev.row(by + j)[bx..bx + n];
            for (i, &v) in src.iter().enumerate() {
                acc.add(tx + i, ty + j, v);
            }
        }
    }
    Ok(acc)
}

/// Builds the motion-compensated prediction of the current frame.
pub fn build_prediction(prev: &Frame, field: &VectorField) -> Result<Frame, CompensationError> {
    Ok(accumulate(prev, field)?.finalize(prev))
}

/// Signed per-pixel prediction error in `[-255, 255]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualImage {
    width: usize,
    height: usize,
    values: Vec<i16>,
}

impl ResidualImage {
    pub fn new(width: usize, height: usize, values: Vec<i16>) -> Result<Self, CompensationError> {
        if values.len() != width * height {
            return Err(CompensationError::ResidualSize {
                expected: width * height,
                actual: values.len(),
            });
        }
        if let Some(&v) = values.iter().find(|v| !(-255..=255).contains(*v)) {
            return Err(CompensationError::ResidualRange(v));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[i16] {
        &self.values
    }
}

/// `cur - pred`, pixelwise.
pub fn residual(cur: &Frame, pred: &Frame) -> Result<ResidualImage, CompensationError> {
    check_dims(cur, pred)?;
    let values = cur
        .pixels()
        .iter()
        .zip(pred.pixels())
        .map(|(&c, &p)| c as i16 - p as i16)
        .collect();
    Ok(ResidualImage {
        width: cur.width(),
        height: cur.height(),
        values,
    })
}

/// Plain frame difference without motion compensation, `cur - prev`.
pub fn plain_difference(prev: &Frame, cur: &Frame) -> Result<ResidualImage, CompensationError> {
    residual(cur, prev)
}

/// Inverts [`residual`]: `pred + res`, failing if any sum leaves `[0, 255]`.
pub fn reconstruct(pred: &Frame, res: &ResidualImage) -> Result<Frame, CompensationError> {
    if pred.width() != res.width || pred.height() != res.height {
        return Err(CompensationError::DimensionMismatch {
            a_w: pred.width(),
            a_h: pred.height(),
            b_w: res.width,
            b_h: res.height,
        });
    }
    let pixels = pred
        .pixels()
        .iter()
        .zip(&res.values)
        .enumerate()
        .map(|(index, (&p, &r))| {
            let v = p as i16 + r;
            u8::try_from(v).map_err(|_| CompensationError::OutOfRange {
                index,
                pred: p,
                residual: r,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(Frame::new(pred.width(), pred.height(), pixels).expect("dimensions checked"))
}

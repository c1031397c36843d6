//! Objective quality measures of a prediction error.

use serde::Serialize;
use thiserror::Error;

use crate::compensation::{residual, CompensationError, ResidualImage};
use crate::frame::Frame;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("metric of an empty sample")]
    Empty,
    #[error("value {0} outside the residual alphabet [-255, 255]")]
    OutOfAlphabet(i32),
    #[error("frame size mismatch")]
    DimensionMismatch,
}

/// Histogram over the signed residual alphabet `[-255, 255]`.
fn histogram(values: &[i16]) -> Result<[u64; 511], MetricsError> {
    let mut hist = [0u64; 511];
    for &v in values {
        if !(-255..=255).contains(&v) {
            return Err(MetricsError::OutOfAlphabet(v as i32));
        }
        hist[(v + 255) as usize] += 1;
    }
    Ok(hist)
}

/// First-order entropy in bits per sample.
pub fn entropy(values: &[i16]) -> Result<f64, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    let hist = histogram(values)?;
    let total = values.len() as f64;
    Ok(hist
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0))
}

/// Population variance.
pub fn variance(values: &[i16]) -> Result<f64, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = values.len() as f64;
    // Integer moments keep constant inputs at exactly zero.
    let sum: i64 = values.iter().map(|&v| v as i64).sum();
    let sum_sq: i64 = values.iter().map(|&v| (v as i64) * (v as i64)).sum();
    let mean = sum as f64 / n;
    Ok((sum_sq as f64 / n - mean * mean).max(0.0))
}

/// Peak signal-to-noise ratio, or `ZeroError` for a perfect prediction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Psnr {
    Db(f64),
    ZeroError,
}

impl Psnr {
    pub fn db(self) -> Option<f64> {
        match self {
            Psnr::Db(v) => Some(v),
            Psnr::ZeroError => None,
        }
    }
}

/// PSNR of a residual with peak 255.
pub fn psnr_of(res: &ResidualImage) -> Result<Psnr, MetricsError> {
    let values = res.values();
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    let sse: u64 = values.iter().map(|&v| (v as i64 * v as i64) as u64).sum();
    if sse == 0 {
        return Ok(Psnr::ZeroError);
    }
    let mse = sse as f64 / values.len() as f64;
    Ok(Psnr::Db(10.0 * (255.0f64 * 255.0 / mse).log10()))
}

pub fn psnr(cur: &Frame, pred: &Frame) -> Result<Psnr, MetricsError> {
    let res = residual(cur, pred).map_err(|_| MetricsError::DimensionMismatch)?;
    psnr_of(&res)
}

/// Entropy, variance and PSNR of one residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricReport {
    #[serde(rename = "entropy_bits")]
    pub entropy: f64,
    pub variance: f64,
    #[serde(rename = "psnr_db", skip_serializing_if = "Option::is_none")]
    pub psnr: Option<f64>,
}

impl MetricReport {
    pub fn of_residual(res: &ResidualImage) -> Result<Self, MetricsError> {
        Ok(Self {
            entropy: entropy(res.values())?,
            variance: variance(res.values())?,
            psnr: psnr_of(res)?.db(),
        })
    }

    pub fn of_frames(cur: &Frame, pred: &Frame) -> Result<Self, MetricsError> {
        let res = residual(cur, pred).map_err(|e| match e {
            CompensationError::DimensionMismatch { .. } => MetricsError::DimensionMismatch,
            _ => MetricsError::Empty,
        })?;
        Self::of_residual(&res)
    }

    /// Flat JSON record with keys `entropy_bits`, `variance`, `psnr_db`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain numeric record")
    }
}

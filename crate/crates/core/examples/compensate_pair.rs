//! Full differential-coding round trip on a synthetic translated pair:
//! estimate vectors, build the prediction, take the residual, measure it,
//! and reconstruct the current frame exactly.

use blockmatch::compensation::CompensationError;
use blockmatch::{
    build_prediction, estimate_field, export_residual_view, plain_difference, reconstruct,
    residual, AlgorithmId, Frame, MetricReport, SearchConfig,
};

pub struct Outcome {
    pub compensated: MetricReport,
    pub plain: MetricReport,
    pub lossless: bool,
}

fn texture(x: usize, y: usize) -> u8 {
    let v = (x as f64 * 0.21).sin() * 60.0 + (y as f64 * 0.13).cos() * 50.0 + ((x * y) % 13) as f64;
    (v + 128.0).clamp(0.0, 255.0) as u8
}

pub fn run() -> Result<Outcome, CompensationError> {
    let prev = Frame::from_fn(128, 128, texture).expect("non-empty");
    // Content moves right by 3 and down by 2.
    let cur = Frame::from_fn(128, 128, |x, y| texture(x.saturating_sub(3), y.saturating_sub(2)))
        .expect("non-empty");

    let field = estimate_field(&prev, &cur, &SearchConfig::default(), AlgorithmId::ModifiedConjugate)?;
    let pred = build_prediction(&prev, &field)?;
    let res = residual(&cur, &pred)?;
    let _view = export_residual_view(&res);
    let rebuilt = reconstruct(&pred, &res)?;

    let metrics = |r| MetricReport::of_residual(r).expect("non-empty residual");
    Ok(Outcome {
        compensated: metrics(&res),
        plain: metrics(&plain_difference(&prev, &cur)?),
        lossless: rebuilt == cur,
    })
}

#[allow(dead_code)]
fn main() -> Result<(), CompensationError> {
    let out = run()?;
    println!("plain difference:      {}", out.plain.to_json());
    println!("motion compensated:    {}", out.compensated.to_json());
    println!("lossless reconstruction: {}", out.lossless);
    Ok(())
}

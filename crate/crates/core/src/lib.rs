//! Block-matching motion estimation.
//!
//! The crate covers the whole differential-coding loop:
//!
//! - [`frame`]: grayscale frames, binary PGM I/O and the star test pattern.
//! - [`search`]: MAD/MSE criteria, the search window and the memoizing [`CostProbe`].
//! - [`matchers`]: full search, 2-D logarithmic, three-step, one-at-a-time
//!   conjugate direction, orthogonal, and the modified conjugate direction
//!   search with its two variations.
//! - [`compensation`]: vector fields, motion-compensated prediction, residuals.
//! - [`metrics`]: entropy, variance and PSNR of a residual.
//! - [`bench`]: trajectory tables and timed benchmarks.
//!
//! ```
//! use blockmatch::{CostProbe, DistanceCost, Matcher, AlgorithmId, MotionVector};
//!
//! let mut probe = CostProbe::new(DistanceCost::new((2, 6)), 6, false);
//! let result = Matcher::new(AlgorithmId::ModifiedConjugate).search(&mut probe);
//! assert_eq!(result.vector, MotionVector::new(2, 6));
//! assert_eq!((result.points, result.steps), (11, 7));
//! ```

pub mod bench;
pub mod cli;
pub mod compensation;
pub mod frame;
pub mod matchers;
pub mod metrics;
pub mod search;

pub use bench::{
    render_report, run_benchmark, run_trajectory_table, BenchOptions, BenchReport, ReportFormat,
    TrajectoryCase, TrajectoryTable,
};
pub use compensation::{
    build_prediction, estimate_field, estimate_field_par, plain_difference, reconstruct, residual,
    ResidualImage, VectorField,
};
pub use frame::{
    export_residual_view, generate_displaced_star, generate_star, load_pgm, save_pgm, Frame,
    StarSpec,
};
pub use matchers::{AlgorithmId, Matcher, ModConjOptions};
pub use metrics::{entropy, psnr, variance, MetricReport, Psnr};
pub use search::{
    mad, mse, BlockCost, CostProbe, CostSource, Criterion, DistanceCost, MatchResult,
    MotionVector, SearchConfig,
};

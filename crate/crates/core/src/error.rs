use thiserror::Error;

use crate::convex::ConvexError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error(transparent)]
    Convex(#[from] ConvexError),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid moving set: {0}")]
    InvalidMovingSet(String),
    #[error("time {t} is outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },
    #[error("excess {context} is not exact; refusing to continue")]
    InexactExcess { context: String },
    #[error("retraction is unbounded on [{from}, {to}]")]
    UnboundedRetraction { from: f64, to: f64 },
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("projection failed at step {step} (t = {t}): {source}")]
    Projection { step: usize, t: f64, source: ConvexError },
    #[error(
        "dyadic Cauchy bound violated at level {level}, t = {t}: observed {observed:e} > bound {bound:e}"
    )]
    CauchyBound {
        level: u32,
        t: f64,
        observed: f64,
        bound: f64,
    },
    #[error("trajectories live on different grids ({0})")]
    GridMismatch(String),
    #[error("trajectory csv: {0}")]
    Csv(String),
    #[error("the moving set has jumps; use the bounded-retraction solver")]
    HasJumps,
}

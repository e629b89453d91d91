use num_complex::Complex64;
use thiserror::Error;

use crate::zeros::Rect;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: layer {layer} would have width {width}")]
    InvalidParameter { layer: usize, width: f64 },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("jost function vanishes on the contour near {at}")]
    BoundaryZero { at: Complex64 },

    #[error("winding-number quadrature failed: {0}")]
    Quadrature(String),

    #[error("newton refinement did not converge in cell {cell:?}")]
    Refinement { cell: Rect },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        trace: Vec<f64>,
    },

    #[error("higher-order degeneracy: |f_kk| = {0:e} is below the rank-one floor")]
    HigherOrderDegeneracy(f64),

    #[error("degenerate unfolding: {0}")]
    DegenerateUnfolding(String),

    #[error("validity radius {0:e} below floor; extraction suspect")]
    ExtractionSuspect(f64),

    #[error("model not calibrated: validity radius unknown")]
    Uncalibrated,

    #[error("{} sample(s) outside validity radius, indices {indices:?}", indices.len())]
    OutsideValidity { indices: Vec<usize> },

    #[error("expected an isolated doublet, found {found} zero(s)")]
    NotIsolated { found: i32 },

    #[error("doublet isolation lost at step {step} (winding {winding})")]
    IsolationLost { step: usize, winding: i32 },

    #[error("continuation ambiguous at step {step}; use smaller steps")]
    Continuation { step: usize },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(line: usize, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            msg: msg.into(),
        }
    }
}

//! Exceptional points of resonance poles in layered radial potentials.
//!
//! The pipeline runs from a piecewise-constant potential to its Jost
//! function, locates resonance zeros by argument-principle counting, finds
//! parameter values where two zeros merge, fits the local square-root
//! unfolding around such a point, and uses it to classify level crossings
//! and follow resonances along parameter paths.

pub mod config;
pub mod crossing;
pub mod error;
pub mod exceptional;
pub mod jost;
pub mod potential;
mod series;
mod stumpff;
pub mod tracer;
pub mod unfolding;
pub mod zeros;

pub use config::Config;
pub use crossing::{classify, section, CrossingClass, CrossingKind, SectionObservables};
pub use error::{Error, Result};
pub use exceptional::{locate, scan_seeds, ExceptionalPoint, ParamGrid, Seed};
pub use jost::{Jost, JostValue};
pub use num_complex::Complex64 as C64;
pub use potential::{Binding, Field, Layer, ParamPoint, PotentialSpec};
pub use tracer::{monodromy, trace, LoopReport, LoopSpec, PathSpec, Trajectory};
pub use unfolding::{branch_sqrt, extract, OffsetVector, UnfoldingModel};
pub use zeros::{count_zeros, find_zeros, Pole, PoleSet, Rect, SearchRegion, ZeroOptions};

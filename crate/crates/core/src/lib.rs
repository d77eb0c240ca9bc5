//! Total variation, Jordan decompositions, image measures and density
//! recovery on exact piecewise function models, plus checkable replays of
//! the cover constructions showing that a continuous BV function with
//! Lusin's condition is absolutely continuous.

// errors carry exact rationals and sit on cold paths
#![allow(clippy::result_large_err)]

pub mod certificate;
pub mod error;
pub mod evaluable;
pub mod function_model;
pub mod harness;
pub mod measure;
pub mod real;
pub mod reconstruction;
pub mod variation;

pub use certificate::{CertificateTrace, Step2Trace};
pub use error::{Error, Result};
pub use evaluable::Evaluable;
pub use function_model::{
    build_cantor_iterate, ArithmeticMode, Direction, FunctionModel, FunctionSpec,
    MonotoneSegmentation, Piece, PieceKind, TailBounds,
};
pub use harness::{Corpus, EquivalenceTable};
pub use measure::{Interval, IntervalSet, LusinReport, LusinVerdict, NullSetFamily};
pub use real::Real;
pub use reconstruction::{DensityGrid, ModulusReport};
pub use variation::{
    Decomposition, Partition, UniformApprox, VariationEstimate, VariationFunction,
};

//! Curve geometry in the pseudo-Galilean space G₃¹: the Frenet apparatus of
//! admissible curves and the classification of their position vectors.
//!
//! The numerical core is generic over the scalar type (`f32`, `f64`); the
//! metric kernel additionally accepts exact scalars such as `Ratio<i64>`.
//! The aliases below fix the scalar to `f64`, which is what the CLI uses.

pub mod classify;
pub mod config;
pub mod error;
pub mod expr;
pub mod frenet;
pub mod kernel;
pub mod numeric;
pub mod pipeline;
pub mod reconstruct;
pub mod sampled;
pub mod scalar;

pub use config::Tolerances;
pub use error::GeometryError;
pub use expr::{parse, Expr, ParseError};
pub use kernel::{GVector, Motion, PGSphere, Sign, VectorKind};
pub use scalar::Real;

pub type Vector = kernel::GVector<f64>;
pub type Frame = frenet::FrenetSample<f64>;
pub type CurveJet = frenet::Jet<f64>;
pub type Graph = frenet::GraphCurve<f64>;
pub type Intrinsic = reconstruct::IntrinsicSpec<f64>;
pub type Reconstruction = reconstruct::ReconstructedCurve<f64>;
pub type Decomposition = classify::Decomposition<f64>;
pub type Report = classify::ClassificationReport<f64>;
pub type Analysis = pipeline::Analysis<f64>;

pub mod matrix;
pub mod scalar;

pub use matrix::{Matrix, SpanBuilder};
pub use scalar::{parse_scalar, FieldCtx, Rat, Scalar, ScalarParseError};

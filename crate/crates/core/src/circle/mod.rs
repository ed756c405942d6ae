//! Exact arithmetic on the circle T = R/Z: angles, arcs, dyadic intervals,
//! and the angle-spec mini-language.

mod angle;
mod arc;
mod dyadic;
mod spec;

pub use angle::{
    Angle, BitOracle, BitRule, Enclosure, StreamedAngle, COMPARISON_BIT_CAP,
    DEFAULT_PRECISION_BITS,
};
pub use arc::{Arc, InArcVerdict, SigmaImage};
pub use dyadic::DyadicInterval;
pub use spec::parse_angle;

pub(crate) use angle::{frac, pow2_rational};

use thiserror::Error;

/// Errors from circle arithmetic and the angle mini-language.
#[derive(Debug, Error)]
pub enum CircleError {
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("bit rule word must be nonempty")]
    EmptyWord,
    #[error("arc endpoints must be distinct")]
    DegenerateArc,
    #[error("comparison undecided after {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("bad angle spec: {0}")]
    Parse(String),
}

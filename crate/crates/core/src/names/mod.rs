//! Names: indexable streams of finite approximations with fixed precision
//! schedules.

mod compact;
mod curve;
mod modulus;
mod point;

pub use compact::{curve_to_plot, CompactName, CompactPlot};
pub use curve::{certified_nonmember, validate_strongly_cauchy, CauchyCheck, CurveName};
pub use modulus::{polyarc_ulac, ulac_as_cik, ModulusError, ModulusFn, ModulusKind, ModulusRepr};
pub use point::PointName;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("precision unavailable: name has no entry at index {0}")]
    PrecisionUnavailable(u32),
    #[error("invalid name: {0}")]
    Invalid(String),
}

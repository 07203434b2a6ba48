//! Exact constructions of access arcs and links from computable names of
//! planar curves and open sets.

pub mod access;
pub mod adversary;
pub mod geometry;
pub mod linker;
pub mod names;
pub mod oracle;
pub mod report;
pub mod scalar;
pub mod scene;

use num_rational::BigRational;

pub use scalar::{DyadicExp, Scalar};

pub type Rational = BigRational;
pub type Point = geometry::Point2<Rational>;
pub type Poly = geometry::PolyCurve<Rational>;
pub type Point64 = geometry::Point2<f64>;
pub type Poly64 = geometry::PolyCurve<f64>;
pub type Point32 = geometry::Point2<f32>;
pub type Poly32 = geometry::PolyCurve<f32>;

/// Integer point shorthand.
pub fn pt(x: i64, y: i64) -> Point {
    geometry::Point2::ints(x, y)
}

/// Point from two rational strings, panicking on malformed input.
pub fn ptq(x: &str, y: &str) -> Point {
    geometry::Point2::new(
        scalar::parse_rational(x).expect("rational"),
        scalar::parse_rational(y).expect("rational"),
    )
}

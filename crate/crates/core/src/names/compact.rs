use std::collections::HashSet;
use std::sync::Arc;

use num_traits::ToPrimitive;

use super::{CurveName, NameError};
use crate::geometry::{Point2, Rect};
use crate::{Point, Rational, Scalar};

/// Finite set of rects, each meeting the named set, jointly covering it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactPlot {
    pub rects: Vec<Rect<Rational>>,
}

impl CompactPlot {
    pub fn new(rects: Vec<Rect<Rational>>) -> Result<Self, NameError> {
        if rects.is_empty() {
            return Err(NameError::Invalid("empty plot".into()));
        }
        Ok(CompactPlot { rects })
    }

    /// Largest squared rect diameter.
    pub fn max_diam2(&self) -> Rational {
        self.rects
            .iter()
            .map(|r| r.diam2())
            .reduce(Rational::max_of)
            .unwrap()
    }

    /// `true` iff `z` lies in the union of the open rects.
    pub fn covers(&self, z: &Point) -> bool {
        self.rects.iter().any(|r| r.contains_open(z))
    }
}

/// Name of a compact set: `plot(n)` has rects of diameter at most `2^{-n}`.
#[derive(Debug, Clone)]
pub enum CompactName {
    Curve(Arc<CurveName>),
    Plots(Vec<CompactPlot>),
}

impl CompactName {
    pub fn plot(&self, n: u32) -> Result<CompactPlot, NameError> {
        match self {
            CompactName::Curve(c) => curve_to_plot(c, n),
            CompactName::Plots(v) => v
                .get(n as usize)
                .cloned()
                .ok_or(NameError::PrecisionUnavailable(n)),
        }
    }
}

/// Plot of the limit of `name` at resolution `2^{-n}`.
///
/// Samples `approx[n+3]` at spacing below `2^{-n-2}` and puts a square of
/// side `2^{-n-1}` on each sample. The limit is within `2^{-n-3}` of the
/// sampled curve, so every square meets it and the open squares cover it.
pub fn curve_to_plot(name: &CurveName, n: u32) -> Result<CompactPlot, NameError> {
    let p = name.approx(n + 3)?;
    let side = Rational::pow2_neg(n + 1);
    let scale = Rational::from_int(1) / Rational::pow2_neg(2 * (n + 2));
    let mut seen: HashSet<Point> = HashSet::new();
    let mut rects = Vec::new();
    let mut push = |z: Point, rects: &mut Vec<Rect<Rational>>| {
        if seen.insert(z.clone()) {
            rects.push(Rect::square(&z, &side));
        }
    };
    push(p.start().clone(), &mut rects);
    for s in p.segments() {
        let m = pieces_below(&(s.len2() * scale.clone()));
        for i in 1..=m {
            let t = Rational::from_int(i as i64) / Rational::from_int(m as i64);
            push(Point2::lerp(&s.a, &s.b, &t), &mut rects);
        }
    }
    CompactPlot::new(rects)
}

/// Least `m >= 1` with `m^2 > x`.
fn pieces_below(x: &Rational) -> u64 {
    let est = x.to_f64().unwrap_or(0.0).max(0.0).sqrt() as u64;
    let mut m = est.max(1);
    let sq = |m: u64| Rational::from_int((m as i64) * (m as i64));
    while sq(m) <= *x {
        m += 1;
    }
    while m > 1 && sq(m - 1) > *x {
        m -= 1;
    }
    m
}

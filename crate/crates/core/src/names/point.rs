use std::fmt;
use std::sync::Arc;

use super::NameError;
use crate::geometry::Rect;
use crate::{Point, Rational, Scalar};

type RectFn = Arc<dyn Fn(u32) -> Rect<Rational> + Send + Sync>;

/// Name of a point: the rect at index `m` contains the point and has sides
/// at most `2^{-m}`.
#[derive(Clone)]
pub struct PointName {
    source: Source,
}

#[derive(Clone)]
enum Source {
    Exact(Point),
    Stream(Vec<Rect<Rational>>),
    Generated(RectFn),
}

impl fmt::Debug for PointName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            Source::Exact(p) => f.debug_tuple("PointName::Exact").field(p).finish(),
            Source::Stream(r) => f.debug_tuple("PointName::Stream").field(&r.len()).finish(),
            Source::Generated(_) => f.write_str("PointName::Generated"),
        }
    }
}

impl PointName {
    /// Shrinking squares centred on a known rational point.
    pub fn exact(p: Point) -> Self {
        PointName {
            source: Source::Exact(p),
        }
    }

    /// A finite prefix. Checks the side bound and pairwise intersection.
    pub fn from_rects(rects: Vec<Rect<Rational>>) -> Result<Self, NameError> {
        for (m, r) in rects.iter().enumerate() {
            let side = Rational::pow2_neg(m as u32);
            if r.width() > side || r.height() > side {
                return Err(NameError::Invalid(format!("rect {m} is wider than 2^-{m}")));
            }
        }
        for i in 0..rects.len() {
            for j in (i + 1)..rects.len() {
                let (a, b) = (&rects[i], &rects[j]);
                let meet = a.xmin <= b.xmax && b.xmin <= a.xmax && a.ymin <= b.ymax && b.ymin <= a.ymax;
                if !meet {
                    return Err(NameError::Invalid(format!("rects {i} and {j} are disjoint")));
                }
            }
        }
        Ok(PointName {
            source: Source::Stream(rects),
        })
    }

    /// Lazily produced rects. The caller vouches for the normalization.
    pub fn generated(f: impl Fn(u32) -> Rect<Rational> + Send + Sync + 'static) -> Self {
        PointName {
            source: Source::Generated(Arc::new(f)),
        }
    }

    pub fn exact_point(&self) -> Option<&Point> {
        match &self.source {
            Source::Exact(p) => Some(p),
            _ => None,
        }
    }

    /// Length of a finite prefix, `None` for unbounded names.
    pub fn available(&self) -> Option<usize> {
        match &self.source {
            Source::Stream(r) => Some(r.len()),
            _ => None,
        }
    }

    pub fn rect(&self, m: u32) -> Result<Rect<Rational>, NameError> {
        match &self.source {
            Source::Exact(p) => Ok(Rect::square(p, &Rational::pow2_neg(m))),
            Source::Stream(r) => r
                .get(m as usize)
                .cloned()
                .ok_or(NameError::PrecisionUnavailable(m)),
            Source::Generated(f) => Ok(f(m)),
        }
    }

    /// Centre of `rect(k)`, within `2^{-k}` of the named point.
    pub fn point_at(&self, k: u32) -> Result<Point, NameError> {
        Ok(self.rect(k)?.center())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptq;
    use crate::scalar::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn exact_name_is_close() {
        let z = ptq("1/2", "1/3");
        let n = PointName::exact(z.clone());
        for k in [0, 5, 20] {
            let c = n.point_at(k).unwrap();
            assert!(c.dist2(&z) <= Rational::pow2_neg(2 * k));
        }
    }

    #[test]
    fn shrinking_stream_to_origin() {
        // off-centre rects [0, 2^-m]^2 all contain the origin
        let n = PointName::generated(|m| {
            let s = Rational::pow2_neg(m);
            Rect::new(q("0"), s.clone(), q("0"), s).unwrap()
        });
        let c = n.point_at(10).unwrap();
        assert!(c.norm2() <= Rational::pow2_neg(20));
    }

    #[test]
    fn finite_prefix_runs_out() {
        let z = ptq("0", "0");
        let rects = (0..3).map(|m| Rect::square(&z, &Rational::pow2_neg(m))).collect();
        let n = PointName::from_rects(rects).unwrap();
        assert!(n.point_at(2).is_ok());
        assert_eq!(n.point_at(3), Err(NameError::PrecisionUnavailable(3)));
    }

    #[test]
    fn rejects_wide_rect() {
        let r = Rect::new(q("0"), q("2"), q("0"), q("1")).unwrap();
        assert!(PointName::from_rects(vec![r]).is_err());
    }
}

use super::{Point2, PolyCurve, Segment};
use crate::scalar::Scalar;

/// Intersection of two nondegenerate segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegStatus<T> {
    Disjoint,
    Point(Point2<T>),
    Overlap(Segment<T>),
}

impl<T> SegStatus<T> {
    pub fn is_disjoint(&self) -> bool {
        matches!(self, SegStatus::Disjoint)
    }
}

/// Twice the signed area of `(a, b, c)`.
pub fn orient<T: Scalar>(a: &Point2<T>, b: &Point2<T>, c: &Point2<T>) -> T {
    b.sub(a).cross(&c.sub(a))
}

fn sign<T: Scalar>(v: &T) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

pub fn seg_status<T: Scalar>(s1: &Segment<T>, s2: &Segment<T>) -> SegStatus<T> {
    let d1 = s1.dir();
    let d2 = s2.dir();
    let denom = d1.cross(&d2);
    let w = s2.a.sub(&s1.a);
    if denom.is_zero() {
        if !w.cross(&d1).is_zero() {
            return SegStatus::Disjoint;
        }
        // collinear: project s2 onto s1's parameter line
        let len = d1.norm2();
        let mut u0 = w.dot(&d1) / len.clone();
        let mut u1 = s2.b.sub(&s1.a).dot(&d1) / len;
        if u0 > u1 {
            std::mem::swap(&mut u0, &mut u1);
        }
        let lo = T::max_of(u0, T::zero());
        let hi = T::min_of(u1, T::one());
        if lo > hi {
            SegStatus::Disjoint
        } else if lo == hi {
            SegStatus::Point(s1.at(&lo))
        } else {
            SegStatus::Overlap(Segment::new_unchecked(s1.at(&lo), s1.at(&hi)))
        }
    } else {
        let t = w.cross(&d2) / denom.clone();
        let u = w.cross(&d1) / denom;
        let unit = |v: &T| *v >= T::zero() && *v <= T::one();
        if unit(&t) && unit(&u) {
            SegStatus::Point(s1.at(&t))
        } else {
            SegStatus::Disjoint
        }
    }
}

/// Cheap exact test: do the closed segments' bounding boxes meet?
pub(crate) fn bboxes_meet<T: Scalar>(s1: &Segment<T>, s2: &Segment<T>) -> bool {
    let (a, b) = (s1.bbox(), s2.bbox());
    a.xmin <= b.xmax && b.xmin <= a.xmax && a.ymin <= b.ymax && b.ymin <= a.ymax
}

pub(crate) fn segments_touch<T: Scalar>(s1: &Segment<T>, s2: &Segment<T>) -> bool {
    if !bboxes_meet(s1, s2) {
        return false;
    }
    let o1 = sign(&orient(&s1.a, &s1.b, &s2.a));
    let o2 = sign(&orient(&s1.a, &s1.b, &s2.b));
    let o3 = sign(&orient(&s2.a, &s2.b, &s1.a));
    let o4 = sign(&orient(&s2.a, &s2.b, &s1.b));
    // collinear segments with meeting boxes overlap, so no special case
    !(o1 * o2 > 0 || o3 * o4 > 0)
}

pub fn dist2_point_segment<T: Scalar>(p: &Point2<T>, s: &Segment<T>) -> T {
    let d = s.dir();
    let w = p.sub(&s.a);
    let t = w.dot(&d);
    if t <= T::zero() {
        return w.norm2();
    }
    let len = d.norm2();
    if t >= len {
        return p.dist2(&s.b);
    }
    let c = w.cross(&d);
    c.clone() * c / len
}

/// Exact squared distance between closed segments: zero if they touch,
/// otherwise the least of the four endpoint-to-segment distances.
pub fn dist2_segment_segment<T: Scalar>(s1: &Segment<T>, s2: &Segment<T>) -> T {
    if segments_touch(s1, s2) {
        return T::zero();
    }
    let cands = [
        dist2_point_segment(&s1.a, s2),
        dist2_point_segment(&s1.b, s2),
        dist2_point_segment(&s2.a, s1),
        dist2_point_segment(&s2.b, s1),
    ];
    cands.into_iter().reduce(T::min_of).unwrap()
}

/// Lower bound on the squared distance from the two bounding boxes; zero
/// when they meet.
pub(crate) fn bbox_gap2<T: Scalar>(s1: &Segment<T>, s2: &Segment<T>) -> T {
    let (a, b) = (s1.bbox(), s2.bbox());
    let gap = |lo1: &T, hi1: &T, lo2: &T, hi2: &T| {
        if hi1 < lo2 {
            lo2.clone() - hi1.clone()
        } else if hi2 < lo1 {
            lo1.clone() - hi2.clone()
        } else {
            T::zero()
        }
    };
    let gx = gap(&a.xmin, &a.xmax, &b.xmin, &b.xmax);
    let gy = gap(&a.ymin, &a.ymax, &b.ymin, &b.ymax);
    gx.clone() * gx + gy.clone() * gy
}

pub fn dist2_point_poly<T: Scalar>(p: &Point2<T>, poly: &PolyCurve<T>) -> T {
    poly.segments()
        .map(|s| dist2_point_segment(p, &s))
        .reduce(T::min_of)
        .unwrap()
}

pub fn dist2_poly_poly<T: Scalar>(p: &PolyCurve<T>, r: &PolyCurve<T>) -> T {
    let mut best: Option<T> = None;
    for s1 in p.segments() {
        for s2 in r.segments() {
            if let Some(b) = &best {
                if bbox_gap2(&s1, &s2) >= *b {
                    continue;
                }
            }
            let d = dist2_segment_segment(&s1, &s2);
            if d.is_zero() {
                return d;
            }
            best = Some(match best {
                Some(b) => T::min_of(b, d),
                None => d,
            });
        }
    }
    best.unwrap()
}

/// `true` iff `dist2_poly_poly(p, r) > bound2`, with early exits.
pub fn poly_clear_of<T: Scalar>(p: &PolyCurve<T>, r: &PolyCurve<T>, bound2: &T) -> bool {
    p.segments().all(|s| segment_clear_of(&s, r, bound2))
}

/// `true` iff the squared distance from `s` to `r` exceeds `bound2`.
pub fn segment_clear_of<T: Scalar>(s: &Segment<T>, r: &PolyCurve<T>, bound2: &T) -> bool {
    r.segments()
        .all(|t| bbox_gap2(s, &t) > *bound2 || dist2_segment_segment(s, &t) > *bound2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{pt, Rational};

    fn q(s: &str) -> Rational {
        crate::scalar::parse_rational(s).unwrap()
    }

    fn seg(a: (i64, i64), b: (i64, i64)) -> Segment<Rational> {
        Segment::new(pt(a.0, a.1), pt(b.0, b.1)).unwrap()
    }

    fn poly(v: &[(i64, i64)]) -> PolyCurve<Rational> {
        PolyCurve::new(v.iter().map(|&(x, y)| pt(x, y)).collect()).unwrap()
    }

    #[test]
    fn seg_status_examples() {
        assert_eq!(
            seg_status(&seg((0, 0), (2, 2)), &seg((0, 2), (2, 0))),
            SegStatus::Point(pt(1, 1))
        );
        assert_eq!(
            seg_status(&seg((0, 0), (1, 0)), &seg((0, 1), (1, 1))),
            SegStatus::Disjoint
        );
        assert_eq!(
            seg_status(&seg((0, 0), (2, 0)), &seg((1, 0), (3, 0))),
            SegStatus::Overlap(seg((1, 0), (2, 0)))
        );
        assert_eq!(
            seg_status(&seg((0, 0), (1, 0)), &seg((1, 0), (1, 5))),
            SegStatus::Point(pt(1, 0))
        );
        assert_eq!(
            seg_status(&seg((0, 0), (1, 0)), &seg((2, 0), (3, 0))),
            SegStatus::Disjoint
        );
    }

    #[test]
    fn point_poly_examples() {
        assert_eq!(dist2_point_poly(&pt(0, 1), &poly(&[(-1, 0), (1, 0)])), q("1"));
        assert_eq!(dist2_point_poly(&pt(2, 0), &poly(&[(-1, 0), (1, 0)])), q("1"));
        assert_eq!(
            dist2_point_poly(&pt(1, 1), &poly(&[(0, 0), (2, 0), (2, 2)])),
            q("1")
        );
    }

    #[test]
    fn poly_poly_examples() {
        assert_eq!(
            dist2_poly_poly(&poly(&[(0, 0), (1, 0)]), &poly(&[(0, 2), (1, 2)])),
            q("4")
        );
        assert_eq!(
            dist2_poly_poly(&poly(&[(0, 0), (2, 2)]), &poly(&[(0, 2), (2, 0)])),
            q("0")
        );
        // closest pair (1,1)-(2,0)
        assert_eq!(
            dist2_poly_poly(&poly(&[(0, 0), (1, 1)]), &poly(&[(2, 0), (3, 0)])),
            q("2")
        );
    }
}

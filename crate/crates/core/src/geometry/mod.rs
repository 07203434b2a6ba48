//! Planar primitives over an exact field.
//!
//! Distances are always squared so tolerances `2^{-k}` are compared without
//! square roots.

mod curve;
mod erase;
mod predicates;

pub use curve::{first_hit, is_simple_polyarc, sup_norm2, Hit};
pub use erase::{loop_erase, Erased};
pub use predicates::{
    dist2_point_poly, dist2_point_segment, dist2_poly_poly, dist2_segment_segment, orient,
    poly_clear_of, seg_status, segment_clear_of, SegStatus,
};

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("parameter outside [0,1]")]
    ParameterOutOfRange,
    #[error("subarc requires t0 < t1")]
    EmptySubarc,
    #[error("polygonal curve needs at least two vertices")]
    TooFewVertices,
    #[error("consecutive vertices {0} and {1} coincide")]
    RepeatedVertex(usize, usize),
    #[error("degenerate segment")]
    DegenerateSegment,
    #[error("degenerate rectangle")]
    DegenerateRect,
    #[error("radius must be positive")]
    NonPositiveRadius,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }

    pub fn origin() -> Self {
        Point2::new(T::zero(), T::zero())
    }

    pub fn ints(x: i64, y: i64) -> Self {
        Point2::new(T::from_int(x), T::from_int(y))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Point2::new(self.x.clone() - o.x.clone(), self.y.clone() - o.y.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        Point2::new(self.x.clone() + o.x.clone(), self.y.clone() + o.y.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        Point2::new(self.x.clone() * s.clone(), self.y.clone() * s.clone())
    }

    pub fn dot(&self, o: &Self) -> T {
        self.x.clone() * o.x.clone() + self.y.clone() * o.y.clone()
    }

    pub fn cross(&self, o: &Self) -> T {
        self.x.clone() * o.y.clone() - self.y.clone() * o.x.clone()
    }

    pub fn norm2(&self) -> T {
        self.dot(self)
    }

    pub fn dist2(&self, o: &Self) -> T {
        self.sub(o).norm2()
    }

    /// `a + t (b - a)`.
    pub fn lerp(a: &Self, b: &Self, t: &T) -> Self {
        a.add(&b.sub(a).scale(t))
    }
}

/// A nondegenerate closed segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment<T> {
    pub a: Point2<T>,
    pub b: Point2<T>,
}

impl<T: Scalar> Segment<T> {
    pub fn new(a: Point2<T>, b: Point2<T>) -> Result<Self, GeometryError> {
        if a == b {
            return Err(GeometryError::DegenerateSegment);
        }
        Ok(Segment { a, b })
    }

    pub(crate) fn new_unchecked(a: Point2<T>, b: Point2<T>) -> Self {
        Segment { a, b }
    }

    pub fn dir(&self) -> Point2<T> {
        self.b.sub(&self.a)
    }

    pub fn len2(&self) -> T {
        self.dir().norm2()
    }

    pub fn at(&self, t: &T) -> Point2<T> {
        Point2::lerp(&self.a, &self.b, t)
    }

    /// Parameter of a point known to lie on the segment's line.
    pub fn param_of(&self, p: &Point2<T>) -> T {
        let d = self.dir();
        p.sub(&self.a).dot(&d) / d.norm2()
    }

    pub fn reversed(&self) -> Self {
        Segment::new_unchecked(self.b.clone(), self.a.clone())
    }

    pub fn bbox(&self) -> Rect<T> {
        Rect {
            xmin: T::min_of(self.a.x.clone(), self.b.x.clone()),
            xmax: T::max_of(self.a.x.clone(), self.b.x.clone()),
            ymin: T::min_of(self.a.y.clone(), self.b.y.clone()),
            ymax: T::max_of(self.a.y.clone(), self.b.y.clone()),
        }
    }
}

/// Axis-aligned rectangle. Treated as open unless a method says `closed`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rect<T> {
    pub xmin: T,
    pub xmax: T,
    pub ymin: T,
    pub ymax: T,
}

impl<T: Scalar> Rect<T> {
    pub fn new(xmin: T, xmax: T, ymin: T, ymax: T) -> Result<Self, GeometryError> {
        if !(xmin < xmax && ymin < ymax) {
            return Err(GeometryError::DegenerateRect);
        }
        Ok(Rect {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }

    /// Square of side `side` centred at `c`.
    pub fn square(c: &Point2<T>, side: &T) -> Self {
        let h = side.clone() / T::from_int(2);
        Rect {
            xmin: c.x.clone() - h.clone(),
            xmax: c.x.clone() + h.clone(),
            ymin: c.y.clone() - h.clone(),
            ymax: c.y.clone() + h,
        }
    }

    pub fn width(&self) -> T {
        self.xmax.clone() - self.xmin.clone()
    }

    pub fn height(&self) -> T {
        self.ymax.clone() - self.ymin.clone()
    }

    pub fn center(&self) -> Point2<T> {
        let two = T::from_int(2);
        Point2::new(
            (self.xmin.clone() + self.xmax.clone()) / two.clone(),
            (self.ymin.clone() + self.ymax.clone()) / two,
        )
    }

    pub fn diam2(&self) -> T {
        let w = self.width();
        let h = self.height();
        w.clone() * w + h.clone() * h
    }

    pub fn contains_open(&self, p: &Point2<T>) -> bool {
        self.xmin < p.x && p.x < self.xmax && self.ymin < p.y && p.y < self.ymax
    }

    pub fn contains_closed(&self, p: &Point2<T>) -> bool {
        self.xmin <= p.x && p.x <= self.xmax && self.ymin <= p.y && p.y <= self.ymax
    }

    pub fn intersects_open(&self, o: &Self) -> bool {
        self.xmin < o.xmax && o.xmin < self.xmax && self.ymin < o.ymax && o.ymin < self.ymax
    }

    pub fn corners(&self) -> [Point2<T>; 4] {
        [
            Point2::new(self.xmin.clone(), self.ymin.clone()),
            Point2::new(self.xmax.clone(), self.ymin.clone()),
            Point2::new(self.xmax.clone(), self.ymax.clone()),
            Point2::new(self.xmin.clone(), self.ymax.clone()),
        ]
    }

    /// Squared distance from `p` to the closed rectangle.
    pub fn dist2_point(&self, p: &Point2<T>) -> T {
        let dx = if p.x < self.xmin {
            self.xmin.clone() - p.x.clone()
        } else if p.x > self.xmax {
            p.x.clone() - self.xmax.clone()
        } else {
            T::zero()
        };
        let dy = if p.y < self.ymin {
            self.ymin.clone() - p.y.clone()
        } else if p.y > self.ymax {
            p.y.clone() - self.ymax.clone()
        } else {
            T::zero()
        };
        dx.clone() * dx + dy.clone() * dy
    }

    /// Parameter interval `[t_in, t_out]` of `s` inside the closed rectangle.
    pub fn clip_closed(&self, s: &Segment<T>) -> Option<(T, T)> {
        let d = s.dir();
        let mut lo = T::zero();
        let mut hi = T::one();
        let checks = [
            (d.x.clone(), self.xmin.clone() - s.a.x.clone(), true),
            (d.x.clone(), self.xmax.clone() - s.a.x.clone(), false),
            (d.y.clone(), self.ymin.clone() - s.a.y.clone(), true),
            (d.y.clone(), self.ymax.clone() - s.a.y.clone(), false),
        ];
        for (dv, off, is_min) in checks {
            if dv.is_zero() {
                let outside = if is_min { off > T::zero() } else { off < T::zero() };
                if outside {
                    return None;
                }
                continue;
            }
            let t = off / dv.clone();
            let entering = (dv > T::zero()) == is_min;
            if entering {
                if t > lo {
                    lo = t;
                }
            } else if t < hi {
                hi = t;
            }
            if lo > hi {
                return None;
            }
        }
        Some((lo, hi))
    }

    pub fn segment_meets_closed(&self, s: &Segment<T>) -> bool {
        self.clip_closed(s).is_some()
    }

    /// `true` iff some point of `s` lies in the open rectangle.
    pub fn segment_meets_open(&self, s: &Segment<T>) -> bool {
        match self.clip_closed(s) {
            Some((lo, hi)) if lo < hi => {
                let mid = (lo + hi) / T::from_int(2);
                self.contains_open(&s.at(&mid))
            }
            _ => false,
        }
    }

    /// Squared distance between `s` and the closed rectangle.
    pub fn dist2_segment(&self, s: &Segment<T>) -> T {
        if self.segment_meets_closed(s) {
            return T::zero();
        }
        let mut best = T::min_of(self.dist2_point(&s.a), self.dist2_point(&s.b));
        for c in self.corners() {
            let d = dist2_point_segment(&c, s);
            if d < best {
                best = d;
            }
        }
        best
    }
}

/// Open disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disk<T> {
    pub center: Point2<T>,
    pub radius: T,
}

impl<T: Scalar> Disk<T> {
    pub fn new(center: Point2<T>, radius: T) -> Result<Self, GeometryError> {
        if radius <= T::zero() {
            return Err(GeometryError::NonPositiveRadius);
        }
        Ok(Disk { center, radius })
    }

    pub fn unit() -> Self {
        Disk {
            center: Point2::origin(),
            radius: T::one(),
        }
    }

    pub fn radius2(&self) -> T {
        self.radius.clone() * self.radius.clone()
    }

    pub fn contains(&self, p: &Point2<T>) -> bool {
        p.dist2(&self.center) < self.radius2()
    }

    pub fn contains_closed(&self, p: &Point2<T>) -> bool {
        p.dist2(&self.center) <= self.radius2()
    }

    /// Open disks are convex: a segment is inside iff both ends are.
    pub fn contains_segment(&self, s: &Segment<T>) -> bool {
        self.contains(&s.a) && self.contains(&s.b)
    }

    pub fn contains_poly(&self, p: &PolyCurve<T>) -> bool {
        p.vertices().iter().all(|v| self.contains(v))
    }

    pub fn bbox(&self) -> Rect<T> {
        Rect {
            xmin: self.center.x.clone() - self.radius.clone(),
            xmax: self.center.x.clone() + self.radius.clone(),
            ymin: self.center.y.clone() - self.radius.clone(),
            ymax: self.center.y.clone() + self.radius.clone(),
        }
    }
}

/// Polygonal curve with breakpoints `t_j = j/k` for `k + 1` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCurve<T> {
    vertices: Vec<Point2<T>>,
}

impl<T: Scalar> PolyCurve<T> {
    pub fn new(vertices: Vec<Point2<T>>) -> Result<Self, GeometryError> {
        if vertices.len() < 2 {
            return Err(GeometryError::TooFewVertices);
        }
        if let Some(i) = vertices.windows(2).position(|w| w[0] == w[1]) {
            return Err(GeometryError::RepeatedVertex(i, i + 1));
        }
        Ok(PolyCurve { vertices })
    }

    /// Builds a curve after dropping consecutive duplicates.
    pub fn from_points_dedup(points: Vec<Point2<T>>) -> Result<Self, GeometryError> {
        let mut v: Vec<Point2<T>> = Vec::with_capacity(points.len());
        for p in points {
            if v.last() != Some(&p) {
                v.push(p);
            }
        }
        PolyCurve::new(v)
    }

    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point2<T>> {
        self.vertices
    }

    pub fn start(&self) -> &Point2<T> {
        &self.vertices[0]
    }

    pub fn end(&self) -> &Point2<T> {
        self.vertices.last().unwrap()
    }

    /// Number of segments `k`.
    pub fn pieces(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn segment(&self, j: usize) -> Segment<T> {
        Segment::new_unchecked(self.vertices[j].clone(), self.vertices[j + 1].clone())
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment<T>> + '_ {
        (0..self.pieces()).map(move |j| self.segment(j))
    }

    pub fn breakpoint(&self, j: usize) -> T {
        T::from_int(j as i64) / T::from_int(self.pieces() as i64)
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        PolyCurve { vertices: v }
    }

    pub fn translated(&self, by: &Point2<T>) -> Self {
        PolyCurve {
            vertices: self.vertices.iter().map(|v| v.add(by)).collect(),
        }
    }

    pub fn bbox(&self) -> Rect<T> {
        let mut r = self.segment(0).bbox();
        for s in self.segments().skip(1) {
            let b = s.bbox();
            r.xmin = T::min_of(r.xmin, b.xmin);
            r.xmax = T::max_of(r.xmax, b.xmax);
            r.ymin = T::min_of(r.ymin, b.ymin);
            r.ymax = T::max_of(r.ymax, b.ymax);
        }
        r
    }

    /// Evaluates the curve at `t` using the uniform breakpoints.
    pub fn eval(&self, t: &T) -> Result<Point2<T>, GeometryError> {
        if *t < T::zero() || *t > T::one() {
            return Err(GeometryError::ParameterOutOfRange);
        }
        let (j, local) = self.locate(t);
        Ok(self.segment(j).at(&local))
    }

    /// Piece index and local parameter of `t` in `[0,1]`.
    pub(crate) fn locate(&self, t: &T) -> (usize, T) {
        let k = self.pieces();
        let scaled = t.clone() * T::from_int(k as i64);
        let j = scaled.floor_i64().clamp(0, k as i64 - 1) as usize;
        let local = scaled - T::from_int(j as i64);
        (j, local)
    }

    /// Global parameter of local parameter `u` on piece `j`.
    pub fn global_param(&self, j: usize, u: &T) -> T {
        (T::from_int(j as i64) + u.clone()) / T::from_int(self.pieces() as i64)
    }

    /// Restriction to `[t0, t1]`, reparameterised uniformly.
    pub fn subarc(&self, t0: &T, t1: &T) -> Result<Self, GeometryError> {
        if !(*t0 < *t1) {
            return Err(GeometryError::EmptySubarc);
        }
        if *t0 < T::zero() || *t1 > T::one() {
            return Err(GeometryError::ParameterOutOfRange);
        }
        let k = self.pieces();
        let mut pts = vec![self.eval(t0)?];
        for j in 1..k {
            let b = self.breakpoint(j);
            if *t0 < b && b < *t1 {
                pts.push(self.vertices[j].clone());
            }
        }
        pts.push(self.eval(t1)?);
        PolyCurve::from_points_dedup(pts)
    }

    /// Drops vertices interior to straight forward runs.
    pub fn merge_collinear(&self) -> Self {
        let mut out: Vec<Point2<T>> = vec![self.vertices[0].clone()];
        for i in 1..self.vertices.len() {
            let v = &self.vertices[i];
            if out.len() >= 2 {
                let a = &out[out.len() - 2];
                let b = &out[out.len() - 1];
                let d1 = b.sub(a);
                let d2 = v.sub(b);
                if d1.cross(&d2).is_zero() && d1.dot(&d2) > T::zero() {
                    out.pop();
                }
            }
            out.push(v.clone());
        }
        PolyCurve { vertices: out }
    }

    /// Concatenates curves whose endpoints chain.
    pub fn concat(parts: &[PolyCurve<T>]) -> Result<Self, GeometryError> {
        let mut pts: Vec<Point2<T>> = Vec::new();
        for p in parts {
            pts.extend(p.vertices.iter().cloned());
        }
        PolyCurve::from_points_dedup(pts)
    }

    /// Splits segment `j` into `n` equal parts for every `j`, with
    /// `counts[j] = n`.
    pub fn subdivide(&self, counts: &[usize]) -> Self {
        assert_eq!(counts.len(), self.pieces());
        let mut pts = vec![self.vertices[0].clone()];
        for (j, &n) in counts.iter().enumerate() {
            let s = self.segment(j);
            for i in 1..=n {
                let t = T::from_int(i as i64) / T::from_int(n as i64);
                pts.push(s.at(&t));
            }
        }
        PolyCurve { vertices: pts }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{pt, Rational};

    fn q(s: &str) -> Rational {
        crate::scalar::parse_rational(s).unwrap()
    }

    fn poly(v: &[(i64, i64)]) -> PolyCurve<Rational> {
        PolyCurve::new(v.iter().map(|&(x, y)| pt(x, y)).collect()).unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = poly(&[(0, 0), (1, 0)]);
        assert_eq!(p.eval(&q("0")).unwrap(), pt(0, 0));
        let p = poly(&[(0, 0), (2, 0), (2, 2)]);
        assert_eq!(p.eval(&q("1/2")).unwrap(), pt(2, 0));
        assert_eq!(p.eval(&q("3/4")).unwrap(), pt(2, 1));
        assert_eq!(p.eval(&q("1")).unwrap(), pt(2, 2));
        assert_eq!(
            p.eval(&q("5/4")),
            Err(GeometryError::ParameterOutOfRange)
        );
        assert_eq!(
            p.eval(&q("-1/4")),
            Err(GeometryError::ParameterOutOfRange)
        );
    }

    #[test]
    fn rejects_degenerate_input() {
        assert_eq!(
            PolyCurve::new(vec![pt(0, 0), pt(0, 0), pt(1, 0)]),
            Err(GeometryError::RepeatedVertex(0, 1))
        );
        assert_eq!(
            PolyCurve::<Rational>::new(vec![pt(0, 0)]),
            Err(GeometryError::TooFewVertices)
        );
        assert!(Segment::new(pt(1, 1), pt(1, 1)).is_err());
        assert!(Rect::new(q("0"), q("0"), q("0"), q("1")).is_err());
        assert!(Disk::new(pt(0, 0), q("0")).is_err());
    }

    #[test]
    fn subarc_examples() {
        let p = poly(&[(0, 0), (2, 0)]);
        assert_eq!(p.subarc(&q("0"), &q("1/2")).unwrap(), poly(&[(0, 0), (1, 0)]));
        let p = poly(&[(0, 0), (2, 0), (2, 2)]);
        assert_eq!(
            p.subarc(&q("1/4"), &q("3/4")).unwrap(),
            poly(&[(1, 0), (2, 0), (2, 1)])
        );
        assert_eq!(p.subarc(&q("0"), &q("1")).unwrap(), p);
        assert_eq!(
            p.subarc(&q("1/2"), &q("1/2")),
            Err(GeometryError::EmptySubarc)
        );
    }

    #[test]
    fn rect_clipping() {
        let r = Rect::new(q("-1"), q("1"), q("-1"), q("1")).unwrap();
        let s = Segment::new(pt(-2, 0), pt(2, 0)).unwrap();
        assert_eq!(r.clip_closed(&s), Some((q("1/4"), q("3/4"))));
        let edge = Segment::new(pt(-1, 1), pt(1, 1)).unwrap();
        assert!(r.segment_meets_closed(&edge));
        assert!(!r.segment_meets_open(&edge));
        let far = Segment::new(pt(3, 0), pt(3, 1)).unwrap();
        assert_eq!(r.dist2_segment(&far), q("4"));
    }

    #[test]
    fn merge_and_subdivide() {
        let p = poly(&[(0, 0), (1, 0), (2, 0), (2, 1)]);
        assert_eq!(p.merge_collinear(), poly(&[(0, 0), (2, 0), (2, 1)]));
        let s = poly(&[(0, 0), (2, 0)]).subdivide(&[2]);
        assert_eq!(s, poly(&[(0, 0), (1, 0), (2, 0)]));
    }

    #[test]
    fn float_kernel_evaluates() {
        let p = PolyCurve::new(vec![Point2::new(0.0f64, 0.0), Point2::new(2.0, 0.0), Point2::new(2.0, 2.0)]).unwrap();
        assert_eq!(p.eval(&0.75).unwrap(), Point2::new(2.0, 1.0));
    }
}

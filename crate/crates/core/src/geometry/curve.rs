use super::predicates::{bboxes_meet, seg_status, SegStatus};
use super::{Point2, PolyCurve};
use crate::scalar::Scalar;

/// Squared sup-norm `||P - R||^2` under the uniform parameterisations.
///
/// On every interval between consecutive breakpoints of either curve both
/// are affine, so `|P - R|^2` is convex there and its max sits at a
/// breakpoint.
pub fn sup_norm2<T: Scalar>(p: &PolyCurve<T>, r: &PolyCurve<T>) -> T {
    let mut best = T::zero();
    for t in merged_breakpoints(p.pieces(), r.pieces()) {
        let d = p.eval(&t).unwrap().dist2(&r.eval(&t).unwrap());
        if d > best {
            best = d;
        }
    }
    best
}

/// Sorted union of `{j/a}` and `{i/b}` without duplicates.
fn merged_breakpoints<T: Scalar>(a: usize, b: usize) -> Vec<T> {
    // walk both sequences by cross-multiplication on integers
    let mut out = Vec::with_capacity(a + b + 1);
    let (mut i, mut j) = (0usize, 0usize);
    while i <= a || j <= b {
        let take = if i > a {
            (None, Some(j))
        } else if j > b {
            (Some(i), None)
        } else {
            let lhs = i as u128 * b as u128;
            let rhs = j as u128 * a as u128;
            match lhs.cmp(&rhs) {
                std::cmp::Ordering::Less => (Some(i), None),
                std::cmp::Ordering::Greater => (None, Some(j)),
                std::cmp::Ordering::Equal => (Some(i), Some(j)),
            }
        };
        match take {
            (Some(ii), jj) => {
                out.push(T::from_int(ii as i64) / T::from_int(a as i64));
                i += 1;
                if jj.is_some() {
                    j += 1;
                }
            }
            (None, Some(jj)) => {
                out.push(T::from_int(jj as i64) / T::from_int(b as i64));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Adjacent segments share only their common vertex; all other pairs are
/// disjoint.
pub fn is_simple_polyarc<T: Scalar>(p: &PolyCurve<T>) -> bool {
    let segs: Vec<_> = p.segments().collect();
    for i in 0..segs.len() {
        for j in (i + 1)..segs.len() {
            if !bboxes_meet(&segs[i], &segs[j]) {
                continue;
            }
            let st = seg_status(&segs[i], &segs[j]);
            if j == i + 1 {
                if st != SegStatus::Point(segs[i].b.clone()) {
                    return false;
                }
            } else if !st.is_disjoint() {
                return false;
            }
        }
    }
    true
}

/// First point of one curve on another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hit<T> {
    pub t: T,
    pub point: Point2<T>,
}

/// Least parameter `t` with `P(t)` on the image of `R`.
pub fn first_hit<T: Scalar>(p: &PolyCurve<T>, r: &PolyCurve<T>) -> Option<Hit<T>> {
    let rsegs: Vec<_> = r.segments().collect();
    for (j, s) in p.segments().enumerate() {
        let mut best: Option<T> = None;
        for rs in &rsegs {
            if !bboxes_meet(&s, rs) {
                continue;
            }
            let u = match seg_status(&s, rs) {
                SegStatus::Disjoint => continue,
                SegStatus::Point(x) => s.param_of(&x),
                // overlap endpoints come ordered along `s`
                SegStatus::Overlap(o) => s.param_of(&o.a),
            };
            best = Some(match best {
                Some(b) => T::min_of(b, u),
                None => u,
            });
        }
        if let Some(u) = best {
            let point = s.at(&u);
            return Some(Hit {
                t: p.global_param(j, &u),
                point,
            });
        }
    }
    None
}

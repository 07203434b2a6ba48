use super::predicates::{bboxes_meet, seg_status, SegStatus};
use super::{GeometryError, Point2, PolyCurve, Segment};
use crate::scalar::Scalar;

/// Result of chronological loop erasure over a chain of pieces.
///
/// `tags[i]` is the index of the input piece that segment `i` of `points`
/// came from. Tags are nondecreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Erased<T> {
    pub points: Vec<Point2<T>>,
    pub tags: Vec<usize>,
}

impl<T: Scalar> Erased<T> {
    pub fn curve(&self) -> Result<PolyCurve<T>, GeometryError> {
        PolyCurve::new(self.points.clone())
    }

    /// Surviving part of each piece, `None` when a piece was erased
    /// entirely.
    pub fn pieces(&self, n: usize) -> Vec<Option<PolyCurve<T>>> {
        (0..n)
            .map(|tag| {
                let first = self.tags.iter().position(|&t| t == tag)?;
                let last = self.tags.iter().rposition(|&t| t == tag)?;
                Some(PolyCurve::new(self.points[first..=last + 1].to_vec()).unwrap())
            })
            .collect()
    }
}

/// Chronological loop erasure.
///
/// Walks the concatenation of `pieces` segment by segment. Whenever the new
/// segment touches the curve built so far, the curve is cut back to the
/// touching point that comes earliest along it and the walk continues from
/// there. The result is a simple arc from the first start to the last end
/// whose image lies in the union of the inputs.
pub fn loop_erase<T: Scalar>(pieces: &[PolyCurve<T>]) -> Result<Erased<T>, GeometryError> {
    let first = pieces.first().ok_or(GeometryError::TooFewVertices)?;
    for w in pieces.windows(2) {
        if w[0].end() != w[1].start() {
            return Err(GeometryError::DegenerateSegment);
        }
    }
    let mut points = vec![first.start().clone()];
    let mut tags: Vec<usize> = Vec::new();
    for (tag, piece) in pieces.iter().enumerate() {
        for s in piece.segments() {
            push_segment(&mut points, &mut tags, s, tag);
        }
    }
    if points.len() < 2 {
        return Err(GeometryError::TooFewVertices);
    }
    Ok(Erased { points, tags })
}

fn push_segment<T: Scalar>(
    points: &mut Vec<Point2<T>>,
    tags: &mut Vec<usize>,
    s: Segment<T>,
    tag: usize,
) {
    let n = points.len();
    let mut best: Option<(usize, Point2<T>)> = None;
    for k in 0..n.saturating_sub(1) {
        let out = Segment::new_unchecked(points[k].clone(), points[k + 1].clone());
        if !bboxes_meet(&out, &s) {
            continue;
        }
        let hit = match seg_status(&out, &s) {
            SegStatus::Disjoint => continue,
            SegStatus::Point(x) => {
                if k + 2 == n && x == points[n - 1] {
                    // the shared joint with the current end
                    continue;
                }
                x
            }
            SegStatus::Overlap(o) => o.a,
        };
        // segments are scanned in output order, so the first hit is earliest
        best = Some((k, hit));
        break;
    }
    if let Some((k, x)) = best {
        let keep_tag = tags[k];
        points.truncate(k + 1);
        tags.truncate(k);
        if points[k] != x {
            points.push(x);
            tags.push(keep_tag);
        }
    }
    if *points.last().unwrap() != s.b {
        points.push(s.b);
        tags.push(tag);
    }
}

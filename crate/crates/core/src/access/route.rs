//! Certified polygonal routing through the complement of named arcs.
//!
//! The search runs on a dyadic lattice in floating point, in coordinates
//! local to the start point. Every segment of the returned path is then
//! re-checked in exact arithmetic; an edge that fails is banned and the
//! search reruns.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{
    dist2_point_segment, is_simple_polyarc, loop_erase, segment_clear_of, Disk, Point2, Segment,
};
use crate::names::{CurveName, NameError};
use crate::{Point, Poly, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error("no certified route at precision {n}")]
    NotFound { n: u32 },
    #[error("start point is not certified free")]
    BadStart,
    #[error(transparent)]
    Name(#[from] NameError),
}

/// Open region to route inside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Region {
    Disk(Disk<Rational>),
    /// Union of open disks.
    Union(Vec<Disk<Rational>>),
}

/// Depth limit for covering a segment by disks of a union.
const COVER_DEPTH: u32 = 24;

impl Region {
    pub fn disks(&self) -> &[Disk<Rational>] {
        match self {
            Region::Disk(d) => std::slice::from_ref(d),
            Region::Union(v) => v,
        }
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.disks().iter().any(|d| d.contains(p))
    }

    /// Exact. For unions the segment is split until each piece sits in
    /// one disk; giving up after a fixed depth answers `false`.
    pub fn contains_segment(&self, s: &Segment<Rational>) -> bool {
        match self {
            Region::Disk(d) => d.contains_segment(s),
            Region::Union(v) => cover_exact(v, &s.a, &s.b, COVER_DEPTH),
        }
    }

    pub fn contains_poly(&self, p: &Poly) -> bool {
        p.segments().all(|s| self.contains_segment(&s))
    }

    /// Farthest extent from `p` in sup norm, as a float.
    fn reach_f64(&self, p: &Point) -> f64 {
        self.disks()
            .iter()
            .map(|d| {
                let dx = (d.center.x.clone() - p.x.clone()).to_f64_lossy().abs();
                let dy = (d.center.y.clone() - p.y.clone()).to_f64_lossy().abs();
                dx.max(dy) + d.radius.to_f64_lossy()
            })
            .fold(0.0, f64::max)
    }
}

fn cover_exact(disks: &[Disk<Rational>], a: &Point, b: &Point, depth: u32) -> bool {
    if disks.iter().any(|d| d.contains(a) && d.contains(b)) {
        return true;
    }
    if depth == 0 {
        return false;
    }
    let mid = Point2::lerp(a, b, &Rational::half());
    disks.iter().any(|d| d.contains(&mid))
        && cover_exact(disks, a, &mid, depth - 1)
        && cover_exact(disks, &mid, b, depth - 1)
}

/// A routing request. Paths end strictly inside `target`, stay in
/// `region`, keep distance above `2^{-n+1}` from `approx[n]` of every arc
/// and stay out of the closed `avoid` disks.
#[derive(Debug, Clone)]
pub struct RouteSpec<'a> {
    pub start: Point,
    pub target: Disk<Rational>,
    pub region: &'a Region,
    pub arcs: &'a [&'a CurveName],
    pub avoid: &'a [Disk<Rational>],
    pub n: u32,
    pub max_nodes: usize,
}

type P64 = (f64, f64);

/// Relative slack applied to float comparisons during the search.
const SLACK: f64 = 1e-9;

struct Local {
    origin: Point,
    obstacles: Vec<(P64, P64)>,
    bound: f64,
    region: Vec<(P64, f64)>,
    union: bool,
    avoid: Vec<(P64, f64)>,
    target: (P64, f64),
}

impl Local {
    fn to_local(&self, p: &Point) -> P64 {
        (
            (p.x.clone() - self.origin.x.clone()).to_f64_lossy(),
            (p.y.clone() - self.origin.y.clone()).to_f64_lossy(),
        )
    }

    fn disk64(&self, d: &Disk<Rational>) -> (P64, f64) {
        (self.to_local(&d.center), d.radius.to_f64_lossy())
    }

    fn in_region(&self, p: P64) -> bool {
        self.region
            .iter()
            .any(|&(c, r)| dist2(p, c) < r * r * (1.0 - SLACK))
    }

    fn seg_in_region(&self, a: P64, b: P64) -> bool {
        if !self.union {
            return self.in_region(a) && self.in_region(b);
        }
        cover64(&self.region, a, b, 16)
    }

    fn point_free(&self, p: P64) -> bool {
        let b2 = self.bound * self.bound * (1.0 + SLACK);
        self.in_region(p)
            && self.obstacles.iter().all(|&(a, b)| pt_seg2(p, a, b) > b2)
            && self.avoid.iter().all(|&(c, r)| dist2(p, c) > r * r * (1.0 + SLACK))
    }

    fn edge_free(&self, a: P64, b: P64) -> bool {
        let b2 = self.bound * self.bound * (1.0 + SLACK);
        self.seg_in_region(a, b)
            && self.obstacles.iter().all(|&(c, d)| seg_seg2(a, b, c, d) > b2)
            && self
                .avoid
                .iter()
                .all(|&(c, r)| pt_seg2(c, a, b) > r * r * (1.0 + SLACK))
    }

    fn in_target(&self, p: P64) -> bool {
        let (c, r) = self.target;
        dist2(p, c) < r * r * (1.0 - SLACK)
    }
}

fn cover64(disks: &[(P64, f64)], a: P64, b: P64, depth: u32) -> bool {
    let inside = |p: P64, &(c, r): &(P64, f64)| dist2(p, c) < r * r * (1.0 - SLACK);
    if disks.iter().any(|d| inside(a, d) && inside(b, d)) {
        return true;
    }
    if depth == 0 {
        return false;
    }
    let m = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
    disks.iter().any(|d| inside(m, d)) && cover64(disks, a, m, depth - 1) && cover64(disks, m, b, depth - 1)
}

fn dist2(a: P64, b: P64) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)
}

fn pt_seg2(p: P64, a: P64, b: P64) -> f64 {
    let d = (b.0 - a.0, b.1 - a.1);
    let w = (p.0 - a.0, p.1 - a.1);
    let len = d.0 * d.0 + d.1 * d.1;
    let t = if len > 0.0 { ((w.0 * d.0 + w.1 * d.1) / len).clamp(0.0, 1.0) } else { 0.0 };
    dist2(p, (a.0 + t * d.0, a.1 + t * d.1))
}

fn seg_seg2(a: P64, b: P64, c: P64, d: P64) -> f64 {
    let orient = |p: P64, q: P64, r: P64| (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0);
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return 0.0;
    }
    pt_seg2(a, c, d)
        .min(pt_seg2(b, c, d))
        .min(pt_seg2(c, a, b))
        .min(pt_seg2(d, a, b))
}

#[derive(PartialEq)]
struct Open {
    f: f64,
    node: (i64, i64),
}

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, o: &Self) -> Ordering {
        // min-heap on f, then on lexicographic node order
        o.f.total_cmp(&self.f).then_with(|| o.node.cmp(&self.node))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

const STEPS: [(i64, i64); 8] = [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)];

/// Lattice path from the origin node to a node in the target, or `None`.
fn astar(
    local: &Local,
    h: f64,
    banned: &HashSet<((i64, i64), (i64, i64))>,
    budget: &mut usize,
    extent: i64,
) -> Option<Vec<(i64, i64)>> {
    let pos = |n: (i64, i64)| (n.0 as f64 * h, n.1 as f64 * h);
    let (tc, tr) = local.target;
    let heur = |p: P64| (dist2(p, tc).sqrt() - tr).max(0.0);
    let mut g: HashMap<(i64, i64), f64> = HashMap::new();
    let mut parent: HashMap<(i64, i64), (i64, i64)> = HashMap::new();
    let mut free: HashMap<(i64, i64), bool> = HashMap::new();
    let mut closed: HashSet<(i64, i64)> = HashSet::new();
    let mut heap = BinaryHeap::new();
    g.insert((0, 0), 0.0);
    heap.push(Open { f: heur((0.0, 0.0)), node: (0, 0) });
    while let Some(Open { node, .. }) = heap.pop() {
        if !closed.insert(node) {
            continue;
        }
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let p = pos(node);
        if node != (0, 0) && local.in_target(p) {
            let mut path = vec![node];
            let mut cur = node;
            while let Some(&prev) = parent.get(&cur) {
                path.push(prev);
                cur = prev;
            }
            path.reverse();
            return Some(path);
        }
        let gn = g[&node];
        for (k, &(di, dj)) in STEPS.iter().enumerate() {
            let nb = (node.0 + di, node.1 + dj);
            if nb.0.abs() > extent || nb.1.abs() > extent || closed.contains(&nb) {
                continue;
            }
            if banned.contains(&(node, nb)) {
                continue;
            }
            let q = pos(nb);
            if !*free.entry(nb).or_insert_with(|| local.point_free(q)) {
                continue;
            }
            if !local.edge_free(p, q) {
                continue;
            }
            let step = if k < 4 { h } else { h * std::f64::consts::SQRT_2 };
            let cand = gn + step;
            if g.get(&nb).map_or(true, |&old| cand < old) {
                g.insert(nb, cand);
                parent.insert(nb, node);
                heap.push(Open { f: cand + heur(q), node: nb });
            }
        }
    }
    None
}

struct Exact<'a> {
    spec: &'a RouteSpec<'a>,
    polys: Vec<Arc<Poly>>,
    bound2: Rational,
}

impl Exact<'_> {
    fn segment_ok(&self, s: &Segment<Rational>) -> bool {
        self.spec.region.contains_segment(s)
            && self.polys.iter().all(|p| segment_clear_of(s, p, &self.bound2))
            && self
                .spec
                .avoid
                .iter()
                .all(|d| dist2_point_segment(&d.center, s) > d.radius2())
    }
}

/// Finds a certified simple path from `spec.start` into `spec.target`.
pub fn route_avoiding(spec: &RouteSpec<'_>) -> Result<Poly, RouteError> {
    let n = spec.n;
    let polys: Vec<Arc<Poly>> = spec
        .arcs
        .iter()
        .map(|a| a.approx(n))
        .collect::<Result<_, _>>()?;
    // distance above 2^{-n+1} from approx[n], so above 2^{-n} from the arc
    let bound2 = Rational::pow2_neg(2 * n) * Rational::from_int(4);
    let exact = Exact { spec, polys: polys.clone(), bound2: bound2.clone() };
    let start = &spec.start;
    let free_start = spec.region.contains_point(start)
        && polys
            .iter()
            .all(|p| crate::geometry::dist2_point_poly(start, p) > bound2)
        && spec.avoid.iter().all(|d| !d.contains_closed(start));
    if !free_start {
        return Err(RouteError::BadStart);
    }
    let mut local = Local {
        origin: start.clone(),
        obstacles: Vec::new(),
        bound: Rational::pow2_neg(n).to_f64_lossy() * 2.0,
        region: Vec::new(),
        union: matches!(spec.region, Region::Union(_)),
        avoid: Vec::new(),
        target: ((0.0, 0.0), 0.0),
    };
    local.obstacles = polys
        .iter()
        .flat_map(|p| p.segments().map(|s| (local.to_local(&s.a), local.to_local(&s.b))).collect::<Vec<_>>())
        .collect();
    local.region = spec.region.disks().iter().map(|d| local.disk64(d)).collect();
    local.avoid = spec.avoid.iter().map(|d| local.disk64(d)).collect();
    local.target = local.disk64(&spec.target);

    if spec.target.contains(start) {
        return Err(RouteError::NotFound { n });
    }
    let reach = spec.region.reach_f64(start);
    let tr = spec.target.radius.to_f64_lossy();
    let coarse = exponent_at_most(reach / 8.0);
    let fine = exponent_at_most((Rational::pow2_neg(n + 2).to_f64_lossy()).min(tr / 2.0)).max(coarse);
    let mut budget = spec.max_nodes;
    for level in coarse..=fine {
        let h = Rational::pow2_neg(level);
        let hf = h.to_f64_lossy();
        let extent = (reach / hf).ceil() as i64 + 1;
        let mut banned = HashSet::new();
        // a handful of reruns covers float misjudgements
        for _ in 0..8 {
            let Some(nodes) = astar(&local, hf, &banned, &mut budget, extent) else {
                break;
            };
            let pts: Vec<Point> = nodes
                .iter()
                .map(|&(i, j)| {
                    Point::new(
                        start.x.clone() + h.clone() * Rational::from_int(i),
                        start.y.clone() + h.clone() * Rational::from_int(j),
                    )
                })
                .collect();
            if !spec.target.contains(pts.last().unwrap()) {
                banned.insert((nodes[nodes.len() - 2], nodes[nodes.len() - 1]));
                continue;
            }
            match smooth(&exact, &local, &pts) {
                Ok(path) => return Ok(path),
                Err(bad) => {
                    banned.insert((nodes[bad], nodes[bad + 1]));
                }
            }
        }
        if budget == 0 {
            break;
        }
    }
    Err(RouteError::NotFound { n })
}

/// Least `L` with `2^{-L} <= x`.
fn exponent_at_most(x: f64) -> u32 {
    let mut l = 0u32;
    while (-(l as f64)).exp2() > x && l < 200 {
        l += 1;
    }
    l
}

/// Greedy line-of-sight shortcutting with exact checks. On failure
/// returns the index of a lattice edge that failed exact certification.
fn smooth(exact: &Exact<'_>, local: &Local, pts: &[Point]) -> Result<Poly, usize> {
    let mut out = vec![pts[0].clone()];
    let mut i = 0;
    let loc: Vec<P64> = pts.iter().map(|p| local.to_local(p)).collect();
    while i + 1 < pts.len() {
        let mut next = None;
        for j in ((i + 1)..pts.len()).rev() {
            if j > i + 1 && !local.edge_free(loc[i], loc[j]) {
                continue;
            }
            let s = Segment::new_unchecked(pts[i].clone(), pts[j].clone());
            if exact.segment_ok(&s) {
                next = Some(j);
                break;
            }
            if j == i + 1 {
                return Err(i);
            }
        }
        let j = next.ok_or(i)?;
        out.push(pts[j].clone());
        i = j;
    }
    let path = Poly::new(out).expect("lattice nodes are distinct");
    if is_simple_polyarc(&path) {
        return Ok(path);
    }
    // shortcuts may cross; erasing loops keeps certified segments
    Ok(loop_erase(&[path]).expect("chained").curve().expect("two vertices"))
}

//! Stage construction of a rectilinear arc that no listed adversary curve
//! can use to reach the origin.
//!
//! Each adversary that requires attention gets its channel through the
//! square `S_e` split by two parallel copies of the arc's middle part.

use std::sync::Arc;

use log::{debug, info};
use num_traits::Signed;
use thiserror::Error;

use crate::geometry::{dist2_poly_poly, is_simple_polyarc, poly_clear_of, Rect, Segment};
use crate::names::{CompactName, CurveName};
use crate::oracle::{flood_components, GridSpec};
use crate::{pt, DyadicExp, Point, Poly, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversaryError {
    #[error("not a rectilinear arc: {0}")]
    NotRectilinear(String),
    #[error("requirement {0} does not require attention")]
    Precondition(u32),
    #[error("requirement {e}: {why}")]
    Infeasible { e: u32, why: String },
    #[error("requirement {e}: construction check failed: {why}")]
    Internal { e: u32, why: String },
    #[error("duplicate adversary tag {0}")]
    DuplicateTag(u32),
}

/// Simple polygonal arc from `(-1,0)` to `(1,0)` through the origin, all of
/// whose segments are axis-parallel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectiArc {
    poly: Poly,
}

fn axis_parallel(s: &Segment<Rational>) -> bool {
    s.a.x == s.b.x || s.a.y == s.b.y
}

impl RectiArc {
    pub fn new(vertices: Vec<Point>) -> Result<Self, AdversaryError> {
        let bad = |why: &str| AdversaryError::NotRectilinear(why.to_string());
        let poly = Poly::new(vertices).map_err(|e| bad(&e.to_string()))?;
        if *poly.start() != pt(-1, 0) || *poly.end() != pt(1, 0) {
            return Err(bad("endpoints must be (-1,0) and (1,0)"));
        }
        if !poly.vertices().contains(&pt(0, 0)) {
            return Err(bad("origin is not a vertex"));
        }
        if !poly.segments().all(|s| axis_parallel(&s)) {
            return Err(bad("segment not axis-parallel"));
        }
        if !is_simple_polyarc(&poly) {
            return Err(bad("not simple"));
        }
        Ok(RectiArc { poly })
    }

    /// `[-1,1] x {0}`.
    pub fn initial() -> Self {
        RectiArc { poly: Poly::new(vec![pt(-1, 0), pt(0, 0), pt(1, 0)]).unwrap() }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn vertices(&self) -> &[Point] {
        self.poly.vertices()
    }

    fn origin_index(&self) -> usize {
        self.vertices().iter().position(|v| *v == pt(0, 0)).unwrap()
    }

    /// Vertices of degree one in the segment graph.
    pub fn leaf_vertices(&self) -> Vec<Point> {
        let v = self.vertices();
        v.iter()
            .filter(|p| {
                let deg: usize = self.poly.segments().filter(|s| s.a == **p || s.b == **p).count();
                deg == 1
            })
            .cloned()
            .collect()
    }
}

/// `S_e = (-2^{-(e+1)}, 2^{-(e+1)})^2`, treated as open.
pub fn square(e: u32) -> Rect<Rational> {
    let h = Rational::pow2_neg(e + 1);
    Rect::new(-h.clone(), h.clone(), -h.clone(), h).unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub e: u32,
    pub s: Rect<Rational>,
    pub acted: bool,
}

impl Requirement {
    pub fn new(e: u32) -> Self {
        Requirement { e, s: square(e), acted: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryWitness {
    pub c: Poly,
    pub t0: Rational,
    pub t1: Rational,
}

impl AdversaryWitness {
    pub fn new(c: Poly, t0: Rational, t1: Rational) -> Result<Self, AdversaryError> {
        let zero = Rational::from_int(0);
        let one = Rational::from_int(1);
        if !(zero < t0 && t0 < t1 && t1 < one) {
            return Err(AdversaryError::Infeasible { e: 0, why: "need 0 < t0 < t1 < 1".into() });
        }
        Ok(AdversaryWitness { c, t0, t1 })
    }

    pub fn middle(&self) -> Poly {
        self.c.subarc(&self.t0, &self.t1).unwrap()
    }
}

/// The five conditions, checked exactly.
pub fn requires_attention(a: &RectiArc, req: &Requirement, w: &AdversaryWitness) -> bool {
    if req.acted {
        return false;
    }
    let zero = Rational::from_int(0);
    let one = Rational::from_int(1);
    let head = w.c.subarc(&zero, &w.t0).unwrap();
    let mid = w.middle();
    let tail = w.c.subarc(&w.t1, &one).unwrap();
    let s = &req.s;
    head.segments().all(|g| !s.segment_meets_closed(&g))
        && mid.segments().any(|g| s.segment_meets_open(&g))
        && tail.vertices().iter().all(|v| s.contains_open(v))
        && poly_clear_of(&mid, a.poly(), &zero)
}

/// Number of connected pieces of `P ∩ S` for an open rectangle `S`.
pub fn open_pieces(p: &Poly, s: &Rect<Rational>) -> usize {
    let zero = Rational::from_int(0);
    let one = Rational::from_int(1);
    let mut count = 0;
    let mut open_at_end = false;
    for g in p.segments() {
        let iv = s.clip_closed(&g).filter(|(lo, hi)| lo < hi && s.segment_meets_open(&g));
        match iv {
            Some((lo, hi)) => {
                let continues = open_at_end && lo == zero && s.contains_open(&g.a);
                if !continues {
                    count += 1;
                }
                open_at_end = hi == one && s.contains_open(&g.b);
            }
            None => open_at_end = false,
        }
    }
    count
}

/// Where the arc first leaves the open square walking from the origin.
struct Exit {
    /// first vertex outside the open square
    outer: usize,
    x: Point,
    /// unit axis direction outward
    dir: Point,
    rem: Rational,
}

fn exit_from_origin(v: &[Point], i0: usize, forward: bool, s: &Rect<Rational>, e: u32) -> Result<Exit, AdversaryError> {
    let mut i = i0;
    loop {
        let o = if forward { i + 1 } else { i.checked_sub(1).expect("endpoints lie outside S_e") };
        let (a, b) = (&v[i], &v[o]);
        if s.contains_open(b) {
            i = o;
            continue;
        }
        let g = Segment::new(a.clone(), b.clone()).unwrap();
        let (_, hi) = s.clip_closed(&g).unwrap();
        let x = g.at(&hi);
        let len = (b.x.clone() - a.x.clone()).abs() + (b.y.clone() - a.y.clone()).abs();
        let dir = b.sub(a).scale(&(Rational::from_int(1) / len));
        let rem = (b.x.clone() - x.x.clone()).abs() + (b.y.clone() - x.y.clone()).abs();
        if rem <= Rational::from_int(0) {
            return Err(AdversaryError::Infeasible { e, why: "arc leaves S_e at a vertex".into() });
        }
        return Ok(Exit { outer: o, x, dir, rem });
    }
}

fn left(d: &Point) -> Point {
    Point::new(-d.y.clone(), d.x.clone())
}

fn unit_dir(a: &Point, b: &Point) -> Point {
    let d = b.sub(a);
    let len = d.x.abs() + d.y.abs();
    d.scale(&(Rational::from_int(1) / len))
}

/// Mitred offset of a rectilinear polyline by `delta` to its left
/// (`side = 1`) or right (`side = -1`).
fn offset(b: &Poly, delta: &Rational, side: i64) -> Vec<Point> {
    let v = b.vertices();
    let n = v.len();
    let d = delta.clone() * Rational::from_int(side);
    (0..n)
        .map(|i| {
            let mut shift = Point::new(Rational::from_int(0), Rational::from_int(0));
            if i > 0 {
                shift = shift.add(&left(&unit_dir(&v[i - 1], &v[i])));
            }
            if i + 1 < n {
                shift = shift.add(&left(&unit_dir(&v[i], &v[i + 1])));
            }
            // at a right-angle corner n_in + n_out is the mitre
            v[i].add(&shift.scale(&d))
        })
        .collect()
}

fn largest_dyadic_at_most(x2: &Rational, from: u32) -> u32 {
    (from..).find(|&j| Rational::pow2_neg(2 * j) <= *x2).unwrap()
}

/// Component counts of `S_e - A` before and after an act, at one
/// resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentCheck {
    pub m: u32,
    pub before: usize,
    pub after: usize,
}

#[derive(Debug, Clone)]
pub struct ActReport {
    pub e: u32,
    pub k: u32,
    /// offset distance `2^{-delta_exp}`
    pub delta_exp: u32,
    pub p: [Point; 2],
    pub q: [Point; 2],
    pub arc: RectiArc,
    pub checks: Vec<ComponentCheck>,
    pub blocking_dist2: Rational,
}

/// Count of `square(e) - A` components on a grid of side `2^{-m}`.
pub fn component_count(a: &RectiArc, e: u32, m: u32) -> usize {
    let grid = GridSpec::new(square(e), m).expect("dyadic square");
    flood_components(&grid, std::slice::from_ref(a.poly()), DyadicExp(m + 2)).count as usize
}

/// Acts for `req` at stage `stage + 1`.
pub fn act(a: &RectiArc, req: &Requirement, w: &AdversaryWitness, stage: u32) -> Result<ActReport, AdversaryError> {
    let e = req.e;
    if !requires_attention(a, req, w) {
        return Err(AdversaryError::Precondition(e));
    }
    let mid = w.middle();
    let clear2 = dist2_poly_poly(&mid, a.poly());
    let k = (stage..).find(|&k| Rational::pow2_neg(2 * k) < clear2).unwrap();

    let v = a.vertices();
    let i0 = a.origin_index();
    let s = &req.s;
    let exits = [exit_from_origin(v, i0, false, s, e)?, exit_from_origin(v, i0, true, s, e)?];
    let gap = Rational::pow2_neg(e + 1);
    let mut q = Vec::new();
    let mut p = Vec::new();
    for ex in &exits {
        let quarter = Rational::from_int(4);
        let eta = Rational::min_of(ex.rem.clone() / quarter.clone(), gap.clone() / quarter);
        q.push(ex.x.add(&ex.dir.scale(&eta)));
        p.push(ex.x.add(&ex.dir.scale(&(eta * Rational::from_int(2)))));
    }
    // B from q1 to q2 along the arc
    let (lo, hi) = (exits[0].outer, exits[1].outer);
    let mut bv = vec![q[0].clone()];
    bv.extend(v[lo + 1..hi].iter().cloned());
    bv.push(q[1].clone());
    let b = Poly::new(bv).unwrap();
    let b_merged = b.merge_collinear();

    // distance from B to the arc beyond the segments carrying p_j, capped by
    // the 2^{-k} tube
    let tube2 = Rational::pow2_neg(2 * k);
    let mut room2 = tube2.clone();
    let far = [&v[..=lo], &v[hi..]];
    for part in far {
        let d2 = if part.len() >= 2 {
            dist2_poly_poly(&b, &Poly::new(part.to_vec()).unwrap())
        } else {
            crate::geometry::dist2_point_poly(&part[0], &b)
        };
        room2 = Rational::min_of(room2, d2);
    }
    // delta <= room / 4, so 16 delta^2 <= room^2
    let mut dexp = largest_dyadic_at_most(&(room2 / Rational::from_int(16)), k + 1);
    debug!("e = {e}: k = {k}, first delta = 2^-{dexp}");

    let mut last_why = String::new();
    for _ in 0..24 {
        match build(a, &b, &b_merged, &p, &q, &exits, dexp, e, w, k) {
            Ok(rep) => {
                info!("requirement {e} acts: k = {k}, delta = 2^-{dexp}");
                return Ok(rep);
            }
            Err(why) => {
                debug!("delta 2^-{dexp} rejected: {why}");
                last_why = why;
                dexp += 1;
            }
        }
    }
    Err(AdversaryError::Infeasible { e, why: last_why })
}

#[allow(clippy::too_many_arguments)]
fn build(
    a: &RectiArc,
    b: &Poly,
    b_merged: &Poly,
    p: &[Point],
    q: &[Point],
    exits: &[Exit; 2],
    dexp: u32,
    e: u32,
    w: &AdversaryWitness,
    k: u32,
) -> Result<ActReport, String> {
    let v = a.vertices();
    let delta = Rational::pow2_neg(dexp);
    let b1 = offset(b_merged, &delta, 1);
    let b2 = offset(b_merged, &delta, -1);
    // walking from q1 into B the direction is -dir of the first exit
    let d_start = exits[0].dir.scale(&Rational::from_int(-1));
    let d_end = exits[1].dir.clone();
    let n_l0 = left(&d_start).scale(&delta);
    let n_l1 = left(&d_end).scale(&delta);

    let mut out: Vec<Point> = v[..=exits[0].outer].to_vec();
    out.push(p[0].clone());
    out.push(p[0].sub(&n_l0));
    out.extend(b2.iter().cloned());
    out.push(q[1].clone());
    out.extend(b.vertices().iter().rev().skip(1).cloned());
    out.extend(b1.iter().cloned());
    out.push(p[1].add(&n_l1));
    out.push(p[1].clone());
    out.extend(v[exits[1].outer..].iter().cloned());
    let out = Poly::from_points_dedup(out).map_err(|x| x.to_string())?;
    let arc = RectiArc::new(out.into_vertices()).map_err(|x| x.to_string())?;

    let zero = Rational::from_int(0);
    let s = square(e);
    for (j, copy) in [&b1, &b2].into_iter().enumerate() {
        let c = Poly::new(copy.clone()).map_err(|x| x.to_string())?;
        if !poly_clear_of(&c, a.poly(), &zero) {
            return Err(format!("copy {j} meets the old arc"));
        }
        if open_pieces(&c, &s) != 1 {
            return Err(format!("copy {j} meets S_e in more than one piece"));
        }
    }
    let blocking_dist2 = dist2_poly_poly(&w.middle(), arc.poly());
    if blocking_dist2 <= zero {
        return Err("adversary middle part touches the new arc".into());
    }
    let m = (k + 3).max(dexp + 2);
    let mut checks = Vec::new();
    for mm in [m, m + 2] {
        let before = component_count(a, e, mm);
        let after = component_count(&arc, e, mm);
        if after != before + 2 {
            return Err(format!("component count {before} -> {after} at resolution 2^-{mm}"));
        }
        checks.push(ComponentCheck { m: mm, before, after });
    }
    Ok(ActReport {
        e,
        k,
        delta_exp: dexp,
        p: [p[0].clone(), p[1].clone()],
        q: [q[0].clone(), q[1].clone()],
        arc,
        checks,
        blocking_dist2,
    })
}

#[derive(Debug, Clone)]
pub struct TaggedWitness {
    pub e: u32,
    pub witness: AdversaryWitness,
}

#[derive(Debug, Clone)]
pub struct StageLog {
    pub stage: u32,
    pub act: Option<ActReport>,
}

#[derive(Debug, Clone)]
pub struct AdversaryRun {
    /// `A_0, A_1, ...`, one per stage
    pub arcs: Vec<RectiArc>,
    pub log: Vec<StageLog>,
    pub requirements: Vec<Requirement>,
}

impl AdversaryRun {
    pub fn last(&self) -> &RectiArc {
        self.arcs.last().unwrap()
    }

    /// Compact-set name of the final arc.
    pub fn compact(&self) -> CompactName {
        CompactName::Curve(Arc::new(CurveName::constant(self.last().poly().clone())))
    }
}

/// Runs stages `1..=max_stages`; at each, the least `e` requiring attention
/// acts.
pub fn run(adversaries: &[TaggedWitness], max_stages: u32) -> Result<AdversaryRun, AdversaryError> {
    let mut order: Vec<&TaggedWitness> = adversaries.iter().collect();
    order.sort_by_key(|w| w.e);
    for pair in order.windows(2) {
        if pair[0].e == pair[1].e {
            return Err(AdversaryError::DuplicateTag(pair[0].e));
        }
    }
    let mut reqs: Vec<Requirement> = order.iter().map(|w| Requirement::new(w.e)).collect();
    let mut arcs = vec![RectiArc::initial()];
    let mut log = Vec::new();
    for stage in 1..=max_stages {
        let a = arcs.last().unwrap().clone();
        let chosen = (0..order.len()).find(|&i| requires_attention(&a, &reqs[i], &order[i].witness));
        let entry = match chosen {
            Some(i) => {
                let rep = act(&a, &reqs[i], &order[i].witness, stage - 1)?;
                reqs[i].acted = true;
                arcs.push(rep.arc.clone());
                StageLog { stage, act: Some(rep) }
            }
            None => {
                arcs.push(a);
                StageLog { stage, act: None }
            }
        };
        log.push(entry);
    }
    Ok(AdversaryRun { arcs, log, requirements: reqs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptq;

    fn q(s: &str) -> Rational {
        crate::scalar::parse_rational(s).unwrap()
    }

    fn c1() -> AdversaryWitness {
        let c = Poly::new(vec![ptq("0", "-1"), ptq("0", "-1/4")]).unwrap();
        AdversaryWitness::new(c, q("1/3"), q("5/6")).unwrap()
    }

    fn c2() -> AdversaryWitness {
        let c = Poly::new(vec![ptq("0", "-1"), ptq("0", "-1/8")]).unwrap();
        AdversaryWitness::new(c, q("1/2"), q("15/16")).unwrap()
    }

    #[test]
    fn attention_conditions() {
        let a0 = RectiArc::initial();
        assert!(requires_attention(&a0, &Requirement::new(0), &c1()));
        let mut acted = Requirement::new(0);
        acted.acted = true;
        assert!(!requires_attention(&a0, &acted, &c1()));
        // head already inside the closed square
        let early = AdversaryWitness::new(c1().c, q("2/3"), q("5/6")).unwrap();
        assert!(!requires_attention(&a0, &Requirement::new(0), &early));
        // middle part touching A_0
        let through = Poly::new(vec![ptq("0", "-1"), ptq("0", "1/4")]).unwrap();
        let w = AdversaryWitness::new(through, q("1/3"), q("15/16")).unwrap();
        assert!(!requires_attention(&a0, &Requirement::new(0), &w));
        assert_eq!(act(&a0, &Requirement::new(0), &w, 0).unwrap_err(), AdversaryError::Precondition(0));
    }

    #[test]
    fn first_act() {
        let a0 = RectiArc::initial();
        let rep = act(&a0, &Requirement::new(0), &c1(), 0).unwrap();
        assert_eq!(rep.k, 2);
        assert_eq!(rep.delta_exp, 4);
        for c in &rep.checks {
            assert_eq!(c.after, c.before + 2);
        }
        assert!(rep.blocking_dist2 > q("0"));
        assert_eq!(rep.arc.leaf_vertices(), vec![pt(-1, 0), pt(1, 0)]);
    }

    #[test]
    fn two_stages_nest() {
        let a0 = RectiArc::initial();
        let a1 = act(&a0, &Requirement::new(0), &c1(), 0).unwrap().arc;
        assert!(requires_attention(&a1, &Requirement::new(1), &c2()));
        let rep = act(&a1, &Requirement::new(1), &c2(), 1).unwrap();
        assert!(rep.blocking_dist2 > q("0"));
        assert!(dist2_poly_poly(&c1().middle(), rep.arc.poly()) > q("0"));
        // the earlier square is not merged back
        let m = 7;
        assert!(component_count(&rep.arc, 0, m) >= component_count(&a1, 0, m));
    }

    #[test]
    fn run_priority_and_quiescence() {
        let empty = run(&[], 3).unwrap();
        assert!(empty.arcs.iter().all(|a| *a == RectiArc::initial()));

        let one = run(&[TaggedWitness { e: 0, witness: c1() }], 3).unwrap();
        let acts: Vec<u32> = one.log.iter().filter_map(|l| l.act.as_ref().map(|r| r.e)).collect();
        assert_eq!(acts, vec![0]);
        assert!(one.requirements[0].acted);

        let both = run(&[TaggedWitness { e: 1, witness: c2() }, TaggedWitness { e: 0, witness: c1() }], 3).unwrap();
        let acts: Vec<(u32, u32)> = both.log.iter().filter_map(|l| l.act.as_ref().map(|r| (l.stage, r.e))).collect();
        assert_eq!(acts, vec![(1, 0), (2, 1)]);
        let dup = [TaggedWitness { e: 0, witness: c1() }, TaggedWitness { e: 0, witness: c2() }];
        assert_eq!(run(&dup, 1).unwrap_err(), AdversaryError::DuplicateTag(0));
    }

    #[test]
    fn open_piece_count() {
        let s = square(0);
        let p = Poly::new(vec![ptq("-1", "0"), ptq("1", "0")]).unwrap();
        assert_eq!(open_pieces(&p, &s), 1);
        let w = Poly::new(vec![ptq("-1", "0"), ptq("0", "0"), ptq("0", "1"), ptq("1/4", "1"), ptq("1/4", "0"), ptq("1", "0")]).unwrap();
        assert_eq!(open_pieces(&w, &s), 2);
        let edge = Poly::new(vec![ptq("-1", "1/2"), ptq("1", "1/2")]).unwrap();
        assert_eq!(open_pieces(&edge, &s), 0);
    }
}

//! Links between two boundary points of an open set given by disks.
//!
//! Each endpoint gets an accessing arc inside a small ball around it; a
//! cross path joins the two starting points, and the pieces are culled to
//! a simple arc.

use std::sync::Arc;

use log::{info, warn};
use thiserror::Error;

use crate::access::{
    access_arc, approx_point, layout_weighted, route_avoiding, AccessArc, AccessError, AccessScene, Budget,
    Region, RouteError, RouteSpec,
};
use crate::geometry::{dist2_point_poly, loop_erase, Disk, GeometryError, Point2};
use crate::names::{certified_nonmember, CurveName, ModulusFn, NameError, PointName};
use num_traits::Signed;

use crate::{Point, Poly, Rational, Scalar};

/// An open set named by disks; the union of all listed disks is the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenSetName {
    pub balls: Vec<Disk<Rational>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Certified,
    Unknown,
}

impl OpenSetName {
    pub fn region(&self) -> Region {
        Region::Union(self.balls.clone())
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.balls.iter().any(|d| d.contains(p))
    }
}

/// Certifies `P ⊆ D` by splitting each segment until every piece has both
/// ends in one disk, giving up below `depth` halvings.
pub fn contains_poly(d: &OpenSetName, p: &Poly, depth: u32) -> Containment {
    let ok = p.segments().all(|s| covered(&d.balls, &s.a, &s.b, depth));
    if ok {
        Containment::Certified
    } else {
        Containment::Unknown
    }
}

fn covered(disks: &[Disk<Rational>], a: &Point, b: &Point, depth: u32) -> bool {
    if disks.iter().any(|d| d.contains(a) && d.contains(b)) {
        return true;
    }
    if depth == 0 {
        return false;
    }
    let mid = Point2::lerp(a, b, &Rational::half());
    covered(disks, a, &mid, depth - 1) && covered(disks, &mid, b, depth - 1)
}

#[derive(Debug)]
pub struct LinkScene {
    pub d: OpenSetName,
    pub zeta: [PointName; 2],
    pub b: [Arc<CurveName>; 2],
    pub g: [ModulusFn; 2],
    pub r: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("pieces do not chain")]
    NotChaining,
    #[error("no admissible start point near endpoint {0}")]
    XiNotFound(usize),
    #[error("access balls cannot be separated")]
    Overlap,
    #[error("endpoint {0}: {1}")]
    Access(usize, AccessError),
    #[error("cross path: {0}")]
    Cross(RouteError),
    #[error("construction invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Name(#[from] NameError),
}

/// Least `k >= 1` with `2^{-k+1} <= r`.
pub fn link_k(r: &Rational) -> u32 {
    (1u32..)
        .find(|&k| Rational::pow2_neg(k - 1) <= *r)
        .expect("r > 0")
}

/// Simple arc from the first start to the last end inside the union of
/// the chained pieces.
pub fn cull_simple(pieces: &[Poly]) -> Result<Poly, LinkError> {
    let e = loop_erase(pieces).map_err(|_| LinkError::NotChaining)?;
    e.curve().map_err(|e: GeometryError| LinkError::Invariant(e.to_string()))
}

/// Halves `r` until the two access balls are certifiably disjoint.
pub fn separate_balls(zeta: &[PointName; 2], r: &Rational, max_precision: u32) -> Option<Rational> {
    let mut r = r.clone();
    for p in 2..=max_precision {
        let (a, ea) = approx_point(&zeta[0], p).ok()?;
        let (b, eb) = approx_point(&zeta[1], p).ok()?;
        // |z0 - z1| >= |a - b| - ea - eb >= 2r
        let need = Rational::from_int(2) * r.clone() + ea + eb;
        if a.dist2(&b) >= need.clone() * need {
            return Some(r);
        }
        r = r / Rational::from_int(2);
    }
    None
}

/// Acceptance radius `2^{-g(k)}` around `zeta_j`: a rational point of `D`
/// certifiably off `B_j`, searched on lattices of spacing `2^{-g(k)-3}`
/// and finer.
pub fn find_xi(scene: &LinkScene, j: usize, k: u32, max_precision: u32) -> Result<Point, LinkError> {
    let gk = scene.g[j].eval(k);
    let (za, err) = approx_point(&scene.zeta[j], gk + 3)?;
    let rad = Rational::pow2_neg(gk) - err;
    let rad2 = rad.clone() * rad;
    for level in (gk + 3)..=(gk + 8).min(max_precision.max(gk + 3)) {
        let h = Rational::pow2_neg(level);
        let span = 1i64 << (level - gk);
        let mut cands: Vec<(Rational, i64, i64)> = Vec::new();
        for i in -span..=span {
            for jj in -span..=span {
                let off = Point::new(h.clone() * Rational::from_int(i), h.clone() * Rational::from_int(jj));
                let d2 = off.norm2();
                if d2 < rad2 && d2 > Rational::from_int(0) {
                    // prefer points near half the radius, away from zeta
                    let pref = d2 * Rational::from_int(4) - rad2.clone();
                    cands.push((pref.abs(), i, jj));
                }
            }
        }
        cands.sort();
        for (_, i, jj) in cands {
            let z = Point::new(
                za.x.clone() + h.clone() * Rational::from_int(i),
                za.y.clone() + h.clone() * Rational::from_int(jj),
            );
            let cap = max_precision.min(level + 4);
            if scene.d.contains_point(&z) && certified_nonmember(&z, &scene.b[j], cap).is_some() {
                return Ok(z);
            }
        }
    }
    Err(LinkError::XiNotFound(j))
}

/// A computed link. Terms are produced from the two accessing arcs.
#[derive(Debug)]
pub struct Link {
    pub r: Rational,
    pub r_shrunk: bool,
    pub k: u32,
    pub xi: [Point; 2],
    pub access: [Arc<AccessArc>; 2],
    /// Path between the starting points before culling.
    pub cross: Poly,
    pub cross_n: u32,
    /// Culled middle part, from the end of the first piece of the first
    /// accessing arc to that of the second.
    pub middle: Poly,
}

/// One term of a link name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkTerm {
    pub curve: Poly,
    /// The term without its two final segments toward the endpoints.
    pub core: Poly,
}

impl Link {
    pub fn term(&self, m: u32) -> Result<LinkTerm, LinkError> {
        let mut halves = Vec::new();
        let mut cores = Vec::new();
        for j in 0..2 {
            let sp = self.access[j].spliced(m).map_err(|e| LinkError::Access(j, e))?;
            // pieces after the first, plus the tail, on [1/2, 1]
            let v = sp.curve.vertices();
            let half = Poly::new(v[v.len() / 2..].to_vec()).unwrap();
            let mut parts: Vec<Poly> = sp.pieces[1..].to_vec();
            parts.push(sp.tail.clone());
            let joined = Poly::concat(&parts).unwrap().into_vertices();
            cores.push(joined[..joined.len() - 1].to_vec());
            halves.push(half);
        }
        let first = halves[0].reversed();
        let curve = layout_weighted(&[(&first, 2), (&self.middle, 1), (&halves[1], 2)]);
        let mut core: Vec<Point> = cores[0].iter().rev().cloned().collect();
        core.extend(self.middle.vertices().iter().skip(1).cloned());
        core.extend(cores[1].iter().skip(1).cloned());
        let core = Poly::from_points_dedup(core).map_err(|e| LinkError::Invariant(e.to_string()))?;
        Ok(LinkTerm { curve, core })
    }

    pub fn name(self: &Arc<Self>) -> CurveName {
        let me = self.clone();
        CurveName::generated(move |m| {
            me.term(m).map(|t| t.curve).map_err(|e| match e {
                LinkError::Access(_, AccessError::StageTimeout { .. }) => NameError::PrecisionUnavailable(m),
                other => NameError::Invalid(other.to_string()),
            })
        })
    }
}

/// Builds the link: accessing arcs at both ends, the cross path and the
/// culled middle.
pub fn link(scene: &LinkScene, stages: usize, budget: Budget) -> Result<Arc<Link>, LinkError> {
    let r = separate_balls(&scene.zeta, &scene.r, budget.max_precision).ok_or(LinkError::Overlap)?;
    let r_shrunk = r != scene.r;
    if r_shrunk {
        warn!("access balls overlap; radius shrunk to {r}");
    }
    let k = link_k(&r);
    let mut xi = Vec::new();
    let mut access = Vec::new();
    let mut keep_out = Vec::new();
    for j in 0..2 {
        let x = find_xi(scene, j, k, budget.max_precision)?;
        let p = scene.g[j].eval(k) + 4;
        let (za, err) = approx_point(&scene.zeta[j], p)?;
        let domain = Disk::new(za, r.clone() - err).map_err(|e| LinkError::Invariant(e.to_string()))?;
        let sc = Arc::new(AccessScene {
            domain,
            arc: scene.b[j].clone(),
            g: scene.g[j].clone(),
            z0: x.clone(),
            zeta0: scene.zeta[j].clone(),
        });
        let a = access_arc(sc, stages, budget).map_err(|e| LinkError::Access(j, e))?;
        // every stage after the first stays inside this disk
        let s0 = a.state().s[0];
        let (zs, es) = approx_point(&scene.zeta[j], s0 + 2)?;
        keep_out.push(Disk {
            center: zs,
            radius: Rational::pow2_neg(s0) * Rational::from_int(4) + es,
        });
        info!("endpoint {j}: xi = {x:?}, s0 = {s0}");
        xi.push(x);
        access.push(a);
    }
    let (cross, cross_n) = cross_path(scene, &xi[0], &xi[1], &keep_out, &budget)?;
    let firsts: Vec<Poly> = (0..2)
        .map(|j| {
            access[j]
                .spliced(0)
                .map(|s| s.pieces[0].clone())
                .map_err(|e| LinkError::Access(j, e))
        })
        .collect::<Result<_, _>>()?;
    let middle = cull_simple(&[firsts[0].reversed(), cross.clone(), firsts[1].clone()])?;
    let [a0, a1]: [Arc<AccessArc>; 2] = access.try_into().unwrap();
    let [x0, x1]: [Point; 2] = xi.try_into().unwrap();
    Ok(Arc::new(Link {
        r,
        r_shrunk,
        k,
        xi: [x0, x1],
        access: [a0, a1],
        cross,
        cross_n,
        middle,
    }))
}

/// Route inside `D` from `a` to exactly `b`, away from both boundary arcs
/// and the closed `keep_out` disks.
fn cross_path(
    scene: &LinkScene,
    a: &Point,
    b: &Point,
    keep_out: &[Disk<Rational>],
    budget: &Budget,
) -> Result<(Poly, u32), LinkError> {
    let region = scene.d.region();
    let arcs = [scene.b[0].as_ref(), scene.b[1].as_ref()];
    let mut n = scene.g[0].eval(0).max(scene.g[1].eval(0)) + 4;
    let mut last = RouteError::NotFound { n };
    while n <= budget.max_precision {
        let Some(target) = free_ball(scene, b, keep_out, n) else {
            n += 2;
            continue;
        };
        let spec = RouteSpec {
            start: a.clone(),
            target,
            region: &region,
            arcs: &arcs,
            avoid: keep_out,
            n,
            max_nodes: budget.max_nodes,
        };
        match route_avoiding(&spec) {
            Ok(p) => {
                let mut v = p.into_vertices();
                if v.last() != Some(b) {
                    v.push(b.clone());
                }
                // the closing segment stays in a certified free ball
                let p = cull_simple(&[Poly::new(v).unwrap()])?;
                return Ok((p, n));
            }
            Err(RouteError::Name(e)) => return Err(e.into()),
            Err(e) => {
                last = e;
                n += 2;
            }
        }
    }
    Err(LinkError::Cross(last))
}

/// A disk around `b` whose closure is clear of everything the cross path
/// must avoid at precision `n`.
fn free_ball(scene: &LinkScene, b: &Point, keep_out: &[Disk<Rational>], n: u32) -> Option<Disk<Rational>> {
    let clear = Rational::pow2_neg(n) * Rational::from_int(2);
    let polys: Vec<Arc<Poly>> = scene.b.iter().map(|c| c.approx(n).ok()).collect::<Option<_>>()?;
    for q in 2..=n + 2 {
        let rho = Rational::pow2_neg(q);
        let out = rho.clone() + clear.clone();
        let arcs_ok = polys.iter().all(|p| dist2_point_poly(b, p) > out.clone() * out.clone());
        let in_d = scene.d.balls.iter().any(|d| {
            let room = d.radius.clone() - rho.clone();
            room > Rational::from_int(0) && b.dist2(&d.center) < room.clone() * room
        });
        let off_keep = keep_out.iter().all(|k| {
            let gap = k.radius.clone() + rho.clone();
            b.dist2(&k.center) > gap.clone() * gap
        });
        if arcs_ok && in_d && off_keep {
            return Disk::new(b.clone(), rho).ok();
        }
    }
    None
}

/// Circle arc `c + rho * R^q f(u)` for `u` in `[u0, u1]`, where `R` is a
/// quarter turn and `f(u) = ((1-u^2)/(1+u^2), 2u/(1+u^2))`. Term `t` is
/// the inscribed polygon through `2^j + 1` evenly spaced `u`, with
/// `j = ceil((t+2)/2)`; all its vertices are rational.
pub fn circle_arc(center: Point, rho: Rational, quarter_turns: u8, u0: Rational, u1: Rational) -> CurveName {
    CurveName::generated(move |t| {
        let j = (t + 3) / 2;
        let count = 1i64 << j;
        let pts = (0..=count)
            .map(|i| {
                let u = u0.clone() + (u1.clone() - u0.clone()) * Rational::new(i.into(), count.into());
                let one = Rational::from_int(1);
                let den = one.clone() + u.clone() * u.clone();
                let fx = (one - u.clone() * u.clone()) / den.clone();
                let fy = Rational::from_int(2) * u / den;
                let (x, y) = match quarter_turns % 4 {
                    0 => (fx, fy),
                    1 => (-fy, fx),
                    2 => (-fx, -fy),
                    _ => (fy, -fx),
                };
                Point::new(center.x.clone() + rho.clone() * x, center.y.clone() + rho.clone() * y)
            })
            .collect();
        Poly::new(pts).map_err(|e| NameError::Invalid(e.to_string()))
    })
}

//! Accessing arcs: from a free point `z0` to a boundary point `zeta0` of its
//! component in the complement of a named arc.
//!
//! Stage `t` produces a waypoint `e_t` within `2^{-g(s_t)}` of `zeta0` and a
//! certified path `P_t` ending there. Terms of the output name are built by
//! loop-erasing the stage paths and adding a final segment to an
//! approximation of `zeta0`.

mod route;
mod splice;

pub use route::{route_avoiding, Region, RouteError, RouteSpec};
pub use splice::{layout_pieces, layout_weighted, splice, Spliced};

use std::sync::{Arc, Mutex};

use log::{debug, info};
use thiserror::Error;

use crate::geometry::{dist2_point_poly, Disk};
use crate::names::{certified_nonmember, CurveName, ModulusFn, NameError, PointName};
use crate::scalar::sqrt_sum_lt;
use crate::{Point, Poly, Rational, Scalar};

#[derive(Debug)]
pub struct AccessScene {
    pub domain: Disk<Rational>,
    pub arc: Arc<CurveName>,
    pub g: ModulusFn,
    pub z0: Point,
    pub zeta0: PointName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest arc-name index and dyadic exponent any search may use.
    pub max_precision: u32,
    /// Largest stage index that may be computed.
    pub max_stages: usize,
    /// Lattice nodes one routing call may expand.
    pub max_nodes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_precision: 40,
            max_stages: 12,
            max_nodes: 400_000,
        }
    }
}

/// Everything the stages have fixed so far. Index `t` of each vector
/// belongs to stage `t`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StageState {
    pub s: Vec<u32>,
    pub e: Vec<Point>,
    pub paths: Vec<Poly>,
    /// Arc-name index at which `paths[t]` was certified.
    pub n_arc: Vec<u32>,
    /// `epsilon_{t-1}`, the radius of the disk `paths[t]` lives in; unused
    /// for stage 0.
    pub eps: Vec<Rational>,
    /// Index of the `zeta0` approximation that `e[t]` was checked against.
    pub zeta_prec: Vec<u32>,
}

impl StageState {
    /// Index of the last completed stage.
    pub fn t(&self) -> usize {
        self.s.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AccessError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("stage {stage} stalled at precision {n}")]
    StageTimeout {
        stage: usize,
        n: u32,
        state: Box<StageState>,
    },
    #[error("construction invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Name(#[from] NameError),
}

/// Approximation of a point name at index `p` with its error bound. Exact
/// names give the point itself with zero error.
pub fn approx_point(name: &PointName, p: u32) -> Result<(Point, Rational), NameError> {
    match name.exact_point() {
        Some(z) => Ok((z.clone(), Rational::from_int(0))),
        None => Ok((name.point_at(p)?, Rational::pow2_neg(p))),
    }
}

/// `|x - c| <= rad` for possibly negative `rad`.
fn within(x: &Point, c: &Point, rad: &Rational) -> bool {
    *rad >= Rational::from_int(0) && x.dist2(c) <= rad.clone() * rad.clone()
}

/// Largest `k` ever tried by [`access_bound_k`].
pub const BOUND_SEARCH_LIMIT: u32 = 64;

/// Least `k` with `2^{-g(k)} + 2^{-k} <= max(d(zeta0, dD), d(zeta1, dD))`,
/// using certified lower bounds on both distances.
pub fn access_bound_k(g: &ModulusFn, zeta0: &PointName, zeta1: &Point, d: &Disk<Rational>) -> Option<u32> {
    for k in 0..=BOUND_SEARCH_LIMIT {
        let gk = g.eval(k);
        let v = Rational::pow2_neg(gk) + Rational::pow2_neg(k);
        let room = d.radius.clone() - v;
        if within(zeta1, &d.center, &room) {
            return Some(k);
        }
        let Ok((za, err)) = approx_point(zeta0, gk + 2) else {
            continue;
        };
        if within(&za, &d.center, &(room - err)) {
            return Some(k);
        }
    }
    None
}

/// `|z - zeta0| < 2^{-g(k)}` certified through `point_at(zeta0, g(k)+2)`.
pub fn check_access_precondition(g: &ModulusFn, zeta0: &PointName, z: &Point, k: u32) -> bool {
    let gk = g.eval(k);
    let Ok((za, err)) = approx_point(zeta0, gk + 2) else {
        return false;
    };
    let rad = Rational::pow2_neg(gk) - err;
    rad > Rational::from_int(0) && z.dist2(&za) < rad.clone() * rad
}

/// Radius `2^{-g(s)} - err` of the target disk for a waypoint checked
/// against the approximation at index `g(s) + 2`.
fn target_disk(scene: &AccessScene, s: u32) -> Result<(Disk<Rational>, u32), AccessError> {
    let p = scene.g.eval(s) + 2;
    let (za, err) = approx_point(&scene.zeta0, p)?;
    let radius = Rational::pow2_neg(scene.g.eval(s)) - err;
    let disk = Disk::new(za, radius).map_err(|e| AccessError::Invariant(e.to_string()))?;
    Ok((disk, p))
}

/// Stage 0: the exponent `s0`, the first waypoint and the path to it.
pub fn find_entry(scene: &AccessScene, budget: &Budget) -> Result<StageState, AccessError> {
    let timeout = |n| AccessError::StageTimeout {
        stage: 0,
        n,
        state: Box::default(),
    };
    if !scene.domain.contains(&scene.z0) {
        return Err(AccessError::Precondition("z0 is outside the domain".into()));
    }
    if certified_nonmember(&scene.z0, &scene.arc, budget.max_precision).is_none() {
        return Err(AccessError::Precondition("z0 is not certified off the arc".into()));
    }
    // s0: D_{2^{-s+2}}(zeta0) inside the domain and 2^{-s+2} < |z0 - zeta0|
    let mut entry = None;
    for s in 0..=budget.max_precision {
        let (za, err) = approx_point(&scene.zeta0, s + 2)?;
        let r = Rational::pow2_neg(s) * Rational::from_int(4);
        let room = scene.domain.radius.clone() - r.clone() - err.clone();
        let c = r + err;
        if within(&za, &scene.domain.center, &room) && c.clone() * c.clone() < scene.z0.dist2(&za) {
            entry = Some((s, za, c));
            break;
        }
    }
    let (s0, za_s, c) = entry.ok_or_else(|| timeout(budget.max_precision))?;
    let (target, p0) = target_disk(scene, s0)?;
    let region = Region::Disk(scene.domain.clone());
    let arcs = [scene.arc.as_ref()];
    let mut n = (s0 + 2).max(scene.g.eval(s0) + 3);
    let path = loop {
        if n > budget.max_precision {
            return Err(timeout(n));
        }
        let spec = RouteSpec {
            start: scene.z0.clone(),
            target: target.clone(),
            region: &region,
            arcs: &arcs,
            avoid: &[],
            n,
            max_nodes: budget.max_nodes,
        };
        match route_avoiding(&spec) {
            Ok(p) => break p,
            Err(RouteError::Name(e)) => return Err(e.into()),
            Err(e) => {
                debug!("entry route failed at n = {n}: {e}");
                n += 2;
            }
        }
    };
    let path = first_segment_constraint(&scene.z0, path, &c, &za_s)?;
    info!("stage 0: s = {s0}, n = {n}, {} vertices", path.vertices().len());
    Ok(StageState {
        s: vec![s0],
        e: vec![path.end().clone()],
        paths: vec![path],
        n_arc: vec![n],
        eps: vec![Rational::from_int(0)],
        zeta_prec: vec![p0],
    })
}

/// Ensures `|z0 - q1| + c < |z0 - za|` by inserting a point on the first
/// segment close enough to `z0`.
fn first_segment_constraint(z0: &Point, path: Poly, c: &Rational, za: &Point) -> Result<Poly, AccessError> {
    let far2 = z0.dist2(za);
    let q1 = path.vertices()[1].clone();
    if sqrt_sum_lt(&z0.dist2(&q1), c, &far2) {
        return Ok(path);
    }
    let mut q = q1;
    for _ in 0..256 {
        q = q.add(z0).scale(&Rational::half());
        if sqrt_sum_lt(&z0.dist2(&q), c, &far2) {
            let mut v = path.into_vertices();
            v.insert(1, q);
            return Poly::new(v).map_err(|e| AccessError::Invariant(e.to_string()));
        }
    }
    Err(AccessError::Invariant("first segment constraint unreachable".into()))
}

/// Appends stage `t + 1`.
pub fn stage_step(scene: &AccessScene, state: &StageState, budget: &Budget) -> Result<StageState, AccessError> {
    let t = state.t();
    let st = state.s[t];
    let et = &state.e[t];
    let timeout = |n| AccessError::StageTimeout {
        stage: t + 1,
        n,
        state: Box::new(state.clone()),
    };
    if t + 1 > budget.max_stages {
        return Err(timeout(*state.n_arc.last().unwrap()));
    }
    let eps = Rational::pow2_neg(scene.g.eval(st)) + Rational::pow2_neg(st);
    // least s > max(s_t, t+1) with d(zeta0, union P) > 2^{-s+2}
    let mut next = None;
    for s in (st.max(t as u32 + 1) + 1)..=budget.max_precision {
        let (za, err) = approx_point(&scene.zeta0, s + 2)?;
        let c = Rational::pow2_neg(s) * Rational::from_int(4) + err;
        let c2 = c.clone() * c;
        if state.paths.iter().all(|p| dist2_point_poly(&za, p) > c2) {
            next = Some(s);
            break;
        }
    }
    let s1 = next.ok_or_else(|| timeout(budget.max_precision))?;
    let (target, p1) = target_disk(scene, s1)?;
    let disk = Disk::new(et.clone(), eps.clone()).map_err(|e| AccessError::Invariant(e.to_string()))?;
    let region = Region::Disk(disk.clone());
    let arcs = [scene.arc.as_ref()];
    let prev_n = *state.n_arc.last().unwrap();
    let mut n = (st + 2).max(scene.g.eval(s1) + 3).max(prev_n);
    let path = loop {
        if n > budget.max_precision {
            return Err(timeout(n));
        }
        let spec = RouteSpec {
            start: et.clone(),
            target: target.clone(),
            region: &region,
            arcs: &arcs,
            avoid: &[],
            n,
            max_nodes: budget.max_nodes,
        };
        match route_avoiding(&spec) {
            Ok(p) => break p,
            Err(RouteError::Name(e)) => return Err(e.into()),
            Err(e) => {
                debug!("stage {} route failed at n = {n}: {e}", t + 1);
                n += 2;
            }
        }
    };
    // runtime checks of the stage invariants
    if !(s1 > st && s1 > t as u32 + 1) {
        return Err(AccessError::Invariant(format!("s not increasing at stage {}", t + 1)));
    }
    if !path.vertices().iter().all(|v| disk.contains(v)) {
        return Err(AccessError::Invariant(format!("stage {} left its disk", t + 1)));
    }
    // D_eps(e_t) inside D_{2^{-s_t+2}}(zeta0), seen through the target centre
    let (za, err) = approx_point(&scene.zeta0, p1)?;
    let room = Rational::pow2_neg(st) * Rational::from_int(4) - eps.clone() - err;
    if !within(et, &za, &room) {
        return Err(AccessError::Invariant(format!("stage {} disk not near zeta0", t + 1)));
    }
    info!("stage {}: s = {s1}, n = {n}, {} vertices", t + 1, path.vertices().len());
    let mut out = state.clone();
    out.s.push(s1);
    out.e.push(path.end().clone());
    out.paths.push(path);
    out.n_arc.push(n);
    out.eps.push(eps);
    out.zeta_prec.push(p1);
    Ok(out)
}

/// Stage index whose tail bound covers term `m`: one past the least `t`
/// with `s_t >= m + 3`, and at least 1.
pub fn term_stage(s: &[u32], m: u32) -> Option<usize> {
    s.iter().position(|&st| st >= m + 3).map(|t| t + 1)
}

/// A running access computation. Stages are added on demand.
#[derive(Debug)]
pub struct AccessArc {
    pub scene: Arc<AccessScene>,
    pub budget: Budget,
    state: Mutex<StageState>,
}

impl AccessArc {
    pub fn state(&self) -> StageState {
        self.state.lock().unwrap().clone()
    }

    /// Computes stages until index `t` exists.
    pub fn ensure_stage(&self, t: usize) -> Result<(), AccessError> {
        let mut st = self.state.lock().unwrap();
        while st.t() < t {
            *st = stage_step(&self.scene, &st, &self.budget)?;
        }
        Ok(())
    }

    /// The stage that term `m` is spliced through.
    pub fn stage_of_term(&self, m: u32) -> Result<usize, AccessError> {
        loop {
            let s = self.state().s;
            if let Some(t) = term_stage(&s, m) {
                self.ensure_stage(t)?;
                return Ok(t);
            }
            self.ensure_stage(s.len())?;
        }
    }

    pub fn spliced(&self, m: u32) -> Result<Spliced, AccessError> {
        let t = self.stage_of_term(m)?;
        let state = self.state();
        let (za, _) = approx_point(&self.scene.zeta0, state.zeta_prec[t])?;
        splice(&state, t, &za)
    }

    pub fn term(&self, m: u32) -> Result<Poly, AccessError> {
        Ok(self.spliced(m)?.curve)
    }

    /// The output as a curve name. Budget exhaustion shows up as missing
    /// precision.
    pub fn name(self: &Arc<Self>) -> CurveName {
        let me = self.clone();
        CurveName::generated(move |m| {
            me.term(m).map_err(|e| match e {
                AccessError::StageTimeout { .. } => NameError::PrecisionUnavailable(m),
                AccessError::Name(n) => n,
                other => NameError::Invalid(other.to_string()),
            })
        })
    }
}

/// Runs stages `0..=stages` and returns the arc, ready to produce terms.
pub fn access_arc(scene: Arc<AccessScene>, stages: usize, budget: Budget) -> Result<Arc<AccessArc>, AccessError> {
    let mut state = find_entry(&scene, &budget)?;
    while state.t() < stages {
        state = stage_step(&scene, &state, &budget)?;
    }
    Ok(Arc::new(AccessArc {
        scene,
        budget,
        state: Mutex::new(state),
    }))
}

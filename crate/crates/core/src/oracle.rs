//! Brute-force verifiers: grid flood fill and dense sampling.
//!
//! They are deliberately simple and independent of the constructions they
//! check. Errors are one-sided: a cell touching an obstacle is blocked.

use std::collections::VecDeque;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::geometry::{Rect, Segment};
use crate::names::ModulusFn;
use crate::{DyadicExp, Point, Poly, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("grid region sides must be positive multiples of 2^-{0}")]
    BadGrid(u32),
    #[error("point {0} lies outside the grid region")]
    OutsideRegion(String),
    #[error("point {0} lies in a blocked cell")]
    Blocked(String),
}

/// Square cells of side `2^{-m}` tiling `region`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub region: Rect<Rational>,
    pub m: u32,
    nx: usize,
    ny: usize,
}

impl GridSpec {
    pub fn new(region: Rect<Rational>, m: u32) -> Result<Self, OracleError> {
        let inv = Rational::from_int(1) / Rational::pow2_neg(m);
        let count = |len: Rational| -> Option<usize> {
            let c = len * inv.clone();
            (c.is_integer() && c > Rational::from_int(0)).then(|| c.to_integer().to_usize())?
        };
        let nx = count(region.width()).ok_or(OracleError::BadGrid(m))?;
        let ny = count(region.height()).ok_or(OracleError::BadGrid(m))?;
        Ok(GridSpec { region, m, nx, ny })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    fn side(&self) -> Rational {
        Rational::pow2_neg(self.m)
    }

    pub fn cell_rect(&self, i: usize, j: usize) -> Rect<Rational> {
        let h = self.side();
        let x0 = self.region.xmin.clone() + h.clone() * Rational::from_int(i as i64);
        let y0 = self.region.ymin.clone() + h.clone() * Rational::from_int(j as i64);
        Rect {
            xmin: x0.clone(),
            xmax: x0 + h.clone(),
            ymin: y0.clone(),
            ymax: y0 + h,
        }
    }

    /// Cell containing `p`; points on a cell edge go to the cell above/right
    /// unless that would leave the grid.
    pub fn cell_of(&self, p: &Point) -> Option<(usize, usize)> {
        if !self.region.contains_closed(p) {
            return None;
        }
        let inv = Rational::from_int(1) / self.side();
        let i = ((p.x.clone() - self.region.xmin.clone()) * inv.clone()).floor_i64() as usize;
        let j = ((p.y.clone() - self.region.ymin.clone()) * inv).floor_i64() as usize;
        Some((i.min(self.nx - 1), j.min(self.ny - 1)))
    }
}

/// Flood-fill labelling of the clear cells.
#[derive(Debug, Clone)]
pub struct Components {
    pub grid: GridSpec,
    /// Row-major by `j` then `i`; `None` for blocked cells.
    pub labels: Vec<Option<u32>>,
    pub count: u32,
}

impl Components {
    pub fn label(&self, i: usize, j: usize) -> Option<u32> {
        self.labels[j * self.grid.nx + i]
    }

    pub fn label_of(&self, p: &Point) -> Result<u32, OracleError> {
        let (i, j) = self
            .grid
            .cell_of(p)
            .ok_or_else(|| OracleError::OutsideRegion(format!("{p:?}")))?;
        self.label(i, j)
            .ok_or_else(|| OracleError::Blocked(format!("{p:?}")))
    }

    /// Labels of clear cells within Chebyshev distance `radius` (in cells)
    /// of the cell containing `p`.
    pub fn labels_near(&self, p: &Point, radius: usize) -> Vec<u32> {
        let Some((ci, cj)) = self.grid.cell_of(p) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for j in cj.saturating_sub(radius)..=(cj + radius).min(self.grid.ny - 1) {
            for i in ci.saturating_sub(radius)..=(ci + radius).min(self.grid.nx - 1) {
                if let Some(l) = self.label(i, j) {
                    if !out.contains(&l) {
                        out.push(l);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Number of clear cells in a component.
    pub fn size(&self, label: u32) -> usize {
        self.labels.iter().filter(|l| **l == Some(label)).count()
    }
}

/// Blocked mask: a cell is blocked when its closed rect is within
/// `2^{-clearance}` of some obstacle.
pub fn blocked_cells(grid: &GridSpec, obstacles: &[Poly], clearance: DyadicExp) -> Vec<bool> {
    let c2: Rational = clearance.squared();
    let (nx, ny) = (grid.nx, grid.ny);
    let mut blocked = vec![false; nx * ny];
    let h = grid.side().to_f64_lossy();
    let x0 = grid.region.xmin.to_f64_lossy();
    let y0 = grid.region.ymin.to_f64_lossy();
    let pad = clearance.value::<f64>() + 2.0 * h;
    let clamp = |v: f64, n: usize| -> usize { v.max(0.0).min((n - 1) as f64) as usize };
    for poly in obstacles {
        for s in poly.segments() {
            let (ax, ay) = (s.a.x.to_f64_lossy(), s.a.y.to_f64_lossy());
            let (bx, by) = (s.b.x.to_f64_lossy(), s.b.y.to_f64_lossy());
            let i_lo = clamp(((ax.min(bx) - pad - x0) / h).floor(), nx);
            let i_hi = clamp(((ax.max(bx) + pad - x0) / h).floor(), nx);
            if ax.max(bx) + pad < x0 || ax.min(bx) - pad > x0 + h * nx as f64 {
                continue;
            }
            for i in i_lo..=i_hi {
                // y-range of the segment over the padded column, in floats;
                // the exact test below decides
                let cx0 = x0 + h * i as f64 - pad;
                let cx1 = x0 + h * (i + 1) as f64 + pad;
                let (ylo, yhi) = if (bx - ax).abs() < 1e-300 {
                    (ay.min(by), ay.max(by))
                } else {
                    let ta = ((cx0 - ax) / (bx - ax)).clamp(0.0, 1.0);
                    let tb = ((cx1 - ax) / (bx - ax)).clamp(0.0, 1.0);
                    let ya = ay + ta * (by - ay);
                    let yb = ay + tb * (by - ay);
                    (ya.min(yb), ya.max(yb))
                };
                if yhi + pad < y0 || ylo - pad > y0 + h * ny as f64 {
                    continue;
                }
                let j_lo = clamp(((ylo - pad - y0) / h).floor(), ny);
                let j_hi = clamp(((yhi + pad - y0) / h).floor(), ny);
                for j in j_lo..=j_hi {
                    let idx = j * nx + i;
                    if !blocked[idx] && cell_blocked(&grid.cell_rect(i, j), &s, &c2) {
                        blocked[idx] = true;
                    }
                }
            }
        }
    }
    blocked
}

fn cell_blocked(cell: &Rect<Rational>, s: &Segment<Rational>, c2: &Rational) -> bool {
    cell.dist2_segment(s) <= *c2
}

/// 4-connected components of the clear cells, labelled in scanline order.
pub fn flood_components(grid: &GridSpec, obstacles: &[Poly], clearance: DyadicExp) -> Components {
    let blocked = blocked_cells(grid, obstacles, clearance);
    let (nx, ny) = (grid.nx, grid.ny);
    let mut labels: Vec<Option<u32>> = vec![None; nx * ny];
    let mut count = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..nx * ny {
        if blocked[start] || labels[start].is_some() {
            continue;
        }
        labels[start] = Some(count);
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            let (i, j) = (c % nx, c / nx);
            let mut visit = |n: usize| {
                if !blocked[n] && labels[n].is_none() {
                    labels[n] = Some(count);
                    queue.push_back(n);
                }
            };
            if i > 0 {
                visit(c - 1);
            }
            if i + 1 < nx {
                visit(c + 1);
            }
            if j > 0 {
                visit(c - nx);
            }
            if j + 1 < ny {
                visit(c + nx);
            }
        }
        count += 1;
    }
    Components {
        grid: grid.clone(),
        labels,
        count,
    }
}

/// Do the cells of `p` and `q` share a label?
pub fn same_component(
    grid: &GridSpec,
    obstacles: &[Poly],
    p: &Point,
    q: &Point,
    clearance: DyadicExp,
) -> Result<bool, OracleError> {
    let comps = flood_components(grid, obstacles, clearance);
    Ok(comps.label_of(p)? == comps.label_of(q)?)
}

/// Minimum of `|P(a) - R(b)|^2` over `samples` evenly spaced parameters on
/// each curve. Never below the exact distance.
pub fn dense_min_dist2(p: &Poly, r: &Poly, samples: usize) -> Rational {
    assert!(samples >= 2);
    let params: Vec<Rational> = (0..samples)
        .map(|i| Rational::from_int(i as i64) / Rational::from_int(samples as i64 - 1))
        .collect();
    let ps: Vec<Point> = params.iter().map(|t| p.eval(t).unwrap()).collect();
    let rs: Vec<Point> = params.iter().map(|t| r.eval(t).unwrap()).collect();
    let mut best: Option<Rational> = None;
    for a in &ps {
        for b in &rs {
            let d = a.dist2(b);
            if best.as_ref().map_or(true, |x| d < *x) {
                best = Some(d);
            }
        }
    }
    best.unwrap()
}

/// Squared diameter of a polygonal curve: the largest vertex-to-vertex
/// distance.
pub fn diam2(p: &Poly) -> Rational {
    let v = p.vertices();
    let mut best = Rational::from_int(0);
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            let d = v[i].dist2(&v[j]);
            if d > best {
                best = d;
            }
        }
    }
    best
}

/// A pair of points of `p` that breaks the ULAC property at `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UlacViolation {
    pub k: u32,
    pub t0: Rational,
    pub t1: Rational,
}

/// Number of close pairs checked and the first violation, if any.
///
/// `z0` runs over `base` evenly spaced parameters; for each it tries points
/// on every segment within `2^{-g(k)}` of it, `fan` on each side of the
/// closest point plus the extremes of the admissible range.
pub fn ulac_check(p: &Poly, g: &ModulusFn, k: u32, base: usize, fan: usize) -> (usize, Option<UlacViolation>) {
    let delta2: Rational = DyadicExp(g.eval(k)).squared();
    let bound2: Rational = DyadicExp(k).squared();
    let mut checked = 0;
    for i in 0..=base {
        let t0 = Rational::from_int(i as i64) / Rational::from_int(base as i64);
        let z0 = p.eval(&t0).unwrap();
        for (j, s) in p.segments().enumerate() {
            let len2 = s.len2();
            // closest parameter on s and admissible half-width in parameter units
            let uc = Rational::max_of(
                Rational::from_int(0),
                Rational::min_of(Rational::from_int(1), s.param_of(&z0)),
            );
            let zc = s.at(&uc);
            let d2c = zc.dist2(&z0);
            if d2c > delta2 {
                continue;
            }
            // |z0 - s(u)|^2 = d2c + (u - uc)^2 len2 roughly; step outward
            // in parameter and keep only the truly close points
            let half_f = ((delta2.to_f64_lossy() - d2c.to_f64_lossy()).max(0.0) / len2.to_f64_lossy()).sqrt();
            for l in -(fan as i64)..=(fan as i64) {
                let off = half_f * l as f64 / fan.max(1) as f64;
                let u = Rational::max_of(
                    Rational::from_int(0),
                    Rational::min_of(
                        Rational::from_int(1),
                        uc.clone() + Rational::from_float(off).unwrap_or_else(|| Rational::from_int(0)),
                    ),
                );
                let z1 = s.at(&u);
                if z1 == z0 || z1.dist2(&z0) > delta2 {
                    continue;
                }
                let t1 = p.global_param(j, &u);
                let (a, b) = if t0 < t1 { (t0.clone(), t1.clone()) } else { (t1.clone(), t0.clone()) };
                if a == b {
                    continue;
                }
                checked += 1;
                let sub = p.subarc(&a, &b).unwrap();
                if diam2(&sub) >= bound2 {
                    return (checked, Some(UlacViolation { k, t0: a, t1: b }));
                }
            }
        }
    }
    (checked, None)
}

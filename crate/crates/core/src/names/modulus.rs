use thiserror::Error;

use crate::geometry::{dist2_segment_segment, is_simple_polyarc};
use crate::{Poly, Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusKind {
    Ulac,
    Cik,
}

/// `a*k + b`, or a table for small `k` followed by such a tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModulusRepr {
    Affine { a: u32, b: u32 },
    Table { table: Vec<u32>, tail: (u32, u32) },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModulusError {
    #[error("modulus must satisfy a >= 1")]
    BadSlope,
    #[error("modulus is not monotone at k = {0}")]
    NotMonotone(u32),
    #[error("modulus value g({0}) is below {0}")]
    BelowIdentity(u32),
    #[error("expected a {0:?} modulus")]
    WrongKind(ModulusKind),
    #[error("polygonal arc is not simple")]
    NotSimple,
}

/// Monotone `g` with `g(k) >= k`, tagged as a ULAC or CIK function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusFn {
    kind: ModulusKind,
    repr: ModulusRepr,
}

impl ModulusFn {
    pub fn new(kind: ModulusKind, repr: ModulusRepr) -> Result<Self, ModulusError> {
        let (a, len) = match &repr {
            ModulusRepr::Affine { a, .. } => (*a, 0),
            ModulusRepr::Table { table, tail } => (tail.0, table.len() as u32),
        };
        if a < 1 {
            return Err(ModulusError::BadSlope);
        }
        let g = ModulusFn { kind, repr };
        // past the table the tail is affine with a >= 1, so checking one
        // step beyond it is enough
        let upto = len + 1;
        for k in 0..=upto {
            if g.eval(k) < k {
                return Err(ModulusError::BelowIdentity(k));
            }
            if k > 0 && g.eval(k) < g.eval(k - 1) {
                return Err(ModulusError::NotMonotone(k));
            }
        }
        Ok(g)
    }

    pub fn affine(kind: ModulusKind, a: u32, b: u32) -> Result<Self, ModulusError> {
        Self::new(kind, ModulusRepr::Affine { a, b })
    }

    pub fn kind(&self) -> ModulusKind {
        self.kind
    }

    pub fn repr(&self) -> &ModulusRepr {
        &self.repr
    }

    pub fn eval(&self, k: u32) -> u32 {
        match &self.repr {
            ModulusRepr::Affine { a, b } => a * k + b,
            ModulusRepr::Table { table, tail } => match table.get(k as usize) {
                Some(v) => *v,
                None => tail.0 * k + tail.1,
            },
        }
    }
}

/// Every ULAC function is a CIK function; the numbers do not change.
pub fn ulac_as_cik(g: &ModulusFn) -> Result<ModulusFn, ModulusError> {
    if g.kind != ModulusKind::Ulac {
        return Err(ModulusError::WrongKind(ModulusKind::Ulac));
    }
    Ok(ModulusFn {
        kind: ModulusKind::Cik,
        repr: g.repr.clone(),
    })
}

/// ULAC function of a simple polygonal arc.
///
/// Two points at distance at most `delta` lie on one segment, on adjacent
/// segments or on segments at least `sigma` apart. On adjacent segments the
/// joining subarc has diameter at most `c * delta`, with `c = 1` at
/// non-acute vertices and `1/sin(angle)` otherwise. So
/// `g(k) = max(k + b, b0)` with `4^b > c^2` and `4^{-b0} < sigma^2`.
pub fn polyarc_ulac(p: &Poly) -> Result<ModulusFn, ModulusError> {
    if !is_simple_polyarc(p) {
        return Err(ModulusError::NotSimple);
    }
    let one = Rational::from_int(1);
    let mut c2 = one.clone();
    for w in p.vertices().windows(3) {
        let u = w[0].sub(&w[1]);
        let v = w[2].sub(&w[1]);
        if u.dot(&v) > Rational::from_int(0) {
            let cr = u.cross(&v);
            // cr != 0: a simple arc never folds back on itself
            c2 = Rational::max_of(c2, u.norm2() * v.norm2() / (cr.clone() * cr));
        }
    }
    // least b >= 1 with 4^b > c2
    let mut b = 1u32;
    while Rational::from_int(1) / Rational::pow2_neg(2 * b) <= c2 {
        b += 1;
    }
    let segs: Vec<_> = p.segments().collect();
    let mut sigma2: Option<Rational> = None;
    for i in 0..segs.len() {
        for j in (i + 2)..segs.len() {
            let d = dist2_segment_segment(&segs[i], &segs[j]);
            sigma2 = Some(match sigma2 {
                Some(s) => Rational::min_of(s, d),
                None => d,
            });
        }
    }
    let b0 = match sigma2 {
        Some(s2) => (0u32..).find(|&k| Rational::pow2_neg(2 * k) < s2).unwrap(),
        None => 0,
    };
    let table: Vec<u32> = (0..b0.saturating_sub(b)).map(|k| (k + b).max(b0)).collect();
    let repr = if table.is_empty() {
        ModulusRepr::Affine { a: 1, b }
    } else {
        ModulusRepr::Table { table, tail: (1, b) }
    };
    ModulusFn::new(ModulusKind::Ulac, repr)
}

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use super::NameError;
use crate::geometry::{dist2_point_poly, sup_norm2};
use crate::{Point, Poly, Rational, Scalar};

type PolyFn = Arc<dyn Fn(u32) -> Result<Poly, NameError> + Send + Sync>;

/// Name of a curve: `approx(t)` is within `2^{-t}` of the limit in sup norm
/// and of every later term.
pub struct CurveName {
    source: Source,
    memo: Mutex<BTreeMap<u32, Arc<Poly>>>,
}

enum Source {
    Constant(Arc<Poly>),
    Prefix(Vec<Arc<Poly>>),
    /// `base + 2^{-t-1} dir` with `|dir| <= 1`; converges to `base`.
    Perturbed { base: Poly, dir: Point },
    Generated(PolyFn),
}

impl fmt::Debug for CurveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            Source::Constant(p) => f.debug_tuple("CurveName::Constant").field(p).finish(),
            Source::Prefix(v) => f.debug_tuple("CurveName::Prefix").field(&v.len()).finish(),
            Source::Perturbed { dir, .. } => {
                f.debug_struct("CurveName::Perturbed").field("dir", dir).finish()
            }
            Source::Generated(_) => f.write_str("CurveName::Generated"),
        }
    }
}

impl CurveName {
    fn with(source: Source) -> Self {
        CurveName {
            source,
            memo: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn constant(p: Poly) -> Self {
        Self::with(Source::Constant(Arc::new(p)))
    }

    /// Finite prefix; rejected unless strongly Cauchy.
    pub fn prefix(terms: Vec<Poly>) -> Result<Self, NameError> {
        if terms.is_empty() {
            return Err(NameError::Invalid("empty curve name".into()));
        }
        if let CauchyCheck::Violation(t, s) = validate_strongly_cauchy(&terms) {
            return Err(NameError::Invalid(format!(
                "terms {t} and {s} are farther apart than 2^-{t}"
            )));
        }
        Ok(Self::with(Source::Prefix(terms.into_iter().map(Arc::new).collect())))
    }

    pub fn perturbed(base: Poly, dir: Point) -> Result<Self, NameError> {
        if dir.norm2() > Rational::from_int(1) {
            return Err(NameError::Invalid("perturbation direction longer than 1".into()));
        }
        Ok(Self::with(Source::Perturbed { base, dir }))
    }

    /// Terms produced on demand and memoized. The producer vouches for the
    /// Cauchy condition.
    pub fn generated(f: impl Fn(u32) -> Result<Poly, NameError> + Send + Sync + 'static) -> Self {
        Self::with(Source::Generated(Arc::new(f)))
    }

    /// Number of available terms for finite names.
    pub fn available(&self) -> Option<usize> {
        match &self.source {
            Source::Prefix(v) => Some(v.len()),
            _ => None,
        }
    }

    pub fn approx(&self, t: u32) -> Result<Arc<Poly>, NameError> {
        match &self.source {
            Source::Constant(p) => Ok(p.clone()),
            Source::Prefix(v) => v
                .get(t as usize)
                .cloned()
                .ok_or(NameError::PrecisionUnavailable(t)),
            Source::Perturbed { base, dir } => {
                self.memoized(t, || Ok(base.translated(&dir.scale(&Rational::pow2_neg(t + 1)))))
            }
            Source::Generated(f) => self.memoized(t, || f(t)),
        }
    }

    fn memoized(
        &self,
        t: u32,
        make: impl FnOnce() -> Result<Poly, NameError>,
    ) -> Result<Arc<Poly>, NameError> {
        // holding the lock serializes production per name
        let mut memo = self.memo.lock().unwrap();
        if let Some(p) = memo.get(&t) {
            return Ok(p.clone());
        }
        let p = Arc::new(make()?);
        memo.insert(t, p.clone());
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CauchyCheck {
    Ok,
    Violation(usize, usize),
}

/// Checks `||P_t - P_s|| <= 2^{-t}` for all `t <= s`, reporting the first
/// pair in `(t, s)` order that fails.
pub fn validate_strongly_cauchy(prefix: &[Poly]) -> CauchyCheck {
    for t in 0..prefix.len() {
        let bound = Rational::pow2_neg(2 * t as u32);
        for s in (t + 1)..prefix.len() {
            if sup_norm2(&prefix[t], &prefix[s]) > bound {
                return CauchyCheck::Violation(t, s);
            }
        }
    }
    CauchyCheck::Ok
}

/// Least `n <= max_n` with `d(z, approx[n]) > 2 * 2^{-n}`, which puts `z`
/// at distance more than `2^{-n}` from the limit.
pub fn certified_nonmember(z: &Point, name: &CurveName, max_n: u32) -> Option<u32> {
    for n in 0..=max_n {
        let p = name.approx(n).ok()?;
        // (2 * 2^{-n})^2 = 2^{-2n + 2}
        let bound = Rational::pow2_neg(2 * n) * Rational::from_int(4);
        if dist2_point_poly(z, &p) > bound {
            return Some(n);
        }
    }
    None
}

//! Scene files: JSON input for the access, link and adversary pipelines.
//!
//! Every rational is a `"p/q"` string. Parsing reports the JSON path of the
//! first offending field.

use std::fmt;
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::access::AccessScene;
use crate::adversary::{AdversaryWitness, TaggedWitness};
use crate::geometry::{Disk, Rect};
use crate::linker::{circle_arc, LinkScene, OpenSetName};
use crate::names::{polyarc_ulac, CurveName, ModulusFn, ModulusKind, ModulusRepr, PointName};
use crate::scalar::{format_rational, parse_rational};
use crate::{Point, Poly, Rational};

pub const VERSION: &str = "accessarc/1";

/// An exact rational carried as a string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s)
            .map(Q)
            .ok_or_else(|| D::Error::custom(format!("invalid rational {s:?}")))
    }
}

pub type PointJ = [Q; 2];

pub fn point_j(p: &Point) -> PointJ {
    [Q(p.x.clone()), Q(p.y.clone())]
}

pub fn poly_j(p: &Poly) -> Vec<PointJ> {
    p.vertices().iter().map(point_j).collect()
}

fn point_of(p: &PointJ) -> Point {
    Point::new(p[0].0.clone(), p[1].0.clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectJ {
    pub xmin: Q,
    pub xmax: Q,
    pub ymin: Q,
    pub ymax: Q,
}

impl RectJ {
    pub fn of(r: &Rect<Rational>) -> Self {
        RectJ {
            xmin: Q(r.xmin.clone()),
            xmax: Q(r.xmax.clone()),
            ymin: Q(r.ymin.clone()),
            ymax: Q(r.ymax.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskJ {
    pub center: PointJ,
    pub radius: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PointNameJ {
    Exact(PointJ),
    Stream(Vec<RectJ>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleJ {
    pub center: PointJ,
    pub radius: Q,
    #[serde(default)]
    pub quarter_turns: u8,
    pub u0: Q,
    pub u1: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveJ {
    Polyline(Vec<PointJ>),
    /// circle arc through rational points, see `circle_arc`
    Circle(CircleJ),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineJ {
    pub a: u32,
    pub b: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindJ {
    Ulac,
    Cik,
}

/// `{"affine": {"a", "b"}}` or `{"table": [...], "tail": {"a", "b"}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusJ {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<KindJ>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<AffineJ>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<AffineJ>,
}

impl ModulusJ {
    pub fn of(g: &ModulusFn) -> Self {
        let kind = Some(match g.kind() {
            ModulusKind::Ulac => KindJ::Ulac,
            ModulusKind::Cik => KindJ::Cik,
        });
        match g.repr() {
            ModulusRepr::Affine { a, b } => ModulusJ {
                kind,
                affine: Some(AffineJ { a: *a, b: *b }),
                table: None,
                tail: None,
            },
            ModulusRepr::Table { table, tail } => ModulusJ {
                kind,
                affine: None,
                table: Some(table.clone()),
                tail: Some(AffineJ { a: tail.0, b: tail.1 }),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccessJ {
    pub domain: DiskJ,
    pub arc: CurveJ,
    /// derived from the arc when absent
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<ModulusJ>,
    pub z0: PointJ,
    pub zeta0: PointNameJ,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkJ {
    pub disks: Vec<DiskJ>,
    pub zeta: [PointNameJ; 2],
    pub boundary: [CurveJ; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<[ModulusJ; 2]>,
    pub r: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessJ {
    pub e: u32,
    pub curve: Vec<PointJ>,
    pub t0: Q,
    pub t1: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversaryJ {
    pub witnesses: Vec<WitnessJ>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub access: Option<AccessJ>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link: Option<LinkJ>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversary: Option<AdversaryJ>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SceneError {
    #[error("{path}: {msg}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
}

fn invalid(path: impl Into<String>, msg: impl fmt::Display) -> SceneError {
    SceneError::Invalid {
        path: path.into(),
        msg: msg.to_string(),
    }
}

pub enum Scene {
    Access(Arc<AccessScene>),
    Link(LinkScene),
    Adversary(Vec<TaggedWitness>),
}

impl SceneFile {
    pub fn parse(text: &str) -> Result<Self, SceneError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: SceneFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            SceneError::Syntax {
                path,
                line: inner.line(),
                column: inner.column(),
                msg: inner.to_string(),
            }
        })?;
        if file.version != VERSION {
            return Err(invalid("version", format!("expected {VERSION:?}, found {:?}", file.version)));
        }
        let n = [file.access.is_some(), file.link.is_some(), file.adversary.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if n != 1 {
            return Err(invalid(".", "exactly one of access, link, adversary is required"));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }

    pub fn build(&self) -> Result<Scene, SceneError> {
        if let Some(a) = &self.access {
            return a.build("access").map(|s| Scene::Access(Arc::new(s)));
        }
        if let Some(l) = &self.link {
            return l.build("link").map(Scene::Link);
        }
        let adv = self.adversary.as_ref().unwrap();
        adv.build("adversary").map(Scene::Adversary)
    }
}

fn disk(d: &DiskJ, path: &str) -> Result<Disk<Rational>, SceneError> {
    Disk::new(point_of(&d.center), d.radius.0.clone()).map_err(|e| invalid(format!("{path}.radius"), e))
}

fn poly(v: &[PointJ], path: &str) -> Result<Poly, SceneError> {
    Poly::new(v.iter().map(point_of).collect()).map_err(|e| invalid(path, e))
}

fn point_name(p: &PointNameJ, path: &str) -> Result<PointName, SceneError> {
    match p {
        PointNameJ::Exact(x) => Ok(PointName::exact(point_of(x))),
        PointNameJ::Stream(rs) => {
            let rects = rs
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    Rect::new(r.xmin.0.clone(), r.xmax.0.clone(), r.ymin.0.clone(), r.ymax.0.clone())
                        .map_err(|e| invalid(format!("{path}.stream[{i}]"), e))
                })
                .collect::<Result<Vec<_>, _>>()?;
            PointName::from_rects(rects).map_err(|e| invalid(format!("{path}.stream"), e))
        }
    }
}

/// The curve name and its default ULAC modulus.
fn curve(c: &CurveJ, path: &str) -> Result<(CurveName, ModulusFn), SceneError> {
    match c {
        CurveJ::Polyline(v) => {
            let p = poly(v, &format!("{path}.polyline"))?;
            let g = polyarc_ulac(&p).map_err(|e| invalid(format!("{path}.polyline"), e))?;
            Ok((CurveName::constant(p), g))
        }
        CurveJ::Circle(c) => {
            let zero = Rational::from(num_bigint::BigInt::from(0));
            if c.radius.0 <= zero {
                return Err(invalid(format!("{path}.circle.radius"), "radius must be positive"));
            }
            if c.u0.0 >= c.u1.0 {
                return Err(invalid(format!("{path}.circle"), "need u0 < u1"));
            }
            // under a half turn the chord bounds the subarc diameter
            let one = Rational::from(num_bigint::BigInt::from(1));
            if c.u0.0 < -one.clone() || c.u1.0 > one {
                return Err(invalid(format!("{path}.circle"), "need -1 <= u0 < u1 <= 1"));
            }
            let name = circle_arc(point_of(&c.center), c.radius.0.clone(), c.quarter_turns, c.u0.0.clone(), c.u1.0.clone());
            let g = ModulusFn::affine(ModulusKind::Ulac, 1, 1).unwrap();
            Ok((name, g))
        }
    }
}

fn modulus(m: &ModulusJ, path: &str) -> Result<ModulusFn, SceneError> {
    let kind = match m.kind.unwrap_or(KindJ::Ulac) {
        KindJ::Ulac => ModulusKind::Ulac,
        KindJ::Cik => ModulusKind::Cik,
    };
    let repr = match (&m.affine, &m.table, &m.tail) {
        (Some(a), None, None) => ModulusRepr::Affine { a: a.a, b: a.b },
        (None, Some(t), Some(tail)) => ModulusRepr::Table {
            table: t.clone(),
            tail: (tail.a, tail.b),
        },
        _ => return Err(invalid(path, "expected {\"affine\": ..} or {\"table\": [..], \"tail\": ..}")),
    };
    let g = ModulusFn::new(kind, repr).map_err(|e| invalid(path, e))?;
    if kind == ModulusKind::Cik {
        return Err(invalid(format!("{path}.kind"), "pipelines take a ULAC modulus"));
    }
    Ok(g)
}

impl AccessJ {
    fn build(&self, path: &str) -> Result<AccessScene, SceneError> {
        let (arc, g0) = curve(&self.arc, &format!("{path}.arc"))?;
        let g = match &self.modulus {
            Some(m) => modulus(m, &format!("{path}.modulus"))?,
            None => g0,
        };
        Ok(AccessScene {
            domain: disk(&self.domain, &format!("{path}.domain"))?,
            arc: Arc::new(arc),
            g,
            z0: point_of(&self.z0),
            zeta0: point_name(&self.zeta0, &format!("{path}.zeta0"))?,
        })
    }
}

impl LinkJ {
    fn build(&self, path: &str) -> Result<LinkScene, SceneError> {
        let balls = self
            .disks
            .iter()
            .enumerate()
            .map(|(i, d)| disk(d, &format!("{path}.disks[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        if balls.is_empty() {
            return Err(invalid(format!("{path}.disks"), "at least one disk is required"));
        }
        let mut b = Vec::new();
        let mut g = Vec::new();
        for j in 0..2 {
            let (c, g0) = curve(&self.boundary[j], &format!("{path}.boundary[{j}]"))?;
            b.push(Arc::new(c));
            g.push(match &self.modulus {
                Some(ms) => modulus(&ms[j], &format!("{path}.modulus[{j}]"))?,
                None => g0,
            });
        }
        let zero = Rational::from(num_bigint::BigInt::from(0));
        if self.r.0 <= zero {
            return Err(invalid(format!("{path}.r"), "radius must be positive"));
        }
        let zeta = [
            point_name(&self.zeta[0], &format!("{path}.zeta[0]"))?,
            point_name(&self.zeta[1], &format!("{path}.zeta[1]"))?,
        ];
        let [b0, b1]: [Arc<CurveName>; 2] = b.try_into().unwrap();
        let [g0, g1]: [ModulusFn; 2] = g.try_into().unwrap();
        Ok(LinkScene {
            d: OpenSetName { balls },
            zeta,
            b: [b0, b1],
            g: [g0, g1],
            r: self.r.0.clone(),
        })
    }
}

impl AdversaryJ {
    fn build(&self, path: &str) -> Result<Vec<TaggedWitness>, SceneError> {
        let mut seen = std::collections::BTreeSet::new();
        self.witnesses
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let here = format!("{path}.witnesses[{i}]");
                if !seen.insert(w.e) {
                    return Err(invalid(format!("{here}.e"), format!("duplicate tag {}", w.e)));
                }
                let c = poly(&w.curve, &format!("{here}.curve"))?;
                let witness = AdversaryWitness::new(c, w.t0.0.clone(), w.t1.0.clone())
                    .map_err(|_| invalid(&here, "need 0 < t0 < t1 < 1"))?;
                Ok(TaggedWitness { e: w.e, witness })
            })
            .collect()
    }
}

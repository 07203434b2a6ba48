//! Output JSON: emitted terms together with the certificates behind them.

use serde::Serialize;

use crate::access::{AccessArc, AccessError, StageState};
use crate::adversary::AdversaryRun;
use crate::geometry::{dist2_poly_poly, poly_clear_of};
use crate::linker::{contains_poly, Containment, Link, LinkError, LinkScene};
use crate::names::{CurveName, ModulusFn, NameError};
use crate::scene::{point_j, poly_j, PointJ, Q, RectJ, VERSION};
use crate::{Poly, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageJ {
    pub t: usize,
    pub s: u32,
    /// `2^{-g(s_t)} + 2^{-s_t}`
    pub eps: Q,
    /// radius of the disk around `e_{t-1}` holding this stage's path
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disk_radius: Option<Q>,
    pub n_arc: u32,
    pub e: PointJ,
    pub path: Vec<PointJ>,
}

pub fn stages_j(state: &StageState, g: &ModulusFn) -> Vec<StageJ> {
    (0..state.s.len())
        .map(|t| {
            let s = state.s[t];
            StageJ {
                t,
                s,
                eps: Q(Rational::pow2_neg(g.eval(s)) + Rational::pow2_neg(s)),
                disk_radius: (t > 0).then(|| Q(state.eps[t].clone())),
                n_arc: state.n_arc[t],
                e: point_j(&state.e[t]),
                path: poly_j(&state.paths[t]),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PieceCertJ {
    pub stage: usize,
    pub n: u32,
    /// squared distance from the piece to the arc approximation of index `n`
    pub dist2: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermJ {
    pub m: u32,
    pub vertices: Vec<PointJ>,
    pub pieces: Vec<PieceCertJ>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AccessReport {
    pub version: &'static str,
    pub kind: &'static str,
    pub terms: Vec<TermJ>,
    pub stages: Vec<StageJ>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureReport {
    pub version: &'static str,
    pub kind: &'static str,
    pub error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stalled_stage: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    pub stages: Vec<StageJ>,
}

impl FailureReport {
    pub fn access(err: &AccessError, partial: &StageState, g: &ModulusFn) -> Self {
        let (stalled_stage, precision, state) = match err {
            AccessError::StageTimeout { stage, n, state } => (Some(*stage), Some(*n), state.as_ref()),
            _ => (None, None, partial),
        };
        FailureReport {
            version: VERSION,
            kind: "access",
            error: err.to_string(),
            stalled_stage,
            precision,
            stages: stages_j(state, g),
        }
    }
}

/// First `count` terms with their per-piece avoidance distances.
pub fn access_report(arc: &AccessArc, count: u32) -> Result<AccessReport, AccessError> {
    let mut terms = Vec::new();
    for m in 0..count {
        let sp = arc.spliced(m)?;
        let st = arc.state();
        let pieces = sp
            .pieces
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let n = st.n_arc[j];
                let a = arc.scene.arc.approx(n)?;
                Ok(PieceCertJ {
                    stage: j,
                    n,
                    dist2: Q(dist2_poly_poly(p, &a)),
                })
            })
            .collect::<Result<Vec<_>, NameError>>()?;
        terms.push(TermJ {
            m,
            vertices: poly_j(&sp.curve),
            pieces,
        });
    }
    Ok(AccessReport {
        version: VERSION,
        kind: "access",
        terms,
        stages: stages_j(&arc.state(), &arc.scene.g),
    })
}

/// Least index `n` in `from..=max_n`, stepping by 2, at which `p` keeps
/// squared distance above `4 * 4^{-n}` from `approx[n]`.
pub fn certify_clear(p: &Poly, name: &CurveName, from: u32, max_n: u32) -> Result<Option<u32>, NameError> {
    let mut n = from;
    while n <= max_n {
        let a = name.approx(n)?;
        if poly_clear_of(p, &a, &(Rational::pow2_neg(2 * n) * Rational::from_int(4))) {
            return Ok(Some(n));
        }
        n += 2;
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkTermJ {
    pub m: u32,
    pub vertices: Vec<PointJ>,
    /// the core is the term without its two segments toward the endpoints
    pub core_in_domain: bool,
    /// index at which the core is certified clear of each boundary arc
    pub core_clear_at: [Option<u32>; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkReport {
    pub version: &'static str,
    pub kind: &'static str,
    pub r: Q,
    pub r_shrunk: bool,
    pub k: u32,
    pub xi: [PointJ; 2],
    pub cross_n: u32,
    pub terms: Vec<LinkTermJ>,
    pub access: [Vec<StageJ>; 2],
}

pub fn link_report(scene: &LinkScene, link: &Link, count: u32, max_precision: u32) -> Result<LinkReport, LinkError> {
    let mut terms = Vec::new();
    for m in 0..count {
        let t = link.term(m)?;
        let core_in_domain = contains_poly(&scene.d, &t.core, 24) == Containment::Certified;
        let mut clear = [None, None];
        for (j, c) in clear.iter_mut().enumerate() {
            *c = certify_clear(&t.core, &scene.b[j], 2, max_precision)?;
        }
        terms.push(LinkTermJ {
            m,
            vertices: poly_j(&t.curve),
            core_in_domain,
            core_clear_at: clear,
        });
    }
    Ok(LinkReport {
        version: VERSION,
        kind: "link",
        r: Q(link.r.clone()),
        r_shrunk: link.r_shrunk,
        k: link.k,
        xi: [point_j(&link.xi[0]), point_j(&link.xi[1])],
        cross_n: link.cross_n,
        terms,
        access: [
            stages_j(&link.access[0].state(), &scene.g[0]),
            stages_j(&link.access[1].state(), &scene.g[1]),
        ],
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentJ {
    pub m: u32,
    pub before: usize,
    pub after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActJ {
    pub e: u32,
    pub k: u32,
    pub delta: Q,
    pub p: [PointJ; 2],
    pub q: [PointJ; 2],
    pub components: Vec<ComponentJ>,
    pub blocking_dist2: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageLogJ {
    pub stage: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub act: Option<ActJ>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlotJ {
    pub n: u32,
    pub rects: Vec<RectJ>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdversaryReport {
    pub version: &'static str,
    pub kind: &'static str,
    pub log: Vec<StageLogJ>,
    pub arc: Vec<PointJ>,
    pub plot: PlotJ,
}

pub fn adversary_report(run: &AdversaryRun, plot_n: u32) -> Result<AdversaryReport, NameError> {
    let log = run
        .log
        .iter()
        .map(|l| StageLogJ {
            stage: l.stage,
            act: l.act.as_ref().map(|a| ActJ {
                e: a.e,
                k: a.k,
                delta: Q(Rational::pow2_neg(a.delta_exp)),
                p: [point_j(&a.p[0]), point_j(&a.p[1])],
                q: [point_j(&a.q[0]), point_j(&a.q[1])],
                components: a
                    .checks
                    .iter()
                    .map(|c| ComponentJ { m: c.m, before: c.before, after: c.after })
                    .collect(),
                blocking_dist2: Q(a.blocking_dist2.clone()),
            }),
        })
        .collect();
    let plot = run.compact().plot(plot_n)?;
    Ok(AdversaryReport {
        version: VERSION,
        kind: "adversary",
        log,
        arc: poly_j(run.last().poly()),
        plot: PlotJ {
            n: plot_n,
            rects: plot.rects.iter().map(RectJ::of).collect(),
        },
    })
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap();
    s.push('\n');
    s
}

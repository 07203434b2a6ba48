//! Acceptance suite. Prints one line per criterion and exits nonzero if
//! any fails.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use accessarc::access::{access_arc, access_bound_k, check_access_precondition, AccessArc, AccessScene, Budget};
use accessarc::adversary::{component_count, run, AdversaryRun};
use accessarc::geometry::{
    dist2_point_poly, dist2_poly_poly, first_hit, seg_status, sup_norm2, Disk, Rect, SegStatus,
};
use accessarc::linker::{contains_poly, link, Containment, LinkScene};
use accessarc::names::{polyarc_ulac, validate_strongly_cauchy, CauchyCheck, PointName};
use accessarc::oracle::{dense_min_dist2, flood_components, GridSpec};
use accessarc::report::{access_report, adversary_report, certify_clear, link_report, to_json};
use accessarc::scene::{Scene, SceneFile};
use accessarc::{DyadicExp, Point, Poly, Rational, Scalar};

const ACCESS_FIXTURES: [&str; 5] = ["straight", "comb", "u-channel", "spiral", "near-boundary"];
const LINK_FIXTURES: [&str; 2] = ["diameter", "corridor"];
const TERMS: u32 = 6;

fn load(name: &str) -> Scene {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"));
    SceneFile::parse(&std::fs::read_to_string(&p).unwrap()).unwrap().build().unwrap()
}

fn access_scene(name: &str) -> Arc<AccessScene> {
    match load(name) {
        Scene::Access(s) => s,
        _ => panic!("{name} is not an access scene"),
    }
}

fn link_scene(name: &str) -> LinkScene {
    match load(name) {
        Scene::Link(s) => s,
        _ => panic!("{name} is not a link scene"),
    }
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

type Verdict = Result<String, String>;

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

struct AccessRun {
    name: &'static str,
    scene: Arc<AccessScene>,
    arc: Arc<AccessArc>,
    terms: Vec<Poly>,
    json: String,
    elapsed: Duration,
}

fn run_access(name: &'static str) -> AccessRun {
    let t = Instant::now();
    let scene = access_scene(name);
    let arc = access_arc(scene.clone(), 0, Budget::default()).unwrap();
    let terms = (0..TERMS).map(|m| arc.term(m).unwrap()).collect();
    let json = to_json(&access_report(&arc, TERMS).unwrap());
    AccessRun { name, scene, arc, terms, json, elapsed: t.elapsed() }
}

fn c1_cauchy(runs: &[AccessRun]) -> Verdict {
    for a in runs {
        check(validate_strongly_cauchy(&a.terms) == CauchyCheck::Ok, || format!("{}: not strongly Cauchy", a.name))?;
        check(a.elapsed <= Duration::from_secs(60), || format!("{}: took {:?}", a.name, a.elapsed))?;
    }
    let slowest = runs.iter().map(|a| a.elapsed).max().unwrap();
    Ok(format!("{} fixtures x {TERMS} terms, slowest {:.1?}", runs.len(), slowest))
}

/// Term up to the first vertex that comes within `2^{-m}` of its end, plus
/// a point of the next segment just outside that ball.
fn truncate(p: &Poly, m: u32) -> Option<Poly> {
    let end = p.end().clone();
    let r2 = Rational::pow2_neg(2 * m);
    let v = p.vertices();
    let i = v.iter().position(|x| x.dist2(&end) <= r2)?;
    if i == 0 {
        return None;
    }
    let (a, b) = (&v[i - 1], &v[i]);
    let (mut lo, mut hi) = (Rational::from_int(0), Rational::from_int(1));
    for _ in 0..30 {
        let mid = (lo.clone() + hi.clone()) / Rational::from_int(2);
        if Point::lerp(a, b, &mid).dist2(&end) > r2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut out = v[..i].to_vec();
    out.push(Point::lerp(a, b, &lo));
    Poly::from_points_dedup(out).ok()
}

fn c2_linking(runs: &[AccessRun]) -> Verdict {
    let mut certified = 0;
    for a in runs {
        for (m, t) in a.terms.iter().enumerate() {
            let m = m as u32;
            check(*t.start() == a.scene.z0, || format!("{} term {m}: wrong start", a.name))?;
            let za = a.scene.zeta0.point_at(m + 2).unwrap();
            // |end - zeta| <= |end - za| + 2^{-m-2} <= 2^{-m}
            let room = Rational::pow2_neg(m) - Rational::pow2_neg(m + 2);
            check(t.end().dist2(&za) <= room.clone() * room, || format!("{} term {m}: end too far", a.name))?;
            if let Some(tr) = truncate(t, m) {
                let n = certify_clear(&tr, &a.scene.arc, 2, 40).unwrap();
                check(n.is_some(), || format!("{} term {m}: truncation not certified off the arc", a.name))?;
                certified += 1;
            }
        }
    }
    Ok(format!("{certified} truncated terms certified off the arc"))
}

fn strategy_rng() -> TestRunner {
    TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn draw<S: Strategy>(runner: &mut TestRunner, s: &S) -> S::Value {
    s.new_tree(runner).unwrap().current()
}

fn c3_consistency() -> Verdict {
    let mut runner = strategy_rng();
    let unit = Disk::unit();
    let steps = proptest::collection::vec((1i64..=4, -2i64..=2), 3..=8);
    let (mut passed, mut confirmed, mut unresolved) = (0, 0, 0);
    for scene in 0..20 {
        let st = draw(&mut runner, &steps);
        let mut x = -8i64;
        let mut y = 0i64;
        let mut v = vec![Point::new(r(x, 16), r(y, 16))];
        for (dx, dy) in &st {
            x = (x + dx).min(8);
            y = (y + dy).clamp(-8, 8);
            v.push(Point::new(r(x, 16), r(y, 16)));
        }
        let a = match Poly::from_points_dedup(v) {
            Ok(a) if a.vertices().windows(2).all(|w| w[0].x < w[1].x) => a,
            _ => continue,
        };
        let g = polyarc_ulac(&a).unwrap();
        let seg = draw(&mut runner, &(0..a.pieces()));
        let s = a.segment(seg);
        let zeta0 = Point::lerp(&s.a, &s.b, &Rational::half());
        let name0 = PointName::exact(zeta0.clone());
        let k0 = access_bound_k(&g, &name0, &zeta0, &unit).unwrap();
        let j = draw(&mut runner, &(1u32..=3));
        let sign = if draw(&mut runner, &proptest::bool::ANY) { 1 } else { -1 };
        let h = Rational::pow2_neg(g.eval(k0) + j) * Rational::from_int(sign);
        let zeta1 = Point::new(zeta0.x.clone(), zeta0.y.clone() + h);
        let Some(k) = access_bound_k(&g, &name0, &zeta1, &unit) else { continue };
        if !check_access_precondition(&g, &name0, &zeta1, k) {
            continue;
        }
        passed += 1;
        // local 2^{-10} grid of side 1/4 around zeta0, aligned to 1/16
        let c = |t: &Rational| (t.clone() * Rational::from_int(16)).floor() / Rational::from_int(16);
        let (cx, cy) = (c(&zeta0.x), c(&zeta0.y));
        let region = Rect::new(cx.clone() - r(2, 16), cx + r(2, 16), cy.clone() - r(2, 16), cy + r(2, 16)).unwrap();
        let grid = GridSpec::new(region, 10).unwrap();
        let comps = flood_components(&grid, std::slice::from_ref(&a), DyadicExp(12));
        match comps.label_of(&zeta1) {
            Ok(l) => {
                check(comps.labels_near(&zeta0, 3).contains(&l), || {
                    format!("scene {scene}: zeta1 = {zeta1:?} not connected to a cell next to zeta0 = {zeta0:?}")
                })?;
                confirmed += 1;
            }
            // zeta1 closer to A than the grid can resolve
            Err(_) => unresolved += 1,
        }
    }
    check(confirmed >= 5, || format!("only {confirmed} scenes resolvable at 2^-10"))?;
    Ok(format!("{passed} scenes passed the preconditions, {confirmed} confirmed, {unresolved} below grid resolution, 0 counterexamples"))
}

fn c4_invariants(runs: &[AccessRun]) -> Verdict {
    let mut checked = 0;
    for a in runs {
        a.arc.ensure_stage(4).unwrap();
        let st = a.arc.state();
        let zeta = a.scene.zeta0.exact_point().unwrap();
        for t in 0..st.t() {
            let (s0, s1) = (st.s[t], st.s[t + 1]);
            let eps = Rational::pow2_neg(a.scene.g.eval(s0)) + Rational::pow2_neg(s0);
            check(st.eps[t + 1] == eps, || format!("{} stage {t}: eps mismatch", a.name))?;
            check(s1 > s0.max(t as u32 + 1), || format!("{} stage {t}: s not increasing", a.name))?;
            let c = Rational::pow2_neg(s1) * Rational::from_int(4);
            for p in &st.paths[..=t] {
                check(dist2_point_poly(zeta, p) > c.clone() * c.clone(), || format!("{} stage {t}: zeta too close", a.name))?;
            }
            let disk = Disk::new(st.e[t].clone(), eps).unwrap();
            check(st.paths[t + 1].vertices().iter().all(|v| disk.contains(v)), || {
                format!("{} stage {}: path leaves its disk", a.name, t + 1)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} stage transitions, 0 violations"))
}

fn c5_adversary() -> Verdict {
    let t = Instant::now();
    let Scene::Adversary(ws) = load("adversary-two") else { unreachable!() };
    let out: AdversaryRun = run(&ws, 3).map_err(|e| e.to_string())?;
    let mut acts = 0;
    for (i, l) in out.log.iter().enumerate() {
        let Some(act) = &l.act else { continue };
        acts += 1;
        let (before, after) = (&out.arcs[i], &out.arcs[i + 1]);
        let m = act.checks[0].m;
        for mm in [m, m + 2] {
            let (b, a) = (component_count(before, act.e, mm), component_count(after, act.e, mm));
            check(a == b + 2, || format!("stage {}: {b} -> {a} components at 2^-{mm}", l.stage))?;
        }
        let w = &ws.iter().find(|w| w.e == act.e).unwrap().witness;
        let d = dist2_poly_poly(&w.middle(), after.poly());
        check(d > Rational::from_int(0), || format!("stage {}: adversary touches the arc", l.stage))?;
    }
    check(acts == 2, || format!("{acts} acts instead of 2"))?;
    let el = t.elapsed();
    check(el <= Duration::from_secs(30), || format!("took {el:?}"))?;
    Ok(format!("2 acts, +2 components at m and m+2, blocking distances positive, {el:.1?}"))
}

fn c6_kernel() -> Verdict {
    let mut runner = strategy_rng();
    let pt = (-16i64..=16, -16i64..=16).prop_map(|(x, y)| Point::new(r(x, 16), r(y, 16)));
    let line = proptest::collection::vec(pt, 2..=5);
    let mut pairs = 0;
    while pairs < 1000 {
        let (Ok(p), Ok(q)) = (Poly::from_points_dedup(draw(&mut runner, &line)), Poly::from_points_dedup(draw(&mut runner, &line)))
        else {
            continue;
        };
        pairs += 1;
        let exact = dist2_poly_poly(&p, &q);
        let dense: Vec<Rational> = [5usize, 9, 17].iter().map(|&n| dense_min_dist2(&p, &q, n)).collect();
        check(dense.iter().all(|d| exact <= *d), || format!("dense sample below exact distance for {p:?}, {q:?}"))?;
        // nested samplings only get closer
        check(dense.windows(2).all(|w| w[1] <= w[0]), || "dense gap grew under doubling".to_string())?;
        // gap bound in distance units: one sample step on each curve
        let step = |c: &Poly, n: usize| -> f64 {
            let ts: Vec<Point> = (0..n).map(|i| c.eval(&r(i as i64, n as i64 - 1)).unwrap()).collect();
            ts.windows(2).map(|w| w[0].dist2(&w[1]).to_f64_lossy().sqrt()).fold(0.0, f64::max)
        };
        let gap = dense[2].to_f64_lossy().sqrt() - exact.to_f64_lossy().sqrt();
        check(gap <= step(&p, 17) + step(&q, 17) + 1e-12, || "dense gap exceeds the sample spacing".to_string())?;

        let sup = sup_norm2(&p, &q);
        let mut brute = Rational::from_int(0);
        for t in (0..=p.pieces()).map(|j| r(j as i64, p.pieces() as i64)).chain((0..=q.pieces()).map(|j| r(j as i64, q.pieces() as i64))) {
            let d = p.eval(&t).unwrap().dist2(&q.eval(&t).unwrap());
            if d > brute {
                brute = d;
            }
        }
        check(sup == brute, || "sup norm differs from the breakpoint maximum".to_string())?;
        let t = r(draw(&mut runner, &(0i64..=997)), 997);
        check(p.eval(&t).unwrap().dist2(&q.eval(&t).unwrap()) <= sup, || "sample above the sup norm".to_string())?;

        let mut best: Option<Rational> = None;
        for (j, s) in p.segments().enumerate() {
            for u in q.segments() {
                let par = match seg_status(&s, &u) {
                    SegStatus::Disjoint => continue,
                    SegStatus::Point(x) => s.param_of(&x),
                    SegStatus::Overlap(o) => Rational::min_of(s.param_of(&o.a), s.param_of(&o.b)),
                };
                let g = p.global_param(j, &par);
                if best.as_ref().map_or(true, |b| g < *b) {
                    best = Some(g);
                }
            }
        }
        check(first_hit(&p, &q).map(|h| h.t) == best, || "first_hit not minimal".to_string())?;
    }
    Ok(format!("{pairs} random pairs, 0 violations"))
}

struct LinkRun {
    name: &'static str,
    scene: LinkScene,
    link: Arc<accessarc::linker::Link>,
    json: String,
    elapsed: Duration,
}

const LINK_TERMS: u32 = 5;

fn run_link(name: &'static str) -> LinkRun {
    let t = Instant::now();
    let scene = link_scene(name);
    let l = link(&scene, 0, Budget::default()).unwrap();
    let json = to_json(&link_report(&scene, &l, LINK_TERMS, 40).unwrap());
    LinkRun { name, scene, link: l, json, elapsed: t.elapsed() }
}

fn c7_link(runs: &[LinkRun]) -> Verdict {
    for lr in runs {
        let z: Vec<Point> = lr.scene.zeta.iter().map(|p| p.exact_point().unwrap().clone()).collect();
        for m in 0..LINK_TERMS {
            let t = lr.link.term(m).map_err(|e| e.to_string())?;
            let tol = Rational::pow2_neg(2 * m);
            check(t.curve.start().dist2(&z[0]) <= tol && t.curve.end().dist2(&z[1]) <= tol, || {
                format!("{} term {m}: endpoint too far", lr.name)
            })?;
            check(contains_poly(&lr.scene.d, &t.core, 24) == Containment::Certified, || {
                format!("{} term {m}: core not certified inside D", lr.name)
            })?;
            for b in &lr.scene.b {
                let n = certify_clear(&t.core, b, 2, 40).map_err(|e| e.to_string())?;
                check(n.is_some(), || format!("{} term {m}: core not certified off a boundary arc", lr.name))?;
            }
        }
        check(lr.elapsed <= Duration::from_secs(120), || format!("{}: took {:?}", lr.name, lr.elapsed))?;
    }
    let slowest = runs.iter().map(|l| l.elapsed).max().unwrap();
    Ok(format!("{} fixtures x {LINK_TERMS} terms, slowest {slowest:.1?}", runs.len()))
}

fn c8_determinism(access: &[AccessRun], links: &[LinkRun]) -> Verdict {
    for a in access {
        check(run_access(a.name).json == a.json, || format!("{}: JSON differs between runs", a.name))?;
    }
    for l in links {
        check(run_link(l.name).json == l.json, || format!("{}: JSON differs between runs", l.name))?;
    }
    let adv = |name: &str| {
        let Scene::Adversary(ws) = load(name) else { unreachable!() };
        to_json(&adversary_report(&run(&ws, 3).unwrap(), 5).unwrap())
    };
    for name in ["adversary-one", "adversary-two"] {
        check(adv(name) == adv(name), || format!("{name}: JSON differs between runs"))?;
    }
    Ok(format!("{} fixtures byte-identical across two runs", access.len() + links.len() + 2))
}

fn main() {
    let access: Vec<AccessRun> = ACCESS_FIXTURES.iter().map(|n| run_access(n)).collect();
    let links: Vec<LinkRun> = LINK_FIXTURES.iter().map(|n| run_link(n)).collect();
    let results: Vec<(&str, Verdict)> = vec![
        ("strong Cauchy contract", c1_cauchy(&access)),
        ("linking contract", c2_linking(&access)),
        ("bound/precondition consistency", c3_consistency()),
        ("stage invariants", c4_invariants(&access)),
        ("adversary component delta", c5_adversary()),
        ("geometry kernel vs oracles", c6_kernel()),
        ("link endpoints", c7_link(&links)),
        ("determinism", c8_determinism(&access, &links)),
    ];
    let mut failed = 0;
    for (i, (what, v)) in results.iter().enumerate() {
        match v {
            Ok(msg) => println!("criterion {} ({what}): PASS - {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} ({what}): FAIL - {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

use proptest::prelude::*;

use accessarc::geometry::{
    dist2_point_poly, dist2_point_segment, dist2_poly_poly, first_hit, is_simple_polyarc, loop_erase, seg_status,
    sup_norm2, Rect, SegStatus,
};
use accessarc::linker::circle_arc;
use accessarc::names::{
    certified_nonmember, polyarc_ulac, validate_strongly_cauchy, CauchyCheck, CurveName, ModulusFn, ModulusKind,
    ModulusRepr,
};
use accessarc::oracle::{blocked_cells, dense_min_dist2, ulac_check, GridSpec};
use accessarc::scene::{poly_j, SceneFile};
use accessarc::{Point, Poly, Rational, Scalar};
use accessarc::DyadicExp;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn sixteenths() -> impl Strategy<Value = Point> {
    (-16i64..=16, -16i64..=16).prop_map(|(x, y)| Point::new(r(x, 16), r(y, 16)))
}

fn polyline(max: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(sixteenths(), 2..=max)
        .prop_filter_map("degenerate", |v| Poly::from_points_dedup(v).ok())
}

/// Staircase-like simple polylines: x strictly increasing.
fn monotone(max: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((1i64..=4, -8i64..=8), 1..=max).prop_map(|steps| {
        let mut x = -8i64;
        let mut v = vec![Point::new(r(x, 16), r(0, 16))];
        for (dx, y) in steps {
            x += dx;
            v.push(Point::new(r(x, 16), r(y, 16)));
        }
        Poly::new(v).unwrap()
    })
}

fn param() -> impl Strategy<Value = Rational> {
    (0i64..=64).prop_map(|i| r(i, 64))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn sup_norm_symmetric_and_dominating(p in polyline(5), q in polyline(5), ts in prop::collection::vec(param(), 1..8)) {
        let d = sup_norm2(&p, &q);
        prop_assert_eq!(d.clone(), sup_norm2(&q, &p));
        prop_assert_eq!(sup_norm2(&p, &p), Rational::from_int(0));
        for t in ts {
            prop_assert!(p.eval(&t).unwrap().dist2(&q.eval(&t).unwrap()) <= d);
        }
    }

    #[test]
    fn segment_distance_bounded_by_samples(p in polyline(4), q in polyline(4)) {
        let exact = dist2_poly_poly(&p, &q);
        prop_assert!(exact <= dense_min_dist2(&p, &q, 9));
        prop_assert_eq!(exact.clone(), dist2_poly_poly(&q, &p));
        for v in q.vertices() {
            prop_assert!(exact <= dist2_point_poly(v, &p));
        }
    }

    #[test]
    fn loop_erasure_is_simple_and_inside(p in polyline(7), q in polyline(5)) {
        let q = q.translated(&p.end().sub(q.start()));
        let e = loop_erase(&[p.clone(), q.clone()]);
        let e = match e { Ok(e) => e, Err(_) => return Ok(()) };
        let c = e.curve().unwrap();
        prop_assert!(is_simple_polyarc(&c));
        prop_assert_eq!(c.start(), p.start());
        prop_assert_eq!(c.end(), q.end());
        let on_input = |z: &Point| {
            p.segments().chain(q.segments()).any(|s| dist2_point_segment(z, &s) == Rational::from_int(0))
        };
        for s in c.segments() {
            prop_assert!(on_input(&s.a) && on_input(&s.at(&Rational::half())));
        }
        prop_assert!(e.tags.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn first_hit_is_minimal(p in polyline(5), q in polyline(5)) {
        let hit = first_hit(&p, &q);
        // exhaustive: least parameter over all segment pairs
        let mut best: Option<Rational> = None;
        for (j, s) in p.segments().enumerate() {
            for t in q.segments() {
                let u = match seg_status(&s, &t) {
                    SegStatus::Disjoint => continue,
                    SegStatus::Point(x) => s.param_of(&x),
                    SegStatus::Overlap(o) => Rational::min_of(s.param_of(&o.a), s.param_of(&o.b)),
                };
                let g = p.global_param(j, &u);
                if best.as_ref().map_or(true, |b| g < *b) {
                    best = Some(g);
                }
            }
        }
        prop_assert_eq!(hit.map(|h| h.t), best);
    }

    #[test]
    fn modulus_tables_validate(table in prop::collection::vec(0u32..12, 0..6), a in 0u32..3, b in 0u32..6) {
        let repr = ModulusRepr::Table { table: table.clone(), tail: (a, b) };
        if let Ok(g) = ModulusFn::new(ModulusKind::Ulac, repr) {
            for k in 0..40 {
                prop_assert!(g.eval(k) >= k);
                prop_assert!(g.eval(k + 1) >= g.eval(k));
            }
        }
    }

    #[test]
    fn polyarc_modulus_passes_oracle(p in monotone(5), k in 0u32..5) {
        let g = polyarc_ulac(&p).unwrap();
        let (_, bad) = ulac_check(&p, &g, k, 24, 3);
        prop_assert_eq!(bad, None);
    }

    #[test]
    fn nonmember_certificate_is_sound(p in polyline(5), z in sixteenths()) {
        let name = CurveName::constant(p.clone());
        if let Some(n) = certified_nonmember(&z, &name, 12) {
            prop_assert!(dist2_point_poly(&z, &p) > Rational::pow2_neg(2 * n));
        }
        if dist2_point_poly(&z, &p) == Rational::from_int(0) {
            prop_assert_eq!(certified_nonmember(&z, &name, 12), None);
        }
    }

    #[test]
    fn perturbed_names_are_cauchy(p in polyline(5), dx in -4i64..=4, dy in -4i64..=4) {
        let dir = Point::new(r(dx, 8), r(dy, 8));
        prop_assume!(dir.norm2() <= Rational::from_int(1));
        let name = CurveName::perturbed(p, dir).unwrap();
        let terms: Vec<Poly> = (0..8).map(|t| (*name.approx(t).unwrap()).clone()).collect();
        prop_assert_eq!(validate_strongly_cauchy(&terms), CauchyCheck::Ok);
    }

    #[test]
    fn circle_arcs_are_cauchy(q in 0u8..4, u0 in -8i64..0, u1 in 1i64..=8, rho in 1i64..=4) {
        let name = circle_arc(Point::new(r(0, 1), r(0, 1)), r(rho, 4), q, r(u0, 8), r(u1, 8));
        let terms: Vec<Poly> = (0..10).map(|t| (*name.approx(t).unwrap()).clone()).collect();
        prop_assert_eq!(validate_strongly_cauchy(&terms), CauchyCheck::Ok);
    }

    #[test]
    fn blocked_cells_grow_with_obstacles(p in polyline(4), q in polyline(4)) {
        let grid = GridSpec::new(Rect::new(r(-1, 1), r(1, 1), r(-1, 1), r(1, 1)).unwrap(), 3).unwrap();
        let one = blocked_cells(&grid, std::slice::from_ref(&p), DyadicExp(5));
        let two = blocked_cells(&grid, &[p, q], DyadicExp(5));
        prop_assert!(one.iter().zip(&two).all(|(a, b)| !a || *b));
    }

    #[test]
    fn scene_json_round_trips(p in polyline(6)) {
        let text = format!(
            r#"{{"version": "accessarc/1", "adversary": {{"witnesses": [{{"e": 0, "curve": {}, "t0": "1/3", "t1": "2/3"}}]}}}}"#,
            serde_json::to_string(&poly_j(&p)).unwrap()
        );
        let f = SceneFile::parse(&text).unwrap();
        let again = SceneFile::parse(&f.to_json()).unwrap();
        prop_assert_eq!(&f, &again);
        let w = &f.adversary.as_ref().unwrap().witnesses[0];
        let back: Vec<Point> = w.curve.iter().map(|c| Point::new(c[0].0.clone(), c[1].0.clone())).collect();
        prop_assert_eq!(back, p.vertices().to_vec());
    }
}

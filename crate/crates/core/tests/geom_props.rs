use apollonius::geom::scene_scale;
use apollonius::*;
use proptest::prelude::*;

mod common;

fn coord() -> impl Strategy<Value = f64> {
    -100.0..100.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn general_form_round_trip(r in 1e-3..1e3f64, ux in -10.0..10.0f64, uy in -10.0..10.0f64) {
        // centers within ten radii of the origin
        let c = Circle::from_coords(ux * r, uy * r, r).unwrap();
        let tol = Tolerance::new(scene_scale(&[c]), 1e-9).unwrap();
        let back = circle_from_general(general_from_circle(&c), &tol).unwrap();
        prop_assert!((back.radius - r).abs() <= 1e-12 * r);
        prop_assert_eq!(back.center, c.center);

        let g = general_from_circle(&c);
        let g2 = general_from_circle(&back);
        let size = g.a.abs().max(g.b.abs()).max(g.c.abs()).max(1.0);
        prop_assert!((g.c - g2.c).abs() <= 1e-12 * size);
    }

    #[test]
    fn boundary_points_have_zero_power(cx in coord(), cy in coord(), r in 0.01..50.0f64, t in 0.0..6.3f64) {
        let c = Circle::from_coords(cx, cy, r).unwrap();
        let tol = Tolerance::new(scene_scale(&[c]), 1e-9).unwrap();
        prop_assert!(power_of_point(c.point_at(t), &c).abs() <= tol.squared());
    }

    #[test]
    fn circumcenter_is_equidistant(
        a in (coord(), coord()), b in (coord(), coord()), c in (coord(), coord())
    ) {
        let (p, q, s) = (Point2::new(a.0, a.1), Point2::new(b.0, b.1), Point2::new(c.0, c.1));
        let tol = Tolerance::new(200.0, 1e-9).unwrap();
        // keep triangles whose smallest angle is not tiny
        let area = (q - p).cross(s - p).abs();
        let longest = p.distance(q).max(q.distance(s)).max(p.distance(s));
        prop_assume!(area > 1e-2 * longest * longest);
        let o = circumcenter(p, q, s, &tol).unwrap();
        let d = [o.distance(p), o.distance(q), o.distance(s)];
        let spread = d.iter().cloned().fold(f64::MIN, f64::max) - d.iter().cloned().fold(f64::MAX, f64::min);
        prop_assert!(spread < tol.abs(), "spread {spread}");
    }

    #[test]
    fn tangency_residual_is_rigid_invariant(
        c1 in (coord(), coord(), 0.1..20.0f64),
        c2 in (coord(), coord(), 0.1..20.0f64),
        angle in 0.0..6.3f64,
        shift in (coord(), coord()),
    ) {
        let a = Circle::from_coords(c1.0, c1.1, c1.2).unwrap();
        let b = Circle::from_coords(c2.0, c2.1, c2.2).unwrap();
        let scale = scene_scale(&[a, b]);
        let tol = Tolerance::new(scale, 1e-9).unwrap();
        let moved = |c: Circle| Circle {
            center: c.center.rotated(angle) + Point2::new(shift.0, shift.1),
            radius: c.radius,
        };
        let before = tangency_classify(&a, &b, &tol).residual;
        let after = tangency_classify(&moved(a), &moved(b), &tol).residual;
        prop_assert!((before - after).abs() < 1e-12 * scale.max(1.0) * 10.0);
    }

    #[test]
    fn feet_lie_on_their_lines(px in coord(), py in coord(), nx in -1.0..1.0f64, ny in -1.0..1.0f64, off in coord()) {
        prop_assume!(nx.hypot(ny) > 1e-3);
        let l = Line2::new(Point2::new(nx, ny), off).unwrap();
        let p = Point2::new(px, py);
        let f = foot_of_perpendicular(p, &l);
        prop_assert!(l.signed_distance(f).abs() < 1e-9);
        prop_assert!((p - f).cross(l.normal).abs() < 1e-9);
    }
}

#[test]
fn line_intersection_lies_on_both() {
    let tol = Tolerance::unit();
    let l1 = Line2::new(Point2::new(1.0, 3.0), 6.0).unwrap();
    let l2 = Line2::new(Point2::new(-2.0, 0.5), 1.0).unwrap();
    let p = line_intersection(&l1, &l2, &tol).unwrap();
    assert!(l1.signed_distance(p).abs() < 1e-12);
    assert!(l2.signed_distance(p).abs() < 1e-12);
}

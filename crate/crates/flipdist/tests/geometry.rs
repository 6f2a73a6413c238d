use flipdist::geometry::{
    cauchy_root_bound, denominator_cap, farey_search, general_position, in_circle, orientation,
    q, qi, secant_second_intersection, segments_properly_cross, unit_circle_point, Circle,
    CirclePosition, GeometryError, Orientation, Point, Rational,
};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(x: i64, y: i64) -> Point {
    Point::from_ints(x, y)
}

fn rand_rational(rng: &mut ChaCha8Rng) -> Rational {
    q(rng.gen_range(-1000..1000), rng.gen_range(1..500))
}

#[test]
fn orientation_examples() {
    assert_eq!(orientation(&pt(0, 0), &pt(1, 0), &pt(0, 1)), Orientation::Left);
    assert_eq!(orientation(&pt(0, 0), &pt(1, 1), &pt(2, 2)), Orientation::Collinear);
    assert_eq!(orientation(&pt(0, 0), &pt(0, 1), &pt(1, 0)), Orientation::Right);
}

/// Oracle: cross product on common-denominator integers, a separate path
/// from the rational subtraction used by the library.
fn cross_oracle(p: &Point, q: &Point, r: &Point) -> Orientation {
    let den: BigInt = [&p.x, &p.y, &q.x, &q.y, &r.x, &r.y]
        .iter()
        .fold(BigInt::one(), |acc, v| acc * v.denom());
    let int = |v: &Rational| -> BigInt { v.numer() * (&den / v.denom()) };
    let (px, py, qx, qy, rx, ry) = (int(&p.x), int(&p.y), int(&q.x), int(&q.y), int(&r.x), int(&r.y));
    let d = (&qx - &px) * (&ry - &py) - (&qy - &py) * (&rx - &px);
    if d.is_positive() {
        Orientation::Left
    } else if d.is_negative() {
        Orientation::Right
    } else {
        Orientation::Collinear
    }
}

#[test]
fn orientation_matches_integer_oracle_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let mut p = || Point::new(rand_rational(&mut rng), rand_rational(&mut rng));
        let (a, b, c) = (p(), p(), p());
        assert_eq!(orientation(&a, &b, &c), cross_oracle(&a, &b, &c));
    }
    // collinear by construction
    let a = Point::from_ratios(1, 3, 2, 7);
    let d = (q(5, 11), q(-3, 4));
    let b = a.offset(&d.0, &d.1, &q(2, 9));
    let c = a.offset(&d.0, &d.1, &q(-17, 5));
    assert_eq!(orientation(&a, &b, &c), Orientation::Collinear);
    assert_eq!(cross_oracle(&a, &b, &c), Orientation::Collinear);
}

#[test]
fn in_circle_examples() {
    let (a, b, c) = (pt(1, 0), pt(0, 1), pt(-1, 0));
    assert_eq!(in_circle(&a, &b, &c, &pt(0, 0)).unwrap(), CirclePosition::Inside);
    assert_eq!(in_circle(&a, &b, &c, &pt(0, -1)).unwrap(), CirclePosition::On);
    assert_eq!(in_circle(&a, &b, &c, &pt(2, 0)).unwrap(), CirclePosition::Outside);
    // orientation-normalized: clockwise input gives the same verdicts
    assert_eq!(in_circle(&c, &b, &a, &pt(0, 0)).unwrap(), CirclePosition::Inside);
    assert_eq!(
        in_circle(&pt(0, 0), &pt(1, 1), &pt(2, 2), &pt(5, 0)),
        Err(GeometryError::DegenerateCircumcircle)
    );
}

#[test]
fn segment_crossing_examples() {
    assert!(segments_properly_cross((&pt(0, 0), &pt(2, 2)), (&pt(0, 2), &pt(2, 0))));
    assert!(!segments_properly_cross((&pt(0, 0), &pt(1, 0)), (&pt(2, 1), &pt(3, 1))));
    assert!(!segments_properly_cross((&pt(0, 0), &pt(1, 0)), (&pt(1, 0), &pt(1, 1))));
}

#[test]
fn general_position_examples() {
    assert_eq!(general_position(&[pt(0, 0), pt(1, 0), pt(1, 1)]), Ok(()));
    assert_eq!(
        general_position(&[pt(0, 0), pt(1, 1), pt(2, 2), pt(5, 0)]),
        Err((0, 1, 2))
    );
    // first violating triple in lexicographic order, not the first found by accident
    assert_eq!(
        general_position(&[pt(0, 5), pt(0, 0), pt(3, 1), pt(1, 1), pt(2, 2)]),
        Err((1, 3, 4))
    );
}

#[test]
fn unit_circle_examples() {
    assert_eq!(unit_circle_point(&qi(0)), pt(1, 0));
    assert_eq!(unit_circle_point(&qi(1)), pt(0, 1));
    assert_eq!(unit_circle_point(&q(1, 2)), Point::from_ratios(3, 5, 4, 5));
}

#[test]
fn unit_circle_points_are_exact_for_many_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let t = rand_rational(&mut rng);
        let p = unit_circle_point(&t);
        assert_eq!(&p.x * &p.x + &p.y * &p.y, qi(1));
    }
}

#[test]
fn secant_examples() {
    let c = Circle::unit();
    let p = pt(-1, 0);
    assert_eq!(secant_second_intersection(&c, &p, &qi(1)).unwrap(), pt(0, 1));
    assert_eq!(
        secant_second_intersection(&c, &p, &q(1, 2)).unwrap(),
        Point::from_ratios(3, 5, 4, 5)
    );
    // vertical tangent at (-1, 0) cannot be expressed by a slope; horizontal tangent at (0, 1) can
    assert_eq!(
        secant_second_intersection(&c, &pt(0, 1), &qi(0)),
        Err(GeometryError::TangentSecant)
    );
    let big = Circle::new(pt(1, 2), qi(25)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let k = rand_rational(&mut rng);
        let p2 = secant_second_intersection(&big, &pt(4, 6), &k).unwrap();
        let (dx, dy) = p2.sub(&pt(1, 2));
        assert_eq!(&dx * &dx + &dy * &dy, qi(25));
        assert_eq!(secant_second_intersection(&big, &p2, &k).unwrap(), pt(4, 6));
    }
}

#[test]
fn farey_examples() {
    let cap = BigInt::from(1_000_000);
    let open = |a: Rational, b: Rational| {
        let (a2, b2) = (a.clone(), b.clone());
        (move |t: &Rational| *t > a && *t < b, move |t: &Rational| *t <= a2 && b2 > a2)
    };
    let (ins, bel) = open(q(1, 3), q(1, 2));
    assert_eq!(farey_search(ins, bel, &cap).unwrap(), q(2, 5));
    let (ins, bel) = open(qi(0), qi(1));
    assert_eq!(farey_search(ins, bel, &cap).unwrap(), q(1, 2));
    // (sqrt 2 - 1, 0.42), decided by squaring: t > sqrt2 - 1  <=>  (t + 1)^2 > 2
    let inside = |t: &Rational| {
        let s = t + qi(1);
        &s * &s > qi(2) && *t < q(42, 100)
    };
    let below = |t: &Rational| {
        let s = t + qi(1);
        &s * &s <= qi(2)
    };
    let r = farey_search(inside, below, &cap).unwrap();
    let s = &r + qi(1);
    assert!(&s * &s > qi(2) && r < q(42, 100));
}

#[test]
fn farey_handles_deep_runs_quickly() {
    // interval (0, 1e-30): descent goes through one long run of equal turns
    let eps = Rational::new(BigInt::one(), BigInt::from(10).pow(30));
    let e2 = eps.clone();
    let cap = denominator_cap(&eps, 4);
    let r = farey_search(|t| t.is_positive() && *t < e2, |t| t.is_zero(), &cap).unwrap();
    assert!(r.is_positive() && r < eps);
    // a cap below what the interval needs is reported, not looped on
    let e3 = eps.clone();
    assert_eq!(
        farey_search(|t| t.is_positive() && *t < e3, |t| t.is_zero(), &BigInt::from(1000)),
        Err(GeometryError::IntervalTooNarrow)
    );
}

#[test]
fn cauchy_examples() {
    let b = cauchy_root_bound(&[qi(-2), qi(0), qi(1)]).unwrap();
    assert_eq!(b, q(2, 3));
    assert!(&b * &b <= qi(2));
    assert_eq!(cauchy_root_bound(&[qi(-1), qi(1)]).unwrap(), q(1, 2));
    assert_eq!(cauchy_root_bound(&[qi(0), qi(1)]), Err(GeometryError::ZeroConstantTerm));
}

#[test]
fn cauchy_bound_below_constructed_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let roots: Vec<Rational> = (0..3)
            .map(|_| {
                let mut r = rand_rational(&mut rng);
                if r.is_zero() {
                    r = qi(1);
                }
                r
            })
            .collect();
        // (x - r0)(x - r1)(x - r2)
        let (a, b, c) = (&roots[0], &roots[1], &roots[2]);
        let coeffs = vec![
            -(a * b * c),
            a * b + b * c + a * c,
            -(a + b + c),
            qi(1),
        ];
        let bound = cauchy_root_bound(&coeffs).unwrap();
        for r in &roots {
            assert!(bound <= r.abs());
        }
    }
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-200i64..200, 1i64..60).prop_map(|(n, d)| q(n, d))
}

fn small_point() -> impl Strategy<Value = Point> {
    (small_rational(), small_rational()).prop_map(|(x, y)| Point::new(x, y))
}

proptest! {
    #[test]
    fn orientation_antisymmetric(a in small_point(), b in small_point(), c in small_point()) {
        prop_assert_eq!(orientation(&a, &b, &c), orientation(&a, &c, &b).reversed());
    }

    #[test]
    fn secant_round_trip(t in small_rational(), k in small_rational()) {
        let c = Circle::new(Point::from_ratios(1, 3, -2, 5), q(49, 4)).unwrap();
        let p = flipdist::geometry::scaled_circle_point(&c.center, &q(7, 2), &t);
        prop_assume!(c.contains_on_boundary(&p));
        if let Ok(p2) = secant_second_intersection(&c, &p, &k) {
            prop_assert!(c.contains_on_boundary(&p2));
            prop_assert_eq!(secant_second_intersection(&c, &p2, &k).unwrap(), p);
        }
    }

    #[test]
    fn farey_output_inside_and_capped(a in 1i64..999, w in 1i64..999) {
        let lo = q(a, 1000);
        let hi = &lo + q(w, 1000 * 1000);
        prop_assume!(hi < qi(1));
        let width = &hi - &lo;
        let cap = denominator_cap(&width, 2);
        let (l2, h2, l3) = (lo.clone(), hi.clone(), lo.clone());
        let r = farey_search(move |t| *t > l2 && *t < h2, move |t| *t <= l3, &cap).unwrap();
        prop_assert!(r > lo && r < hi);
        prop_assert!(r.denom() <= &cap);
    }

    #[test]
    fn rationals_stay_reduced(a in small_rational(), b in small_rational()) {
        use num_integer::Integer;
        for r in [&a + &b, &a * &b, &a - &b] {
            prop_assert!(r.denom().is_positive());
            prop_assert!(r.numer().gcd(r.denom()).is_one());
        }
    }
}

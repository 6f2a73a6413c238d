//! Exact rational geometry: points, circles, orientation and in-circle
//! predicates, rational points on circles and Stern–Brocot search.
//!
//! Every scalar is a [`Rational`] (arbitrary precision, always reduced).
//! There is no floating point anywhere in this module.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

/// Arbitrary-precision rational, kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("degenerate circumcircle")]
    DegenerateCircumcircle,
    #[error("tangent secant")]
    TangentSecant,
    #[error("point is not on the circle")]
    NotOnCircle,
    #[error("interval too narrow")]
    IntervalTooNarrow,
    #[error("zero constant term")]
    ZeroConstantTerm,
    #[error("radius squared must be positive")]
    NonPositiveRadius,
}

/// Shorthand for building a rational from two machine integers.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integral rational.
pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(qi(x), qi(y))
    }

    pub fn from_ratios(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        Point::new(q(xn, xd), q(yn, yd))
    }

    pub fn sub(&self, other: &Point) -> (Rational, Rational) {
        (&self.x - &other.x, &self.y - &other.y)
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        let two = qi(2);
        Point::new((&self.x + &other.x) / &two, (&self.y + &other.y) / &two)
    }

    /// Point `self + s * (dx, dy)`.
    pub fn offset(&self, dx: &Rational, dy: &Rational, s: &Rational) -> Point {
        Point::new(&self.x + dx * s, &self.y + dy * s)
    }

    pub fn dist2(&self, other: &Point) -> Rational {
        let (dx, dy) = self.sub(other);
        &dx * &dx + &dy * &dy
    }

    /// Lossy conversion for display purposes only.
    pub fn to_f64(&self) -> (f64, f64) {
        (rational_to_f64(&self.x), rational_to_f64(&self.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.x, self.y)
    }
}

/// Approximate value of a rational; used for rendering and never for decisions.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circle {
    pub center: Point,
    pub radius_squared: Rational,
}

impl Circle {
    pub fn new(center: Point, radius_squared: Rational) -> Result<Self, GeometryError> {
        if !radius_squared.is_positive() {
            return Err(GeometryError::NonPositiveRadius);
        }
        Ok(Circle {
            center,
            radius_squared,
        })
    }

    pub fn unit() -> Self {
        Circle {
            center: Point::from_ints(0, 0),
            radius_squared: qi(1),
        }
    }

    /// Circle with rational radius `r`.
    pub fn with_radius(center: Point, r: &Rational) -> Self {
        Circle {
            center,
            radius_squared: r * r,
        }
    }

    pub fn contains_on_boundary(&self, p: &Point) -> bool {
        self.center.dist2(p) == self.radius_squared
    }

    /// Sign of `|p - center|^2 - r^2`: negative inside, zero on, positive outside.
    pub fn power_sign(&self, p: &Point) -> Sign {
        sign_of(&(self.center.dist2(p) - &self.radius_squared))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Left,
    Right,
    Collinear,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Left => Orientation::Right,
            Orientation::Right => Orientation::Left,
            Orientation::Collinear => Orientation::Collinear,
        }
    }

    fn from_sign(s: Sign) -> Self {
        match s {
            Sign::Plus => Orientation::Left,
            Sign::Minus => Orientation::Right,
            Sign::NoSign => Orientation::Collinear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CirclePosition {
    Inside,
    On,
    Outside,
}

pub(crate) fn sign_of(r: &Rational) -> Sign {
    if r.is_zero() {
        Sign::NoSign
    } else if r.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Sign of the determinant of `(q - p, r - p)`; `Left` means counterclockwise.
pub fn orientation(p: &Point, q: &Point, r: &Point) -> Orientation {
    let d = (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x);
    Orientation::from_sign(sign_of(&d))
}

/// Position of `q` relative to the circumcircle of `a`, `b`, `c` (any order).
pub fn in_circle(
    a: &Point,
    b: &Point,
    c: &Point,
    q: &Point,
) -> Result<CirclePosition, GeometryError> {
    let o = orientation(a, b, c);
    if o == Orientation::Collinear {
        return Err(GeometryError::DegenerateCircumcircle);
    }
    let (adx, ady) = a.sub(q);
    let (bdx, bdy) = b.sub(q);
    let (cdx, cdy) = c.sub(q);
    let al = &adx * &adx + &ady * &ady;
    let bl = &bdx * &bdx + &bdy * &bdy;
    let cl = &cdx * &cdx + &cdy * &cdy;
    let det = &adx * (&bdy * &cl - &bl * &cdy) - &ady * (&bdx * &cl - &bl * &cdx)
        + &al * (&bdx * &cdy - &bdy * &cdx);
    let mut s = sign_of(&det);
    if o == Orientation::Right {
        s = -s;
    }
    Ok(match s {
        Sign::Plus => CirclePosition::Inside,
        Sign::Minus => CirclePosition::Outside,
        Sign::NoSign => CirclePosition::On,
    })
}

/// True iff the open segments meet in exactly one point interior to both.
pub fn segments_properly_cross(s1: (&Point, &Point), s2: (&Point, &Point)) -> bool {
    let (a, b) = s1;
    let (c, d) = s2;
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    if o1 == Orientation::Collinear || o2 == Orientation::Collinear || o1 == o2 {
        return false;
    }
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    o3 != Orientation::Collinear && o4 != Orientation::Collinear && o3 != o4
}

/// Exhaustive scan over all triples; returns the lexicographically first
/// collinear triple of indices.
pub fn general_position(points: &[Point]) -> Result<(), (usize, usize, usize)> {
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if orientation(&points[i], &points[j], &points[k]) == Orientation::Collinear {
                    return Err((i, j, k));
                }
            }
        }
    }
    Ok(())
}

/// The rational point `((1 - t^2) / (1 + t^2), 2t / (1 + t^2))` on the unit circle.
pub fn unit_circle_point(t: &Rational) -> Point {
    let t2 = t * t;
    let one = Rational::one();
    let den = &one + &t2;
    Point::new((&one - &t2) / &den, (t * qi(2)) / &den)
}

/// Rational point on a circle with rational center and rational radius `r`.
pub fn scaled_circle_point(center: &Point, r: &Rational, t: &Rational) -> Point {
    let u = unit_circle_point(t);
    Point::new(&center.x + r * &u.x, &center.y + r * &u.y)
}

/// Second intersection of the line through `p` with direction `(dx, dy)`.
pub fn secant_second_intersection_dir(
    c: &Circle,
    p: &Point,
    dx: &Rational,
    dy: &Rational,
) -> Result<Point, GeometryError> {
    if !c.contains_on_boundary(p) {
        return Err(GeometryError::NotOnCircle);
    }
    let (ex, ey) = p.sub(&c.center);
    let norm = dx * dx + dy * dy;
    if norm.is_zero() {
        return Err(GeometryError::TangentSecant);
    }
    let lin = &ex * dx + &ey * dy;
    if lin.is_zero() {
        return Err(GeometryError::TangentSecant);
    }
    let s = -(lin * qi(2)) / norm;
    Ok(p.offset(dx, dy, &s))
}

/// Second intersection of the line through `p` (on `c`) with the given slope.
pub fn secant_second_intersection(
    c: &Circle,
    p: &Point,
    slope: &Rational,
) -> Result<Point, GeometryError> {
    secant_second_intersection_dir(c, p, &Rational::one(), slope)
}

/// Lower bound `|c0| / (|c0| + max |ci|)` on the magnitude of every root.
pub fn cauchy_root_bound(coefficients: &[Rational]) -> Result<Rational, GeometryError> {
    let c0 = coefficients
        .first()
        .filter(|c| !c.is_zero())
        .ok_or(GeometryError::ZeroConstantTerm)?
        .abs();
    let max = coefficients[1..]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(&c0 / (&c0 + max))
}

/// Largest denominator a Stern–Brocot search may reach for an interval whose
/// width is at least `width_bound`, with the configured safety multiplier.
pub fn denominator_cap(width_bound: &Rational, multiplier: u32) -> BigInt {
    assert!(width_bound.is_positive());
    let inv = width_bound.recip().ceil().to_integer();
    (inv + BigInt::one()) * BigInt::from(multiplier)
}

/// Stern–Brocot descent in `(0, 1)` for the simplest rational satisfying
/// `inside`. `below(t)` must be true exactly for candidates left of the
/// interval. Runs of equal turns are taken in one galloping step, so the
/// number of predicate calls is polylogarithmic in the answer's denominator.
pub fn farey_search<I, B>(
    inside: I,
    below: B,
    max_denominator: &BigInt,
) -> Result<Rational, GeometryError>
where
    I: Fn(&Rational) -> bool,
    B: Fn(&Rational) -> bool,
{
    let mut lo = (BigInt::zero(), BigInt::one());
    let mut hi = (BigInt::one(), BigInt::one());
    let frac = |a: &(BigInt, BigInt), b: &(BigInt, BigInt), k: &BigInt, left: bool| {
        // left: a + k b ; otherwise k a + b
        let (n, d) = if left {
            (&a.0 + k * &b.0, &a.1 + k * &b.1)
        } else {
            (k * &a.0 + &b.0, k * &a.1 + &b.1)
        };
        Rational::new(n, d)
    };
    loop {
        let m = Rational::new(&lo.0 + &hi.0, &lo.1 + &hi.1);
        if m.denom() > max_denominator {
            return Err(GeometryError::IntervalTooNarrow);
        }
        if inside(&m) {
            return Ok(m);
        }
        let go_right = below(&m);
        // predicate that holds for the k-th repeated step in the same direction
        let keeps = |k: &BigInt| -> bool {
            let c = frac(&lo, &hi, k, go_right);
            if go_right {
                below(&c)
            } else {
                !below(&c) && !inside(&c)
            }
        };
        let within_cap = |k: &BigInt| -> bool {
            let d = if go_right {
                &lo.1 + k * &hi.1
            } else {
                k * &lo.1 + &hi.1
            };
            &d <= max_denominator
        };
        // gallop for the largest k with keeps(k)
        let mut good = BigInt::one();
        let mut step = BigInt::from(2);
        let bad;
        loop {
            if !within_cap(&step) {
                bad = step;
                break;
            }
            if keeps(&step) {
                good = step.clone();
                step = &step * 2;
            } else {
                bad = step;
                break;
            }
        }
        let (mut g, mut b) = (good, bad);
        while &b - &g > BigInt::one() {
            let mid: BigInt = (&g + &b) / 2;
            if within_cap(&mid) && keeps(&mid) {
                g = mid;
            } else {
                b = mid;
            }
        }
        let next = frac(&lo, &hi, &g, go_right);
        let pair = (next.numer().clone(), next.denom().clone());
        if go_right {
            lo = pair;
        } else {
            hi = pair;
        }
    }
}

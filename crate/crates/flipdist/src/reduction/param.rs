//! Rational parametrizations of the gadget circles and exact searches for
//! parameters inside an interval.

use super::ReductionError;
use crate::geometry::{denominator_cap, farey_search, qi, Point, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

/// Orthogonal map `[[a, b], [c, d]]` with entries in `{-1, 0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ortho {
    pub a: i8,
    pub b: i8,
    pub c: i8,
    pub d: i8,
}

impl Ortho {
    pub const ID: Ortho = Ortho { a: 1, b: 0, c: 0, d: 1 };

    /// Rotation by `k` quarter turns counterclockwise.
    pub fn rotation(k: u8) -> Ortho {
        match k % 4 {
            0 => Ortho::ID,
            1 => Ortho { a: 0, b: -1, c: 1, d: 0 },
            2 => Ortho { a: -1, b: 0, c: 0, d: -1 },
            _ => Ortho { a: 0, b: 1, c: -1, d: 0 },
        }
    }

    /// The eight symmetries of the square.
    pub fn all() -> [Ortho; 8] {
        let mut out = [Ortho::ID; 8];
        for k in 0..4u8 {
            let r = Ortho::rotation(k);
            out[k as usize] = r;
            // reflection in the x-axis followed by the rotation
            out[4 + k as usize] = Ortho { a: r.a, b: -r.b, c: r.c, d: -r.d };
        }
        out
    }

    pub fn apply(&self, v: (&Rational, &Rational)) -> (Rational, Rational) {
        let f = |s: i8, x: &Rational| -> Rational {
            match s {
                0 => Rational::zero(),
                1 => x.clone(),
                _ => -x.clone(),
            }
        };
        (f(self.a, v.0) + f(self.b, v.1), f(self.c, v.0) + f(self.d, v.1))
    }

    pub fn inverse(&self) -> Ortho {
        Ortho { a: self.a, b: self.c, c: self.b, d: self.d }
    }
}

/// Homogeneous quadratic parametrization `H(n, M) = H2 n^2 + H1 n M + H0 M^2`
/// of a circle, with integer coefficient vectors `(x, y, w)`. The point of
/// parameter `t = n / M` is `(Hx / Hw, Hy / Hw)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub h0: [BigInt; 3],
    pub h1: [BigInt; 3],
    pub h2: [BigInt; 3],
}

impl Family {
    fn from_rational(h0: [Rational; 3], h1: [Rational; 3], h2: [Rational; 3]) -> Family {
        let mut den = BigInt::one();
        for r in h0.iter().chain(&h1).chain(&h2) {
            den = den.lcm(r.denom());
        }
        let int = |v: &[Rational; 3]| -> [BigInt; 3] {
            [0, 1, 2].map(|i| (&v[i] * Rational::from_integer(den.clone())).to_integer())
        };
        Family {
            h0: int(&h0),
            h1: int(&h1),
            h2: int(&h2),
        }
    }

    /// `center + rho * R * ((1 - t^2), 2t) / (1 + t^2)` with `R` a quarter-turn
    /// rotation; `t -> infinity` tends to `center + rho * R * (-1, 0)`.
    pub fn unit_circle(center: &Point, rho: &Rational, rot: Ortho) -> Family {
        let one = Rational::one();
        let z = Rational::zero();
        let two = qi(2);
        // U(n, M) = (M^2 - n^2, 2 n M, M^2 + n^2)
        let (r10x, r10y) = rot.apply((&one, &z));
        let (r01x, r01y) = rot.apply((&z, &one));
        let h2 = [&center.x - rho * &r10x, &center.y - rho * &r10y, one.clone()];
        let h1 = [&two * rho * &r01x, &two * rho * &r01y, z.clone()];
        let h0 = [&center.x + rho * &r10x, &center.y + rho * &r10y, one];
        Family::from_rational(h0, h1, h2)
    }

    /// Second intersections of the lines through `q` (on the circle of the
    /// given center) with local slope `m`, where local offsets map to global
    /// ones by `frame`: `q + frame(2 (h + k m) (1, m) / (1 + m^2))` with
    /// `(h, k)` the local center.
    pub fn secant(q: &Point, center: &Point, frame: Ortho) -> Family {
        let (cx, cy) = center.sub(q);
        let (h, k) = frame.inverse().apply((&cx, &cy));
        let two = qi(2);
        let z = Rational::zero();
        // local L(n, M) = n^2 (0, 2k) + n M (2k, 2h) + M^2 (2h, 0); w = n^2 + M^2
        let map = |lx: Rational, ly: Rational| frame.apply((&lx, &ly));
        let (a2x, a2y) = map(z.clone(), &two * &k);
        let (a1x, a1y) = map(&two * &k, &two * &h);
        let (a0x, a0y) = map(&two * &h, z.clone());
        let one = Rational::one();
        let h2 = [&q.x + a2x, &q.y + a2y, one.clone()];
        let h1 = [a1x, a1y, z];
        let h0 = [&q.x + a0x, &q.y + a0y, one];
        Family::from_rational(h0, h1, h2)
    }

    /// Integer homogeneous coordinates of parameter `n / m`.
    pub fn homogeneous(&self, n: &BigInt, m: &BigInt) -> [BigInt; 3] {
        let nn = n * n;
        let nm = n * m;
        let mm = m * m;
        [0, 1, 2].map(|i| &self.h2[i] * &nn + &self.h1[i] * &nm + &self.h0[i] * &mm)
    }

    pub fn point_nm(&self, n: &BigInt, m: &BigInt) -> Point {
        let [x, y, w] = self.homogeneous(n, m);
        Point::new(Rational::new(x, w.clone()), Rational::new(y, w))
    }

    pub fn point(&self, t: &Rational) -> Point {
        self.point_nm(t.numer(), t.denom())
    }

    /// The point approached as the parameter tends to infinity.
    pub fn limit(&self) -> &[BigInt; 3] {
        &self.h2
    }
}

/// Finds a rational in `(a, b)` classified `Equal` by `classify`, which must
/// be monotone (`Less` below the target interval, `Greater` above). A
/// bisection first exhibits two interior parameters, whose gap bounds the
/// interval width from below; the Stern–Brocot search then runs with the
/// denominator cap derived from that bound.
pub fn rational_in_interval<F>(
    a: &Rational,
    b: &Rational,
    classify: F,
    cap_multiplier: u32,
) -> Result<Rational, ReductionError>
where
    F: Fn(&Rational) -> Ordering,
{
    let span = b - a;
    let at = |s: &Rational| a + &span * s;
    let cls = |s: &Rational| classify(&at(s));
    let (mut lo, mut hi) = (Rational::zero(), Rational::one());
    let mut inside = None;
    for _ in 0..20_000 {
        let mid = (&lo + &hi) / qi(2);
        match cls(&mid) {
            Ordering::Less => lo = mid,
            Ordering::Greater => hi = mid,
            Ordering::Equal => {
                inside = Some(mid);
                break;
            }
        }
    }
    let mid = inside.ok_or(ReductionError::Search("bisection found no interior parameter".into()))?;
    // walk two interior points towards the ends of the interval
    let mut left = mid.clone();
    let mut right = mid;
    for _ in 0..4 {
        let probe = (&lo + &left) / qi(2);
        if cls(&probe) == Ordering::Equal {
            left = probe;
        } else {
            lo = probe;
        }
        let probe = (&hi + &right) / qi(2);
        if cls(&probe) == Ordering::Equal {
            right = probe;
        } else {
            hi = probe;
        }
    }
    let width = if right > left { &right - &left } else { (&hi - &lo) / qi(1 << 20) };
    let cap = denominator_cap(&width, cap_multiplier);
    let s = farey_search(|s| cls(s) == Ordering::Equal, |s| cls(s) == Ordering::Less, &cap)
        .map_err(|e| ReductionError::Search(e.to_string()))?;
    Ok(at(&s))
}

/// `count` parameters `n / M` strictly inside `(lo, hi)` with `p | M` and
/// `p` not dividing `n`, spread evenly. `M = p * K` for the least power of
/// two `K` that leaves room for all of them.
pub fn grid_parameters(lo: &Rational, hi: &Rational, count: usize, p: u64) -> Result<(BigInt, Vec<BigInt>), ReductionError> {
    let (m, mut out) = grid_parameters_multi(&[(lo.clone(), hi.clone(), count)], p)?;
    Ok((m, out.pop().expect("one interval")))
}

/// [`grid_parameters`] for several intervals sharing one denominator.
pub fn grid_parameters_multi(
    intervals: &[(Rational, Rational, usize)],
    p: u64,
) -> Result<(BigInt, Vec<Vec<BigInt>>), ReductionError> {
    if intervals.iter().any(|(lo, hi, _)| lo >= hi) {
        return Err(ReductionError::Search("empty parameter interval".into()));
    }
    let pb = BigInt::from(p);
    let mut k = BigInt::one();
    'grow: loop {
        let m = &pb * &k;
        let mr = Rational::from_integer(m.clone());
        let mut all = Vec::with_capacity(intervals.len());
        for (lo, hi, count) in intervals {
            let count = *count;
            let first: BigInt = (lo * &mr).floor().to_integer() + 1;
            let last: BigInt = (hi * &mr).ceil().to_integer() - 1;
            // at most every p-th value is excluded; demand a comfortable surplus
            if &last - &first < BigInt::from(4 * count as u64 + 8) {
                k *= 2;
                continue 'grow;
            }
            let mut out: Vec<BigInt> = Vec::with_capacity(count);
            let span = &last - &first;
            for i in 0..count {
                let mut n: BigInt = &first + (&span * BigInt::from(2 * i as u64 + 1)) / BigInt::from(2 * count as u64);
                while n.is_multiple_of(&pb) || out.last().is_some_and(|x| *x >= n) {
                    n += 1;
                }
                if n > last {
                    return Err(ReductionError::Search("grid overflow".into()));
                }
                out.push(n);
            }
            all.push(out);
        }
        return Ok((m, all));
    }
}

/// Sign of a rational as an ordering against zero.
pub fn sign(r: &Rational) -> Ordering {
    if r.is_positive() {
        Ordering::Greater
    } else if r.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

//! General position for gridded circle points, certified modulo a prime.
//!
//! Every bulk point lies on a circle with a quadratic parametrization
//! `H(n, M) = H2 n^2 + H1 n M + H0 M^2` and is taken at a parameter `n / M`
//! with `p | M` and `p` not dividing `n`. Modulo `p` such a point is a
//! multiple of `H2`, so determinants that mix bulk points reduce to
//! determinants of fixed vectors. When those are nonzero modulo `p` the exact
//! determinants are nonzero too. The remaining triples (three points of one
//! circle, or three exceptional points) are handled directly.

use super::param::Family;
use super::ReductionError;
use crate::geometry::Point;
use crate::pointset::PointSet;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rustc_hash::FxHashSet;

/// Integer homogeneous coordinates `(X, Y, W)` with `W > 0`.
pub fn homogeneous(p: &Point) -> [BigInt; 3] {
    let w = p.x.denom().lcm(p.y.denom());
    let x = p.x.numer() * (&w / p.x.denom());
    let y = p.y.numer() * (&w / p.y.denom());
    [x, y, w]
}

fn det3(a: &[BigInt; 3], b: &[BigInt; 3], c: &[BigInt; 3]) -> BigInt {
    &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0])
        + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0])
}

/// Rejects candidates collinear with two already placed points. Directions
/// from the candidate are reduced to a canonical primitive vector, so a
/// check costs one pass over the placed points.
#[derive(Debug, Clone, Default)]
pub struct CollinearityGuard {
    placed: Vec<[BigInt; 3]>,
}

impl CollinearityGuard {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, p: &Point) {
        self.placed.push(homogeneous(p));
    }

    pub fn len(&self) -> usize {
        self.placed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placed.is_empty()
    }

    pub fn admits(&self, c: &Point) -> bool {
        let h = homogeneous(c);
        let mut seen: FxHashSet<(BigInt, BigInt)> = FxHashSet::default();
        for b in &self.placed {
            let mut dx = &b[0] * &h[2] - &h[0] * &b[2];
            let mut dy = &b[1] * &h[2] - &h[1] * &b[2];
            if dx.is_zero() && dy.is_zero() {
                return false;
            }
            let g = dx.gcd(&dy);
            dx /= &g;
            dy /= &g;
            if dx.is_negative() || (dx.is_zero() && dy.is_negative()) {
                dx = -dx;
                dy = -dy;
            }
            if !seen.insert((dx, dy)) {
                return false;
            }
        }
        true
    }
}

/// Bulk points of one circle: all share the denominator `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridFamily {
    pub family: Family,
    pub m: BigInt,
    /// `(point index, n)`.
    pub members: Vec<(usize, BigInt)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GpCertificate {
    pub prime: u64,
    pub families: Vec<GridFamily>,
    /// Point indices not covered by any family.
    pub exceptional: Vec<usize>,
}

fn modp(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits")
}

fn vec_mod(v: &[BigInt; 3], p: u64) -> [u64; 3] {
    [modp(&v[0], p), modp(&v[1], p), modp(&v[2], p)]
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn det_mod(a: &[u64; 3], b: &[u64; 3], c: &[u64; 3], p: u64) -> u64 {
    let minor = |x: u64, y: u64, z: u64, w: u64| (mulm(x, y, p) + p - mulm(z, w, p)) % p;
    let t0 = mulm(a[0], minor(b[1], c[2], b[2], c[1]), p);
    let t1 = mulm(a[1], minor(b[0], c[2], b[2], c[0]), p);
    let t2 = mulm(a[2], minor(b[0], c[1], b[1], c[0]), p);
    (t0 + p - t1 + t2) % p
}

fn powm(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b, p);
        }
        b = mulm(b, b, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'bases: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Exact circle through the family: center and squared radius in
/// homogeneous-free rational form, from three parameters; two more
/// parameters confirm the conic is that circle.
fn family_circle(f: &Family) -> Result<(Point, crate::geometry::Rational), String> {
    use crate::geometry::Rational;
    let pts: Vec<Point> = [(0i64, 1i64), (1, 1), (1, 0), (2, 1), (-1, 1)]
        .iter()
        .map(|&(n, m)| {
            let [x, y, w] = f.homogeneous(&BigInt::from(n), &BigInt::from(m));
            Point::new(Rational::new(x, w.clone()), Rational::new(y, w))
        })
        .collect();
    let (a, b, c) = (&pts[0], &pts[1], &pts[2]);
    // circumcenter of a, b, c
    let (bx, by) = b.sub(a);
    let (cx, cy) = c.sub(a);
    let den = (&bx * &cy - &by * &cx) * Rational::from_integer(2.into());
    if den.is_zero() {
        return Err("family samples are collinear".into());
    }
    let b2 = &bx * &bx + &by * &by;
    let c2 = &cx * &cx + &cy * &cy;
    let ux = (&cy * &b2 - &by * &c2) / &den;
    let uy = (&bx * &c2 - &cx * &b2) / &den;
    let center = Point::new(&a.x + ux, &a.y + uy);
    let r2 = center.dist2(a);
    for p in &pts[3..] {
        if center.dist2(p) != r2 {
            return Err("family is not a circle".into());
        }
    }
    Ok((center, r2))
}

struct Prepared {
    h1: Vec<[BigInt; 3]>,
    z: Vec<[BigInt; 3]>,
    ex: Vec<[BigInt; 3]>,
    /// `on_circle[x]`: exceptional positions lying on circle `x`.
    on_circle: Vec<FxHashSet<usize>>,
}

fn prepare(families: &[Family], exceptional: &[Point]) -> Result<Prepared, String> {
    let mut on_circle = Vec::with_capacity(families.len());
    for f in families {
        let (c, r2) = family_circle(f)?;
        let set: FxHashSet<usize> = exceptional
            .iter()
            .enumerate()
            .filter(|(_, e)| c.dist2(e) == r2)
            .map(|(i, _)| i)
            .collect();
        on_circle.push(set);
    }
    Ok(Prepared {
        h1: families.iter().map(|f| f.h1.clone()).collect(),
        z: families.iter().map(|f| f.h2.clone()).collect(),
        ex: exceptional.iter().map(homogeneous).collect(),
        on_circle,
    })
}

/// First failing condition modulo `p`, if any.
fn conditions_fail(pre: &Prepared, p: u64) -> Option<String> {
    let z: Vec<[u64; 3]> = pre.z.iter().map(|v| vec_mod(v, p)).collect();
    let h1: Vec<[u64; 3]> = pre.h1.iter().map(|v| vec_mod(v, p)).collect();
    let ex: Vec<[u64; 3]> = pre.ex.iter().map(|v| vec_mod(v, p)).collect();
    let f = z.len();
    for x in 0..f {
        if z[x] == [0, 0, 0] {
            return Some(format!("limit of family {x} vanishes"));
        }
        for y in 0..f {
            if y != x && det_mod(&z[y], &h1[x], &z[x], p) == 0 {
                return Some(format!("chord condition for families {x}, {y}"));
            }
        }
        for (i, e) in ex.iter().enumerate() {
            if !pre.on_circle[x].contains(&i) && det_mod(e, &h1[x], &z[x], p) == 0 {
                return Some(format!("chord condition for family {x} and exceptional {i}"));
            }
        }
    }
    for a in 0..f {
        for b in a + 1..f {
            for c in b + 1..f {
                if det_mod(&z[a], &z[b], &z[c], p) == 0 {
                    return Some(format!("families {a}, {b}, {c}"));
                }
            }
            for (i, e) in ex.iter().enumerate() {
                if det_mod(e, &z[a], &z[b], p) == 0 {
                    return Some(format!("exceptional {i} with families {a}, {b}"));
                }
            }
        }
    }
    for i in 0..ex.len() {
        for j in i + 1..ex.len() {
            for x in 0..f {
                if pre.on_circle[x].contains(&i) && pre.on_circle[x].contains(&j) {
                    continue;
                }
                if det_mod(&ex[i], &ex[j], &z[x], p) == 0 {
                    return Some(format!("exceptional {i}, {j} with family {x}"));
                }
            }
        }
    }
    None
}

/// Largest prime `<= start` for which every mixed condition holds.
pub fn choose_prime(families: &[Family], exceptional: &[Point], start: u64) -> Result<u64, ReductionError> {
    let pre = prepare(families, exceptional).map_err(ReductionError::Certificate)?;
    let mut p = start;
    let mut tried = 0;
    while p > 3 && tried < 64 {
        if is_prime(p) {
            tried += 1;
            if conditions_fail(&pre, p).is_none() {
                return Ok(p);
            }
        }
        p -= 1;
    }
    Err(ReductionError::Certificate("no suitable prime found".into()))
}

/// Exact collinearity scan over exceptional points, filtered modulo `p`.
fn exceptional_triples(ex: &[[BigInt; 3]], p: u64) -> Result<(), String> {
    let red: Vec<[u64; 3]> = ex.iter().map(|v| vec_mod(v, p)).collect();
    for a in 0..ex.len() {
        for b in a + 1..ex.len() {
            for c in b + 1..ex.len() {
                if det_mod(&red[a], &red[b], &red[c], p) == 0 && det3(&ex[a], &ex[b], &ex[c]).sign() == Sign::NoSign {
                    return Err(format!("exceptional points at positions {a}, {b}, {c} are collinear"));
                }
            }
        }
    }
    Ok(())
}

impl GpCertificate {
    /// Checks the certificate against `ps`; success implies that no three
    /// points of `ps` are collinear.
    pub fn verify(&self, ps: &PointSet) -> Result<(), String> {
        let p = self.prime;
        if !is_prime(p) {
            return Err(format!("{p} is not prime"));
        }
        let pb = BigInt::from(p);
        let mut covered = vec![false; ps.len()];
        for (k, g) in self.families.iter().enumerate() {
            if !(&g.m % &pb).is_zero() {
                return Err(format!("family {k}: denominator not divisible by the prime"));
            }
            for (idx, n) in &g.members {
                if *idx >= ps.len() || covered[*idx] {
                    return Err(format!("family {k}: bad or repeated point {idx}"));
                }
                covered[*idx] = true;
                if (n % &pb).is_zero() {
                    return Err(format!("point {idx}: parameter divisible by the prime"));
                }
                if g.family.point_nm(n, &g.m) != *ps.point(*idx) {
                    return Err(format!("point {idx} is not at its recorded parameter"));
                }
            }
        }
        for &e in &self.exceptional {
            if e >= ps.len() || covered[e] {
                return Err(format!("bad or repeated exceptional point {e}"));
            }
            covered[e] = true;
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(format!("point {i} is not covered"));
        }
        let fams: Vec<Family> = self.families.iter().map(|g| g.family.clone()).collect();
        let ex_pts: Vec<Point> = self.exceptional.iter().map(|&i| ps.point(i).clone()).collect();
        let pre = prepare(&fams, &ex_pts)?;
        if let Some(m) = conditions_fail(&pre, p) {
            return Err(m);
        }
        exceptional_triples(&pre.ex, p)
    }

    pub fn bulk_count(&self) -> usize {
        self.families.iter().map(|g| g.members.len()).sum()
    }
}

//! Exact rational points on the unit sphere.
//!
//! A direction `(p1, p2, p3) / q` with `p1^2 + p2^2 + p3^2 = q^2` is stored as
//! the primitive integer quadruple; all identities are checked in `i128`.

use std::fmt;
use std::str::FromStr;

use num_integer::{Integer, Roots};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ghz::{angle_between, Direction};

/// Largest bound accepted by the exhaustive enumeration (cost grows as bound^3).
pub const MAX_EXHAUSTIVE_BOUND: i64 = 500;

/// Primitive rational unit vector. Ordered by denominator, then numerators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalDirection {
    q: i64,
    p: [i64; 3],
}

impl RationalDirection {
    /// Accepts only primitive quadruples (`gcd(p1, p2, p3, q) = 1`) with `q > 0`.
    pub fn new(p1: i64, p2: i64, p3: i64, q: i64) -> Result<Self> {
        let invalid = Error::InvalidRational { p1, p2, p3, q };
        if q <= 0 || !is_unit(&[p1 as i128, p2 as i128, p3 as i128], q as i128) {
            return Err(invalid);
        }
        if p1.gcd(&p2).gcd(&p3).gcd(&q) != 1 {
            return Err(invalid);
        }
        Ok(Self { q, p: [p1, p2, p3] })
    }

    /// Divides out the common factor of a (possibly non-primitive) quadruple.
    pub(crate) fn reduced(p: [i128; 3], q: i128) -> Option<Self> {
        if q <= 0 || !is_unit(&p, q) {
            return None;
        }
        let g = p[0].gcd(&p[1]).gcd(&p[2]).gcd(&q);
        let narrow = |x: i128| i64::try_from(x / g).ok();
        Some(Self {
            q: narrow(q)?,
            p: [narrow(p[0])?, narrow(p[1])?, narrow(p[2])?],
        })
    }

    pub fn numerators(&self) -> [i64; 3] {
        self.p
    }

    pub fn denominator(&self) -> i64 {
        self.q
    }

    /// Re-checks `p1^2 + p2^2 + p3^2 = q^2` in exact integer arithmetic.
    pub fn identity_holds(&self) -> bool {
        is_unit(&self.p.map(|x| x as i128), self.q as i128)
    }

    pub fn vector(&self) -> [f64; 3] {
        let q = self.q as f64;
        self.p.map(|x| x as f64 / q)
    }

    pub fn to_direction(&self) -> Direction {
        Direction::from_vector(self.vector()).expect("rational unit vectors are non-zero")
    }

    pub fn angle_to(&self, target: &Direction) -> f64 {
        angle_between(self.vector(), target.vector())
    }
}

fn is_unit(p: &[i128; 3], q: i128) -> bool {
    p.iter().map(|x| x * x).sum::<i128>() == q * q
}

impl fmt::Display for RationalDirection {
    /// `p1/q,p2/q,p3/q`, unreduced per component so the shared denominator is visible.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.p;
        let q = self.q;
        write!(f, "{a}/{q},{b}/{q},{c}/{q}")
    }
}

impl FromStr for RationalDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param("rational direction", format!("cannot parse {s:?}"));
        let parts: Vec<(i64, i64)> = s
            .split(',')
            .map(|part| {
                let (n, d) = part.trim().split_once('/').ok_or_else(bad)?;
                Ok((n.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?))
            })
            .collect::<Result<_>>()?;
        if parts.len() != 3 || parts.iter().any(|&(_, d)| d != parts[0].1) {
            return Err(bad());
        }
        Self::new(parts[0].0, parts[1].0, parts[2].0, parts[0].1)
    }
}

impl Serialize for RationalDirection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RationalDirection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_bound(bound: i64) -> Result<()> {
    if !(1..=MAX_EXHAUSTIVE_BOUND).contains(&bound) {
        return Err(Error::param(
            "bound",
            format!("{bound} not in 1..={MAX_EXHAUSTIVE_BOUND}"),
        ));
    }
    Ok(())
}

/// All primitive solutions of `p1^2 + p2^2 + p3^2 = q^2` with `q <= bound`,
/// sorted by denominator then numerators. Exhaustive scan over `|p_i| <= q`.
pub fn rational_directions(bound: i64) -> Result<Vec<RationalDirection>> {
    check_bound(bound)?;
    let mut out = Vec::new();
    for q in 1..=bound {
        for p1 in -q..=q {
            let rest1 = q * q - p1 * p1;
            for p2 in -q..=q {
                let rest2 = rest1 - p2 * p2;
                if rest2 < 0 {
                    continue;
                }
                let p3 = rest2.sqrt();
                if p3 * p3 != rest2 {
                    continue;
                }
                let candidates: &[i64] = if p3 == 0 { &[0] } else { &[-p3, p3] };
                for &c in candidates {
                    if p1.gcd(&p2).gcd(&c).gcd(&q) == 1 {
                        out.push(RationalDirection { q, p: [p1, p2, c] });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Enumerated rational directions up to a bound, with cached float vectors.
#[derive(Debug, Clone)]
pub struct RationalCatalog {
    bound: i64,
    directions: Vec<RationalDirection>,
    vectors: Vec<[f64; 3]>,
}

impl RationalCatalog {
    pub fn new(bound: i64) -> Result<Self> {
        let directions = rational_directions(bound)?;
        let vectors = directions.iter().map(RationalDirection::vector).collect();
        Ok(Self {
            bound,
            directions,
            vectors,
        })
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn directions(&self) -> &[RationalDirection] {
        &self.directions
    }

    /// Closest catalog entry to `target` and its angle. Ties go to the smaller
    /// denominator, then lexicographically smaller numerators.
    pub fn nearest(&self, target: &Direction) -> (RationalDirection, f64) {
        let t = target.vector();
        let mut best = 0;
        let mut best_angle = f64::INFINITY;
        for (i, v) in self.vectors.iter().enumerate() {
            let angle = angle_between(*v, t);
            if angle < best_angle {
                best = i;
                best_angle = angle;
            }
        }
        (self.directions[best], best_angle)
    }
}

/// Nearest enumerated rational direction with denominator at most `bound`.
pub fn nearest_rational(target: &Direction, bound: i64) -> Result<(RationalDirection, f64)> {
    Ok(RationalCatalog::new(bound)?.nearest(target))
}

/// A rational direction within `max_angle` of `target` with denominator at most
/// `max_denominator`, found without enumeration.
///
/// Uses the rational parametrization of the sphere by inverse stereographic
/// projection: `(m, n, k)` maps to `(2mk, 2nk, m^2 + n^2 - k^2) / (m^2 + n^2 + k^2)`.
/// The target's plane coordinates are rounded on the grid `1/k` for increasing
/// `k`, and the first `k` that lands within `max_angle` wins, which keeps
/// denominators small. Projection is taken from the pole in the opposite
/// hemisphere so the plane coordinates stay in the unit disc.
pub fn approximate_rational(
    target: &Direction,
    max_angle: f64,
    max_denominator: i64,
) -> Result<(RationalDirection, f64)> {
    if max_angle.is_nan() || max_angle <= 0.0 {
        return Err(Error::param(
            "max_angle",
            format!("{max_angle} must be positive"),
        ));
    }
    if max_denominator < 1 {
        return Err(Error::param("max_denominator", "must be at least 1"));
    }
    let v = target.vector();
    let flip = v[2] > 0.0;
    let z = if flip { -v[2] } else { v[2] };
    let a = v[0] / (1.0 - z);
    let b = v[1] / (1.0 - z);

    let k_max = (4 * max_denominator as i128).sqrt() + 1;
    let mut best: Option<(RationalDirection, f64)> = None;
    for k in 1..=k_max {
        let kf = k as f64;
        let ms = [(a * kf).floor() as i128, (a * kf).ceil() as i128];
        let ns = [(b * kf).floor() as i128, (b * kf).ceil() as i128];
        let mut round_best: Option<(RationalDirection, f64)> = None;
        for &m in &ms {
            for &n in &ns {
                let den = m * m + n * n + k * k;
                let mut num = [2 * m * k, 2 * n * k, m * m + n * n - k * k];
                if flip {
                    num[2] = -num[2];
                }
                let Some(r) = RationalDirection::reduced(num, den) else {
                    continue;
                };
                if r.q > max_denominator {
                    continue;
                }
                let angle = r.angle_to(target);
                if round_best.is_none_or(|(br, ba)| angle < ba || (angle == ba && r < br)) {
                    round_best = Some((r, angle));
                }
            }
        }
        if let Some((r, angle)) = round_best {
            if angle <= max_angle {
                return Ok((r, angle));
            }
            if best.is_none_or(|(_, ba)| angle < ba) {
                best = Some((r, angle));
            }
        }
    }
    Err(Error::NoRationalWithin {
        requested: max_angle,
        best: best.map_or(std::f64::consts::PI, |(_, a)| a),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_one_gives_signed_axes() {
        let dirs = rational_directions(1).unwrap();
        assert_eq!(dirs.len(), 6);
        for d in &dirs {
            assert_eq!(d.denominator(), 1);
            assert_eq!(d.numerators().iter().map(|x| x.abs()).sum::<i64>(), 1);
        }
    }

    #[test]
    fn small_bound_contents() {
        let dirs = rational_directions(5).unwrap();
        assert!(dirs.contains(&RationalDirection::new(3, 4, 0, 5).unwrap()));
        assert!(dirs.contains(&RationalDirection::new(2, 2, 1, 3).unwrap()));
        assert!(!dirs
            .iter()
            .any(|d| d.denominator() == 2 || d.denominator() == 4));
        // q = 3: permutations and signs of (2,2,1): 3 * 8 = 24.
        assert_eq!(dirs.iter().filter(|d| d.denominator() == 3).count(), 24);
        assert!(dirs.iter().all(RationalDirection::identity_holds));
        assert!(dirs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn constructor_validation() {
        assert!(RationalDirection::new(1, 1, 1, 2).is_err());
        assert!(RationalDirection::new(6, 8, 0, 10).is_err());
        assert!(RationalDirection::new(1, 0, 0, -1).is_err());
        assert!(rational_directions(0).is_err());
        assert!(rational_directions(MAX_EXHAUSTIVE_BOUND + 1).is_err());
    }

    #[test]
    fn display_and_parse() {
        let d = RationalDirection::new(3, -4, 0, 5).unwrap();
        assert_eq!(d.to_string(), "3/5,-4/5,0/5");
        assert_eq!("3/5,-4/5,0/5".parse::<RationalDirection>().unwrap(), d);
        assert!("3/5,4/6,0/5".parse::<RationalDirection>().is_err());
        assert!("6/10,8/10,0/10".parse::<RationalDirection>().is_err());
        assert_eq!(serde_json::to_string(&d).unwrap(), "\"3/5,-4/5,0/5\"");
    }

    #[test]
    fn nearest_examples() {
        let (r, angle) = nearest_rational(&Direction::e_x(), 7).unwrap();
        assert_eq!(r, RationalDirection::new(1, 0, 0, 1).unwrap());
        assert_eq!(angle, 0.0);

        let diag = Direction::from_vector([1.0, 1.0, 1.0]).unwrap();
        let (_, angle) = nearest_rational(&diag, 3).unwrap();
        let reference = RationalDirection::new(2, 2, 1, 3).unwrap().angle_to(&diag);
        assert!(angle <= reference);
    }

    #[test]
    fn nearest_improves_with_bound() {
        let target = Direction::new(1.1, 0.37).unwrap();
        let mut previous = f64::INFINITY;
        for bound in [1, 3, 5, 9, 17, 33, 65] {
            let (_, angle) = nearest_rational(&target, bound).unwrap();
            assert!(angle <= previous);
            previous = angle;
        }
    }

    #[test]
    fn approximate_rational_hits_tolerance() {
        let target = Direction::new(1.5, 0.02).unwrap();
        for tol in [0.1, 0.01, 0.001] {
            let (r, angle) = approximate_rational(&target, tol, 1_000_000_000).unwrap();
            assert!(angle <= tol);
            assert!(r.identity_holds());
            assert!((r.angle_to(&target) - angle).abs() < 1e-15);
        }
        // Northern hemisphere goes through the flipped projection.
        let north = Direction::new(0.4, 2.0).unwrap();
        let (r, angle) = approximate_rational(&north, 1e-3, 1_000_000_000).unwrap();
        assert!(angle <= 1e-3 && r.vector()[2] > 0.0);
    }

    #[test]
    fn approximate_rational_reports_best_on_failure() {
        let target = Direction::new(1.5, 0.02).unwrap();
        match approximate_rational(&target, 1e-6, 50) {
            Err(Error::NoRationalWithin { requested, best }) => {
                assert_eq!(requested, 1e-6);
                assert!(best > 1e-6 && best < 0.5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}

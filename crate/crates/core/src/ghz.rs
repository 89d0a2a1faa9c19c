//! The three-particle GHZ system: state, local spin observables for arbitrary
//! detector alignments, joint spectral projections, correlations and the
//! deviation reports for the four Mermin combinations.
//!
//! Basis ordering is frozen: `|s1,s2,s3>` with `s = +1` before `s = -1` and
//! particle 1 as the slowest index, i.e. index `4*b1 + 2*b2 + b3` with
//! `b = 0` for `+1` and `b = 1` for `-1`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, OperatorMatrix, StateVector};
use crate::seeding::stream_rng;
use crate::tolerance;

/// Unit vector on the 2-sphere, kept both as polar angles and Cartesian components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Direction {
    theta: f64,
    phi: f64,
    #[serde(skip)]
    vector: [f64; 3],
}

impl Direction {
    /// From polar angle `theta` (from +z) and azimuth `phi` (from +x), radians.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::NonFinite("direction angles"));
        }
        let vector = [
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ];
        Ok(Self { theta, phi, vector })
    }

    /// Normalizes a non-zero Cartesian vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("direction vector"));
        }
        let norm = norm3(v);
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let vector = v.map(|x| x / norm);
        let theta = vector[2].clamp(-1.0, 1.0).acos();
        let phi = vector[1].atan2(vector[0]);
        Ok(Self { theta, phi, vector })
    }

    pub fn e_x() -> Self {
        Self::axis([1.0, 0.0, 0.0], FRAC_PI_2, 0.0)
    }

    pub fn e_y() -> Self {
        Self::axis([0.0, 1.0, 0.0], FRAC_PI_2, FRAC_PI_2)
    }

    pub fn e_z() -> Self {
        Self::axis([0.0, 0.0, 1.0], 0.0, 0.0)
    }

    fn axis(vector: [f64; 3], theta: f64, phi: f64) -> Self {
        Self { theta, phi, vector }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn vector(&self) -> [f64; 3] {
        self.vector
    }

    /// Angle between two directions, in `[0, pi]`.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        angle_between(self.vector, other.vector)
    }

    /// Rotates towards the unit tangent `tangent` (orthogonal to `self`) by `angle`.
    pub fn tilted(&self, tangent: [f64; 3], angle: f64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        let v = self.vector;
        Self::from_vector([
            c * v[0] + s * tangent[0],
            c * v[1] + s * tangent[1],
            c * v[2] + s * tangent[2],
        ])
    }

    /// Rotation by exactly `angle` towards a uniformly random tangent direction.
    pub fn random_tilt<R: Rng + ?Sized>(&self, angle: f64, rng: &mut R) -> Self {
        loop {
            let g: [f64; 3] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let along = dot3(g, self.vector);
            let t = [
                g[0] - along * self.vector[0],
                g[1] - along * self.vector[1],
                g[2] - along * self.vector[2],
            ];
            let n = norm3(t);
            if n > 1e-9 {
                return self
                    .tilted(t.map(|x| x / n), angle)
                    .expect("tilt of a unit vector is finite and non-zero");
            }
        }
    }
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Angle between two unit vectors, stable for small angles.
pub(crate) fn angle_between(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm3(cross3(a, b)).atan2(dot3(a, b))
}

/// Rodrigues rotation of `v` about the unit `axis` by `angle`.
pub(crate) fn rotate(v: [f64; 3], axis: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let k_cross_v = cross3(axis, v);
    let k_dot_v = dot3(axis, v);
    std::array::from_fn(|i| v[i] * c + k_cross_v[i] * s + axis[i] * k_dot_v * (1.0 - c))
}

/// Ordered alignments of the three detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorTriplet(pub [Direction; 3]);

impl DetectorTriplet {
    pub fn new(n1: Direction, n2: Direction, n3: Direction) -> Self {
        Self([n1, n2, n3])
    }
}

impl FromStr for DetectorTriplet {
    type Err = Error;

    /// Parses `"t1,p1;t2,p2;t3,p3"` (polar and azimuthal angles in radians).
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::param("triplet", format!("{why} in {s:?}"));
        let parts: Vec<&str> = s.split(';').collect();
        if parts.len() != 3 {
            return Err(bad("expected three `theta,phi` groups"));
        }
        let mut dirs = Vec::with_capacity(3);
        for part in parts {
            let angles: Vec<&str> = part.split(',').map(str::trim).collect();
            if angles.len() != 2 {
                return Err(bad("expected `theta,phi`"));
            }
            let theta: f64 = angles[0].parse().map_err(|_| bad("bad theta"))?;
            let phi: f64 = angles[1].parse().map_err(|_| bad("bad phi"))?;
            dirs.push(Direction::new(theta, phi)?);
        }
        Ok(Self([dirs[0], dirs[1], dirs[2]]))
    }
}

/// Which target observable a detector is nominally set to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn target(self) -> Direction {
        match self {
            Axis::X => Direction::e_x(),
            Axis::Y => Direction::e_y(),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

/// The four Mermin setting combinations, in the order xxx, xyy, yxy, yyx.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combo {
    Xxx,
    Xyy,
    Yxy,
    Yyx,
}

impl Combo {
    pub const ALL: [Combo; 4] = [Combo::Xxx, Combo::Xyy, Combo::Yxy, Combo::Yyx];

    pub fn axes(self) -> [Axis; 3] {
        use Axis::{X, Y};
        match self {
            Combo::Xxx => [X, X, X],
            Combo::Xyy => [X, Y, Y],
            Combo::Yxy => [Y, X, Y],
            Combo::Yyx => [Y, Y, X],
        }
    }

    /// Product of outcomes for perfectly aligned detectors: -1 for xxx, +1 otherwise.
    pub fn ideal_product(self) -> f64 {
        match self {
            Combo::Xxx => -1.0,
            _ => 1.0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Combo::Xxx => "xxx",
            Combo::Xyy => "xyy",
            Combo::Yxy => "yxy",
            Combo::Yyx => "yyx",
        }
    }

    pub fn target_triplet(self) -> DetectorTriplet {
        DetectorTriplet(self.axes().map(Axis::target))
    }
}

impl fmt::Display for Combo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The six alignments `n_rx`, `n_ry` for `r = 1, 2, 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlignmentSextet {
    pub x: [Direction; 3],
    pub y: [Direction; 3],
}

impl AlignmentSextet {
    /// Exact alignments `n_rx = e_x`, `n_ry = e_y`.
    pub fn exact() -> Self {
        Self {
            x: [Direction::e_x(); 3],
            y: [Direction::e_y(); 3],
        }
    }

    pub fn get(&self, particle: usize, axis: Axis) -> Direction {
        match axis {
            Axis::X => self.x[particle],
            Axis::Y => self.y[particle],
        }
    }

    pub fn triplet(&self, combo: Combo) -> DetectorTriplet {
        let axes = combo.axes();
        DetectorTriplet(std::array::from_fn(|r| self.get(r, axes[r])))
    }

    /// Largest angle between any alignment and its target axis.
    pub fn max_misalignment(&self) -> f64 {
        let ex = Direction::e_x();
        let ey = Direction::e_y();
        self.x
            .iter()
            .map(|d| d.angle_to(&ex))
            .chain(self.y.iter().map(|d| d.angle_to(&ey)))
            .fold(0.0, f64::max)
    }
}

/// Deviations of the four combination correlations from their ideal values.
///
/// `eps0 = 1 + E_xxx` and `eps_a = 1 - E_a` for the three others, each clamped
/// to `[0, 2]` to absorb rounding; `eps` is their maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonReport {
    pub eps0: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps: f64,
}

impl EpsilonReport {
    /// From raw product expectations ordered xxx, xyy, yxy, yyx.
    pub fn from_correlations(values: [f64; 4]) -> Self {
        let dev: [f64; 4] = std::array::from_fn(|a| {
            let combo = Combo::ALL[a];
            (1.0 - combo.ideal_product() * values[a]).clamp(0.0, 2.0)
        });
        Self {
            eps0: dev[0],
            eps1: dev[1],
            eps2: dev[2],
            eps3: dev[3],
            eps: dev.iter().copied().fold(0.0, f64::max),
        }
    }

    pub fn deviations(&self) -> [f64; 4] {
        [self.eps0, self.eps1, self.eps2, self.eps3]
    }
}

/// Index of `|s1,s2,s3>` in the frozen basis ordering.
pub fn basis_index(signs: [i8; 3]) -> Result<usize> {
    let mut index = 0;
    for &s in &signs {
        let bit = match s {
            1 => 0,
            -1 => 1,
            other => return Err(Error::InvalidSign(other)),
        };
        index = index * 2 + bit;
    }
    Ok(index)
}

/// `(|1,1,1> - |-1,-1,-1>) / sqrt 2`.
pub fn ghz_state() -> StateVector {
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 8];
    amplitudes[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amplitudes[7] = Complex64::new(-FRAC_1_SQRT_2, 0.0);
    StateVector::new(amplitudes).expect("GHZ amplitudes are finite and non-zero")
}

/// Places a single-qubit operator on `particle` (1-based) with identities elsewhere.
pub fn embed(local: &OperatorMatrix, particle: usize) -> Result<OperatorMatrix> {
    if !(1..=3).contains(&particle) {
        return Err(Error::InvalidParticle(particle));
    }
    if local.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: local.dim(),
        });
    }
    let id = OperatorMatrix::identity(2)?;
    let factors: [&OperatorMatrix; 3] =
        std::array::from_fn(|r| if r + 1 == particle { local } else { &id });
    linalg::tensor(&linalg::tensor(factors[0], factors[1])?, factors[2])
}

/// `n . sigma` acting on particle `particle` (1-based).
pub fn spin_observable(n: &Direction, particle: usize) -> Result<OperatorMatrix> {
    embed(&OperatorMatrix::spin_component(n.vector()), particle)
}

/// `(1/8) prod_r (1 + s_r n_r . sigma^(r))`.
pub fn joint_projection(t: &DetectorTriplet, signs: [i8; 3]) -> Result<OperatorMatrix> {
    let mut acc: Option<OperatorMatrix> = None;
    for (r, &s) in signs.iter().enumerate() {
        if s != 1 && s != -1 {
            return Err(Error::InvalidSign(s));
        }
        let local = OperatorMatrix::identity(2)?
            .add(
                &OperatorMatrix::spin_component(t.0[r].vector())
                    .scale(Complex64::new(s as f64, 0.0)),
            )?
            .scale(Complex64::new(0.5, 0.0));
        acc = Some(match acc {
            None => local,
            Some(prev) => linalg::tensor(&prev, &local)?,
        });
    }
    Ok(acc.expect("three factors"))
}

/// All eight sign patterns in basis order.
pub fn sign_patterns() -> [[i8; 3]; 8] {
    std::array::from_fn(|i| {
        let bit = |k: usize| if (i >> (2 - k)) & 1 == 0 { 1 } else { -1 };
        [bit(0), bit(1), bit(2)]
    })
}

/// Born probabilities `<psi|P_s|psi>` for the eight outcome patterns, in basis order.
pub fn outcome_probabilities(t: &DetectorTriplet) -> [f64; 8] {
    let psi = ghz_state();
    sign_patterns().map(|signs| {
        let p = joint_projection(t, signs).expect("valid signs");
        let prob = linalg::expectation(&psi, &p).expect("projections are Hermitian on dim 8");
        if prob.abs() < tolerance::PROBABILITY_FLOOR {
            0.0
        } else {
            prob
        }
    })
}

/// Outcome probabilities from the GHZ moments, without matrices.
///
/// Single-site moments vanish, two-site moments are `cos t_r cos t_s`, and the
/// three-site moment is [`correlation_closed_form`], so
/// `P(s) = (1 + sum_{r<s} s_r s_s cos t_r cos t_s + s1 s2 s3 E) / 8`.
pub fn outcome_probabilities_closed_form(t: &DetectorTriplet) -> [f64; 8] {
    let c = t.0.map(|d| d.theta.cos());
    let e = correlation_closed_form(t);
    sign_patterns().map(|s| {
        let s = s.map(f64::from);
        let p = (1.0
            + s[0] * s[1] * c[0] * c[1]
            + s[0] * s[2] * c[0] * c[2]
            + s[1] * s[2] * c[1] * c[2]
            + s[0] * s[1] * s[2] * e)
            / 8.0;
        if p.abs() < tolerance::PROBABILITY_FLOOR {
            0.0
        } else {
            p
        }
    })
}

/// `<psi|(n1.sigma)(n2.sigma)(n3.sigma)|psi>` by full 8x8 matrix arithmetic.
pub fn correlation(t: &DetectorTriplet) -> f64 {
    let psi = ghz_state();
    let ops: Vec<OperatorMatrix> = (0..3)
        .map(|r| spin_observable(&t.0[r], r + 1).expect("particle index in range"))
        .collect();
    let product = ops[0]
        .matmul(&ops[1])
        .and_then(|m| m.matmul(&ops[2]))
        .expect("all operators are 8x8");
    linalg::expectation(&psi, &product).expect("product of commuting observables is Hermitian")
}

/// Analytic GHZ correlation `-sin t1 sin t2 sin t3 cos(p1 + p2 + p3)`.
pub fn correlation_closed_form(t: &DetectorTriplet) -> f64 {
    let [a, b, c] = t.0;
    -a.theta.sin() * b.theta.sin() * c.theta.sin() * (a.phi + b.phi + c.phi).cos()
}

pub fn epsilon_report(a: &AlignmentSextet) -> EpsilonReport {
    EpsilonReport::from_correlations(Combo::ALL.map(|combo| correlation(&a.triplet(combo))))
}

/// Same as [`epsilon_report`] but through [`correlation_closed_form`].
pub fn epsilon_report_closed_form(a: &AlignmentSextet) -> EpsilonReport {
    EpsilonReport::from_correlations(
        Combo::ALL.map(|combo| correlation_closed_form(&a.triplet(combo))),
    )
}

/// Upper bound on any combination's deviation when every alignment is within
/// `delta` of its target axis: `1 - cos^3 delta + 3 sin^2 delta`.
///
/// Writing each `n_r` in the frame of its target, the in-plane component along
/// the target is at least `cos delta` and the out-of-target components are at
/// most `sin delta`; expanding the triple product bounds the real part from below.
pub fn epsilon_bound(delta: f64) -> f64 {
    let (s, c) = delta.sin_cos();
    (1.0 - c * c * c + 3.0 * s * s).min(2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub delta: f64,
    pub worst_eps: f64,
}

/// Random sextets sampled per grid point, on top of the four axial patterns.
pub const SWEEP_SAMPLES: usize = 512;

/// Worst `eps` over misaligned sextets on the grid `delta_max * i / steps`, `i = 0..=steps`.
///
/// The misalignment law is a modeling choice: each of the six directions is
/// tilted by exactly `delta` towards an isotropic random tangent direction.
/// Four deterministic axial patterns (all azimuths shifted by `+-delta`, all
/// polar angles shifted by `+-delta`) are always included. Grid point `i`
/// draws from its own stream of `seed`, so the output is schedule-independent.
pub fn epsilon_sweep(delta_max: f64, steps: usize, seed: u64) -> Result<Vec<SweepPoint>> {
    if !(delta_max > 0.0 && delta_max <= FRAC_PI_4) {
        return Err(Error::param(
            "delta_max",
            format!("{delta_max} not in (0, pi/4]"),
        ));
    }
    if steps == 0 {
        return Err(Error::param("steps", "must be at least 1"));
    }
    Ok((0..=steps)
        .into_par_iter()
        .map(|i| {
            let delta = delta_max * i as f64 / steps as f64;
            SweepPoint {
                delta,
                worst_eps: worst_eps_at(delta, seed, i as u64),
            }
        })
        .collect())
}

fn worst_eps_at(delta: f64, seed: u64, stream: u64) -> f64 {
    if delta == 0.0 {
        return epsilon_report(&AlignmentSextet::exact()).eps;
    }
    let mut worst = axial_patterns(delta)
        .iter()
        .map(|s| epsilon_report(s).eps)
        .fold(0.0, f64::max);
    let mut rng = stream_rng(seed, stream);
    for _ in 0..SWEEP_SAMPLES {
        let sextet = random_sextet(delta, &mut rng);
        worst = worst.max(epsilon_report(&sextet).eps);
    }
    worst
}

/// Sextet whose six directions are each tilted by exactly `delta` in random tangent directions.
pub fn random_sextet<R: Rng + ?Sized>(delta: f64, rng: &mut R) -> AlignmentSextet {
    let ex = Direction::e_x();
    let ey = Direction::e_y();
    AlignmentSextet {
        x: std::array::from_fn(|_| ex.random_tilt(delta, rng)),
        y: std::array::from_fn(|_| ey.random_tilt(delta, rng)),
    }
}

fn axial_patterns(delta: f64) -> [AlignmentSextet; 4] {
    let shifted = |dtheta: f64, dphi: f64| {
        let d = |base: Direction| {
            Direction::new(base.theta + dtheta, base.phi + dphi).expect("finite angles")
        };
        AlignmentSextet {
            x: [d(Direction::e_x()); 3],
            y: [d(Direction::e_y()); 3],
        }
    };
    [
        shifted(0.0, delta),
        shifted(0.0, -delta),
        shifted(delta, 0.0),
        shifted(-delta, 0.0),
    ]
}

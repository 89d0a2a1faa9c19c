//! Hidden-variable valuations for the six near-x / near-y spin observables,
//! the four parity products, and the measure-theoretic obstruction for models
//! whose detector alignments form a Cartesian product.
//!
//! The hidden state space is reduced to its 64 observationally distinct atoms:
//! only the six values `s_rj(lambda)` enter the products `f_a`, so every
//! probability measure on the hidden states pushes forward to an
//! [`AtomDistribution`] with identical `E_a`, `mu(A_a)` and intersections.
//! Quantifying over all atom distributions therefore covers every measure.

pub mod game;

use std::fmt;
use std::sync::OnceLock;

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ghz::{Axis, EpsilonReport};
use crate::tolerance;

/// One +-1 assignment to the six observables `n_rj . sigma^(r)`.
///
/// Bit `2*r + j` (particle `r` in 0..3, `j = 0` for x, `1` for y) is set when
/// the value is -1, so index 0 is the all-(+1) valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(u8);

impl Valuation {
    pub const COUNT: usize = 64;

    pub fn from_index(index: usize) -> Result<Self> {
        if index < Self::COUNT {
            Ok(Self(index as u8))
        } else {
            Err(Error::param("valuation index", format!("{index} >= 64")))
        }
    }

    /// From signs indexed `[particle][axis]`.
    pub fn from_signs(signs: [[i8; 2]; 3]) -> Result<Self> {
        let mut bits = 0u8;
        for (r, pair) in signs.iter().enumerate() {
            for (j, &s) in pair.iter().enumerate() {
                match s {
                    1 => {}
                    -1 => bits |= 1 << (2 * r + j),
                    other => return Err(Error::InvalidSign(other)),
                }
            }
        }
        Ok(Self(bits))
    }

    pub fn all() -> impl Iterator<Item = Valuation> {
        (0..Self::COUNT as u8).map(Valuation)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Value assigned to `n_{particle, axis} . sigma`, particle 0-based.
    pub fn sign(self, particle: usize, axis: Axis) -> i8 {
        if self.0 >> (2 * particle + axis.index()) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    /// Flips the value of a single observable.
    pub fn flipped(self, particle: usize, axis: Axis) -> Self {
        Self(self.0 ^ (1 << (2 * particle + axis.index())))
    }
}

impl fmt::Display for Valuation {
    /// Six signs in the order s1x s1y s2x s2y s3x s3y.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..3 {
            for axis in [Axis::X, Axis::Y] {
                f.write_str(if self.sign(r, axis) == 1 { "+" } else { "-" })?;
            }
        }
        Ok(())
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The four parity products for one valuation. Only constructible from a
/// valuation, so `f0 f1 f2 f3 = -1` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FVector([i8; 4]);

impl FVector {
    pub fn values(self) -> [i8; 4] {
        self.0
    }

    pub fn product(self) -> i8 {
        self.0.iter().product()
    }

    pub fn plus_count(self) -> usize {
        self.0.iter().filter(|&&f| f == 1).count()
    }
}

/// `f0 = -s1x s2x s3x`, `f1 = s1x s2y s3y`, `f2 = s1y s2x s3y`, `f3 = s1y s2y s3x`.
pub fn f_values(v: Valuation) -> FVector {
    use Axis::{X, Y};
    let s = |r: usize, a: Axis| v.sign(r, a);
    FVector([
        -s(0, X) * s(1, X) * s(2, X),
        s(0, X) * s(1, Y) * s(2, Y),
        s(0, Y) * s(1, X) * s(2, Y),
        s(0, Y) * s(1, Y) * s(2, X),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternCount {
    pub pattern: FVector,
    pub valuations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParityReport {
    pub checked: usize,
    /// Valuations whose product `f0 f1 f2 f3` is -1.
    pub product_minus_one: usize,
    pub all_four_plus: usize,
    pub three_plus: usize,
    pub one_plus: usize,
    pub patterns: Vec<PatternCount>,
}

impl ParityReport {
    pub fn identity_holds(&self) -> bool {
        self.product_minus_one == self.checked && self.all_four_plus == 0
    }
}

/// Enumerates all 64 valuations and tallies their parity vectors.
pub fn parity_exhaustive() -> ParityReport {
    let mut patterns: Vec<PatternCount> = Vec::new();
    let mut report = ParityReport {
        checked: 0,
        product_minus_one: 0,
        all_four_plus: 0,
        three_plus: 0,
        one_plus: 0,
        patterns: Vec::new(),
    };
    for v in Valuation::all() {
        let f = f_values(v);
        report.checked += 1;
        if f.product() == -1 {
            report.product_minus_one += 1;
        }
        match f.plus_count() {
            4 => report.all_four_plus += 1,
            3 => report.three_plus += 1,
            1 => report.one_plus += 1,
            _ => {}
        }
        match patterns.iter_mut().find(|p| p.pattern == f) {
            Some(p) => p.valuations += 1,
            None => patterns.push(PatternCount {
                pattern: f,
                valuations: 1,
            }),
        }
    }
    report.patterns = patterns;
    report
}

/// Probability distribution over the 64 valuation atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomDistribution {
    weights: [f64; 64],
}

impl AtomDistribution {
    pub fn new(weights: [f64; 64]) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "weight {w} is not a non-negative number"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tolerance::DISTRIBUTION_SUM {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}"
            )));
        }
        Ok(Self { weights })
    }

    /// From `(valuation, weight)` pairs; unspecified atoms get weight zero.
    pub fn from_atoms(atoms: &[(Valuation, f64)]) -> Result<Self> {
        let mut weights = [0.0; 64];
        for &(v, w) in atoms {
            weights[v.index()] += w;
        }
        Self::new(weights)
    }

    pub fn point(v: Valuation) -> Self {
        let mut weights = [0.0; 64];
        weights[v.index()] = 1.0;
        Self { weights }
    }

    pub fn uniform() -> Self {
        Self {
            weights: [1.0 / 64.0; 64],
        }
    }

    pub fn weight(&self, v: Valuation) -> f64 {
        self.weights[v.index()]
    }

    pub fn weights(&self) -> &[f64; 64] {
        &self.weights
    }

    /// Atoms with non-zero weight, in index order.
    pub fn support(&self) -> impl Iterator<Item = (Valuation, f64)> + '_ {
        Valuation::all()
            .map(|v| (v, self.weight(v)))
            .filter(|&(_, w)| w > 0.0)
    }
}

impl Serialize for AtomDistribution {
    /// Serialized as the list of supported atoms.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Atom {
            valuation: Valuation,
            weight: f64,
        }
        let atoms: Vec<Atom> = self
            .support()
            .map(|(valuation, weight)| Atom { valuation, weight })
            .collect();
        let mut seq = s.serialize_seq(Some(atoms.len()))?;
        for a in &atoms {
            seq.serialize_element(a)?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    /// `E_a = sum_v mu(v) f_a(v)`.
    pub expectations: [f64; 4],
    /// `mu(A_a)` with `A_a = {f_a = +1}`.
    pub mu_a: [f64; 4],
    /// `mu(A_0 & A_1 & A_2 & A_3)`.
    pub mu_intersection: f64,
}

impl ModelReport {
    pub fn min_expectation(&self) -> f64 {
        self.expectations
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn model_report(mu: &AtomDistribution) -> ModelReport {
    let mut expectations = [0.0; 4];
    let mut mu_a = [0.0; 4];
    let mut mu_intersection = 0.0;
    for (v, w) in mu.support() {
        let f = f_values(v).values();
        for a in 0..4 {
            expectations[a] += w * f[a] as f64;
            if f[a] == 1 {
                mu_a[a] += w;
            }
        }
        if f.iter().all(|&x| x == 1) {
            mu_intersection += w;
        }
    }
    ModelReport {
        expectations,
        mu_a,
        mu_intersection,
    }
}

/// Exact solution of `max_mu min_a E_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxMinSolution {
    pub value: Rational64,
    /// Optimal weights on the achievable parity patterns.
    pub pattern_weights: Vec<(FVector, Rational64)>,
    /// Each pattern's weight placed on its lowest-index valuation.
    pub witness: AtomDistribution,
    /// Optimal weights over the four products. For every atom
    /// `sum_a certificate[a] f_a <= value`, which bounds `min_a E_a` for all distributions.
    pub certificate: [Rational64; 4],
}

impl MaxMinSolution {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64().expect("small rational")
    }

    pub fn certificate_f64(&self) -> [f64; 4] {
        self.certificate
            .map(|c| c.to_f64().expect("small rational"))
    }
}

impl Serialize for MaxMinSolution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct PatternWeight {
            pattern: FVector,
            weight: String,
        }
        #[derive(Serialize)]
        struct Out<'a> {
            value: f64,
            value_exact: String,
            witness: &'a AtomDistribution,
            pattern_weights: Vec<PatternWeight>,
            certificate: Vec<String>,
        }
        Out {
            value: self.value_f64(),
            value_exact: self.value.to_string(),
            witness: &self.witness,
            pattern_weights: self
                .pattern_weights
                .iter()
                .map(|(p, w)| PatternWeight {
                    pattern: *p,
                    weight: w.to_string(),
                })
                .collect(),
            certificate: self.certificate.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

/// Solves `max` over atom distributions of `min_a E_a` as an exact matrix game
/// between the achievable parity patterns (rows) and the four products (columns).
pub fn max_min_correlation() -> MaxMinSolution {
    // Achievable patterns in order of their lowest-index valuation.
    let mut patterns: Vec<(FVector, Valuation)> = Vec::new();
    for v in Valuation::all() {
        let f = f_values(v);
        if !patterns.iter().any(|(p, _)| *p == f) {
            patterns.push((f, v));
        }
    }
    let payoff: Vec<Vec<Rational64>> = patterns
        .iter()
        .map(|(f, _)| {
            f.values()
                .iter()
                .map(|&x| Rational64::from_integer(x as i64))
                .collect()
        })
        .collect();
    let solution = game::solve_zero_sum(&payoff);

    let mut weights = [0.0; 64];
    let mut pattern_weights = Vec::new();
    for ((f, v), &w) in patterns.iter().zip(&solution.row_strategy) {
        if w > Rational64::from_integer(0) {
            weights[v.index()] = w.to_f64().expect("small rational");
            pattern_weights.push((*f, w));
        }
    }
    let witness = AtomDistribution::new(weights).expect("simplex strategy is a distribution");
    let certificate = std::array::from_fn(|a| solution.col_strategy[a]);
    MaxMinSolution {
        value: solution.value,
        pattern_weights,
        witness,
        certificate,
    }
}

/// Cached [`max_min_correlation`].
pub fn max_min_solution() -> &'static MaxMinSolution {
    static SOLUTION: OnceLock<MaxMinSolution> = OnceLock::new();
    SOLUTION.get_or_init(max_min_correlation)
}

/// Smallest `eps` any product-form model can achieve: `1 - max_mu min_a E_a`.
pub fn product_model_eps_floor() -> f64 {
    1.0 - max_min_solution().value_f64()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum VerdictKind {
    ImpossibleForProductModels,
    UndecidedByThisTest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub verdict: VerdictKind,
    pub eps: f64,
    /// Product-form models cannot get below this `eps`.
    pub threshold: f64,
    /// `threshold - eps`; positive exactly when the verdict is impossible.
    pub slack: f64,
}

impl Verdict {
    pub fn is_impossible(&self) -> bool {
        self.verdict == VerdictKind::ImpossibleForProductModels
    }
}

pub fn contradiction_verdict(report: &EpsilonReport) -> Verdict {
    let threshold = product_model_eps_floor();
    let verdict = if report.eps < threshold {
        VerdictKind::ImpossibleForProductModels
    } else {
        VerdictKind::UndecidedByThisTest
    };
    Verdict {
        verdict,
        eps: report.eps,
        threshold,
        slack: threshold - report.eps,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum BoundStatus {
    /// Every `E_a >= 1 - eps` and every `mu(A_a) >= 1 - eps/2` was confirmed.
    Holds,
    /// Some `E_a < 1 - eps`; the implication is vacuous for this distribution.
    NotApplicable,
    /// The arithmetic failed; never expected.
    Violated,
}

/// Whether any atom distribution meets `E_a >= 1 - eps` for all four products.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING-KEBAB-CASE")]
pub enum DemandFeasibility {
    Feasible {
        witness: Box<AtomDistribution>,
    },
    /// Weights `y >= 0` summing to 1 with `sum_a y_a f_a(v) <= certified_max`
    /// for every atom, so `min_a E_a <= certified_max < 1 - eps` for all distributions.
    Infeasible {
        certificate: [f64; 4],
        certified_max: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureBoundEvidence {
    pub eps: f64,
    pub report: ModelReport,
    pub status: BoundStatus,
    /// `1 - eps`, demanded of every `E_a`.
    pub required_expectation: f64,
    /// `1 - eps/2`, implied for every `mu(A_a)`.
    pub required_mu_a: f64,
    /// `1 - 2 eps`, implied for the intersection by the union bound.
    pub intersection_lower_bound: f64,
    /// Always 0: no valuation has all four products equal to +1.
    pub intersection_actual: f64,
    pub demand: DemandFeasibility,
}

impl MeasureBoundEvidence {
    pub fn holds(&self) -> bool {
        self.status != BoundStatus::Violated
    }

    /// The union bound forces a positive intersection that parity forbids.
    pub fn contradiction(&self) -> bool {
        self.intersection_lower_bound > self.intersection_actual
    }
}

/// Checks the chain `E_a >= 1 - eps  =>  mu(A_a) >= 1 - eps/2  =>
/// mu(intersection) >= 1 - 2 eps` against `mu`, and decides by the exact
/// max-min program whether the premise is satisfiable at all.
pub fn measure_bound_check(mu: &AtomDistribution, eps: f64) -> Result<MeasureBoundEvidence> {
    if !(0.0..=2.0).contains(&eps) {
        return Err(Error::param("eps", format!("{eps} not in [0, 2]")));
    }
    let report = model_report(mu);
    let slack = tolerance::MEASURE_ARITHMETIC;
    let required_expectation = 1.0 - eps;
    let required_mu_a = 1.0 - eps / 2.0;
    let applicable = report
        .expectations
        .iter()
        .all(|&e| e >= required_expectation - slack);
    let status = if !applicable {
        BoundStatus::NotApplicable
    } else if report.mu_a.iter().all(|&m| m >= required_mu_a - slack) {
        BoundStatus::Holds
    } else {
        BoundStatus::Violated
    };

    let solution = max_min_solution();
    let demand = if solution.value_f64() >= required_expectation {
        DemandFeasibility::Feasible {
            witness: Box::new(solution.witness.clone()),
        }
    } else {
        DemandFeasibility::Infeasible {
            certificate: solution.certificate_f64(),
            certified_max: solution.value_f64(),
        }
    };

    Ok(MeasureBoundEvidence {
        eps,
        intersection_actual: report.mu_intersection,
        report,
        status,
        required_expectation,
        required_mu_a,
        intersection_lower_bound: 1.0 - 2.0 * eps,
        demand,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Axis::{X, Y};

    fn all_plus() -> Valuation {
        Valuation::from_index(0).unwrap()
    }

    fn single_flip_mixture() -> AtomDistribution {
        let base = all_plus();
        AtomDistribution::from_atoms(&[
            (base.flipped(0, X), 0.25),
            (base.flipped(1, X), 0.25),
            (base.flipped(2, X), 0.25),
            (base, 0.25),
        ])
        .unwrap()
    }

    #[test]
    fn f_values_examples() {
        assert_eq!(f_values(all_plus()).values(), [-1, 1, 1, 1]);
        assert_eq!(f_values(all_plus().flipped(0, X)).values(), [1, -1, 1, 1]);
        let all_minus = Valuation::from_signs([[-1, -1]; 3]).unwrap();
        assert_eq!(f_values(all_minus).values(), [1, -1, -1, -1]);
    }

    #[test]
    fn valuation_encoding() {
        let v = Valuation::from_signs([[1, -1], [1, 1], [-1, 1]]).unwrap();
        assert_eq!(v.sign(0, Y), -1);
        assert_eq!(v.sign(2, X), -1);
        assert_eq!(v.sign(1, X), 1);
        assert_eq!(v.to_string(), "+-++-+");
        assert!(Valuation::from_signs([[1, 0], [1, 1], [1, 1]]).is_err());
        assert!(Valuation::from_index(64).is_err());
    }

    #[test]
    fn parity_over_all_valuations() {
        let r = parity_exhaustive();
        assert_eq!(r.checked, 64);
        assert_eq!(r.product_minus_one, 64);
        assert_eq!(r.all_four_plus, 0);
        assert_eq!(r.three_plus, 32);
        assert_eq!(r.one_plus, 32);
        assert_eq!(r.patterns.len(), 8);
        assert!(r.patterns.iter().all(|p| p.valuations == 8));
        assert!(r.identity_holds());
    }

    #[test]
    fn model_report_examples() {
        let point = model_report(&AtomDistribution::point(all_plus()));
        assert_eq!(point.expectations, [-1.0, 1.0, 1.0, 1.0]);
        assert_eq!(point.mu_intersection, 0.0);

        let uniform = model_report(&AtomDistribution::uniform());
        assert!(uniform.expectations.iter().all(|e| e.abs() < 1e-15));

        let mix = model_report(&single_flip_mixture());
        assert_eq!(mix.expectations, [0.5; 4]);
        assert_eq!(mix.mu_a, [0.75; 4]);
    }

    #[test]
    fn distribution_validation() {
        assert!(AtomDistribution::new([0.0; 64]).is_err());
        let mut w = [0.0; 64];
        w[0] = 1.5;
        w[1] = -0.5;
        assert!(AtomDistribution::new(w).is_err());
        let mut w = [0.0; 64];
        w[3] = f64::NAN;
        assert!(AtomDistribution::new(w).is_err());
    }

    #[test]
    fn max_min_is_one_half() {
        let s = max_min_correlation();
        assert_eq!(s.value, Rational64::new(1, 2));
        let r = model_report(&s.witness);
        assert!((r.min_expectation() - 0.5).abs() < 1e-9);
        // The optimum mixes the four one-minus patterns equally.
        assert_eq!(s.pattern_weights.len(), 4);
        assert!(s
            .pattern_weights
            .iter()
            .all(|(p, w)| p.plus_count() == 3 && *w == Rational64::new(1, 4)));
        // Certificate: every atom's y-weighted parity sum is at most the value.
        for v in Valuation::all() {
            let f = f_values(v).values();
            let dot: Rational64 = (0..4)
                .map(|a| s.certificate[a] * Rational64::from_integer(f[a] as i64))
                .sum();
            assert!(dot <= s.value);
        }
    }

    #[test]
    fn point_masses_have_min_minus_one() {
        for v in Valuation::all() {
            assert_eq!(
                model_report(&AtomDistribution::point(v)).min_expectation(),
                -1.0
            );
        }
    }

    #[test]
    fn verdict_threshold() {
        let rep = |eps: f64| EpsilonReport {
            eps0: eps,
            eps1: 0.0,
            eps2: 0.0,
            eps3: 0.0,
            eps,
        };
        let v = contradiction_verdict(&rep(0.0));
        assert!(v.is_impossible());
        assert_eq!(v.slack, 0.5);
        assert!(contradiction_verdict(&rep(0.4999)).is_impossible());
        assert_eq!(
            contradiction_verdict(&rep(0.6)).verdict,
            VerdictKind::UndecidedByThisTest
        );
        assert_eq!(
            contradiction_verdict(&rep(0.5)).verdict,
            VerdictKind::UndecidedByThisTest
        );
    }

    #[test]
    fn measure_bound_examples() {
        let ev = measure_bound_check(&single_flip_mixture(), 0.5).unwrap();
        assert_eq!(ev.status, BoundStatus::Holds);
        assert_eq!(ev.required_mu_a, 0.75);
        assert_eq!(ev.report.mu_a, [0.75; 4]);
        assert!(matches!(ev.demand, DemandFeasibility::Feasible { .. }));

        let ev = measure_bound_check(&AtomDistribution::uniform(), 0.5).unwrap();
        assert_eq!(ev.status, BoundStatus::NotApplicable);
        assert!(ev.holds());

        let ev = measure_bound_check(&single_flip_mixture(), 0.1).unwrap();
        assert_eq!(ev.status, BoundStatus::NotApplicable);
        match ev.demand {
            DemandFeasibility::Infeasible { certified_max, .. } => {
                assert_eq!(certified_max, 0.5);
                assert!(certified_max < 1.0 - 0.1);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
        assert!(ev.contradiction());

        assert!(measure_bound_check(&AtomDistribution::uniform(), -0.1).is_err());
        assert!(measure_bound_check(&AtomDistribution::uniform(), 2.5).is_err());
    }
}

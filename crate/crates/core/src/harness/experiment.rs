//! Monte Carlo rounds of the three-detector experiment under three model families.
//!
//! Each round draws one of the four combinations uniformly, an alignment
//! triplet for it, and three +-1 outcomes:
//!
//! * `Quantum`: the triplet comes from a jointly perturbed (non-product)
//!   rational set and outcomes follow the Born weights of the joint projections.
//! * `CorrelatedHv`: same triplet set, but each triplet carries its own
//!   pre-assigned value distribution (built from the GHZ moments) that the
//!   hidden state selects from. Only the observables of the chosen triplet
//!   have values in a round.
//! * `ProductHv`: each detector picks independently from its own rational
//!   option lists, and the values come from one valuation over all six
//!   near-x / near-y observables drawn from a fixed atom distribution.
//!
//! Round `i` uses stream `i` of the seed, so records do not depend on thread
//! scheduling.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ghz::{self, Axis, Combo, EpsilonReport};
use crate::hvm::{self, AtomDistribution, Valuation, Verdict};
use crate::mkc::{self, CorrelatedSet, RationalDirection};
use crate::seeding::{stream_rng, PRODUCT_LIST_STREAM};

/// Default largest denominator for rational alignments in experiments.
pub const DEFAULT_DENOMINATOR_BOUND: i64 = 1_000_000;

/// Size of the correlated triplet set (16 members per combination).
pub const CORRELATED_MEMBERS: usize = 64;

/// Options per detector and target axis for product-form models.
pub const PRODUCT_OPTIONS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Quantum,
    ProductHv,
    CorrelatedHv,
}

impl ModelKind {
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Quantum => "quantum",
            ModelKind::ProductHv => "product-hv",
            ModelKind::CorrelatedHv => "correlated-hv",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum" => Ok(ModelKind::Quantum),
            "product-hv" => Ok(ModelKind::ProductHv),
            "correlated-hv" => Ok(ModelKind::CorrelatedHv),
            other => Err(Error::param("model", format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub rounds: u64,
    /// Largest misalignment of any detector from its target axis, radians.
    pub delta: f64,
    pub seed: u64,
    pub denominator_bound: i64,
    /// Atom distribution for `ProductHv`; the max-min witness when `None`.
    pub product_distribution: Option<AtomDistribution>,
}

impl ExperimentConfig {
    pub fn new(model: ModelKind, rounds: u64, delta: f64, seed: u64) -> Self {
        Self {
            model,
            rounds,
            delta,
            seed,
            denominator_bound: DEFAULT_DENOMINATOR_BOUND,
            product_distribution: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::param("rounds", "must be at least 1"));
        }
        if !(self.delta >= 0.0 && self.delta <= FRAC_PI_4) {
            return Err(Error::param(
                "delta",
                format!("{} not in [0, pi/4]", self.delta),
            ));
        }
        if self.denominator_bound < 1 {
            return Err(Error::param("denominator_bound", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub combo: Combo,
    pub triplet: [RationalDirection; 3],
    pub outcomes: [i8; 3],
    pub product: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComboStatistic {
    pub combo: Combo,
    pub rounds: u64,
    /// Empirical mean of the outcome product.
    pub mean: f64,
    pub std_error: f64,
    /// Model prediction for the mean.
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub model: ModelKind,
    pub rounds: u64,
    pub delta: f64,
    pub seed: u64,
    pub per_combo: [ComboStatistic; 4],
    pub epsilon: EpsilonReport,
    pub verdict: Verdict,
}

impl ExperimentSummary {
    /// Empirical `E_a` in the parity convention (sign flipped for xxx).
    pub fn parity_expectations(&self) -> [f64; 4] {
        self.per_combo.map(|s| s.combo.ideal_product() * s.mean)
    }
}

/// Precomputed per-model state shared by all rounds.
enum Model {
    Triplets {
        members: [Vec<([RationalDirection; 3], [f64; 8])>; 4],
    },
    Product {
        options: [[Vec<RationalDirection>; 2]; 3],
        cumulative: Vec<(Valuation, f64)>,
    },
}

fn cumulative<T: Copy>(weights: impl IntoIterator<Item = (T, f64)>) -> Vec<(T, f64)> {
    let mut acc = 0.0;
    weights
        .into_iter()
        .filter(|&(_, w)| w > 0.0)
        .map(|(t, w)| {
            acc += w;
            (t, acc)
        })
        .collect()
}

fn sample_cumulative<T: Copy, R: Rng + ?Sized>(table: &[(T, f64)], rng: &mut R) -> T {
    let total = table.last().expect("non-empty table").1;
    let u = rng.random::<f64>() * total;
    table
        .iter()
        .find(|&&(_, c)| u < c)
        .unwrap_or_else(|| table.last().expect("non-empty"))
        .0
}

fn choose<'a, T, R: Rng + ?Sized>(items: &'a [T], rng: &mut R) -> &'a T {
    &items[rng.random_range(0..items.len())]
}

impl Model {
    fn build(cfg: &ExperimentConfig) -> Result<Self> {
        match cfg.model {
            ModelKind::Quantum | ModelKind::CorrelatedHv => {
                let set = if cfg.delta == 0.0 {
                    CorrelatedSet::exact()
                } else {
                    mkc::correlated_triplet_set(
                        cfg.delta,
                        CORRELATED_MEMBERS,
                        cfg.seed,
                        cfg.denominator_bound,
                    )?
                };
                let mut members: [Vec<_>; 4] = Default::default();
                for m in &set.members {
                    let t = m.detector_triplet();
                    let probs = match cfg.model {
                        ModelKind::Quantum => ghz::outcome_probabilities(&t),
                        _ => ghz::outcome_probabilities_closed_form(&t),
                    };
                    members[m.combo.index()].push((m.triplet, probs));
                }
                Ok(Model::Triplets { members })
            }
            ModelKind::ProductHv => {
                let dist = cfg
                    .product_distribution
                    .clone()
                    .unwrap_or_else(|| hvm::max_min_solution().witness.clone());
                Ok(Model::Product {
                    options: product_options(cfg)?,
                    cumulative: cumulative(dist.support()),
                })
            }
        }
    }

    fn run_round(&self, seed: u64, round: u64) -> RoundRecord {
        let mut rng = stream_rng(seed, round);
        let combo = Combo::ALL[rng.random_range(0..4)];
        let (triplet, outcomes) = match self {
            Model::Triplets { members } => {
                let (triplet, probs) = choose(&members[combo.index()], &mut rng);
                let table = cumulative(ghz::sign_patterns().into_iter().zip(probs.iter().copied()));
                (*triplet, sample_cumulative(&table, &mut rng))
            }
            Model::Product {
                options,
                cumulative,
            } => {
                let axes = combo.axes();
                let triplet: [RationalDirection; 3] =
                    std::array::from_fn(|r| *choose(&options[r][axes[r].index()], &mut rng));
                let v = sample_cumulative(cumulative, &mut rng);
                (triplet, std::array::from_fn(|r| v.sign(r, axes[r])))
            }
        };
        RoundRecord {
            round,
            combo,
            triplet,
            outcomes,
            product: outcomes.iter().product(),
        }
    }

    /// Expected outcome product per combination under uniform member choice.
    fn predictions(&self) -> [f64; 4] {
        match self {
            Model::Triplets { members } => std::array::from_fn(|a| {
                let list = &members[a];
                list.iter()
                    .map(|(_, probs)| {
                        ghz::sign_patterns()
                            .iter()
                            .zip(probs)
                            .map(|(s, p)| f64::from(s[0] * s[1] * s[2]) * p)
                            .sum::<f64>()
                    })
                    .sum::<f64>()
                    / list.len() as f64
            }),
            Model::Product { cumulative, .. } => {
                let mut weights = [0.0; 64];
                let mut prev = 0.0;
                for &(v, c) in cumulative {
                    weights[v.index()] = c - prev;
                    prev = c;
                }
                let report = hvm::model_report(
                    &AtomDistribution::new(weights).expect("validated distribution"),
                );
                std::array::from_fn(|a| Combo::ALL[a].ideal_product() * report.expectations[a])
            }
        }
    }
}

/// Per-detector option lists near `e_x` and `e_y`, independent across detectors.
fn product_options(cfg: &ExperimentConfig) -> Result<[[Vec<RationalDirection>; 2]; 3]> {
    let x = RationalDirection::new(1, 0, 0, 1).expect("axis");
    let y = RationalDirection::new(0, 1, 0, 1).expect("axis");
    if cfg.delta == 0.0 {
        return Ok(std::array::from_fn(|_| [vec![x], vec![y]]));
    }
    let mut rng = stream_rng(cfg.seed, PRODUCT_LIST_STREAM);
    let mut out: [[Vec<RationalDirection>; 2]; 3] = Default::default();
    for slot in out.iter_mut() {
        for axis in [Axis::X, Axis::Y] {
            let target = axis.target();
            let mut list = Vec::with_capacity(PRODUCT_OPTIONS);
            for _ in 0..PRODUCT_OPTIONS {
                let tilt = rng.random_range(cfg.delta / 3.0..=cfg.delta / 2.0);
                let tilted = target.random_tilt(tilt, &mut rng);
                let (r, _) =
                    mkc::approximate_rational(&tilted, cfg.delta / 4.0, cfg.denominator_bound)?;
                list.push(r);
            }
            slot[axis.index()] = list;
        }
    }
    Ok(out)
}

/// Aggregates records into per-combination statistics.
pub fn summarize(
    cfg: &ExperimentConfig,
    records: &[RoundRecord],
    predicted: [f64; 4],
) -> ExperimentSummary {
    let mut counts = [0u64; 4];
    let mut sums = [0i64; 4];
    for r in records {
        counts[r.combo.index()] += 1;
        sums[r.combo.index()] += i64::from(r.product);
    }
    let per_combo = std::array::from_fn(|a| {
        let n = counts[a];
        let mean = if n == 0 {
            0.0
        } else {
            sums[a] as f64 / n as f64
        };
        let std_error = if n == 0 {
            1.0
        } else {
            ((1.0 - mean * mean).max(0.0) / n as f64).sqrt()
        };
        ComboStatistic {
            combo: Combo::ALL[a],
            rounds: n,
            mean,
            std_error,
            predicted: predicted[a],
        }
    });
    let epsilon = EpsilonReport::from_correlations(per_combo.map(|s: ComboStatistic| s.mean));
    ExperimentSummary {
        model: cfg.model,
        rounds: records.len() as u64,
        delta: cfg.delta,
        seed: cfg.seed,
        per_combo,
        verdict: hvm::contradiction_verdict(&epsilon),
        epsilon,
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(ExperimentSummary, Vec<RoundRecord>)> {
    cfg.validate()?;
    let model = Model::build(cfg)?;
    let records: Vec<RoundRecord> = (0..cfg.rounds)
        .into_par_iter()
        .map(|round| model.run_round(cfg.seed, round))
        .collect();
    let summary = summarize(cfg, &records, model.predictions());
    Ok((summary, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_quantum_xxx_is_always_minus_one() {
        let cfg = ExperimentConfig::new(ModelKind::Quantum, 20_000, 0.0, 5);
        let (summary, records) = run_experiment(&cfg).unwrap();
        assert_eq!(summary.per_combo[0].mean, -1.0);
        for s in &summary.per_combo[1..] {
            assert_eq!(s.mean, 1.0);
        }
        assert!(records
            .iter()
            .filter(|r| r.combo == Combo::Xxx)
            .all(|r| r.product == -1));
        assert_eq!(summary.epsilon.eps, 0.0);
    }

    #[test]
    fn records_are_reproducible_and_consistent() {
        for model in [
            ModelKind::Quantum,
            ModelKind::ProductHv,
            ModelKind::CorrelatedHv,
        ] {
            let cfg = ExperimentConfig::new(model, 2_000, 0.05, 17);
            let (_, a) = run_experiment(&cfg).unwrap();
            let (_, b) = run_experiment(&cfg).unwrap();
            assert_eq!(a, b);
            for r in &a {
                assert_eq!(r.product, r.outcomes.iter().product::<i8>());
                assert!(r.triplet.iter().all(RationalDirection::identity_holds));
            }
        }
    }

    #[test]
    fn product_model_cannot_beat_one_half() {
        let rounds = 40_000u64;
        let cfg = ExperimentConfig::new(ModelKind::ProductHv, rounds, 0.01, 2);
        let (summary, _) = run_experiment(&cfg).unwrap();
        let tol = 4.0 / (rounds as f64).sqrt();
        assert!(summary.epsilon.eps >= 0.5 - tol);
        for s in &summary.per_combo {
            assert!((s.predicted.abs() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::new(ModelKind::Quantum, 0, 0.0, 1);
        assert!(run_experiment(&cfg).is_err());
        cfg.rounds = 10;
        cfg.delta = -0.1;
        assert!(run_experiment(&cfg).is_err());
        cfg.delta = 1.0;
        assert!(run_experiment(&cfg).is_err());
        assert_eq!(
            "product-hv".parse::<ModelKind>().unwrap(),
            ModelKind::ProductHv
        );
        assert!("classical".parse::<ModelKind>().is_err());
    }
}

//! End-to-end contradiction chains as structured reports.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ghz::{self, AlignmentSextet, Axis, Combo, EpsilonReport};
use crate::hvm::{self, MaxMinSolution, MeasureBoundEvidence, ParityReport, Verdict};
use crate::linalg;
use crate::mkc::{self, NonlocalSextet, RationalCatalog, RationalDirection, SpectrumCheck};
use crate::seeding::stream_rng;

#[derive(Debug, Clone, Serialize)]
pub struct RationalSextet {
    pub x: [RationalDirection; 3],
    pub y: [RationalDirection; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct ComboCorrelation {
    pub combo: Combo,
    pub matrix_value: f64,
    pub closed_form_value: f64,
}

/// The rational-alignment argument, step by step.
#[derive(Debug, Clone, Serialize)]
pub struct Section2Report {
    pub delta: f64,
    pub bound: i64,
    pub seed: u64,
    pub sextet: RationalSextet,
    /// Largest angle between a chosen rational direction and its target axis.
    pub max_misalignment: f64,
    pub correlations: Vec<ComboCorrelation>,
    pub epsilon: EpsilonReport,
    pub parity: ParityReport,
    pub max_min: MaxMinSolution,
    /// The measure chain evaluated at the observed `eps` for the max-min witness.
    pub measure_bound: MeasureBoundEvidence,
    /// Measure of the set where all four products are +1; zero by parity.
    pub intersection_measure: f64,
    pub verdict: Verdict,
}

/// Tilts each of the six target axes by a random angle in `[0, delta]`, snaps
/// to the nearest rational direction with denominator at most `bound`, and
/// runs the full chain on the resulting sextet.
pub fn pipeline_section2(delta: f64, bound: i64, seed: u64) -> Result<Section2Report> {
    if !(delta > 0.0 && delta <= FRAC_PI_2) {
        return Err(Error::param("delta", format!("{delta} not in (0, pi/2]")));
    }
    let catalog = RationalCatalog::new(bound)?;
    let mut rng = stream_rng(seed, 0);
    let mut pick = |axis: Axis| {
        let angle = rng.random_range(0.0..=delta);
        let tilted = axis.target().random_tilt(angle, &mut rng);
        catalog.nearest(&tilted).0
    };
    let x: [RationalDirection; 3] = std::array::from_fn(|_| pick(Axis::X));
    let y: [RationalDirection; 3] = std::array::from_fn(|_| pick(Axis::Y));
    let alignments = AlignmentSextet {
        x: x.map(|r| r.to_direction()),
        y: y.map(|r| r.to_direction()),
    };

    let correlations: Vec<ComboCorrelation> = Combo::ALL
        .iter()
        .map(|&combo| {
            let t = alignments.triplet(combo);
            ComboCorrelation {
                combo,
                matrix_value: ghz::correlation(&t),
                closed_form_value: ghz::correlation_closed_form(&t),
            }
        })
        .collect();
    let epsilon =
        EpsilonReport::from_correlations(std::array::from_fn(|a| correlations[a].matrix_value));
    let max_min = hvm::max_min_solution().clone();
    let measure_bound = hvm::measure_bound_check(&max_min.witness, epsilon.eps)?;
    let parity = hvm::parity_exhaustive();

    Ok(Section2Report {
        delta,
        bound,
        seed,
        sextet: RationalSextet { x, y },
        max_misalignment: alignments.max_misalignment(),
        correlations,
        intersection_measure: measure_bound.report.mu_intersection,
        verdict: hvm::contradiction_verdict(&epsilon),
        epsilon,
        parity,
        max_min,
        measure_bound,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NonlocalComboEvidence {
    pub combo: Combo,
    pub correlation: f64,
    /// Largest `||[tau_i, tau_j]||` within the combination.
    pub max_commutator_norm: f64,
    /// `||tau_r - sigma^(r)||` for the three detectors.
    pub distances: [f64; 3],
    pub spectra: [SpectrumCheck; 3],
}

/// The commuting non-local observables argument.
#[derive(Debug, Clone, Serialize)]
pub struct Section3Report {
    pub eta: f64,
    pub seed: u64,
    /// `c` with every distance at most `c * eta`.
    pub distance_constant: f64,
    pub combos: Vec<NonlocalComboEvidence>,
    pub max_commutator_norm: f64,
    pub epsilon: EpsilonReport,
    pub verdict: Verdict,
}

pub fn pipeline_section3(eta: f64, seed: u64) -> Result<Section3Report> {
    let sextet = NonlocalSextet::perturbed(eta, seed)?;
    let epsilon = mkc::nonlocal_epsilon_report(&sextet)?;
    let local = NonlocalSextet::local();
    let mut combos = Vec::with_capacity(4);
    let mut distance_constant = 0.0;
    for combo in Combo::ALL {
        let triplet = mkc::perturbed_commuting_triplet(combo, eta, seed)?;
        distance_constant = triplet.distance_constant;
        let ops = sextet.combo_operators(combo);
        let axes = combo.axes();
        let mut spectra = Vec::with_capacity(3);
        let mut distances = [0.0; 3];
        for r in 0..3 {
            spectra.push(mkc::spectrum_check(ops[r])?);
            let diff = ops[r].sub(local.get(r, axes[r]))?;
            distances[r] = linalg::hermitian_operator_norm(&diff)?;
        }
        let sign = combo.ideal_product();
        let deviation = epsilon.deviations()[combo.index()];
        combos.push(NonlocalComboEvidence {
            combo,
            correlation: sign * (1.0 - deviation),
            max_commutator_norm: triplet.max_commutator_norm(),
            distances,
            spectra: spectra.try_into().expect("three spectra"),
        });
    }
    Ok(Section3Report {
        eta,
        seed,
        distance_constant,
        max_commutator_norm: sextet.max_commutator_norm(),
        combos,
        verdict: hvm::contradiction_verdict(&epsilon),
        epsilon,
    })
}

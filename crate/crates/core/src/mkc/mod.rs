//! Structures specific to models that assign values only on a countable dense
//! set of alignments: exact rational directions as that dense set, triplet
//! sets with product and non-product structure, a jointly correlated triplet
//! set, and commuting triplets of non-local observables.

pub mod nonlocal;
pub mod rational;
pub mod triplet_set;

use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

pub use nonlocal::{
    nonlocal_epsilon_report, perturbed_commuting_triplet, spectrum_check, CommutingTriplet,
    NonlocalSextet, SpectrumCheck,
};
pub use rational::{
    approximate_rational, nearest_rational, rational_directions, RationalCatalog, RationalDirection,
};
pub use triplet_set::{is_cartesian_product, ProductVerdict, TripletSet};

use crate::error::{Error, Result};
use crate::ghz::{self, Combo, DetectorTriplet, Direction};
use crate::seeding::{stream_rng, STRUCTURE_STREAM};

/// Attempts per member before a duplicate-free, non-product draw is abandoned.
const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatedMember {
    pub combo: Combo,
    pub triplet: [RationalDirection; 3],
    /// Largest angle between a member direction and its target axis.
    pub misalignment: f64,
}

impl CorrelatedMember {
    pub fn detector_triplet(&self) -> DetectorTriplet {
        DetectorTriplet(self.triplet.map(|r| r.to_direction()))
    }
}

/// Triplets whose three alignments were perturbed together.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatedSet {
    pub delta: f64,
    pub members: Vec<CorrelatedMember>,
}

impl CorrelatedSet {
    pub fn triplet_set(&self) -> TripletSet<RationalDirection> {
        TripletSet::explicit(self.members.iter().map(|m| m.triplet).collect())
            .expect("correlated sets are non-empty")
    }

    /// The four exact combinations, used when no misalignment is allowed.
    pub fn exact() -> Self {
        let x = RationalDirection::new(1, 0, 0, 1).expect("axis");
        let y = RationalDirection::new(0, 1, 0, 1).expect("axis");
        Self {
            delta: 0.0,
            members: Combo::ALL
                .iter()
                .map(|&combo| CorrelatedMember {
                    combo,
                    triplet: combo.axes().map(|a| match a {
                        ghz::Axis::X => x,
                        ghz::Axis::Y => y,
                    }),
                    misalignment: 0.0,
                })
                .collect(),
        }
    }
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let g: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = ghz::norm3(g);
        if n > 1e-9 {
            return g.map(|x| x / n);
        }
    }
}

/// Builds `count` rational triplets, member `i` near combination `i mod 4`.
///
/// Each member applies one shared rotation (random axis, angle in
/// `[delta/3, delta/2]`) to all three target axes and then snaps every
/// rotated direction to a rational direction within `delta/4` with
/// denominator at most `max_denominator`. Every member is therefore within
/// `3 delta / 4` of its targets and moves all three detectors together.
/// Members are distinct and the set is never a Cartesian product; a draw that
/// would break either property is redrawn.
pub fn correlated_triplet_set(
    delta: f64,
    count: usize,
    seed: u64,
    max_denominator: i64,
) -> Result<CorrelatedSet> {
    if !(delta > 0.0 && delta <= FRAC_PI_4) {
        return Err(Error::param("delta", format!("{delta} not in (0, pi/4]")));
    }
    if count < 2 {
        return Err(Error::param("count", "must be at least 2"));
    }
    let mut rng = stream_rng(seed, STRUCTURE_STREAM);
    let mut members: Vec<CorrelatedMember> = Vec::with_capacity(count);
    for i in 0..count {
        let combo = Combo::ALL[i % 4];
        let targets = combo.target_triplet();
        let mut accepted = false;
        for _ in 0..MAX_REDRAWS {
            let axis = random_unit(&mut rng);
            let angle = rng.random_range(delta / 3.0..=delta / 2.0);
            let mut triplet = Vec::with_capacity(3);
            for target in &targets.0 {
                let rotated = Direction::from_vector(ghz::rotate(target.vector(), axis, angle))?;
                let (r, _) = approximate_rational(&rotated, delta / 4.0, max_denominator)?;
                triplet.push(r);
            }
            let triplet: [RationalDirection; 3] = triplet.try_into().expect("three directions");
            if members.iter().any(|m| m.triplet == triplet) {
                continue;
            }
            let misalignment = (0..3)
                .map(|r| triplet[r].angle_to(&targets.0[r]))
                .fold(0.0, f64::max);
            members.push(CorrelatedMember {
                combo,
                triplet,
                misalignment,
            });
            if members.len() == count && is_cartesian_product(&set_of(&members)).is_product {
                members.pop();
                continue;
            }
            accepted = true;
            break;
        }
        if !accepted {
            return Err(Error::param(
                "delta",
                format!("could not draw {count} distinct correlated triplets at delta {delta}"),
            ));
        }
    }
    Ok(CorrelatedSet { delta, members })
}

fn set_of(members: &[CorrelatedMember]) -> TripletSet<RationalDirection> {
    TripletSet::explicit(members.iter().map(|m| m.triplet).collect()).expect("non-empty")
}

//! Commuting triplets of possibly non-local observables close to the local
//! spin observables.
//!
//! All six operators of a sextet come from one simultaneous conjugation
//! `tau = U sigma U^H` with `U = exp(i eta K)`, so every combination's three
//! operators commute exactly as their local counterparts do and keep the
//! spectrum {-1, +1}.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ghz::{self, Axis, Combo, Direction, EpsilonReport};
use crate::linalg::{self, OperatorMatrix};
use crate::seeding::stream_rng;
use crate::tolerance;

/// Seeded random Hermitian 8x8 matrix with Gaussian entries, scaled so its
/// largest entry modulus is 1.
pub fn random_hermitian(seed: u64) -> OperatorMatrix {
    let mut rng = stream_rng(seed, 0);
    let n = 8;
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        entries[i * n + i] = Complex64::new(rng.sample(StandardNormal), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            entries[i * n + j] = z;
            entries[j * n + i] = z.conj();
        }
    }
    let k = OperatorMatrix::from_row_major(n, entries).expect("finite 8x8");
    let scale = k.max_abs();
    k.scale(Complex64::new(1.0 / scale, 0.0))
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 0.5 {
        Ok(())
    } else {
        Err(Error::param("eta", format!("{eta} not in (0, 0.5]")))
    }
}

/// The unitary `exp(i eta K)` and the bound `2 ||K||` on `||tau - sigma|| / eta`.
fn conjugation(eta: f64, seed: u64) -> Result<(OperatorMatrix, f64)> {
    let k = random_hermitian(seed);
    let u = linalg::hermitian_function(&k, |lambda| Complex64::from_polar(1.0, eta * lambda))?;
    let constant = 2.0 * linalg::hermitian_operator_norm(&k)?;
    Ok((u, constant))
}

fn conjugate(u: &OperatorMatrix, a: &OperatorMatrix) -> Result<OperatorMatrix> {
    u.matmul(a)?.matmul(&linalg::adjoint(u))
}

fn local_sigma(particle: usize, axis: Axis) -> OperatorMatrix {
    ghz::spin_observable(&axis.target(), particle + 1).expect("particle in range")
}

/// Three pairwise-commuting Hermitian involutions on the three-qubit space.
#[derive(Debug, Clone)]
pub struct CommutingTriplet {
    pub combo: Combo,
    pub taus: [OperatorMatrix; 3],
    pub eta: f64,
    pub seed: u64,
    /// Operator-norm distances `||tau_r - sigma_{j_r}^(r)||`.
    pub distances: [f64; 3],
    /// `c` with `distances[r] <= c * eta`.
    pub distance_constant: f64,
}

impl CommutingTriplet {
    pub fn max_commutator_norm(&self) -> f64 {
        let t = &self.taus;
        [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(i, j)| linalg::commutator_norm(&t[i], &t[j]).expect("8x8"))
            .fold(0.0, f64::max)
    }

    /// Checks Hermiticity, involution and pairwise commutation.
    pub fn validate(&self) -> Result<()> {
        for tau in &self.taus {
            let deviation = tau.hermitian_deviation();
            if deviation > tolerance::HERMITIAN {
                return Err(Error::NotHermitian { deviation });
            }
            let square = tau
                .matmul(tau)?
                .sub(&OperatorMatrix::identity(8)?)?
                .max_abs();
            if square > tolerance::INVOLUTION {
                return Err(Error::param(
                    "tau",
                    format!("square deviates from identity by {square:e}"),
                ));
            }
        }
        let norm = self.max_commutator_norm();
        if norm > tolerance::COMMUTATOR {
            return Err(Error::NonCommuting {
                combo: self.combo.label(),
                norm,
            });
        }
        Ok(())
    }
}

/// `tau_r = U sigma_{j_r}^(r) U^H` for the combination's local observables,
/// with `U = exp(i eta K)` and `K` drawn from `seed`.
pub fn perturbed_commuting_triplet(combo: Combo, eta: f64, seed: u64) -> Result<CommutingTriplet> {
    check_eta(eta)?;
    let (u, distance_constant) = conjugation(eta, seed)?;
    let axes = combo.axes();
    let mut taus = Vec::with_capacity(3);
    let mut distances = [0.0; 3];
    for (r, &axis) in axes.iter().enumerate() {
        let sigma = local_sigma(r, axis);
        let tau = conjugate(&u, &sigma)?;
        distances[r] = linalg::hermitian_operator_norm(&tau.sub(&sigma)?)?;
        taus.push(tau);
    }
    let triplet = CommutingTriplet {
        combo,
        taus: taus.try_into().expect("three operators"),
        eta,
        seed,
        distances,
        distance_constant,
    };
    triplet.validate()?;
    Ok(triplet)
}

/// The six operators `tau_j^(r)` for `r = 1..3`, `j = x, y`.
#[derive(Debug, Clone)]
pub struct NonlocalSextet {
    pub x: [OperatorMatrix; 3],
    pub y: [OperatorMatrix; 3],
}

impl NonlocalSextet {
    /// The exact local observables `sigma_j^(r)`.
    pub fn local() -> Self {
        Self {
            x: std::array::from_fn(|r| local_sigma(r, Axis::X)),
            y: std::array::from_fn(|r| local_sigma(r, Axis::Y)),
        }
    }

    /// Local observables under a local alignment sextet, `n_rj . sigma^(r)`.
    pub fn from_alignments(x: [Direction; 3], y: [Direction; 3]) -> Result<Self> {
        let build = |dirs: [Direction; 3]| -> Result<[OperatorMatrix; 3]> {
            let ops: Vec<_> = (0..3)
                .map(|r| ghz::spin_observable(&dirs[r], r + 1))
                .collect::<Result<_>>()?;
            Ok(ops.try_into().expect("three operators"))
        };
        Ok(Self {
            x: build(x)?,
            y: build(y)?,
        })
    }

    /// All six local observables conjugated by one `exp(i eta K)`.
    pub fn perturbed(eta: f64, seed: u64) -> Result<Self> {
        check_eta(eta)?;
        let (u, _) = conjugation(eta, seed)?;
        let local = Self::local();
        let conj = |ops: &[OperatorMatrix; 3]| -> Result<[OperatorMatrix; 3]> {
            let out: Vec<_> = ops
                .iter()
                .map(|a| conjugate(&u, a))
                .collect::<Result<_>>()?;
            Ok(out.try_into().expect("three operators"))
        };
        Ok(Self {
            x: conj(&local.x)?,
            y: conj(&local.y)?,
        })
    }

    pub fn get(&self, particle: usize, axis: Axis) -> &OperatorMatrix {
        match axis {
            Axis::X => &self.x[particle],
            Axis::Y => &self.y[particle],
        }
    }

    pub fn combo_operators(&self, combo: Combo) -> [&OperatorMatrix; 3] {
        let axes = combo.axes();
        std::array::from_fn(|r| self.get(r, axes[r]))
    }

    /// Largest pairwise commutator norm within any of the four combinations.
    pub fn max_commutator_norm(&self) -> f64 {
        Combo::ALL
            .iter()
            .map(|&c| combo_commutator_norm(self.combo_operators(c)))
            .fold(0.0, f64::max)
    }
}

fn combo_commutator_norm(ops: [&OperatorMatrix; 3]) -> f64 {
    [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| linalg::commutator_norm(ops[i], ops[j]).expect("8x8"))
        .fold(0.0, f64::max)
}

/// Deviations of `<psi|tau tau tau|psi>` for the four combinations, with the
/// minus sign on xxx. Rejects any combination whose operators do not commute.
pub fn nonlocal_epsilon_report(s: &NonlocalSextet) -> Result<EpsilonReport> {
    let psi = ghz::ghz_state();
    let mut values = [0.0; 4];
    for combo in Combo::ALL {
        let ops = s.combo_operators(combo);
        let norm = combo_commutator_norm(ops);
        if norm > tolerance::COMMUTATOR {
            return Err(Error::NonCommuting {
                combo: combo.label(),
                norm,
            });
        }
        let product = ops[0].matmul(ops[1])?.matmul(ops[2])?;
        values[combo.index()] = linalg::expectation(&psi, &product)?;
    }
    Ok(EpsilonReport::from_correlations(values))
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumCheck {
    pub minus_one: usize,
    pub plus_one: usize,
    pub max_deviation: f64,
}

/// Counts eigenvalues near -1 and +1 and the largest distance from {-1, +1}.
pub fn spectrum_check(a: &OperatorMatrix) -> Result<SpectrumCheck> {
    let mut out = SpectrumCheck {
        minus_one: 0,
        plus_one: 0,
        max_deviation: 0.0,
    };
    for pair in linalg::hermitian_eigensystem(a)? {
        let dev_minus = (pair.value + 1.0).abs();
        let dev_plus = (pair.value - 1.0).abs();
        if dev_minus < dev_plus {
            out.minus_one += 1;
        } else {
            out.plus_one += 1;
        }
        out.max_deviation = out.max_deviation.max(dev_minus.min(dev_plus));
    }
    Ok(out)
}

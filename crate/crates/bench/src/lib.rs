//! Seeded fixtures shared by the benchmarks.

use mkclab_core::ghz::{DetectorTriplet, Direction};
use mkclab_core::linalg::{ComplexScalar, OperatorMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_direction<R: Rng>(rng: &mut R) -> Direction {
    let theta = rng.random_range(-1.0f64..=1.0).acos();
    Direction::new(theta, rng.random_range(0.0..std::f64::consts::TAU)).expect("finite angles")
}

pub fn random_triplets(n: usize, seed: u64) -> Vec<DetectorTriplet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| DetectorTriplet(std::array::from_fn(|_| random_direction(&mut rng))))
        .collect()
}

/// Dense Hermitian 8x8 matrix with uniform entries in [-1, 1].
pub fn random_hermitian8(seed: u64) -> OperatorMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = vec![ComplexScalar::new(0.0, 0.0); 64];
    for i in 0..8 {
        e[i * 8 + i] = ComplexScalar::new(rng.random_range(-1.0..=1.0), 0.0);
        for j in i + 1..8 {
            let z = ComplexScalar::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            e[i * 8 + j] = z;
            e[j * 8 + i] = z.conj();
        }
    }
    OperatorMatrix::from_row_major(8, e).expect("8x8")
}

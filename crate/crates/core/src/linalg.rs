//! Dense complex linear algebra on the qubit dimensions 2, 4 and 8.
//!
//! Matrices are immutable row-major values. Every operation returns a new
//! matrix; at dimension 8 the copies are negligible.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

/// Complex scalar used for all amplitudes and matrix entries.
pub type ComplexScalar = Complex64;

/// Largest supported Hilbert-space dimension (three qubits).
pub const MAX_DIM: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 | 8 => Ok(()),
        _ => Err(Error::UnsupportedDimension(dim)),
    }
}

fn all_finite(values: &[Complex64]) -> bool {
    values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Square complex matrix of dimension 2, 4 or 8, stored row-major.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl OperatorMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::EntryCount {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        if !all_finite(&entries) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            entries: vec![ZERO; dim * dim],
        })
    }

    pub fn pauli_x() -> Self {
        Self::two_by_two([ZERO, ONE, ONE, ZERO])
    }

    pub fn pauli_y() -> Self {
        Self::two_by_two([ZERO, -I, I, ZERO])
    }

    pub fn pauli_z() -> Self {
        Self::two_by_two([ONE, ZERO, ZERO, -ONE])
    }

    /// `n . sigma` for a (not necessarily unit) real 3-vector `n`.
    pub fn spin_component(n: [f64; 3]) -> Self {
        let [x, y, z] = n;
        Self::two_by_two([
            Complex64::new(z, 0.0),
            Complex64::new(x, -y),
            Complex64::new(x, y),
            Complex64::new(-z, 0.0),
        ])
    }

    fn two_by_two(entries: [Complex64; 4]) -> Self {
        Self {
            dim: 2,
            entries: entries.to_vec(),
        }
    }

    /// Diagonal matrix with real entries.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let mut m = Self::zeros(dim)?;
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite("diagonal"));
            }
            m.entries[i * dim + i] = Complex64::new(v, 0.0);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        Ok(Self {
            dim: n,
            entries: out,
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, |a, b| a - b)
    }

    fn zip(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.same_dim(rhs)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&a| a * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-entry modulus of `self - self^H`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.entry(i, j) - self.entry(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Applies the matrix to a vector of matching dimension.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        let n = self.dim;
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.entries[i * n + j] * v[j]).sum())
            .collect())
    }
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "OperatorMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.entry(i, j);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Normalized state vector of dimension 2, 4 or 8.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Normalizes `amplitudes` into a state.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        if !all_finite(&amplitudes) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::param("index", format!("{index} >= {dim}")));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Kronecker product. Entry `(i*dim_b + k, j*dim_b + l)` equals `a[i][j] * b[k][l]`,
/// so the left factor is the slowest-varying index.
pub fn tensor(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    let da = a.dim;
    let db = b.dim;
    let dim = da * db;
    if dim > MAX_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    let mut entries = vec![ZERO; dim * dim];
    for i in 0..da {
        for j in 0..da {
            let aij = a.entry(i, j);
            for k in 0..db {
                for l in 0..db {
                    entries[(i * db + k) * dim + (j * db + l)] = aij * b.entry(k, l);
                }
            }
        }
    }
    Ok(OperatorMatrix { dim, entries })
}

/// Conjugate transpose.
pub fn adjoint(a: &OperatorMatrix) -> OperatorMatrix {
    let n = a.dim;
    let mut entries = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[j * n + i] = a.entry(i, j).conj();
        }
    }
    OperatorMatrix { dim: n, entries }
}

/// Max-entry norm of `ab - ba`.
pub fn commutator_norm(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<f64> {
    Ok(a.matmul(b)?.sub(&b.matmul(a)?)?.max_abs())
}

/// Real part of `<psi|a|psi>`.
///
/// Rejects non-Hermitian `a` and fails if the raw form carries an imaginary
/// part above [`tolerance::EXPECTATION_IMAGINARY`].
pub fn expectation(psi: &StateVector, a: &OperatorMatrix) -> Result<f64> {
    let deviation = a.hermitian_deviation();
    if deviation > tolerance::HERMITIAN {
        return Err(Error::NotHermitian { deviation });
    }
    let raw = raw_expectation(psi, a)?;
    if raw.im.abs() > tolerance::EXPECTATION_IMAGINARY {
        return Err(Error::ImaginaryExpectation { imaginary: raw.im });
    }
    Ok(raw.re)
}

/// `<psi|a|psi>` without Hermiticity checks.
pub fn raw_expectation(psi: &StateVector, a: &OperatorMatrix) -> Result<Complex64> {
    let image = a.apply(psi.amplitudes())?;
    Ok(psi
        .amplitudes()
        .iter()
        .zip(&image)
        .map(|(p, q)| p.conj() * q)
        .sum())
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: StateVector,
}

fn off_diagonal_max(m: &[Complex64], n: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                worst = worst.max(m[i * n + j].norm());
            }
        }
    }
    worst
}

/// Full eigensystem of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Eigenvalues are returned in ascending order with orthonormal eigenvectors.
pub fn hermitian_eigensystem(a: &OperatorMatrix) -> Result<Vec<EigenPair>> {
    let deviation = a.hermitian_deviation();
    if deviation > tolerance::HERMITIAN {
        return Err(Error::NotHermitian { deviation });
    }
    let n = a.dim;
    // Work on the exactly Hermitian part.
    let mut m: Vec<Complex64> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            (a.entry(i, j) + a.entry(j, i).conj()) * 0.5
        })
        .collect();
    let mut v = OperatorMatrix::identity(n)?.entries;

    let mut sweeps = 0;
    while off_diagonal_max(&m, n) >= tolerance::JACOBI_OFF_DIAGONAL {
        if sweeps == tolerance::JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off_diagonal_max(&m, n),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut m, &mut v, n, p, q);
            }
        }
    }

    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|k| {
            let column: Vec<Complex64> = (0..n).map(|i| v[i * n + k]).collect();
            Ok(EigenPair {
                value: m[k * n + k].re,
                vector: StateVector::new(column)?,
            })
        })
        .collect::<Result<_>>()?;
    pairs.sort_by(|x, y| x.value.total_cmp(&y.value));
    Ok(pairs)
}

/// One two-sided rotation `m <- J^H m J`, `v <- v J` annihilating `m[p][q]`.
///
/// `J = D R` where `D` rotates the phase of `m[p][q]` onto the real axis and
/// `R` is the real symmetric Jacobi rotation for the resulting 2x2 block.
fn jacobi_rotate(m: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize) {
    let g = m[p * n + q];
    let magnitude = g.norm();
    if magnitude == 0.0 {
        return;
    }
    let phase = g / magnitude;
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    let theta = (aqq - app) / (2.0 * magnitude);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = phase.conj() * (-s);
    let jqq = phase.conj() * c;

    // Columns: m <- m J and v <- v J.
    for k in 0..n {
        let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
        m[k * n + p] = mkp * jpp + mkq * jqp;
        m[k * n + q] = mkp * jpq + mkq * jqq;
        let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
        v[k * n + p] = vkp * jpp + vkq * jqp;
        v[k * n + q] = vkp * jpq + vkq * jqq;
    }
    // Rows: m <- J^H m.
    for k in 0..n {
        let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
        m[p * n + k] = jpp.conj() * mpk + jqp.conj() * mqk;
        m[q * n + k] = jpq.conj() * mpk + jqq.conj() * mqk;
    }
    m[p * n + q] = ZERO;
    m[q * n + p] = ZERO;
    m[p * n + p].im = 0.0;
    m[q * n + q].im = 0.0;
}

/// `sum_k f(lambda_k) |v_k><v_k|` for a Hermitian matrix.
pub fn hermitian_function(
    a: &OperatorMatrix,
    f: impl Fn(f64) -> Complex64,
) -> Result<OperatorMatrix> {
    let n = a.dim;
    let mut entries = vec![ZERO; n * n];
    for pair in hermitian_eigensystem(a)? {
        let weight = f(pair.value);
        let vec = pair.vector.amplitudes();
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] += weight * vec[i] * vec[j].conj();
            }
        }
    }
    OperatorMatrix::from_row_major(n, entries)
}

/// Operator (spectral) norm of a Hermitian matrix: largest |eigenvalue|.
pub fn hermitian_operator_norm(a: &OperatorMatrix) -> Result<f64> {
    Ok(hermitian_eigensystem(a)?
        .iter()
        .map(|p| p.value.abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reconstruct(pairs: &[EigenPair], n: usize) -> OperatorMatrix {
        let mut entries = vec![ZERO; n * n];
        for p in pairs {
            let v = p.vector.amplitudes();
            for i in 0..n {
                for j in 0..n {
                    entries[i * n + j] += p.value * v[i] * v[j].conj();
                }
            }
        }
        OperatorMatrix::from_row_major(n, entries).unwrap()
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let i2 = OperatorMatrix::identity(2).unwrap();
        assert_eq!(
            tensor(&i2, &i2).unwrap(),
            OperatorMatrix::identity(4).unwrap()
        );
    }

    #[test]
    fn tensor_z_identity_on_basis_state() {
        let zi = tensor(
            &OperatorMatrix::pauli_z(),
            &OperatorMatrix::identity(2).unwrap(),
        )
        .unwrap();
        // |+1> (x) |-1> is index 0*2 + 1.
        let psi = StateVector::basis(4, 1).unwrap();
        let image = zi.apply(psi.amplitudes()).unwrap();
        assert_eq!(image, psi.amplitudes());
    }

    #[test]
    fn tensor_xx_entries() {
        let xx = tensor(&OperatorMatrix::pauli_x(), &OperatorMatrix::pauli_x()).unwrap();
        assert_eq!(xx.entry(0, 3), ONE);
        assert_eq!(xx.entry(3, 0), ONE);
        assert_eq!(xx.entry(1, 2), ONE);
        for i in 0..4 {
            assert_eq!(xx.entry(i, i), ZERO);
        }
    }

    #[test]
    fn tensor_rejects_overflow() {
        let i4 = OperatorMatrix::identity(4).unwrap();
        assert_eq!(tensor(&i4, &i4), Err(Error::UnsupportedDimension(16)));
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(OperatorMatrix::identity(3).is_err());
        assert!(OperatorMatrix::from_row_major(2, vec![ONE; 3]).is_err());
        assert!(OperatorMatrix::from_row_major(2, vec![c(f64::NAN, 0.0); 4]).is_err());
        assert_eq!(StateVector::new(vec![ZERO; 2]), Err(Error::ZeroNorm));
    }

    #[test]
    fn adjoint_cases() {
        let i8 = OperatorMatrix::identity(8).unwrap();
        assert_eq!(adjoint(&i8), i8);
        assert_eq!(
            adjoint(&OperatorMatrix::pauli_y()),
            OperatorMatrix::pauli_y()
        );
        let upper =
            OperatorMatrix::from_row_major(2, vec![c(1.0, 2.0), c(3.0, -4.0), ZERO, c(5.0, 6.0)])
                .unwrap();
        let lower = adjoint(&upper);
        assert_eq!(lower.entry(0, 1), ZERO);
        assert_eq!(lower.entry(1, 0), c(3.0, 4.0));
        assert_eq!(lower.entry(0, 0), c(1.0, -2.0));
        assert_eq!(lower.entry(1, 1), c(5.0, -6.0));
        assert_eq!(adjoint(&lower), upper);
    }

    #[test]
    fn eigenvalues_of_simple_operators() {
        let sx = hermitian_eigensystem(&OperatorMatrix::pauli_x()).unwrap();
        assert!((sx[0].value + 1.0).abs() < 1e-12);
        assert!((sx[1].value - 1.0).abs() < 1e-12);

        let id = hermitian_eigensystem(&OperatorMatrix::identity(8).unwrap()).unwrap();
        assert_eq!(id.len(), 8);
        assert!(id.iter().all(|p| (p.value - 1.0).abs() < 1e-12));

        let n = OperatorMatrix::spin_component([0.6, 0.8, 0.0]);
        let pairs = hermitian_eigensystem(&n).unwrap();
        assert!((pairs[0].value + 1.0).abs() < 1e-12);
        assert!((pairs[1].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigensystem_rejects_non_hermitian() {
        let upper = OperatorMatrix::from_row_major(2, vec![ONE, ONE, ZERO, ONE]).unwrap();
        assert!(matches!(
            hermitian_eigensystem(&upper),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eigensystem_reconstructs_dense_hermitian() {
        // Fixed dense Hermitian 8x8 with degenerate-free spectrum.
        let n = 8;
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for j in i..n {
                let v = if i == j {
                    c(i as f64 * 0.7 - 2.0, 0.0)
                } else {
                    c(
                        ((i * 7 + j * 3) % 5) as f64 * 0.3 - 0.6,
                        ((i + 2 * j) % 3) as f64 * 0.4 - 0.4,
                    )
                };
                entries[i * n + j] = v;
                entries[j * n + i] = v.conj();
            }
        }
        let a = OperatorMatrix::from_row_major(n, entries).unwrap();
        let pairs = hermitian_eigensystem(&a).unwrap();
        let back = reconstruct(&pairs, n);
        assert!(back.sub(&a).unwrap().max_abs() < tolerance::EIGEN_RECONSTRUCTION);
        for w in pairs.windows(2) {
            assert!(w[0].value <= w[1].value);
        }
    }

    #[test]
    fn expectation_cases() {
        let up = StateVector::basis(2, 0).unwrap();
        assert!((expectation(&up, &OperatorMatrix::pauli_z()).unwrap() - 1.0).abs() < 1e-15);
        assert!(expectation(&up, &OperatorMatrix::pauli_x()).unwrap().abs() < 1e-15);
        let plus = StateVector::new(vec![ONE, ONE]).unwrap();
        assert!((expectation(&plus, &OperatorMatrix::pauli_x()).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            expectation(&plus, &OperatorMatrix::identity(4).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn commutator_cases() {
        let sx = OperatorMatrix::pauli_x();
        let sy = OperatorMatrix::pauli_y();
        let i2 = OperatorMatrix::identity(2).unwrap();
        assert_eq!(commutator_norm(&sx, &sx).unwrap(), 0.0);
        assert!((commutator_norm(&sx, &sy).unwrap() - 2.0).abs() < 1e-15);
        let a = tensor(&sx, &i2).unwrap();
        let b = tensor(&i2, &sy).unwrap();
        assert_eq!(commutator_norm(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn hermitian_function_exponentiates_to_unitary() {
        let h = tensor(&OperatorMatrix::pauli_x(), &OperatorMatrix::pauli_y()).unwrap();
        let u = hermitian_function(&h, |l| Complex64::from_polar(1.0, 0.3 * l)).unwrap();
        let uu = u.matmul(&adjoint(&u)).unwrap();
        assert!(
            uu.sub(&OperatorMatrix::identity(4).unwrap())
                .unwrap()
                .max_abs()
                < 1e-12
        );
        // exp(i t H) = cos t + i sin t H for an involution H.
        let expected = OperatorMatrix::identity(4)
            .unwrap()
            .scale(c(0.3f64.cos(), 0.0))
            .add(&h.scale(c(0.0, 0.3f64.sin())))
            .unwrap();
        assert!(u.sub(&expected).unwrap().max_abs() < 1e-12);
    }
}

//! Dense complex matrices for small registers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::pauli::{PauliString, PauliSum};
use crate::noise::Pauli;

pub type Matrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn letter_matrix(p: Pauli) -> [[Complex64; 2]; 2] {
    match p {
        Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
        Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
        Pauli::Y => [[ZERO, -I], [I, ZERO]],
        Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

/// Dense matrix of a Pauli string; qubit 0 is the most significant bit.
/// Every row of a Pauli string has exactly one nonzero entry, so the matrix
/// is filled directly instead of through Kronecker products.
pub fn pauli_to_dense(p: &PauliString) -> Matrix {
    let n = p.n_qubits();
    let dim = 1usize << n;
    let mut m = Matrix::zeros(dim, dim);
    for row in 0..dim {
        let mut col = 0usize;
        let mut value = p.phase_value();
        for (q, &letter) in p.letters().iter().enumerate() {
            let shift = n - 1 - q;
            let bit = (row >> shift) & 1;
            let lm = letter_matrix(letter);
            let flip = matches!(letter, Pauli::X | Pauli::Y);
            let cbit = if flip { bit ^ 1 } else { bit };
            value *= lm[bit][cbit];
            col |= cbit << shift;
        }
        m[(row, col)] = value;
    }
    m
}

pub fn pauli_sum_to_dense(s: &PauliSum, n_qubits: usize) -> Matrix {
    let dim = 1usize << n_qubits;
    let mut m = Matrix::zeros(dim, dim);
    for (c, p) in s.terms() {
        m += pauli_to_dense(p) * *c;
    }
    m
}

pub fn frobenius(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `min over |λ| = 1 of ‖A − λB‖_F`.
pub fn phase_invariant_distance(a: &Matrix, b: &Matrix) -> f64 {
    let inner: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let lambda = if inner.norm() > 0.0 { inner / inner.norm() } else { Complex64::new(1.0, 0.0) };
    frobenius(&(a - b * lambda))
}

/// A matrix checked to be unitary on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseUnitary {
    matrix: Matrix,
}

impl DenseUnitary {
    pub const UNITARITY_TOLERANCE: f64 = 1e-12;

    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            matrix: Matrix::identity(dim, dim),
        }
    }

    /// Returns `None` when `‖U†U − I‖_F` exceeds the tolerance.
    pub fn from_matrix(matrix: Matrix) -> Option<Self> {
        let u = Self { matrix };
        (u.unitarity_defect() <= Self::UNITARITY_TOLERANCE).then_some(u)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn unitarity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        frobenius(&(self.matrix.adjoint() * &self.matrix - Matrix::identity(n, n)))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn then(&self, next: &DenseUnitary) -> Self {
        Self {
            matrix: &self.matrix * &next.matrix,
        }
    }

    /// Left-to-right matrix product of `factors`.
    pub fn product<'a>(n_qubits: usize, factors: impl IntoIterator<Item = &'a DenseUnitary>) -> Self {
        factors
            .into_iter()
            .fold(Self::identity(n_qubits), |acc, u| acc.then(u))
    }
}

/// `exp(z·P)` for a Pauli string `P`, using `(phase·Q)² = phase²` with `Q² = I`.
pub fn exp_pauli(z: Complex64, p: &PauliString) -> Matrix {
    let w = z * p.phase_value();
    let q = pauli_to_dense(&p.unsigned());
    let dim = q.nrows();
    Matrix::identity(dim, dim) * w.cosh() + q * w.sinh()
}

/// `exp(−iθP) = cos θ·I − i sin θ·P` for a Hermitian Pauli string.
pub fn exp_pauli_rotation(theta: f64, p: &PauliString) -> DenseUnitary {
    assert!(p.is_hermitian(), "rotation axis must be Hermitian, got {p}");
    let dim = 1usize << p.n_qubits();
    let m = Matrix::identity(dim, dim) * Complex64::new(theta.cos(), 0.0) - pauli_to_dense(p) * (I * theta.sin());
    DenseUnitary { matrix: m }
}

/// `exp(−i t H)` for Hermitian `H` via eigendecomposition.
pub fn expm_hermitian(h: &Matrix, t: f64) -> DenseUnitary {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let phases = eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -t * l));
    let v = &eig.eigenvectors;
    DenseUnitary {
        matrix: v * Matrix::from_diagonal(&phases) * v.adjoint(),
    }
}

//! Edge and vertex operators of one plaquette, their algebra, and dense checks
//! of the plaquette diagonalization circuit.
//!
//! Qubits 0..4 are vertices 1..4 of the plaquette, qubit 4 is the auxiliary.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{
    exp_pauli, exp_pauli_rotation, expm_hermitian, frobenius, pauli_sum_to_dense, pauli_to_dense,
    phase_invariant_distance, DenseUnitary, Matrix,
};
use super::pauli::{PauliString, PauliSum};
use crate::error::{invalid, Result};
use crate::noise::Pauli;

pub const N_QUBITS: usize = 5;
pub const AUX: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    /// Vertex parity `V_j`.
    V(u8),
    /// Edge operator `E_jk`.
    E(u8, u8),
}

impl Operator {
    fn vertices(self) -> Vec<u8> {
        match self {
            Operator::V(j) => vec![j],
            Operator::E(j, k) => vec![j, k],
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::V(j) => write!(f, "V{j}"),
            Operator::E(j, k) => write!(f, "E{j}{k}"),
        }
    }
}

fn p(s: &str) -> PauliString {
    PauliString::parse(s).expect("valid Pauli literal")
}

/// Images of the plaquette's vertex and edge operators.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaquetteMap {
    entries: Vec<(Operator, PauliString)>,
}

/// Boundary edges in the orientation used by the Hamiltonian.
pub const BOUNDARY_EDGES: [(u8, u8); 4] = [(2, 1), (3, 2), (4, 3), (1, 4)];

impl PlaquetteMap {
    pub fn entries(&self) -> &[(Operator, PauliString)] {
        &self.entries
    }

    pub fn get(&self, op: Operator) -> Option<&PauliString> {
        self.entries.iter().find(|(o, _)| *o == op).map(|(_, s)| s)
    }

    pub fn vertex(&self, j: u8) -> PauliString {
        self.get(Operator::V(j)).cloned().expect("vertex in map")
    }

    /// `E_jk`, using `E_kj = −E_jk` when only the reverse orientation is stored.
    pub fn edge(&self, j: u8, k: u8) -> PauliString {
        if let Some(s) = self.get(Operator::E(j, k)) {
            return s.clone();
        }
        self.get(Operator::E(k, j))
            .map(PauliString::negate)
            .unwrap_or_else(|| panic!("edge E{j}{k} not in map"))
    }

    /// Copy with one letter of one operator replaced.
    pub fn with_letter(&self, op: Operator, qubit: usize, letter: Pauli) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(o, s)| (*o, if *o == op { s.with_letter(qubit, letter) } else { s.clone() }))
            .collect();
        Self { entries }
    }
}

/// Vertex parities on the vertex qubits; boundary edges act on both endpoints
/// and the auxiliary; the two diagonals are products of boundary edges.
pub fn plaquette_operator_map() -> PlaquetteMap {
    let mut entries: Vec<(Operator, PauliString)> = (1..=4u8)
        .map(|j| (Operator::V(j), PauliString::single(N_QUBITS, (j - 1) as usize, Pauli::Z)))
        .collect();
    let e21 = p("-YXIIY");
    let e32 = p("-IXYIX");
    let e43 = p("-IIYXY");
    let e14 = p("+YIIXX");
    let e31 = e32.mul(&e21).scale_phase(1);
    let e24 = e21.mul(&e14).scale_phase(1);
    entries.extend([
        (Operator::E(2, 1), e21),
        (Operator::E(3, 2), e32),
        (Operator::E(4, 3), e43),
        (Operator::E(1, 4), e14),
        (Operator::E(3, 1), e31),
        (Operator::E(2, 4), e24),
    ]);
    PlaquetteMap { entries }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationCheck {
    pub description: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    fn push(&mut self, description: String, passed: bool) {
        self.checks.push(RelationCheck { description, passed });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Algebraic checks: Hermitian, self-inverse and traceless images; operators
/// anticommute exactly when they share one vertex; the boundary loop is +I.
pub fn check_majorana_relations(map: &PlaquetteMap) -> RelationReport {
    let mut report = RelationReport::default();
    let identity = PauliString::identity(N_QUBITS);
    for (op, s) in map.entries() {
        report.push(format!("{op} = {s} is Hermitian"), s.is_hermitian());
        report.push(format!("{op}² = I"), s.mul(s) == identity);
        report.push(format!("{op} is traceless"), !s.is_identity_letters());
    }
    let entries = map.entries();
    for (i, (a, sa)) in entries.iter().enumerate() {
        for (b, sb) in &entries[i + 1..] {
            let va = a.vertices();
            let shared = b.vertices().iter().filter(|v| va.contains(v)).count();
            let expect_anti = shared == 1;
            let anti = !sa.commutes_with(sb);
            let verb = if expect_anti { "anticommute" } else { "commute" };
            report.push(format!("{a} and {b} {verb}"), anti == expect_anti);
        }
    }
    let lp = loop_product(map);
    report.push(format!("E12·E23·E34·E41 = {lp} is +I"), lp == identity);
    report
}

/// `E12·E23·E34·E41`.
pub fn loop_product(map: &PlaquetteMap) -> PauliString {
    [(1, 2), (2, 3), (3, 4), (4, 1)]
        .iter()
        .fold(PauliString::identity(N_QUBITS), |acc, &(j, k)| acc.mul(&map.edge(j, k)))
}

/// `H_P = −t Σ (1/2i)(E_jk V_k + V_j E_jk)` over the boundary edges.
pub fn build_plaquette_hamiltonian(map: &PlaquetteMap, t_coupling: f64) -> PauliSum {
    let mut h = PauliSum::new();
    if t_coupling == 0.0 {
        return h;
    }
    let c = Complex64::new(-t_coupling, 0.0) / Complex64::new(0.0, 2.0);
    for (j, k) in BOUNDARY_EDGES {
        let e = map.edge(j, k);
        h.add_term(c, &e.mul(&map.vertex(k)));
        h.add_term(c, &map.vertex(j).mul(&e));
    }
    h.prune(1e-15);
    h
}

fn rot(theta: f64, s: &str) -> DenseUnitary {
    exp_pauli_rotation(theta, &p(s))
}

fn pauli_unitary(s: &str) -> DenseUnitary {
    DenseUnitary::from_matrix(pauli_to_dense(&p(s))).expect("Pauli strings are unitary")
}

/// `F₃₁†`.
pub fn f31_dagger() -> DenseUnitary {
    DenseUnitary::product(
        N_QUBITS,
        &[rot(FRAC_PI_8, "XIYIZ"), rot(-FRAC_PI_8, "YIXIZ"), rot(FRAC_PI_4, "IIZII")],
    )
}

/// `F₂₄†`.
pub fn f24_dagger() -> DenseUnitary {
    DenseUnitary::product(
        N_QUBITS,
        &[rot(-FRAC_PI_8, "IXIYZ"), rot(FRAC_PI_8, "IYIXZ"), rot(FRAC_PI_4, "IZIII")],
    )
}

/// `C†`, the Clifford mapping the diagonal hopping pair onto `Z₂` and `Z₃`.
pub fn clifford_dagger() -> DenseUnitary {
    rot(-FRAC_PI_4, "IYXIX").then(&pauli_unitary("IXIII"))
}

/// Sign conventions for comparing evolution and circuit: the evolution is
/// `exp(−i·hamiltonian_sign·θ·H_P/t)` and the circuit core is
/// `exp(i·rotation_sign·θ·Z₂) exp(i·rotation_sign·θ·Z₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Convention {
    pub hamiltonian_sign: i8,
    pub rotation_sign: i8,
}

impl Convention {
    pub const STANDARD: Convention = Convention {
        hamiltonian_sign: 1,
        rotation_sign: 1,
    };

    pub const ALL: [Convention; 4] = [
        Convention { hamiltonian_sign: 1, rotation_sign: 1 },
        Convention { hamiltonian_sign: 1, rotation_sign: -1 },
        Convention { hamiltonian_sign: -1, rotation_sign: 1 },
        Convention { hamiltonian_sign: -1, rotation_sign: -1 },
    ];
}

/// `F₃₁ F₂₄ C e^{iθZ₂} e^{iθZ₃} C† F₂₄† F₃₁†`.
pub fn build_diagonalization_circuit(theta: f64, rotation_sign: i8) -> DenseUnitary {
    let s = rotation_sign as f64;
    let (f31d, f24d, cd) = (f31_dagger(), f24_dagger(), clifford_dagger());
    let core = rot(-s * theta, "IZIII").then(&rot(-s * theta, "IIZII"));
    DenseUnitary::product(
        N_QUBITS,
        &[f31d.adjoint(), f24d.adjoint(), cd.adjoint(), core, cd, f24d, f31d],
    )
}

/// Phase-invariant distance between the plaquette evolution and the circuit.
pub fn verify_plaquette_evolution_with(map: &PlaquetteMap, t_coupling: f64, theta: f64, conv: Convention) -> Result<f64> {
    if !(t_coupling.is_finite() && t_coupling != 0.0) {
        return Err(invalid("t_coupling", "must be finite and nonzero"));
    }
    let h = pauli_sum_to_dense(&build_plaquette_hamiltonian(map, t_coupling), N_QUBITS);
    let tau = conv.hamiltonian_sign as f64 * theta / t_coupling;
    let lhs = expm_hermitian(&h, tau);
    let rhs = build_diagonalization_circuit(theta, conv.rotation_sign);
    Ok(phase_invariant_distance(lhs.matrix(), rhs.matrix()))
}

pub fn verify_plaquette_evolution(t_coupling: f64, theta: f64) -> Result<f64> {
    verify_plaquette_evolution_with(&plaquette_operator_map(), t_coupling, theta, Convention::STANDARD)
}

/// Deviation for every sign convention at one angle.
pub fn scan_conventions(t_coupling: f64, theta: f64) -> Result<Vec<(Convention, f64)>> {
    let map = plaquette_operator_map();
    Convention::ALL
        .iter()
        .map(|&c| Ok((c, verify_plaquette_evolution_with(&map, t_coupling, theta, c)?)))
        .collect()
}

/// `‖C Z₂ C† − X₂X₃X_aux‖` and `‖C Z₃ C† − Y₂Y₃X_aux‖`.
pub fn clifford_conjugation_deviations() -> (f64, f64) {
    let cd = clifford_dagger();
    let c = cd.adjoint();
    let conj = |s: &str| c.matrix() * pauli_to_dense(&p(s)) * cd.matrix();
    (
        frobenius(&(conj("IZIII") - pauli_to_dense(&p("IXXIX")))),
        frobenius(&(conj("IIZII") - pauli_to_dense(&p("IYYIX")))),
    )
}

/// `F_jk = e^{−iπ/4·V_j} e^{π/8·V_j E_jk} e^{π/8·E_jk V_k}`.
pub fn fourier_gate(map: &PlaquetteMap, j: u8, k: u8) -> DenseUnitary {
    let e = map.edge(j, k);
    let vj = map.vertex(j);
    let vk = map.vertex(k);
    let a = exp_pauli_rotation(FRAC_PI_4, &vj);
    let b = exp_pauli(Complex64::new(FRAC_PI_8, 0.0), &vj.mul(&e));
    let c = exp_pauli(Complex64::new(FRAC_PI_8, 0.0), &e.mul(&vk));
    DenseUnitary::from_matrix(a.matrix() * b * c).expect("fermionic Fourier gate is unitary")
}

/// Checks `F₂₃ e^{iθn₂} e^{−iθn₃} F₂₃† = exp(θ/2·(E₂₃V₃ + V₂E₂₃))`.
pub fn verify_fourier_identity(theta: f64) -> f64 {
    let map = plaquette_operator_map();
    let f = fourier_gate(&map, 2, 3);
    // e^{iθn} = e^{iθ/2}·e^{−iθZ/2}; the scalar factors cancel between n₂ and n₃.
    let inner = rot(theta / 2.0, "IZIII").then(&rot(-theta / 2.0, "IIZII"));
    let lhs: Matrix = f.matrix() * inner.matrix() * f.adjoint().matrix();
    let e = map.edge(2, 3);
    let half = Complex64::new(theta / 2.0, 0.0);
    let rhs = exp_pauli(half, &e.mul(&map.vertex(3))) * exp_pauli(half, &map.vertex(2).mul(&e));
    phase_invariant_distance(&lhs, &rhs)
}

/// Summary of all dense and algebraic checks.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaquetteVerification {
    pub relations: RelationReport,
    pub mutation_detected: bool,
    pub clifford_deviations: (f64, f64),
    pub circuit_identity_at_zero: f64,
    pub circuit_unitarity: f64,
    pub evolution: Vec<(f64, f64)>,
    pub fourier: Vec<(f64, f64)>,
    pub tolerance: f64,
}

impl PlaquetteVerification {
    pub fn max_evolution_deviation(&self) -> f64 {
        self.evolution.iter().map(|&(_, d)| d).fold(0.0, f64::max)
    }

    pub fn max_fourier_deviation(&self) -> f64 {
        self.fourier.iter().map(|&(_, d)| d).fold(0.0, f64::max)
    }

    pub fn all_passed(&self) -> bool {
        self.relations.all_passed()
            && self.mutation_detected
            && self.clifford_deviations.0 <= 1e-12
            && self.clifford_deviations.1 <= 1e-12
            && self.circuit_identity_at_zero <= 1e-12
            && self.circuit_unitarity <= 1e-12
            && self.max_evolution_deviation() <= self.tolerance
            && self.max_fourier_deviation() <= self.tolerance
    }
}

/// Runs every check with `angles` uniform angles in `(0, π)`.
pub fn verify_all(angles: usize, seed: u64, tolerance: f64) -> Result<PlaquetteVerification> {
    let map = plaquette_operator_map();
    let mutated = map.with_letter(Operator::E(2, 1), 0, Pauli::X);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let thetas: Vec<f64> = (0..angles)
        .map(|_| rng.random_range(f64::EPSILON..std::f64::consts::PI))
        .collect();
    let evolution = thetas
        .iter()
        .map(|&th| Ok((th, verify_plaquette_evolution(1.0, th)?)))
        .collect::<Result<Vec<_>>>()?;
    let fourier = thetas.iter().map(|&th| (th, verify_fourier_identity(th))).collect();
    let at_zero = build_diagonalization_circuit(0.0, 1);
    let dim = 1 << N_QUBITS;
    Ok(PlaquetteVerification {
        relations: check_majorana_relations(&map),
        mutation_detected: !check_majorana_relations(&mutated).all_passed(),
        clifford_deviations: clifford_conjugation_deviations(),
        circuit_identity_at_zero: frobenius(&(at_zero.matrix() - Matrix::identity(dim, dim))),
        circuit_unitarity: build_diagonalization_circuit(0.37, 1).unitarity_defect(),
        evolution,
        fourier,
        tolerance,
    })
}

//! Pauli algebra and dense verification of the single-plaquette
//! diagonalization used by the hopping sub-evolutions.

pub mod dense;
pub mod pauli;
pub mod verify;

pub use dense::{exp_pauli_rotation, DenseUnitary};
pub use pauli::{PauliString, PauliSum};
pub use verify::{
    build_diagonalization_circuit, build_plaquette_hamiltonian, check_majorana_relations, plaquette_operator_map,
    verify_all, verify_fourier_identity, verify_plaquette_evolution, Operator, PlaquetteMap, PlaquetteVerification,
};

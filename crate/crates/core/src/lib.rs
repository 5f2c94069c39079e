//! Complexity classification of 2-local qubit Hamiltonian problems, perturbative
//! gadget compilation, and exact-diagonalization checks of both.

pub mod classifier;
pub mod error;
pub mod gadgets;
pub mod instance;
pub mod linalg;
pub mod normal_form;
pub mod oracles;
pub mod pauli;
pub mod spectrum;

pub use error::{Error, ErrorKind, Result};
pub use normal_form::{
    common_diagonalizer, conjugate_local, normal_form_antisymmetric, normal_form_symmetric, su2_from_so3,
    test_local_diagonalizable, tim_axis_test, AntisymmetricNormalForm, LocalRotation, SymmetricNormalForm,
};
pub use pauli::{
    correlation_matrix, dense_from_pauli, locality, pauli_decompose, pauli_rank, swap_symmetrize, CorrelationData,
    PauliTable, K_MAX, RANK_TOL,
};
pub use classifier::{classify, classify_bare, classify_with_local_terms, strip_local_parts, Classification, Label, Mode, Rule, Witness};
pub use instance::{read_instance, read_interaction_set, write_instance, AssembledOperator, HamiltonianInstance, Interaction, PlacedTerm, Thresholds, Violation, DENSE_MAX, WEIGHT_MAX};
pub use spectrum::{effective_distance, eigensystem, ground_energy, low_energy_block, self_energy, EigenSystem, LowEnergyBlock, SupportedOperator, Verdict, EIG_TOL, GAP_MIN};

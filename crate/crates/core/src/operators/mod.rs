//! Dense linear algebra on `(C^d)^{⊗t} ⊗ E` and constructors for the
//! permutation, phase, subsystem-permutation, distinct-subspace, Haar and
//! Clifford operators.

mod clifford;
mod constructors;
mod dense;
mod haar;

pub use clifford::{
    apply_pauli, canonicalize_phase, enumerate_cliffords, pauli_matrix, phase_class_key,
    sample_clifford, CliffordElement, MAX_DENSE_QUBITS,
};
pub use constructors::{
    distinct_mask, distinct_projector, falling_factorial, is_distinct_tuple, perm_op, phase_op,
    subsystem_perm_images, subsystem_perm_op, BooleanFunction, DistinctProjector, PermutationD,
};
pub use dense::{
    conjugate_registers, hermitian_eigenvalues, schatten1_norm, trace_distance,
    trace_norm_upper_bound, CMatrix, CVector, DenseOperator, DensityMatrix, StateVector, C64, ONE,
    ZERO,
};
pub use haar::{sample_haar_matrix, sample_haar_state, sample_haar_unitary};

//! Finite groups, their (projective) unitary representations and block
//! decompositions, and symplectic subgroup combinatorics.

pub mod finite;
pub mod rep;
pub mod symplectic;

pub use finite::FiniteGroupSpec;
pub use rep::{
    build_block_rep, build_cyclic_shift_rep, build_diagonal_character_rep, build_weyl_heisenberg, decompose_abelian,
    symmetric3_irreps, verify_decomposition, Cocycle, IrrepBlock, IrrepDecomposition, ProjectiveUnitaryRep,
};
pub use symplectic::{
    count_commutative_subgroups, count_maximal_simplified, enumerate_commutative_subgroups, SymplecticSubspaceSpec,
};

//! Combinatorics and representation theory of the symmetric group `S_t`.

mod characters;
mod partition;
mod perm;
mod young;

pub use characters::{character, character_of_cycle_type, content_product, specht_dim, weyl_dim};
pub use partition::{partitions, Partition, MAX_PARTITION_SIZE};
pub use perm::{all_permutations, factorial, PermutationT};
pub use young::{
    schur_orthogonality_error, standard_tableaux, young_orthogonal_rep, IrrepMatrices,
    StandardTableau, MAX_IRREP_DEGREE,
};

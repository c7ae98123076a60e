//! Exact counting and provably uniform random generation for phylogenetic
//! trees fixed by a permutation, and for tanglegrams and tangled chains.
//!
//! A phylogenetic tree is a rooted binary tree with unordered children and
//! distinctly labelled leaves. Relabelling through a permutation acts on
//! these trees; this crate counts the trees fixed by a permutation in closed
//! form, draws them uniformly at random in linear time, and extends both to
//! tangled chains (orbits of tree tuples under simultaneous relabelling).
//! All arithmetic is exact: big integers and big rationals throughout, and
//! discrete draws are performed by exact integer comparison, never floating
//! point.
//!
//! Every counting formula and sampler is certified at small sizes by the
//! brute-force [`oracle`] module, which enumerates trees and orbits
//! exhaustively.

pub mod counting;
pub mod error;
pub mod newick;
pub mod oracle;
pub mod partition;
pub mod perm;
pub mod sampler;
pub mod tree;
pub mod verify;

pub use counting::{
    binary_partitions, centralizer_size, count_chains, count_fixed_trees, ExactRational,
    PartitionWeightTable, SinglePartWeight,
};
pub use error::{Error, Result};
pub use newick::{from_newick, to_newick};
pub use partition::Partition;
pub use perm::Permutation;
pub use sampler::{
    canonical_permutation, insert_cycle, remove_largest_cycle, sample_chain, sample_fixed_tree,
    sample_partition, unique_single_cycle_tree, RandomSource, TangledChain,
};
pub use tree::{EdgeRef, Label, Node, PhyloTree};

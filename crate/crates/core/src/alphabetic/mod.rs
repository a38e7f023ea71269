//! The alphabetic tree problem: weighted external path length over ordered
//! leaves, the Hu-Tucker solver and two independent oracles.

mod hu_tucker;
mod oracle;
mod tree;

pub use hu_tucker::{
    hu_tucker, hu_tucker_phase1, phase1_path, symbolic_phase1, Phase1Run, SymbolicRun, TieBreak,
    TiePolicy,
};
pub use oracle::{brute_force_optimal, dp_optimal_cost, enumerate_trees, MAX_ENUMERATION_LEAVES};
pub use tree::{reconstruct_from_depths, tree_cost, AlphabeticTree, SolveResult};

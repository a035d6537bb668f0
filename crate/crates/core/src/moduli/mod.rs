//! Moduli fans of rational tropical curves with marked leaves.

pub mod chart;
pub mod fan;
pub mod marking;
pub mod quotient;
pub mod tree;

pub use chart::{compatible, ModuliChart, ModuliPoint, Split};
pub use fan::{
    forgetful, forgetful_fibre, forgetful_fibre_in, forgetful_linear, kn_isomorphism, maximal_split_systems, moduli_fan,
    moduli_fan_in, moduli_smooth_chart, KnIsomorphism,
};
pub use marking::{default_i0, marking_section, marking_section_in, split_basis, MarkingSection, SplitBasis};
pub use tree::{parse_newick, parse_newick_in, random_tree, MarkedTree};

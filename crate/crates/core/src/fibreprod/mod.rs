//! Fibre products over smooth targets and the modification description of moduli fans.

pub mod modification;
pub mod product;

pub use modification::{
    deletion_function, verify_deletion_contraction, verify_moduli_modification, DeletionReport, ModificationReport,
};
pub use product::{check_fibre_law, diagonal, fibre_product, sample_points, solve_weights, FibreProduct};

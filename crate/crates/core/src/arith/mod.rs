pub mod lattice;
pub mod linalg;
pub mod rat;

pub use rat::{QVec, Rat};

//! Tropical intersection theory on balanced polyhedral complexes, with tools for tropical
//! moduli spaces of rational curves and families of such curves.

pub mod arith;
pub mod error;
pub mod families;
pub mod fibreprod;
pub mod intersection;
pub mod matroid;
pub mod moduli;
pub mod par;
pub mod polyhedral;

pub use arith::{QVec, Rat};
pub use error::{Error, Result};

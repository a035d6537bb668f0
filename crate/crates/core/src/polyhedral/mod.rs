pub mod cell;
pub mod complex;
pub mod cone;
pub mod json;
pub mod map;
pub mod normal;
pub mod ops;

pub use cell::{Cell, CellKey, Halfspace, Hyperplane};
pub use complex::{CodimOne, FaceLattice, WeightedComplex};
pub use map::{AffineMap, PLMap};
pub use normal::normal_vector;

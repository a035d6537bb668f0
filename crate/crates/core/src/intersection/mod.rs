pub mod divisor;
pub mod expr;
pub mod fibre;

pub use divisor::{divisor, divisor_sequence, linearize, modification, power_divisor, pullback_function, RationalFunction};
pub use expr::{parse_expr, Expr};
pub use fibre::{covered_by, point_cycle, point_fibre, point_fibre_with, verify_cutting, SmoothChart, SmoothFactor};

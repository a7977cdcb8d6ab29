//! Complete-domain emergent evolution: characteristic coefficients of the
//! one-period operator, the quadratic-truncation eigenvalue and the
//! small-variation coefficient table used as ground truth.

mod emergent;
mod symbol;
mod table;

pub use emergent::{char_coeff, char_coeffs, lambda0_quadratic, lambda0_series, EmergentCoefficients};
pub use symbol::SymbolValue;
pub use table::{g0_coefficients, g0_small_eta, quadratic_table, QuadraticCoefficientTable};

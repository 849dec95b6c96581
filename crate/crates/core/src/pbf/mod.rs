//! Pseudo-Boolean polynomials, binary encodings and penalty constraints.

mod encoding;
pub mod io;
mod logapprox;
mod penalty;
mod poly;

pub use encoding::{encode_value, nearest_bits, BinaryEncoding, Projection};
pub use logapprox::{
    ln_1mx_grid_error, ln_1mx_poly, ln_x_grid_error, ln_x_poly, GridError, LogApproxCoefficients,
};
pub use penalty::{add_penalty, PenaltySpec};
pub use poly::{canonical_vars, poly_add, poly_mul, Polynomial, VarSet};

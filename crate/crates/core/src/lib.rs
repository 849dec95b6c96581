//! Dynamic programming through annealing.
//!
//! The crate is organised as a compilation pipeline:
//!
//! * [`bqm`]: binary quadratic models (Ising and QUBO forms), energy
//!   evaluation, conversions, problem graphs and an exhaustive oracle.
//! * [`pbf`]: multilinear pseudo-Boolean polynomials, binary encodings of
//!   real parameters, logarithm approximations and penalty constraints.
//! * [`quadratize`]: degree reduction of polynomials to QUBO form.
//! * [`anneal`]: annealing schedules and samplers: an exact state-vector
//!   simulator, a seeded heuristic annealer, a sequential greedy oracle and
//!   the QPU timing model.
//! * [`experiments`]: the two-spin Ising example and two small problems
//!   that need more than one annealing cycle.
//! * [`rbc`]: the real business cycle model, its closed form, the policy and
//!   valuation objectives and the parametric policy iteration drivers.
//!
//! Model types are generic over the coefficient type through [`Scalar`];
//! the aliases below fix it to `f64` (or `f32`) for everyday use.

pub mod anneal;
pub mod bqm;
mod error;
pub mod experiments;
mod linalg;
pub mod pbf;
pub mod quadratize;
pub mod rbc;
mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use bqm::{BinaryState, SpinState};

/// Ising model with `f64` coefficients.
pub type Ising = bqm::IsingModel<f64>;
/// QUBO model with `f64` coefficients.
pub type Qubo = bqm::QuboModel<f64>;
/// Pseudo-Boolean polynomial with `f64` coefficients.
pub type Pbf = pbf::Polynomial<f64>;
/// Binary encoding of a real parameter with an `f64` scale.
pub type Encoding = pbf::BinaryEncoding<f64>;
/// Result of a quadratization with `f64` coefficients.
pub type Reduction = quadratize::ReductionResult<f64>;

/// Single-precision variants.
pub type IsingF32 = bqm::IsingModel<f32>;
pub type QuboF32 = bqm::QuboModel<f32>;
pub type PbfF32 = pbf::Polynomial<f32>;

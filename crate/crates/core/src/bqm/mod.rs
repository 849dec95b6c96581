//! Binary quadratic models in Ising and QUBO form.

mod brute;
mod graph;
pub mod io;
mod matrix;
mod model;
mod state;

pub use brute::{
    brute_force, exhaustive_min, BruteForceOptions, SpectrumResult, DEFAULT_MAX_VARS,
    SPECTRUM_MAX_VARS,
};
pub use graph::{graph_of, ProblemGraph};
pub use matrix::QuboMatrix;
pub use model::{
    ising_energy, ising_to_qubo, qubo_energy, qubo_to_ising, IsingModel, QuadraticModel, QuboModel,
};
pub use state::{BinaryState, SpinState};

/// A real-valued function of a fixed number of bits, the thing samplers and
/// oracles minimize.
pub trait Objective: Sync {
    fn num_vars(&self) -> usize;
    fn value(&self, x: &[u8]) -> f64;

    /// Change in value when bit `i` flips. `x` is restored before returning.
    fn flip_delta(&self, x: &mut [u8], i: usize) -> f64 {
        let before = self.value(x);
        x[i] ^= 1;
        let after = self.value(x);
        x[i] ^= 1;
        after - before
    }
}

impl<F: crate::Scalar> Objective for QuboModel<F> {
    fn num_vars(&self) -> usize {
        QuboModel::num_vars(self)
    }

    fn value(&self, x: &[u8]) -> f64 {
        self.energy_unchecked(x).as_f64()
    }
}

impl<F: crate::Scalar> Objective for IsingModel<F> {
    fn num_vars(&self) -> usize {
        IsingModel::num_vars(self)
    }

    fn value(&self, x: &[u8]) -> f64 {
        self.energy_of_bits(x).as_f64()
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn num_vars(&self) -> usize {
        (**self).num_vars()
    }

    fn value(&self, x: &[u8]) -> f64 {
        (**self).value(x)
    }

    fn flip_delta(&self, x: &mut [u8], i: usize) -> f64 {
        (**self).flip_delta(x, i)
    }
}

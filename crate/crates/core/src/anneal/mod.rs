//! Samplers over binary models driven by annealing schedules: an exact
//! state-vector simulator for small registers, a seeded heuristic annealer,
//! a noiseless greedy idealization and a brute-force oracle.

mod greedy;
mod heuristic;
mod sampler;
mod schedule;
mod statevector;
mod timing;

pub use greedy::{sequential_greedy, GreedySampler, GREEDY_MAX_GROUP};
pub use heuristic::{heuristic_anneal, HeuristicSampler};
pub use sampler::{
    keep_count, BruteForceSampler, InitialState, SampleRecord, SampleSet, Sampler, SamplerRequest,
    Target,
};
pub use schedule::{AnnealSchedule, SPath};
pub use statevector::{
    initial_hamiltonian_spectrum, measure, schrodinger_anneal, Convention, Evolution,
    StateVectorSampler, SPECTRUM_MAX_QUBITS, STATEVECTOR_MAX_QUBITS,
};
pub use timing::{
    timing_report, TimingModel, TimingReport, DEFAULT_PROGRAM_US, DEFAULT_READOUT_US, MIN_ANNEAL_US,
};

//! Small reference problems: the two-spin Ising example and the two
//! Hamiltonians that need more than one annealing cycle.

use crate::anneal::{
    sequential_greedy, AnnealSchedule, InitialState, Sampler, SamplerRequest, Target,
};
use crate::bqm::{exhaustive_min, BinaryState, IsingModel};
use crate::pbf::Polynomial;
use crate::Result;

/// Two spins with `h = (0.5, -0.3)` and `J = -0.8`.
pub fn two_spin_ising() -> IsingModel<f64> {
    IsingModel::from_parts(vec![0.5, -0.3], [((0, 1), -0.8)]).expect("static model is valid")
}

/// A problem whose greedy one-cycle solution is a trap.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleProblem {
    pub name: &'static str,
    pub poly: Polynomial<f64>,
    pub group_of: Vec<usize>,
}

impl CycleProblem {
    /// `z0 - z1 - 2 z0 z1`, groups `{z0}`, `{z1}`.
    pub fn h_s() -> Self {
        Self {
            name: "H_s",
            poly: Polynomial::from_terms([(vec![0], 1.0), (vec![1], -1.0), (vec![0, 1], -2.0)]),
            group_of: vec![0, 1],
        }
    }

    /// `z2 (2 + z0 - 2 z0 z1) + z3 (2 - z1 - 2 z0 z1)`, groups `{z0, z2}`,
    /// `{z1, z3}`.
    pub fn h_c() -> Self {
        Self {
            name: "H_c",
            poly: Polynomial::from_terms([
                (vec![2], 2.0),
                (vec![0, 2], 1.0),
                (vec![0, 1, 2], -2.0),
                (vec![3], 2.0),
                (vec![1, 3], -1.0),
                (vec![0, 1, 3], -2.0),
            ]),
            group_of: vec![0, 1, 0, 1],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.group_of.len()
    }

    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut g = vec![Vec::new(); 2];
        for (v, &k) in self.group_of.iter().enumerate() {
            g[k].push(v);
        }
        g
    }

    pub fn energy(&self, x: &BinaryState) -> f64 {
        self.poly.evaluate_unchecked(x.as_slice())
    }

    /// Brute-force minimum energy and all states attaining it.
    pub fn ground(&self) -> (f64, Vec<BinaryState>) {
        let n = self.num_vars();
        exhaustive_min(n, n, |x| self.poly.evaluate_unchecked(x)).expect("tiny problem")
    }

    /// Noiseless cyclic anneal from all zeros.
    pub fn greedy(&self, cycles: usize) -> Result<BinaryState> {
        sequential_greedy(
            &self.poly,
            &self.groups(),
            &BinaryState::zeros(self.num_vars()),
            cycles,
        )
    }

    /// Share of reads ending in a ground state under the two-group cyclic
    /// schedule with full reversals, starting from all zeros.
    pub fn ground_frequency(
        &self,
        sampler: &dyn Sampler,
        cycles: usize,
        reads: usize,
        segment_time: f64,
        seed: u64,
    ) -> Result<f64> {
        let schedule = AnnealSchedule::cyclic(self.group_of.clone(), 2, cycles, 0.0, segment_time)?;
        let req = SamplerRequest::new(reads, schedule, seed)
            .with_initial(InitialState::Single(BinaryState::zeros(self.num_vars())));
        let set = sampler.sample(Target::Polynomial(&self.poly), &req)?;
        let (_, ground) = self.ground();
        Ok(ground.iter().map(|g| set.frequency(g)).sum())
    }
}

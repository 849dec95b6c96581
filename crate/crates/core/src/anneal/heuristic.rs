use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{AnnealSchedule, SampleSet, Sampler, SamplerRequest, Target};
use crate::bqm::{BinaryState, Objective, QuboMatrix};
use crate::Result;

/// Seeded simulated annealing that follows the schedule per variable.
///
/// A variable may flip only while its anneal fraction is below 1. Its
/// Metropolis temperature interpolates geometrically from `T_hot` at `s = 0`
/// to `T_cold` at `s = 1`, so the reversal depth sets how far a group is
/// reopened. Both temperatures are multiples of the target's energy scale.
#[derive(Debug, Clone)]
pub struct HeuristicSampler {
    /// `T_hot / scale`.
    pub hot_factor: f64,
    /// `T_cold / scale`.
    pub cold_factor: f64,
    /// Sweeps per schedule cycle.
    pub sweeps_per_cycle: usize,
    /// Overrides the energy scale estimated from the target.
    pub energy_scale: Option<f64>,
}

impl Default for HeuristicSampler {
    fn default() -> Self {
        Self {
            hot_factor: 2.0,
            cold_factor: 1e-3,
            sweeps_per_cycle: 1000,
            energy_scale: None,
        }
    }
}

enum Kernel<'a> {
    Matrix(QuboMatrix),
    Generic(&'a dyn Objective),
}

impl Kernel<'_> {
    fn delta(&self, x: &mut [u8], i: usize) -> f64 {
        match self {
            Kernel::Matrix(m) => m.flip_delta(x, i),
            Kernel::Generic(o) => o.flip_delta(x, i),
        }
    }
}

/// Largest single-flip change over a few deterministic probe states.
fn probe_scale(kernel: &Kernel<'_>, n: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1e);
    let mut scale = 0.0f64;
    let mut x = vec![0u8; n];
    for _ in 0..8 {
        for i in 0..n {
            scale = scale.max(kernel.delta(&mut x, i).abs());
        }
        x.iter_mut().for_each(|b| *b = rng.gen_range(0..2));
    }
    scale
}

impl HeuristicSampler {
    fn energy_scale(&self, target: Target<'_>, kernel: &Kernel<'_>) -> f64 {
        if let Some(s) = self.energy_scale {
            return s;
        }
        let s = match target {
            Target::Qubo(q) => q.max_abs_coefficient(),
            Target::Polynomial(p) => p
                .terms()
                .filter(|(v, _)| !v.is_empty())
                .fold(0.0f64, |m, (_, c)| m.max(c.abs())),
            Target::Objective(_) => probe_scale(kernel, target.num_vars()),
        };
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    fn run_read(
        &self,
        kernel: &Kernel<'_>,
        schedule: &AnnealSchedule,
        start: BinaryState,
        seed: u64,
        temps: (f64, f64),
    ) -> BinaryState {
        let n = start.len();
        let mut x = start.into_inner();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let steps = self.sweeps_per_cycle.max(1) * schedule.cycles();
        let total = schedule.total_time();
        let (hot, cold) = temps;
        let groups = schedule.num_groups();
        let mut temp = vec![0.0; groups];
        let mut active = vec![false; groups];
        let mut movable: Vec<usize> = Vec::with_capacity(n);
        for k in 0..steps {
            let t = (k as f64 + 0.5) / steps as f64 * total;
            for g in 0..groups {
                let s = schedule.group_s(g, t);
                active[g] = s < 1.0;
                temp[g] = hot.powf(1.0 - s) * cold.powf(s);
            }
            movable.clear();
            movable.extend((0..n).filter(|&i| active[schedule.group_of(i)]));
            if movable.is_empty() {
                continue;
            }
            // Random-scan proposals: a fixed sweep order would make
            // zero-cost flips oscillate with a parity shared by every read.
            for _ in 0..movable.len() {
                let i = movable[rng.gen_range(0..movable.len())];
                let g = schedule.group_of(i);
                let d = kernel.delta(&mut x, i);
                if d <= 0.0 || rng.gen::<f64>() < (-d / temp[g]).exp() {
                    x[i] ^= 1;
                }
            }
        }
        BinaryState::new(x).expect("bits stay binary")
    }
}

impl Sampler for HeuristicSampler {
    fn name(&self) -> &'static str {
        "heuristic"
    }

    fn sample(&self, target: Target<'_>, req: &SamplerRequest) -> Result<SampleSet> {
        let n = target.num_vars();
        req.validate(n)?;
        let timing = req.timing_report()?;
        let kernel = match target {
            Target::Qubo(q) => Kernel::Matrix(QuboMatrix::from_model(q)),
            _ => Kernel::Generic(target.as_objective()),
        };
        let scale = self.energy_scale(target, &kernel);
        let temps = (self.hot_factor * scale, self.cold_factor * scale);
        let random_start = |r: usize| {
            let mut rng = ChaCha8Rng::seed_from_u64(req.read_seed(r) ^ 0x9e37_79b9_7f4a_7c15);
            BinaryState::new((0..n).map(|_| rng.gen_range(0..2)).collect()).expect("binary")
        };
        let reads: Vec<BinaryState> = if req.schedule.reinitialize() {
            (0..req.reads)
                .into_par_iter()
                .map(|r| {
                    let start = req
                        .initial_for(r)
                        .cloned()
                        .unwrap_or_else(|| random_start(r));
                    self.run_read(&kernel, &req.schedule, start, req.read_seed(r), temps)
                })
                .collect()
        } else {
            let mut out: Vec<BinaryState> = Vec::with_capacity(req.reads);
            for r in 0..req.reads {
                let start = req
                    .start_for(r, out.last())
                    .cloned()
                    .unwrap_or_else(|| random_start(r));
                out.push(self.run_read(&kernel, &req.schedule, start, req.read_seed(r), temps));
            }
            out
        };
        Ok(SampleSet::from_reads(target, reads, timing))
    }
}

/// Heuristic anneal with default settings.
pub fn heuristic_anneal(target: Target<'_>, req: &SamplerRequest) -> Result<SampleSet> {
    HeuristicSampler::default().sample(target, req)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anneal::InitialState;
    use crate::bqm::{IsingModel, QuboModel};
    use crate::pbf::Polynomial;

    fn two_spin() -> QuboModel<f64> {
        let mut m = IsingModel::new(2);
        m.add_bias(0, 0.5).unwrap();
        m.add_bias(1, -0.3).unwrap();
        m.add_coupling(0, 1, -0.8).unwrap();
        m.to_qubo().0
    }

    #[test]
    fn forward_anneal_finds_two_spin_minimum() {
        let q = two_spin();
        let (ising, _) = q.to_ising();
        let req = SamplerRequest::new(100, AnnealSchedule::forward(20.0).unwrap(), 7);
        let set = heuristic_anneal(Target::Qubo(&q), &req).unwrap();
        let best = set.lowest().unwrap();
        assert_eq!(best.state.as_slice(), &[0, 0]);
        assert!((ising.energy_of_bits(best.state.as_slice()) + 1.0).abs() < 1e-12);
        assert_eq!(
            set.records.iter().map(|r| r.occurrences).sum::<usize>(),
            100
        );
        for r in &set.records {
            assert_eq!(r.energy, q.energy_unchecked(r.state.as_slice()));
        }
    }

    #[test]
    fn frozen_schedule_returns_initial_state() {
        let q = two_spin();
        let x = BinaryState::new(vec![1, 0]).unwrap();
        let req = SamplerRequest::new(10, AnnealSchedule::frozen(10.0).unwrap(), 1)
            .with_initial(InitialState::Single(x.clone()));
        let set = heuristic_anneal(Target::Qubo(&q), &req).unwrap();
        assert!(set.reads.iter().all(|s| *s == x));
    }

    #[test]
    fn identical_requests_are_deterministic() {
        let q = two_spin();
        let req = SamplerRequest::new(50, AnnealSchedule::forward(20.0).unwrap(), 99);
        let a = heuristic_anneal(Target::Qubo(&q), &req).unwrap();
        let b = heuristic_anneal(Target::Qubo(&q), &req).unwrap();
        assert_eq!(a, b);
        let chained = SamplerRequest::new(
            20,
            AnnealSchedule::reverse(20.0, 0.4, 5.0)
                .unwrap()
                .with_reinitialize(false),
            3,
        )
        .with_initial(InitialState::Single(BinaryState::zeros(2)));
        assert_eq!(
            heuristic_anneal(Target::Qubo(&q), &chained).unwrap(),
            heuristic_anneal(Target::Qubo(&q), &chained).unwrap()
        );
    }

    #[test]
    fn cyclic_greedy_limit_solves_hc() {
        let p = Polynomial::from_terms([
            (vec![2], 2.0),
            (vec![0, 2], 1.0),
            (vec![0, 1, 2], -2.0),
            (vec![3], 2.0),
            (vec![1, 3], -1.0),
            (vec![0, 1, 3], -2.0),
        ]);
        let sched = AnnealSchedule::cyclic(vec![0, 1, 0, 1], 2, 2, 0.0, 10.0).unwrap();
        let req = SamplerRequest::new(20, sched, 5)
            .with_initial(InitialState::Single(BinaryState::zeros(4)));
        let sampler = HeuristicSampler {
            hot_factor: 1e-2,
            ..Default::default()
        };
        let set = sampler.sample(Target::Polynomial(&p), &req).unwrap();
        assert_eq!(set.lowest().unwrap().energy, -1.0);
    }
}

use std::collections::BTreeMap;

use super::{AnnealSchedule, TimingModel, TimingReport};
use crate::bqm::{
    brute_force, exhaustive_min, BinaryState, BruteForceOptions, Objective, QuboModel,
};
use crate::pbf::Polynomial;
use crate::{Error, Result};

/// What a sampler minimizes.
#[derive(Clone, Copy)]
pub enum Target<'a> {
    Qubo(&'a QuboModel<f64>),
    /// A multilinear polynomial, sampled without quadratization.
    Polynomial(&'a Polynomial<f64>),
    /// An arbitrary function of bits. For a quadratized problem this is the
    /// energy with every auxiliary already at its conditional minimum.
    Objective(&'a dyn Objective),
}

impl<'a> Target<'a> {
    pub fn num_vars(&self) -> usize {
        match self {
            Target::Qubo(q) => q.num_vars(),
            Target::Polynomial(p) => Objective::num_vars(*p),
            Target::Objective(o) => o.num_vars(),
        }
    }

    pub fn energy(&self, x: &[u8]) -> f64 {
        match self {
            Target::Qubo(q) => q.energy_unchecked(x),
            Target::Polynomial(p) => p.evaluate_unchecked(x),
            Target::Objective(o) => o.value(x),
        }
    }

    pub fn as_objective(&self) -> &'a dyn Objective {
        match *self {
            Target::Qubo(q) => q,
            Target::Polynomial(p) => p,
            Target::Objective(o) => o,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialState {
    #[default]
    None,
    /// Every read starts here (or only the first, without reinitialization).
    Single(BinaryState),
    /// One starting state per read.
    PerRead(Vec<BinaryState>),
}

#[derive(Debug, Clone)]
pub struct SamplerRequest {
    pub reads: usize,
    pub schedule: AnnealSchedule,
    pub initial: InitialState,
    pub seed: u64,
    pub timing: TimingModel,
}

impl SamplerRequest {
    pub fn new(reads: usize, schedule: AnnealSchedule, seed: u64) -> Self {
        Self {
            reads,
            schedule,
            initial: InitialState::None,
            seed,
            timing: TimingModel::default(),
        }
    }

    pub fn with_initial(mut self, initial: InitialState) -> Self {
        self.initial = initial;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.reads == 0 {
            return Err(Error::invalid("at least one read is required"));
        }
        self.schedule.check_vars(n)?;
        let check = |s: &BinaryState| {
            if s.len() != n {
                Err(Error::Dimension {
                    expected: n,
                    got: s.len(),
                })
            } else {
                Ok(())
            }
        };
        match &self.initial {
            InitialState::None => {
                if let Some(v) = (0..n).find(|&v| self.schedule.starts_classical(v)) {
                    return Err(Error::invalid(format!(
                        "variable {v} starts at s = 1 and needs an initial state"
                    )));
                }
            }
            InitialState::Single(s) => check(s)?,
            InitialState::PerRead(states) => {
                if states.len() != self.reads {
                    return Err(Error::invalid(format!(
                        "{} initial states given for {} reads",
                        states.len(),
                        self.reads
                    )));
                }
                states.iter().try_for_each(check)?;
            }
        }
        Ok(())
    }

    /// Starting state of read `r` when reads are independent.
    pub fn initial_for(&self, r: usize) -> Option<&BinaryState> {
        match &self.initial {
            InitialState::None => None,
            InitialState::Single(s) => Some(s),
            InitialState::PerRead(v) => v.get(r),
        }
    }

    /// Starting state of read `r` given the previous read's terminal state;
    /// honours the schedule's reinitialize flag.
    pub fn start_for<'s>(
        &'s self,
        r: usize,
        previous: Option<&'s BinaryState>,
    ) -> Option<&'s BinaryState> {
        if !self.schedule.reinitialize() && r > 0 {
            if let Some(p) = previous {
                return Some(p);
            }
        }
        self.initial_for(r)
    }

    pub fn timing_report(&self) -> Result<TimingReport> {
        self.timing.report(self.reads, self.schedule.total_time())
    }

    /// Seed of read `r`.
    pub fn read_seed(&self, r: usize) -> u64 {
        self.seed.wrapping_add(r as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub state: BinaryState,
    pub energy: f64,
    pub occurrences: usize,
}

/// Outcome of a batch of reads.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    /// Distinct states, lowest energy first (ties by state).
    pub records: Vec<SampleRecord>,
    /// Terminal state of every read, in read order.
    pub reads: Vec<BinaryState>,
    pub energies: Vec<f64>,
    pub timing: TimingReport,
}

impl SampleSet {
    pub fn from_reads(target: Target<'_>, reads: Vec<BinaryState>, timing: TimingReport) -> Self {
        let energies: Vec<f64> = reads.iter().map(|s| target.energy(s.as_slice())).collect();
        let mut agg: BTreeMap<&BinaryState, (f64, usize)> = BTreeMap::new();
        for (s, &e) in reads.iter().zip(&energies) {
            agg.entry(s).or_insert((e, 0)).1 += 1;
        }
        let mut records: Vec<SampleRecord> = agg
            .into_iter()
            .map(|(s, (e, k))| SampleRecord {
                state: s.clone(),
                energy: e,
                occurrences: k,
            })
            .collect();
        records.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| a.state.cmp(&b.state))
        });
        Self {
            records,
            reads,
            energies,
            timing,
        }
    }

    pub fn num_reads(&self) -> usize {
        self.reads.len()
    }

    pub fn lowest(&self) -> Option<&SampleRecord> {
        self.records.first()
    }

    /// Indices of the lowest-energy `fraction` of reads (at least one),
    /// ordered by energy and then by read index.
    pub fn lowest_reads(&self, fraction: f64) -> Vec<usize> {
        let k = keep_count(self.reads.len(), fraction);
        let mut idx: Vec<usize> = (0..self.reads.len()).collect();
        idx.sort_by(|&a, &b| {
            self.energies[a]
                .total_cmp(&self.energies[b])
                .then(a.cmp(&b))
        });
        idx.truncate(k);
        idx
    }

    /// Share of reads that ended in `state`.
    pub fn frequency(&self, state: &BinaryState) -> f64 {
        let hits = self.reads.iter().filter(|s| *s == state).count();
        hits as f64 / self.reads.len().max(1) as f64
    }
}

/// Number of reads kept by a lowest-fraction rule: `round(fraction * n)`,
/// at least one.
pub fn keep_count(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64).round() as usize).clamp(1, n.max(1))
}

/// A source of low-energy states for a target under a schedule.
pub trait Sampler: Sync {
    fn name(&self) -> &'static str;
    fn sample(&self, target: Target<'_>, req: &SamplerRequest) -> Result<SampleSet>;
}

/// Perfect sampler: every read returns the global minimum (smallest index
/// among ties), found by exhaustive search.
#[derive(Debug, Clone, Default)]
pub struct BruteForceSampler {
    pub options: BruteForceOptions,
}

impl BruteForceSampler {
    pub fn minimum(&self, target: Target<'_>) -> Result<BinaryState> {
        match target {
            Target::Qubo(q) => {
                let r = brute_force(
                    q,
                    &BruteForceOptions {
                        max_argmin: 1,
                        ..self.options.clone()
                    },
                )?;
                Ok(r.argmin_states.into_iter().next().expect("nonempty argmin"))
            }
            Target::Polynomial(_) | Target::Objective(_) => {
                let o = target.as_objective();
                let (_, arg) = exhaustive_min(o.num_vars(), self.options.max_vars, |x| o.value(x))?;
                Ok(arg.into_iter().next().expect("nonempty argmin"))
            }
        }
    }
}

impl Sampler for BruteForceSampler {
    fn name(&self) -> &'static str {
        "brute-force"
    }

    fn sample(&self, target: Target<'_>, req: &SamplerRequest) -> Result<SampleSet> {
        if req.reads == 0 {
            return Err(Error::invalid("at least one read is required"));
        }
        let best = self.minimum(target)?;
        let timing = req.timing_report()?;
        Ok(SampleSet::from_reads(target, vec![best; req.reads], timing))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregation_and_selection() {
        let q = QuboModel::from_entries(2, [((0, 0), -1.0), ((1, 1), 1.0)]).unwrap();
        let s = |v: Vec<u8>| BinaryState::new(v).unwrap();
        let reads = vec![s(vec![0, 1]), s(vec![1, 0]), s(vec![0, 1]), s(vec![0, 0])];
        let timing = crate::anneal::timing_report(4, 20.0).unwrap();
        let set = SampleSet::from_reads(Target::Qubo(&q), reads, timing);
        assert_eq!(set.records.len(), 3);
        assert_eq!(set.records[0].state, s(vec![1, 0]));
        assert_eq!(set.records.iter().map(|r| r.occurrences).sum::<usize>(), 4);
        assert_eq!(set.lowest_reads(0.5), vec![1, 3]);
        assert_eq!(set.frequency(&s(vec![0, 1])), 0.5);
        assert_eq!(keep_count(100, 0.1), 10);
        assert_eq!(keep_count(200, 0.1), 20);
        assert_eq!(keep_count(5, 0.01), 1);
    }

    #[test]
    fn request_validation() {
        let sched = AnnealSchedule::reverse(20.0, 0.0, 0.0).unwrap();
        let req = SamplerRequest::new(3, sched.clone(), 0);
        assert!(req.validate(2).is_err());
        let req = req.with_initial(InitialState::Single(BinaryState::zeros(2)));
        assert!(req.validate(2).is_ok());
        assert!(req.validate(3).is_err());
        let req = SamplerRequest::new(2, sched, 0)
            .with_initial(InitialState::PerRead(vec![BinaryState::zeros(2)]));
        assert!(req.validate(2).is_err());
    }

    #[test]
    fn brute_force_sampler_returns_minimum() {
        let q =
            QuboModel::from_entries(2, [((0, 0), 1.0), ((1, 1), -1.0), ((0, 1), -2.0)]).unwrap();
        let req = SamplerRequest::new(5, AnnealSchedule::forward(20.0).unwrap(), 0);
        let set = BruteForceSampler::default()
            .sample(Target::Qubo(&q), &req)
            .unwrap();
        assert_eq!(set.records.len(), 1);
        assert_eq!(set.records[0].energy, -2.0);
        assert_eq!(set.records[0].occurrences, 5);
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ppi::{IterationRecord, PpiState, DEFAULT_INIT};
use super::MergedProblem;
use crate::anneal::{
    keep_count, AnnealSchedule, InitialState, SampleSet, Sampler, SamplerRequest, Target,
    TimingModel, TimingReport,
};
use crate::{Error, Result};

/// Post-processing measures of one read.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealOutcome {
    pub params: [f64; 3],
    /// Policy plus valuation component, activation bits ignored.
    pub unadjusted_loss: f64,
    /// Per-parameter loss with the other parameters at the reference mean.
    pub adjusted_loss: [f64; 3],
    /// Per-parameter loss with the other parameters at the truth.
    pub minimum_loss: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossReport {
    pub outcomes: Vec<AnnealOutcome>,
    /// Mean parameters over the reads with the lowest unadjusted loss.
    pub reference: [f64; 3],
}

/// Per-parameter losses with the other two parameters fixed at `other`:
/// the policy component for `x1` and the valuation component for `x2` and
/// `x3`. The policy component carries no `x2` term.
fn isolated_losses(problem: &MergedProblem, p: [f64; 3], other: [f64; 3]) -> [f64; 3] {
    [
        problem.policy_loss(p[0], other[2]),
        problem.valuation_loss(other[0], p[1], other[2]),
        problem.valuation_loss(other[0], other[1], p[2]),
    ]
}

/// Unadjusted, adjusted and (with `truth`) minimum losses of decoded reads.
/// The adjusted loss fixes the other parameters at their mean over the
/// `keep_fraction` of reads with the lowest unadjusted loss.
pub fn losses(
    problem: &MergedProblem,
    reads: &[[f64; 3]],
    keep_fraction: f64,
    truth: Option<[f64; 3]>,
) -> Result<LossReport> {
    if reads.is_empty() {
        return Err(Error::invalid("no reads to post-process"));
    }
    let unadjusted: Vec<f64> = reads
        .iter()
        .map(|p| problem.policy_loss(p[0], p[2]) + problem.valuation_loss(p[0], p[1], p[2]))
        .collect();
    let mut order: Vec<usize> = (0..reads.len()).collect();
    order.sort_by(|&a, &b| unadjusted[a].total_cmp(&unadjusted[b]).then(a.cmp(&b)));
    order.truncate(keep_count(reads.len(), keep_fraction));
    let mut reference = [0.0; 3];
    for &r in &order {
        for i in 0..3 {
            reference[i] += reads[r][i] / order.len() as f64;
        }
    }
    let outcomes = reads
        .iter()
        .zip(&unadjusted)
        .map(|(&p, &u)| AnnealOutcome {
            params: p,
            unadjusted_loss: u,
            adjusted_loss: isolated_losses(problem, p, reference),
            minimum_loss: truth.map(|t| isolated_losses(problem, p, t)),
        })
        .collect();
    Ok(LossReport {
        outcomes,
        reference,
    })
}

/// Mean of each parameter over the `keep_fraction` of outcomes with the
/// lowest adjusted loss for that parameter.
pub fn select_by_adjusted_loss(outcomes: &[AnnealOutcome], keep_fraction: f64) -> [f64; 3] {
    let k = keep_count(outcomes.len(), keep_fraction);
    let mut out = [0.0; 3];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut idx: Vec<usize> = (0..outcomes.len()).collect();
        idx.sort_by(|&a, &b| {
            outcomes[a].adjusted_loss[i]
                .total_cmp(&outcomes[b].adjusted_loss[i])
                .then(a.cmp(&b))
        });
        *slot = idx[..k].iter().map(|&r| outcomes[r].params[i]).sum::<f64>() / k as f64;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiAnnealConfig {
    pub reads: usize,
    /// Duration of each group's reverse-and-forward segment (us).
    pub segment_time: f64,
    /// Anneal fraction each group reverses to.
    pub reversal: f64,
    pub seed: u64,
    pub init: [f64; 3],
    pub timing: TimingModel,
}

impl Default for MultiAnnealConfig {
    fn default() -> Self {
        Self {
            reads: 50,
            segment_time: 20.0,
            reversal: 0.0,
            seed: 0,
            init: DEFAULT_INIT,
            timing: TimingModel::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRun {
    pub state: PpiState,
    /// Decoded parameters of every read, in read order.
    pub reads: Vec<[f64; 3]>,
    pub timing: TimingReport,
}

fn decode_reads(problem: &MergedProblem, set: &SampleSet) -> Vec<[f64; 3]> {
    set.reads
        .iter()
        .map(|s| problem.decode(s.as_slice()))
        .collect()
}

fn argmin_by(values: impl Iterator<Item = f64>) -> usize {
    values
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |best, (i, v)| if v < best.1 { (i, v) } else { best },
        )
        .0
}

/// Algorithm 4: one program, reads chained without reinitialization. Each
/// read reverse-anneals the policy group (`x1` bits and `x_p`) and then the
/// valuation group. `x1` comes from the read with the lowest reconstructed
/// policy loss, `x2` and `x3` from the read with the lowest valuation loss
/// among those with that `x1`.
pub fn multi_anneal_ppi(
    problem: &MergedProblem,
    sampler: &dyn Sampler,
    cfg: &MultiAnnealConfig,
) -> Result<QuantumRun> {
    let schedule =
        AnnealSchedule::cyclic(problem.group_of(), 2, 1, cfg.reversal, cfg.segment_time)?
            .with_reinitialize(false);
    let mut req = SamplerRequest::new(cfg.reads, schedule, cfg.seed)
        .with_initial(InitialState::Single(problem.state_for(cfg.init)));
    req.timing = cfg.timing;
    let set = sampler.sample(Target::Objective(problem), &req)?;
    let reads = decode_reads(problem, &set);
    let bp = argmin_by(reads.iter().map(|p| problem.policy_loss(p[0], p[2])));
    // Valuation losses are only comparable under the same policy, so the
    // value parameters come from the reads that share the chosen x1.
    let bv = argmin_by(reads.iter().map(|p| {
        if p[0] == reads[bp][0] {
            problem.valuation_loss(p[0], p[1], p[2])
        } else {
            f64::INFINITY
        }
    }));
    let mut state = PpiState {
        x1: reads[bp][0],
        x2: reads[bv][1],
        x3: reads[bv][2],
        iteration: reads.len(),
        loss_history: Vec::new(),
        history: Vec::new(),
        converged_after: None,
    };
    let per_read_qpu = set.timing.t_anneal + set.timing.t_readout;
    for (r, p) in reads.iter().enumerate() {
        let loss = problem.valuation_loss(p[0], p[1], p[2]);
        state.loss_history.push(loss);
        state.history.push(IterationRecord {
            iteration: r + 1,
            params: *p,
            loss,
            qpu_us: per_read_qpu,
            wall_us: 0.0,
        });
    }
    Ok(QuantumRun {
        state,
        reads,
        timing: set.timing,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneShotConfig {
    pub reads: usize,
    pub cycles: usize,
    pub segment_time: f64,
    pub reversal: f64,
    pub keep_fraction: f64,
    pub seed: u64,
    pub timing: TimingModel,
}

impl Default for OneShotConfig {
    fn default() -> Self {
        Self {
            reads: 200,
            cycles: 3,
            segment_time: 20.0,
            reversal: 0.0,
            keep_fraction: 0.1,
            seed: 0,
            timing: TimingModel::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneShotRun {
    pub run: QuantumRun,
    pub report: LossReport,
}

/// Algorithm 5: every read starts from random parameter bits, cycles `C`
/// times through the policy and valuation groups with full reversals, and
/// is an independent candidate. The estimate averages each parameter over
/// the reads with the lowest adjusted loss for it.
pub fn one_shot_ppi(
    problem: &MergedProblem,
    sampler: &dyn Sampler,
    cfg: &OneShotConfig,
) -> Result<OneShotRun> {
    if cfg.cycles == 0 {
        return Err(Error::invalid(
            "the one-shot schedule needs at least one cycle",
        ));
    }
    let schedule = AnnealSchedule::cyclic(
        problem.group_of(),
        2,
        cfg.cycles,
        cfg.reversal,
        cfg.segment_time,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0e5_4a7);
    let starts = (0..cfg.reads)
        .map(|_| problem.random_state(&mut rng))
        .collect();
    let mut req = SamplerRequest::new(cfg.reads, schedule, cfg.seed)
        .with_initial(InitialState::PerRead(starts));
    req.timing = cfg.timing;
    let set = sampler.sample(Target::Objective(problem), &req)?;
    let reads = decode_reads(problem, &set);
    let report = losses(problem, &reads, cfg.keep_fraction, None)?;
    let est = select_by_adjusted_loss(&report.outcomes, cfg.keep_fraction);
    let per_read_qpu = set.timing.t_anneal + set.timing.t_readout;
    let history = reads
        .iter()
        .enumerate()
        .map(|(r, p)| IterationRecord {
            iteration: r + 1,
            params: *p,
            loss: report.outcomes[r].unadjusted_loss,
            qpu_us: per_read_qpu,
            wall_us: 0.0,
        })
        .collect::<Vec<_>>();
    let state = PpiState {
        x1: est[0],
        x2: est[1],
        x3: est[2],
        iteration: reads.len(),
        loss_history: history.iter().map(|h| h.loss).collect(),
        history,
        converged_after: None,
    };
    Ok(OneShotRun {
        run: QuantumRun {
            state,
            reads,
            timing: set.timing,
        },
        report,
    })
}

use std::time::Instant;

use super::pbo::{valuation_least_squares, ValuationGram, ValuationModel};
use super::{analytic_policy_update, CollocationGrid, MergedConfig, RbcParams};
use crate::anneal::{AnnealSchedule, Sampler, SamplerRequest, Target, TimingModel};
use crate::bqm::BinaryState;
use crate::pbf::BinaryEncoding;
use crate::{Error, Result};

/// Initial `(x1, x2, x3)` of the classical and hybrid runs.
pub const DEFAULT_INIT: [f64; 3] = [0.5, -0.5, 0.5];

/// Relative-change tolerance of the default convergence rule, also used to
/// report `converged_after` in fixed-iteration runs.
pub const DEFAULT_TOL: f64 = 1e-3;

/// When a PPI run stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IterationMode {
    /// Stop once the largest relative parameter change between consecutive
    /// iterations falls below `tol`; fail after `max_iter` iterations.
    UntilConverged { tol: f64, max_iter: usize },
    /// Run exactly this many iterations.
    Fixed(usize),
}

impl Default for IterationMode {
    fn default() -> Self {
        Self::UntilConverged {
            tol: DEFAULT_TOL,
            max_iter: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub params: [f64; 3],
    /// Mean squared valuation residual at the iterate.
    pub loss: f64,
    /// Emulated QPU time of the iteration (zero for classical steps).
    pub qpu_us: f64,
    pub wall_us: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PpiState {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub iteration: usize,
    pub loss_history: Vec<f64>,
    pub history: Vec<IterationRecord>,
    /// Iteration after which the parameters stopped changing (relative
    /// change below the tolerance at the next iteration).
    pub converged_after: Option<usize>,
}

impl PpiState {
    fn start(init: [f64; 3]) -> Self {
        Self {
            x1: init[0],
            x2: init[1],
            x3: init[2],
            iteration: 0,
            loss_history: Vec::new(),
            history: Vec::new(),
            converged_after: None,
        }
    }

    pub fn params(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    /// Absolute percentage deviations from `truth`.
    pub fn errors_pct(&self, truth: [f64; 3]) -> [f64; 3] {
        errors_pct(self.params(), truth)
    }

    /// Parameters of every iteration, for determinism checks.
    pub fn iterates(&self) -> Vec<[f64; 3]> {
        self.history.iter().map(|r| r.params).collect()
    }
}

pub fn errors_pct(params: [f64; 3], truth: [f64; 3]) -> [f64; 3] {
    let mut e = [0.0; 3];
    for i in 0..3 {
        e[i] = ((params[i] - truth[i]) / truth[i]).abs() * 100.0;
    }
    e
}

fn max_relative_change(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3)
        .map(|i| (b[i] - a[i]).abs() / a[i].abs().max(1e-12))
        .fold(0.0, f64::max)
}

struct StepOutput {
    params: [f64; 3],
    loss: f64,
    qpu_us: f64,
}

fn check_init(init: [f64; 3]) -> Result<()> {
    if !(init[0] > 0.0 && init[0] < 1.0) {
        return Err(Error::invalid(format!(
            "initial x1 must lie in (0, 1), got {}",
            init[0]
        )));
    }
    if !(init[2] > 0.0) {
        return Err(Error::invalid(format!(
            "initial x3 must be positive, got {}",
            init[2]
        )));
    }
    Ok(())
}

fn iterate(
    init: [f64; 3],
    mode: IterationMode,
    mut step: impl FnMut(usize, &PpiState) -> Result<StepOutput>,
) -> Result<PpiState> {
    check_init(init)?;
    let mut state = PpiState::start(init);
    let (tol, limit, stop_early) = match mode {
        IterationMode::UntilConverged { tol, max_iter } => (tol, max_iter, true),
        IterationMode::Fixed(n) => (DEFAULT_TOL, n, false),
    };
    let mut last_change = f64::INFINITY;
    for it in 1..=limit {
        let t0 = Instant::now();
        let out = step(it, &state)?;
        let prev = state.params();
        state.x1 = out.params[0];
        state.x2 = out.params[1];
        state.x3 = out.params[2];
        state.iteration = it;
        state.loss_history.push(out.loss);
        state.history.push(IterationRecord {
            iteration: it,
            params: out.params,
            loss: out.loss,
            qpu_us: out.qpu_us,
            wall_us: t0.elapsed().as_secs_f64() * 1e6,
        });
        if it >= 2 {
            last_change = max_relative_change(prev, out.params);
            if last_change < tol && state.converged_after.is_none() {
                state.converged_after = Some(it - 1);
                if stop_early {
                    return Ok(state);
                }
            }
        }
    }
    if stop_early {
        return Err(Error::NoConvergence {
            iterations: limit,
            last_change,
        });
    }
    Ok(state)
}

fn policy_step(state: &PpiState, params: &RbcParams) -> Result<f64> {
    if !(state.x3 > 0.0) {
        return Err(Error::invalid(format!(
            "policy step needs a positive value slope, got x3 = {}",
            state.x3
        )));
    }
    Ok(analytic_policy_update(state.x3, params))
}

/// Algorithm 1: analytic policy step, continuous least-squares valuation.
pub fn classical_ppi(
    params: &RbcParams,
    grid: &CollocationGrid,
    init: [f64; 3],
    mode: IterationMode,
) -> Result<PpiState> {
    let gram = ValuationGram::new(grid, params);
    iterate(init, mode, |_, s| {
        let x1 = policy_step(s, params)?;
        let (lx, l1) = (x1.ln(), (1.0 - x1).ln());
        let (x2, x3) = valuation_least_squares(grid, params, lx, l1)?;
        Ok(StepOutput {
            params: [x1, x2, x3],
            loss: gram.value(l1, lx, x2, x3) / grid.len() as f64,
            qpu_us: 0.0,
        })
    })
}

/// Binary encodings of the value parameters for the combinatorial
/// valuation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinatorialConfig {
    pub j2: usize,
    pub j3: usize,
    pub s2: f64,
    pub s3: f64,
}

impl Default for CombinatorialConfig {
    fn default() -> Self {
        Self {
            j2: 9,
            j3: 9,
            s2: -0.035,
            s3: 0.003,
        }
    }
}

impl CombinatorialConfig {
    /// The value encodings of a merged problem.
    pub fn from_merged(m: &MergedConfig) -> Self {
        Self {
            j2: m.j2,
            j3: m.j3,
            s2: m.s2,
            s3: m.s3,
        }
    }

    /// `x2` on bits `0..=J2`, `x3` right after.
    pub fn encodings(&self) -> Result<(BinaryEncoding<f64>, BinaryEncoding<f64>)> {
        let e2 = BinaryEncoding::with_top_bit(0, self.j2, self.s2)?;
        let e3 = BinaryEncoding::with_top_bit(e2.bit_count(), self.j3, self.s3)?;
        Ok((e2, e3))
    }
}

/// Exact valuation argmin over the encoded grid for given logs of the
/// policy, with the summed loss there.
pub fn combinatorial_valuation(
    params: &RbcParams,
    grid: &CollocationGrid,
    cfg: &CombinatorialConfig,
    ln_x1: f64,
    ln_1mx1: f64,
) -> Result<(BinaryState, f64)> {
    let (e2, e3) = cfg.encodings()?;
    ValuationModel::new(e2, e3, grid, params, ln_x1, ln_1mx1)?.argmin()
}

/// Algorithm 2: analytic policy step, valuation by exhaustive search over
/// the `2^(J2 + J3 + 2)` encoded states.
pub fn combinatorial_ppi(
    params: &RbcParams,
    grid: &CollocationGrid,
    cfg: &CombinatorialConfig,
    init: [f64; 3],
    mode: IterationMode,
) -> Result<PpiState> {
    let (e2, e3) = cfg.encodings()?;
    iterate(init, mode, |_, s| {
        let x1 = policy_step(s, params)?;
        let (state, loss) = combinatorial_valuation(params, grid, cfg, x1.ln(), (1.0 - x1).ln())?;
        Ok(StepOutput {
            params: [x1, e2.decode(state.as_slice()), e3.decode(state.as_slice())],
            loss: loss / grid.len() as f64,
            qpu_us: 0.0,
        })
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridConfig {
    pub reads: usize,
    pub keep_fraction: f64,
    /// Forward anneal duration in microseconds.
    pub anneal_time: f64,
    pub seed: u64,
    pub mode: IterationMode,
    pub timing: TimingModel,
}

impl Default for HybridConfig {
    fn default() -> Self {
        Self {
            reads: 100,
            keep_fraction: 0.1,
            anneal_time: 20.0,
            seed: 0,
            mode: IterationMode::Fixed(2),
            timing: TimingModel::default(),
        }
    }
}

/// Algorithm 3: analytic policy step, valuation QUBO sampled, `x2` and `x3`
/// averaged over the lowest-energy reads.
pub fn hybrid_ppi(
    params: &RbcParams,
    grid: &CollocationGrid,
    cfg: &CombinatorialConfig,
    sampler: &dyn Sampler,
    hybrid: &HybridConfig,
    init: [f64; 3],
) -> Result<PpiState> {
    let (e2, e3) = cfg.encodings()?;
    let gram = ValuationGram::new(grid, params);
    iterate(init, hybrid.mode, |it, s| {
        let x1 = policy_step(s, params)?;
        let (lx, l1) = (x1.ln(), (1.0 - x1).ln());
        let model = ValuationModel::new(e2, e3, grid, params, lx, l1)?;
        let (qubo, _) = model.qubo();
        let mut req = SamplerRequest::new(
            hybrid.reads,
            AnnealSchedule::forward(hybrid.anneal_time)?,
            hybrid.seed.wrapping_add(1_000_003 * it as u64),
        );
        req.timing = hybrid.timing;
        let set = sampler.sample(Target::Qubo(qubo), &req)?;
        let kept = set.lowest_reads(hybrid.keep_fraction);
        let (mut x2, mut x3) = (0.0, 0.0);
        for &r in &kept {
            let (a, b) = model.decode(set.reads[r].as_slice());
            x2 += a;
            x3 += b;
        }
        x2 /= kept.len() as f64;
        x3 /= kept.len() as f64;
        Ok(StepOutput {
            params: [x1, x2, x3],
            loss: gram.value(l1, lx, x2, x3) / grid.len() as f64,
            qpu_us: set.timing.total,
        })
    })
}

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{BinaryState, QuadraticModel, QuboMatrix};
use crate::{Error, Result, Scalar};

/// Default capacity guard for exhaustive search.
pub const DEFAULT_MAX_VARS: usize = 26;

/// Largest model for which a full spectrum listing is produced.
pub const SPECTRUM_MAX_VARS: usize = 20;

#[derive(Debug, Clone)]
pub struct BruteForceOptions {
    pub max_vars: usize,
    pub keep_spectrum: bool,
    /// Argmin states kept in the result; the count is always exact.
    pub max_argmin: usize,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        Self {
            max_vars: DEFAULT_MAX_VARS,
            keep_spectrum: false,
            max_argmin: 1 << 16,
        }
    }
}

impl BruteForceOptions {
    pub fn with_spectrum(mut self) -> Self {
        self.keep_spectrum = true;
        self
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumResult<S, F> {
    pub min_energy: F,
    /// Argmin states in ascending index order (bit `i` of the index is variable `i`).
    pub argmin_states: Vec<S>,
    pub argmin_count: u64,
    /// True when `argmin_count` exceeds the number of stored states.
    pub truncated: bool,
    pub spectrum: Option<Vec<(S, F)>>,
}

#[derive(Debug, Clone)]
struct ChunkBest<F> {
    min: Option<F>,
    states: BTreeSet<u64>,
    count: u64,
}

impl<F: Scalar> ChunkBest<F> {
    fn new() -> Self {
        Self {
            min: None,
            states: BTreeSet::new(),
            count: 0,
        }
    }

    fn offer(&mut self, e: F, index: u64, cap: usize) {
        match self.min {
            Some(m) if e > m => return,
            Some(m) if e == m => {}
            _ => {
                self.min = Some(e);
                self.states.clear();
                self.count = 0;
            }
        }
        self.count += 1;
        self.states.insert(index);
        if self.states.len() > cap {
            self.states.pop_last();
        }
    }

    fn merge(mut self, other: Self, cap: usize) -> Self {
        let Some(om) = other.min else { return self };
        match self.min {
            Some(m) if om > m => self,
            Some(m) if om == m => {
                self.count += other.count;
                self.states.extend(other.states);
                while self.states.len() > cap {
                    self.states.pop_last();
                }
                self
            }
            _ => other,
        }
    }
}

/// Exhaustive minimization over all `2^n` states.
///
/// States are visited in Gray-code order with incremental local fields; any
/// state whose incremental energy comes within a rounding tolerance of the
/// running best is re-evaluated exactly, so reported energies are exact
/// evaluations of the model. Large models are partitioned on their top bits
/// and searched in parallel; the merge is independent of the partition.
pub fn brute_force<F, M>(model: &M, opts: &BruteForceOptions) -> Result<SpectrumResult<M::State, F>>
where
    F: Scalar,
    M: QuadraticModel<F>,
{
    let n = model.num_vars();
    if n > opts.max_vars.min(63) {
        return Err(Error::Capacity {
            what: "brute-force variable count",
            n,
            limit: opts.max_vars.min(63),
        });
    }
    if opts.keep_spectrum && n > SPECTRUM_MAX_VARS {
        return Err(Error::Capacity {
            what: "spectrum listing variable count",
            n,
            limit: SPECTRUM_MAX_VARS,
        });
    }
    let cap = opts.max_argmin.max(1);
    let (qubo, _) = model.as_qubo();
    let matrix = QuboMatrix::from_model(&qubo);
    let tol = 1e-9 * (1.0 + matrix.abs_sum());

    let split = if n >= 16 { 6.min(n) } else { 0 };
    let low = n - split;
    let best = (0..1u64 << split)
        .into_par_iter()
        .map(|prefix| search_chunk(model, &matrix, n, low, prefix, tol, cap))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(ChunkBest::new(), |a, b| a.merge(b, cap));

    let min_energy = best
        .min
        .ok_or_else(|| Error::Internal("exhaustive search visited no states".into()))?;
    let argmin_states = best
        .states
        .iter()
        .map(|&idx| M::state_from_bits(BinaryState::from_index(idx, n)))
        .collect::<Vec<_>>();
    let spectrum = opts.keep_spectrum.then(|| {
        (0..1u64 << n)
            .map(|idx| {
                let bits = BinaryState::from_index(idx, n);
                let e = model.energy_of_bits(bits.as_slice());
                (M::state_from_bits(bits), e)
            })
            .collect()
    });
    Ok(SpectrumResult {
        min_energy,
        truncated: best.count > argmin_states.len() as u64,
        argmin_states,
        argmin_count: best.count,
        spectrum,
    })
}

fn search_chunk<F, M>(
    model: &M,
    matrix: &QuboMatrix,
    n: usize,
    low: usize,
    prefix: u64,
    tol: f64,
    cap: usize,
) -> ChunkBest<F>
where
    F: Scalar,
    M: QuadraticModel<F>,
{
    let mut x = BinaryState::from_index(prefix << low, n).into_inner();
    let mut index = prefix << low;
    let mut fields = matrix.fields(&x);
    let mut e = matrix.energy(&x);
    let mut best_inc = f64::INFINITY;
    let mut best = ChunkBest::new();

    let mut consider = |x: &[u8], index: u64, e: f64, best: &mut ChunkBest<F>| {
        if e <= best_inc + tol {
            best.offer(model.energy_of_bits(x), index, cap);
            if e < best_inc {
                best_inc = e;
            }
        }
    };

    consider(&x, index, e, &mut best);
    for step in 1u64..(1u64 << low) {
        let bit = step.trailing_zeros() as usize;
        e += matrix.flip_with_fields(&mut x, &mut fields, bit);
        index ^= 1 << bit;
        consider(&x, index, e, &mut best);
    }
    best
}

/// Exhaustive minimum of an arbitrary function of `n` bits, with all argmins.
///
/// This is the plain direct-evaluation oracle used to cross-check the
/// incremental search and to minimize polynomials.
pub fn exhaustive_min<F, E>(n: usize, max_vars: usize, f: E) -> Result<(F, Vec<BinaryState>)>
where
    F: Scalar,
    E: Fn(&[u8]) -> F,
{
    if n > max_vars.min(30) {
        return Err(Error::Capacity {
            what: "exhaustive search variable count",
            n,
            limit: max_vars.min(30),
        });
    }
    let mut min: Option<F> = None;
    let mut arg = Vec::new();
    for idx in 0..1u64 << n {
        let x = BinaryState::from_index(idx, n);
        let e = f(x.as_slice());
        match min {
            Some(m) if e > m => {}
            Some(m) if e == m => arg.push(x),
            _ => {
                min = Some(e);
                arg.clear();
                arg.push(x);
            }
        }
    }
    Ok((min.unwrap_or_else(F::zero), arg))
}

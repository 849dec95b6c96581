use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AnnealSchedule, SampleSet, Sampler, SamplerRequest, Target};
use crate::bqm::BinaryState;
use crate::{Error, Result};

/// Largest register the state-vector engine simulates.
pub const STATEVECTOR_MAX_QUBITS: usize = 16;
/// Largest register for which the initial Hamiltonian spectrum is listed.
pub const SPECTRUM_MAX_QUBITS: usize = 12;
/// Norm drift beyond which integration is reported as failed.
const NORM_FAILURE: f64 = 1e-6;
/// Most weighted branches kept after full-reversal resets.
const MAX_BRANCHES: usize = 4096;

/// Eigenvalues of `H0 = -sum_i sigma^x_i` and its ground vector.
///
/// Eigenvalue `k` belongs to the product of `sigma^x` eigenvectors selected
/// by the bits of `k` and equals `-(n - 2 popcount(k))`; the ground vector is
/// the uniform superposition in the computational basis.
pub fn initial_hamiltonian_spectrum(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n > SPECTRUM_MAX_QUBITS {
        return Err(Error::Capacity {
            what: "initial Hamiltonian spectrum",
            n,
            limit: SPECTRUM_MAX_QUBITS,
        });
    }
    let dim = 1usize << n;
    let eig = (0..dim)
        .map(|k| -(n as f64 - 2.0 * (k as u64).count_ones() as f64))
        .collect();
    let amp = 1.0 / (dim as f64).sqrt();
    Ok((eig, vec![amp; dim]))
}

/// Where the problem biases sit in the annealing Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// `sum_i -(1 - s_i) sigma^x_i + H_p(s)`, with biases and couplings on
    /// `sigma^z`.
    #[default]
    Standard,
    /// `sum_i (1 - s_i) h_i sigma^x_i + sum s J_ij sigma^z_i sigma^z_j`: the
    /// biases drive the transverse field and vanish from the final
    /// Hamiltonian. Ising-form targets only.
    BiasedDriver,
}

/// Result of integrating one anneal.
#[derive(Debug, Clone)]
pub struct Evolution {
    /// Weighted pure states; a single unit-weight component unless a full
    /// reversal reset a group.
    pub components: Vec<(f64, Vec<Complex64>)>,
    pub steps: usize,
    pub dt: f64,
    pub max_norm_drift: f64,
}

impl Evolution {
    pub fn probabilities(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.components[0].1.len()];
        for (w, psi) in &self.components {
            for (q, a) in p.iter_mut().zip(psi) {
                *q += w * a.norm_sqr();
            }
        }
        p
    }

    /// The state vector, when the evolution stayed pure.
    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        match self.components.as_slice() {
            [(_, psi)] => Some(psi),
            _ => None,
        }
    }
}

/// Exact simulation of closed-system transverse-field annealing.
///
/// Each term of the problem Hamiltonian is weighted by the smallest anneal
/// fraction among its variables, so a term is fully on only once all of its
/// variables have finished annealing. Time is in microseconds and energies
/// are converted to angular frequency by `angular_scale` (rad/us per unit).
///
/// A closed system started in an excited classical state stays excited under
/// slow reversal, so by default a group that reaches `s = 0` is re-prepared
/// in the uniform superposition, as a full reversal does on hardware. The
/// state then becomes a weighted mixture of pure branches.
#[derive(Debug, Clone)]
pub struct StateVectorSampler {
    pub convention: Convention,
    pub angular_scale: f64,
    /// Initial step; by default `0.05 / (angular_scale * energy_bound)`.
    pub dt: Option<f64>,
    /// Halve the step until final probabilities move by less than this.
    pub convergence_tol: f64,
    pub max_halvings: usize,
    pub check_convergence: bool,
    /// A group that reaches `s = 0` is re-prepared in the transverse ground
    /// state, so a full reversal forgets the group's previous value.
    pub reset_on_full_reversal: bool,
}

impl Default for StateVectorSampler {
    fn default() -> Self {
        Self {
            convention: Convention::Standard,
            angular_scale: 1.0,
            dt: None,
            convergence_tol: 1e-4,
            max_halvings: 8,
            check_convergence: true,
            reset_on_full_reversal: true,
        }
    }
}

/// The Hamiltonian pieces: diagonal vectors keyed by the schedule groups
/// whose smallest fraction weights them, plus per-qubit transverse terms.
struct Hamiltonian {
    n: usize,
    diagonals: Vec<(Vec<usize>, Vec<f64>)>,
    transverse: Vec<Transverse>,
    bound: f64,
}

#[derive(Clone, Copy)]
enum Transverse {
    /// `-(1 - s) sigma^x`
    Uniform,
    /// `(1 - s) h sigma^x`
    Bias(f64),
}

impl Transverse {
    fn coefficient(self, s: f64) -> f64 {
        match self {
            Transverse::Uniform => -(1.0 - s),
            Transverse::Bias(h) => (1.0 - s) * h,
        }
    }

    fn magnitude(self) -> f64 {
        match self {
            Transverse::Uniform => 1.0,
            Transverse::Bias(h) => h.abs(),
        }
    }
}

fn bit(k: usize, v: usize) -> bool {
    (k >> v) & 1 == 1
}

impl Hamiltonian {
    fn build(
        target: Target<'_>,
        schedule: &AnnealSchedule,
        convention: Convention,
    ) -> Result<Self> {
        let n = target.num_vars();
        if n > STATEVECTOR_MAX_QUBITS {
            return Err(Error::Capacity {
                what: "state-vector qubits",
                n,
                limit: STATEVECTOR_MAX_QUBITS,
            });
        }
        schedule.check_vars(n)?;
        let dim = 1usize << n;
        let mut diag: BTreeMap<Vec<usize>, Vec<f64>> = BTreeMap::new();
        let mut bound = 0.0;
        let mut add_term =
            |vars: &[usize], c: f64, spins: bool, diag: &mut BTreeMap<Vec<usize>, Vec<f64>>| {
                if c == 0.0 || vars.is_empty() {
                    return;
                }
                bound += c.abs();
                let mut key: Vec<usize> = vars.iter().map(|&v| schedule.group_of(v)).collect();
                key.sort_unstable();
                key.dedup();
                let d = diag.entry(key).or_insert_with(|| vec![0.0; dim]);
                for (k, e) in d.iter_mut().enumerate() {
                    let value = if spins {
                        let neg = vars.iter().filter(|&&v| !bit(k, v)).count();
                        if neg % 2 == 0 {
                            c
                        } else {
                            -c
                        }
                    } else if vars.iter().all(|&v| bit(k, v)) {
                        c
                    } else {
                        0.0
                    };
                    *e += value;
                }
            };
        let mut transverse = vec![Transverse::Uniform; n];
        match (convention, target) {
            (_, Target::Qubo(q)) => {
                let (ising, _) = q.to_ising();
                for (i, &h) in ising.biases().iter().enumerate() {
                    match convention {
                        Convention::Standard => add_term(&[i], h, true, &mut diag),
                        Convention::BiasedDriver => transverse[i] = Transverse::Bias(h),
                    }
                }
                for ((i, j), c) in ising.couplings() {
                    add_term(&[i, j], c, true, &mut diag);
                }
            }
            (Convention::Standard, Target::Polynomial(p)) => {
                for (vars, c) in p.terms() {
                    add_term(vars, c, false, &mut diag);
                }
            }
            (Convention::Standard, Target::Objective(o)) => {
                if schedule.num_groups() > 1 {
                    return Err(Error::Unsupported(
                        "an opaque objective cannot follow a multi-group schedule".into(),
                    ));
                }
                let d: Vec<f64> = (0..dim)
                    .map(|k| o.value(BinaryState::from_index(k as u64, n).as_slice()))
                    .collect();
                bound += d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                diag.insert(vec![0], d);
            }
            (Convention::BiasedDriver, _) => {
                return Err(Error::Unsupported(
                    "the literal convention needs an Ising-form target".into(),
                ))
            }
        }
        bound += transverse.iter().map(|t| t.magnitude()).sum::<f64>();
        Ok(Self {
            n,
            diagonals: diag.into_iter().collect(),
            transverse,
            bound: bound.max(1e-12),
        })
    }

    fn weights(&self, schedule: &AnnealSchedule, t: f64) -> Vec<f64> {
        self.diagonals
            .iter()
            .map(|(key, _)| {
                key.iter()
                    .map(|&g| schedule.group_s(g, t))
                    .fold(1.0, f64::min)
            })
            .collect()
    }

    fn apply_diagonal(&self, psi: &mut [Complex64], weights: &[f64], tau: f64) {
        for (k, a) in psi.iter_mut().enumerate() {
            let phi: f64 = self
                .diagonals
                .iter()
                .zip(weights)
                .map(|((_, d), w)| w * d[k])
                .sum::<f64>()
                * tau;
            *a *= Complex64::new(phi.cos(), -phi.sin());
        }
    }

    fn apply_transverse(&self, psi: &mut [Complex64], schedule: &AnnealSchedule, t: f64, tau: f64) {
        for (v, tr) in self.transverse.iter().enumerate() {
            let theta = tr.coefficient(schedule.s(v, t)) * tau;
            if theta == 0.0 {
                continue;
            }
            let (c, s) = (theta.cos(), theta.sin());
            let mis = Complex64::new(0.0, -s);
            let m = 1usize << v;
            for k in 0..psi.len() {
                if k & m == 0 {
                    let (a, b) = (psi[k], psi[k | m]);
                    psi[k] = a * c + b * mis;
                    psi[k | m] = a * mis + b * c;
                }
            }
        }
    }

    fn initial_state(
        &self,
        schedule: &AnnealSchedule,
        start: Option<&BinaryState>,
    ) -> Result<Vec<Complex64>> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut qubits = Vec::with_capacity(self.n);
        for v in 0..self.n {
            let s0 = schedule.s(v, 0.0);
            let amp = match start {
                Some(x) if s0 > 0.0 => {
                    if x.get(v) == 0 {
                        (1.0, 0.0)
                    } else {
                        (0.0, 1.0)
                    }
                }
                None if s0 >= 1.0 => {
                    return Err(Error::invalid(format!(
                        "qubit {v} starts classical and needs an initial state"
                    )))
                }
                _ => {
                    if self.transverse[v].coefficient(s0) > 0.0 {
                        (h, -h)
                    } else {
                        (h, h)
                    }
                }
            };
            qubits.push(amp);
        }
        Ok((0..1usize << self.n)
            .map(|k| {
                let r: f64 = qubits
                    .iter()
                    .enumerate()
                    .map(|(v, &(a0, a1))| if bit(k, v) { a1 } else { a0 })
                    .product();
                Complex64::new(r, 0.0)
            })
            .collect())
    }

    /// Ground amplitudes of qubit `v`'s transverse term at `s = 0`.
    fn transverse_ground(&self, v: usize) -> (f64, f64) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        if self.transverse[v].coefficient(0.0) > 0.0 {
            (h, -h)
        } else {
            (h, h)
        }
    }

    /// Replaces the qubits of `group` by their transverse ground state. The
    /// discarded state is unravelled into one branch per computational-basis
    /// outcome, weighted by its probability.
    fn reset_group(
        &self,
        mix: Vec<(f64, Vec<Complex64>)>,
        group: &[usize],
    ) -> Vec<(f64, Vec<Complex64>)> {
        let gmask = group.iter().fold(0usize, |m, &v| m | (1 << v));
        let ground: Vec<(f64, f64)> = group.iter().map(|&v| self.transverse_ground(v)).collect();
        let fresh = |k: usize| -> f64 {
            group
                .iter()
                .zip(&ground)
                .map(|(&v, &(a0, a1))| if bit(k, v) { a1 } else { a0 })
                .product()
        };
        let mut out = Vec::new();
        for (w, psi) in mix {
            let mut outcomes: BTreeMap<usize, f64> = BTreeMap::new();
            for (k, a) in psi.iter().enumerate() {
                *outcomes.entry(k & gmask).or_insert(0.0) += a.norm_sqr();
            }
            for (o, p) in outcomes {
                if p < 1e-14 {
                    continue;
                }
                let r = 1.0 / p.sqrt();
                let next: Vec<Complex64> = (0..psi.len())
                    .map(|k| psi[(k & !gmask) | o] * (r * fresh(k)))
                    .collect();
                out.push((w * p, next));
            }
        }
        if gmask == (1usize << self.n) - 1 {
            // Every branch is the same product state.
            let w = out.iter().map(|(w, _)| w).sum();
            out.truncate(1);
            out[0].0 = w;
        }
        out
    }

    fn evolve(
        &self,
        schedule: &AnnealSchedule,
        start: Option<&BinaryState>,
        dt: f64,
        scale: f64,
        resets: &[(f64, Vec<usize>)],
    ) -> Result<Evolution> {
        let mut mix = vec![(1.0, self.initial_state(schedule, start)?)];
        let total = schedule.total_time();
        let steps = ((total / dt).ceil() as usize).max(1);
        let dt = total / steps as f64;
        let tau = dt * scale;
        let mut max_drift = 0.0f64;
        let mut next_reset = 0;
        for k in 0..steps {
            let mid = (k as f64 + 0.5) * dt;
            let w = self.weights(schedule, mid);
            for (_, psi) in mix.iter_mut() {
                self.apply_diagonal(psi, &w, tau / 2.0);
                self.apply_transverse(psi, schedule, mid, tau);
                self.apply_diagonal(psi, &w, tau / 2.0);
                let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
                let drift = (norm - 1.0).abs();
                if !(drift <= NORM_FAILURE) {
                    return Err(Error::Integration(format!(
                        "norm drifted by {drift:.3e} at step {k}"
                    )));
                }
                max_drift = max_drift.max(drift);
                if drift > 1e-12 {
                    let r = 1.0 / norm.sqrt();
                    psi.iter_mut().for_each(|a| *a *= r);
                }
            }
            let now = (k + 1) as f64 * dt;
            while next_reset < resets.len() && resets[next_reset].0 <= now + 1e-9 * dt {
                mix = self.reset_group(mix, &resets[next_reset].1);
                if mix.len() > MAX_BRANCHES {
                    return Err(Error::Capacity {
                        what: "state-vector branches",
                        n: mix.len(),
                        limit: MAX_BRANCHES,
                    });
                }
                next_reset += 1;
            }
        }
        Ok(Evolution {
            components: mix,
            steps,
            dt,
            max_norm_drift: max_drift,
        })
    }
}

/// Times at which a group arrives at `s = 0` after being above it, with the
/// group's qubits, in time order.
fn full_reversal_events(schedule: &AnnealSchedule, n: usize) -> Vec<(f64, Vec<usize>)> {
    let mut events = Vec::new();
    for (g, path) in schedule.paths().iter().enumerate() {
        let qubits: Vec<usize> = (0..n).filter(|&v| schedule.group_of(v) == g).collect();
        if qubits.is_empty() {
            continue;
        }
        let pts = path.points();
        for c in 0..schedule.cycles() {
            let base = c as f64 * schedule.cycle_time();
            for w in pts.windows(2) {
                if w[1].1 <= 0.0 && w[0].1 > 0.0 {
                    events.push((base + w[1].0, qubits.clone()));
                }
            }
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    events
}

impl StateVectorSampler {
    fn initial_dt(&self, h: &Hamiltonian) -> f64 {
        self.dt.unwrap_or(0.05 / (self.angular_scale * h.bound))
    }

    /// Integrates one anneal from `start`, halving the step until the final
    /// probabilities settle.
    pub fn evolve(
        &self,
        target: Target<'_>,
        schedule: &AnnealSchedule,
        start: Option<&BinaryState>,
    ) -> Result<Evolution> {
        if !(self.angular_scale > 0.0) {
            return Err(Error::invalid("angular scale must be positive"));
        }
        let h = Hamiltonian::build(target, schedule, self.convention)?;
        self.evolve_built(&h, schedule, start)
    }

    fn evolve_built(
        &self,
        h: &Hamiltonian,
        schedule: &AnnealSchedule,
        start: Option<&BinaryState>,
    ) -> Result<Evolution> {
        let resets = if self.reset_on_full_reversal {
            full_reversal_events(schedule, h.n)
        } else {
            Vec::new()
        };
        let mut dt = self.initial_dt(h);
        let mut current = h.evolve(schedule, start, dt, self.angular_scale, &resets)?;
        if !self.check_convergence {
            return Ok(current);
        }
        let mut change = f64::INFINITY;
        for _ in 0..self.max_halvings {
            dt = current.dt / 2.0;
            let finer = h.evolve(schedule, start, dt, self.angular_scale, &resets)?;
            change = current
                .probabilities()
                .iter()
                .zip(finer.probabilities())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            current = finer;
            if change < self.convergence_tol {
                return Ok(current);
            }
        }
        Err(Error::NoConvergence {
            iterations: self.max_halvings,
            last_change: change,
        })
    }
}

/// Samples `R` outcomes from an already computed distribution.
pub fn measure(
    probabilities: &[f64],
    n: usize,
    reads: usize,
    seed: u64,
) -> Result<Vec<BinaryState>> {
    let dist = WeightedIndex::new(probabilities)
        .map_err(|e| Error::Integration(format!("invalid distribution: {e}")))?;
    Ok((0..reads)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
            BinaryState::from_index(dist.sample(&mut rng) as u64, n)
        })
        .collect())
}

impl Sampler for StateVectorSampler {
    fn name(&self) -> &'static str {
        "statevector"
    }

    fn sample(&self, target: Target<'_>, req: &SamplerRequest) -> Result<SampleSet> {
        let n = target.num_vars();
        req.validate(n)?;
        let timing = req.timing_report()?;
        let h = Hamiltonian::build(target, &req.schedule, self.convention)?;
        // Only qubits that start with s > 0 read the initial state.
        let key = |s: Option<&BinaryState>| -> Option<Vec<u8>> {
            s.map(|x| {
                (0..n)
                    .map(|v| {
                        if req.schedule.s(v, 0.0) > 0.0 {
                            x.get(v)
                        } else {
                            2
                        }
                    })
                    .collect()
            })
        };
        let mut cache: HashMap<Option<Vec<u8>>, WeightedIndex<f64>> = HashMap::new();
        let mut reads: Vec<BinaryState> = Vec::with_capacity(req.reads);
        for r in 0..req.reads {
            let start = req.start_for(r, reads.last()).cloned();
            let k = key(start.as_ref());
            if !cache.contains_key(&k) {
                let ev = self.evolve_built(&h, &req.schedule, start.as_ref())?;
                let dist = WeightedIndex::new(ev.probabilities())
                    .map_err(|e| Error::Integration(format!("invalid distribution: {e}")))?;
                cache.insert(k.clone(), dist);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(req.read_seed(r));
            let idx = cache[&k].sample(&mut rng);
            reads.push(BinaryState::from_index(idx as u64, n));
        }
        Ok(SampleSet::from_reads(target, reads, timing))
    }
}

/// State-vector anneal with default settings.
pub fn schrodinger_anneal(target: Target<'_>, req: &SamplerRequest) -> Result<SampleSet> {
    StateVectorSampler::default().sample(target, req)
}

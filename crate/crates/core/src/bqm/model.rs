use std::collections::BTreeMap;

use super::{BinaryState, SpinState};
use crate::{Error, Result, Scalar};

fn check_index(i: usize, n: usize) -> Result<()> {
    if i >= n {
        return Err(Error::invalid(format!(
            "variable index {i} out of range for {n} variables"
        )));
    }
    Ok(())
}

fn ordered(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Ising model `E(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j`.
///
/// Couplings are stored once per unordered pair under the key `(min, max)`;
/// inserting `(j, i)` accumulates into the same entry as `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel<F> {
    biases: Vec<F>,
    couplings: BTreeMap<(usize, usize), F>,
}

/// QUBO model `E(x) = sum_i Q_ii x_i + sum_{i<j} Q_ij x_i x_j`.
///
/// Diagonal entries hold the linear terms. Keys are canonicalized to
/// `i <= j` on insertion and duplicate insertions accumulate.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel<F> {
    n: usize,
    q: BTreeMap<(usize, usize), F>,
}

impl<F: Scalar> IsingModel<F> {
    pub fn new(n: usize) -> Self {
        Self {
            biases: vec![F::zero(); n],
            couplings: BTreeMap::new(),
        }
    }

    pub fn from_parts(
        biases: Vec<F>,
        couplings: impl IntoIterator<Item = ((usize, usize), F)>,
    ) -> Result<Self> {
        let mut m = Self {
            biases,
            couplings: BTreeMap::new(),
        };
        for ((i, j), v) in couplings {
            m.add_coupling(i, j, v)?;
        }
        Ok(m)
    }

    pub fn num_vars(&self) -> usize {
        self.biases.len()
    }

    pub fn biases(&self) -> &[F] {
        &self.biases
    }

    pub fn bias(&self, i: usize) -> F {
        self.biases[i]
    }

    pub fn add_bias(&mut self, i: usize, v: F) -> Result<()> {
        check_index(i, self.num_vars())?;
        self.biases[i] += v;
        Ok(())
    }

    pub fn add_coupling(&mut self, i: usize, j: usize, v: F) -> Result<()> {
        let n = self.num_vars();
        check_index(i, n)?;
        check_index(j, n)?;
        if i == j {
            return Err(Error::invalid(format!("self-coupling on variable {i}")));
        }
        *self.couplings.entry(ordered(i, j)).or_insert_with(F::zero) += v;
        Ok(())
    }

    pub fn coupling(&self, i: usize, j: usize) -> F {
        self.couplings
            .get(&ordered(i, j))
            .copied()
            .unwrap_or_else(F::zero)
    }

    /// Couplings in canonical `(i, j)` order with `i < j`.
    pub fn couplings(&self) -> impl Iterator<Item = ((usize, usize), F)> + '_ {
        self.couplings.iter().map(|(&k, &v)| (k, v))
    }

    pub fn energy(&self, s: &SpinState) -> Result<F> {
        if s.len() != self.num_vars() {
            return Err(Error::Dimension {
                expected: self.num_vars(),
                got: s.len(),
            });
        }
        Ok(self.energy_unchecked(s.as_slice()))
    }

    /// Energy of a spin slice whose length is known to match.
    pub fn energy_unchecked(&self, s: &[i8]) -> F {
        let spin = |v: i8| if v > 0 { F::one() } else { -F::one() };
        let mut e = F::zero();
        for (h, &si) in self.biases.iter().zip(s) {
            e += *h * spin(si);
        }
        for (&(i, j), &c) in &self.couplings {
            e += c * spin(s[i] * s[j]);
        }
        e
    }

    /// Energy of the spin state `2x - 1`.
    pub fn energy_of_bits(&self, x: &[u8]) -> F {
        let spin = |b: u8| if b == 1 { F::one() } else { -F::one() };
        let mut e = F::zero();
        for (h, &b) in self.biases.iter().zip(x) {
            e += *h * spin(b);
        }
        for (&(i, j), &c) in &self.couplings {
            let same = x[i] == x[j];
            e += if same { c } else { -c };
        }
        e
    }

    /// Equivalent QUBO under `s = 2x - 1`, with the constant it drops.
    pub fn to_qubo(&self) -> (QuboModel<F>, F) {
        let two = F::one() + F::one();
        let four = two + two;
        let mut q = QuboModel::new(self.num_vars());
        let mut offset = F::zero();
        for (i, &h) in self.biases.iter().enumerate() {
            if h != F::zero() {
                q.add_unchecked(i, i, two * h);
            }
            offset -= h;
        }
        for (&(i, j), &c) in &self.couplings {
            q.add_unchecked(i, j, four * c);
            q.add_unchecked(i, i, -two * c);
            q.add_unchecked(j, j, -two * c);
            offset += c;
        }
        (q, offset)
    }

    pub fn cast<G: Scalar>(&self) -> IsingModel<G> {
        IsingModel {
            biases: self
                .biases
                .iter()
                .map(|&h| G::from_f64_lossy(h.as_f64()))
                .collect(),
            couplings: self
                .couplings
                .iter()
                .map(|(&k, &v)| (k, G::from_f64_lossy(v.as_f64())))
                .collect(),
        }
    }
}

impl<F: Scalar> QuboModel<F> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            q: BTreeMap::new(),
        }
    }

    pub fn from_entries(
        n: usize,
        entries: impl IntoIterator<Item = ((usize, usize), F)>,
    ) -> Result<Self> {
        let mut m = Self::new(n);
        for ((i, j), v) in entries {
            m.add(i, j, v)?;
        }
        Ok(m)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// Accumulates `v` into `Q_ij`; `i == j` addresses the linear term.
    pub fn add(&mut self, i: usize, j: usize, v: F) -> Result<()> {
        check_index(i, self.n)?;
        check_index(j, self.n)?;
        self.add_unchecked(i, j, v);
        Ok(())
    }

    pub fn add_linear(&mut self, i: usize, v: F) -> Result<()> {
        self.add(i, i, v)
    }

    pub(crate) fn add_unchecked(&mut self, i: usize, j: usize, v: F) {
        *self.q.entry(ordered(i, j)).or_insert_with(F::zero) += v;
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.q.get(&ordered(i, j)).copied().unwrap_or_else(F::zero)
    }

    pub fn linear(&self, i: usize) -> F {
        self.get(i, i)
    }

    /// All stored entries, keyed `(i, j)` with `i <= j`.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), F)> + '_ {
        self.q.iter().map(|(&k, &v)| (k, v))
    }

    /// Off-diagonal entries only.
    pub fn quadratic(&self) -> impl Iterator<Item = ((usize, usize), F)> + '_ {
        self.entries().filter(|&((i, j), _)| i != j)
    }

    pub fn num_entries(&self) -> usize {
        self.q.len()
    }

    /// Largest absolute coefficient, or zero for an empty model.
    pub fn max_abs_coefficient(&self) -> F {
        self.q.values().fold(F::zero(), |m, v| m.max(v.abs()))
    }

    pub fn energy(&self, x: &BinaryState) -> Result<F> {
        if x.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.energy_unchecked(x.as_slice()))
    }

    pub fn energy_unchecked(&self, x: &[u8]) -> F {
        let mut e = F::zero();
        for (&(i, j), &c) in &self.q {
            if x[i] == 1 && x[j] == 1 {
                e += c;
            }
        }
        e
    }

    /// Equivalent Ising model under `x = (s + 1) / 2`, with the constant it drops.
    pub fn to_ising(&self) -> (IsingModel<F>, F) {
        let two = F::one() + F::one();
        let four = two + two;
        let mut m = IsingModel::new(self.n);
        let mut offset = F::zero();
        for (&(i, j), &c) in &self.q {
            if i == j {
                m.biases[i] += c / two;
                offset += c / two;
            } else {
                let quarter = c / four;
                *m.couplings.entry((i, j)).or_insert_with(F::zero) += quarter;
                m.biases[i] += quarter;
                m.biases[j] += quarter;
                offset += quarter;
            }
        }
        (m, offset)
    }

    /// Same model over `n` variables, `n` at least the current count.
    pub fn with_num_vars(mut self, n: usize) -> Result<Self> {
        if n < self.n {
            return Err(Error::invalid(format!(
                "cannot shrink a model of {} variables to {n}",
                self.n
            )));
        }
        self.n = n;
        Ok(self)
    }

    pub fn cast<G: Scalar>(&self) -> QuboModel<G> {
        QuboModel {
            n: self.n,
            q: self
                .q
                .iter()
                .map(|(&k, &v)| (k, G::from_f64_lossy(v.as_f64())))
                .collect(),
        }
    }
}

/// Evaluates `sum h_i s_i + sum_{i<j} J_ij s_i s_j`.
pub fn ising_energy<F: Scalar>(model: &IsingModel<F>, s: &SpinState) -> Result<F> {
    model.energy(s)
}

/// Evaluates `sum Q_ii x_i + sum_{i<j} Q_ij x_i x_j`.
pub fn qubo_energy<F: Scalar>(model: &QuboModel<F>, x: &BinaryState) -> Result<F> {
    model.energy(x)
}

pub fn ising_to_qubo<F: Scalar>(model: &IsingModel<F>) -> (QuboModel<F>, F) {
    model.to_qubo()
}

pub fn qubo_to_ising<F: Scalar>(model: &QuboModel<F>) -> (IsingModel<F>, F) {
    model.to_ising()
}

/// Common view of Ising and QUBO models used by the exhaustive search and
/// graph extraction.
pub trait QuadraticModel<F: Scalar>: Sync {
    type State;

    fn num_vars(&self) -> usize;

    /// Exact energy of the state encoded by `bits` (bit 1 is spin +1).
    fn energy_of_bits(&self, bits: &[u8]) -> F;

    fn state_from_bits(bits: BinaryState) -> Self::State;

    /// Pairwise interactions with `i < j`.
    fn interactions(&self) -> Vec<((usize, usize), F)>;

    /// The model as a QUBO over the same bits, plus the constant offset.
    fn as_qubo(&self) -> (QuboModel<F>, F);
}

impl<F: Scalar> QuadraticModel<F> for IsingModel<F> {
    type State = SpinState;

    fn num_vars(&self) -> usize {
        IsingModel::num_vars(self)
    }

    fn energy_of_bits(&self, bits: &[u8]) -> F {
        IsingModel::energy_of_bits(self, bits)
    }

    fn state_from_bits(bits: BinaryState) -> SpinState {
        bits.to_spins()
    }

    fn interactions(&self) -> Vec<((usize, usize), F)> {
        self.couplings().collect()
    }

    fn as_qubo(&self) -> (QuboModel<F>, F) {
        self.to_qubo()
    }
}

impl<F: Scalar> QuadraticModel<F> for QuboModel<F> {
    type State = BinaryState;

    fn num_vars(&self) -> usize {
        self.n
    }

    fn energy_of_bits(&self, bits: &[u8]) -> F {
        self.energy_unchecked(bits)
    }

    fn state_from_bits(bits: BinaryState) -> BinaryState {
        bits
    }

    fn interactions(&self) -> Vec<((usize, usize), F)> {
        self.quadratic().collect()
    }

    fn as_qubo(&self) -> (QuboModel<F>, F) {
        (self.clone(), F::zero())
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::bqm::{BinaryState, Objective, QuboModel};
use crate::{Error, Result, Scalar};

/// Sorted, duplicate-free variable list of a monomial; empty for the constant.
pub type VarSet = Vec<usize>;

/// Multilinear pseudo-Boolean polynomial `sum_M c_M prod_{i in M} x_i`.
///
/// Products are reduced with `x_i^2 = x_i` as they are formed, so every
/// function of binary variables has exactly one representation. Coefficients
/// whose magnitude falls below [`Scalar::prune_tolerance`] are dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial<F> {
    terms: BTreeMap<VarSet, F>,
}

/// Canonical variable set for an arbitrary list of ids.
pub fn canonical_vars(vars: impl IntoIterator<Item = usize>) -> VarSet {
    let mut v: Vec<usize> = vars.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn union(a: &[usize], b: &[usize]) -> VarSet {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl<F: Scalar> Polynomial<F> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: F) -> Self {
        let mut p = Self::zero();
        p.add_term([], c);
        p
    }

    pub fn var(i: usize) -> Self {
        let mut p = Self::zero();
        p.add_term([i], F::one());
        p
    }

    pub fn term(vars: impl IntoIterator<Item = usize>, coeff: F) -> Self {
        let mut p = Self::zero();
        p.add_term(vars, coeff);
        p
    }

    pub fn from_terms<I, V>(terms: I) -> Self
    where
        I: IntoIterator<Item = (V, F)>,
        V: IntoIterator<Item = usize>,
    {
        let mut p = Self::zero();
        for (vars, c) in terms {
            p.add_term(vars, c);
        }
        p
    }

    /// Accumulates `coeff * prod x_v`; repeated variables collapse.
    pub fn add_term(&mut self, vars: impl IntoIterator<Item = usize>, coeff: F) {
        self.add_canonical(canonical_vars(vars), coeff);
    }

    fn add_canonical(&mut self, key: VarSet, coeff: F) {
        if coeff == F::zero() {
            return;
        }
        let tol = F::prune_tolerance();
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                if coeff.abs() >= tol {
                    e.insert(coeff);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().abs() < tol {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored monomials, including the constant if nonzero.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// One more than the largest variable id, zero for a constant.
    pub fn num_vars(&self) -> usize {
        self.terms
            .keys()
            .filter_map(|k| k.last())
            .max()
            .map_or(0, |&m| m + 1)
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms.keys().flatten().copied().collect()
    }

    /// Monomials in ascending variable-set order.
    pub fn terms(&self) -> impl Iterator<Item = (&VarSet, F)> + '_ {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn coefficient(&self, vars: impl IntoIterator<Item = usize>) -> F {
        self.terms
            .get(&canonical_vars(vars))
            .copied()
            .unwrap_or_else(F::zero)
    }

    pub fn constant_term(&self) -> F {
        self.coefficient([])
    }

    pub fn abs_coefficient_sum(&self) -> F {
        self.terms.values().map(|v| v.abs()).sum()
    }

    pub fn scale(&self, c: F) -> Self {
        let mut p = Self::zero();
        for (k, &v) in &self.terms {
            p.add_canonical(k.clone(), v * c);
        }
        p
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn evaluate(&self, x: &BinaryState) -> Result<F> {
        if x.len() < self.num_vars() {
            return Err(Error::Dimension {
                expected: self.num_vars(),
                got: x.len(),
            });
        }
        Ok(self.evaluate_unchecked(x.as_slice()))
    }

    pub fn evaluate_unchecked(&self, x: &[u8]) -> F {
        let mut e = F::zero();
        for (k, &c) in &self.terms {
            if k.iter().all(|&i| x[i] == 1) {
                e += c;
            }
        }
        e
    }

    /// Sets variable `var` to `bit` and returns the reduced polynomial.
    pub fn fix(&self, var: usize, bit: u8) -> Self {
        let mut p = Self::zero();
        for (k, &c) in &self.terms {
            if k.binary_search(&var).is_ok() {
                if bit == 1 {
                    p.add_canonical(k.iter().copied().filter(|&v| v != var).collect(), c);
                }
            } else {
                p.add_canonical(k.clone(), c);
            }
        }
        p
    }

    /// Renames every variable through `f`.
    pub fn map_vars(&self, f: impl Fn(usize) -> usize) -> Self {
        let mut p = Self::zero();
        for (k, &c) in &self.terms {
            p.add_term(k.iter().map(|&v| f(v)), c);
        }
        p
    }

    /// Polynomial of degree at most two as a QUBO over `n` variables plus
    /// its constant term.
    pub fn to_qubo(&self, n: usize) -> Result<(QuboModel<F>, F)> {
        if self.degree() > 2 {
            return Err(Error::invalid(format!(
                "polynomial of degree {} is not quadratic",
                self.degree()
            )));
        }
        if self.num_vars() > n {
            return Err(Error::Dimension {
                expected: n,
                got: self.num_vars(),
            });
        }
        let mut q = QuboModel::new(n);
        let mut constant = F::zero();
        for (k, &c) in &self.terms {
            match k.as_slice() {
                [] => constant += c,
                [i] => q.add_unchecked(*i, *i, c),
                [i, j] => q.add_unchecked(*i, *j, c),
                _ => unreachable!(),
            }
        }
        Ok((q, constant))
    }

    pub fn from_qubo(q: &QuboModel<F>) -> Self {
        let mut p = Self::zero();
        for ((i, j), v) in q.entries() {
            p.add_term([i, j], v);
        }
        p
    }

    pub fn cast<G: Scalar>(&self) -> Polynomial<G> {
        let mut p = Polynomial::zero();
        for (k, &c) in &self.terms {
            p.add_canonical(k.clone(), G::from_f64_lossy(c.as_f64()));
        }
        p
    }
}

pub fn poly_add<F: Scalar>(p: &Polynomial<F>, q: &Polynomial<F>) -> Polynomial<F> {
    p + q
}

pub fn poly_mul<F: Scalar>(p: &Polynomial<F>, q: &Polynomial<F>) -> Polynomial<F> {
    p * q
}

impl<F: Scalar> AddAssign<&Polynomial<F>> for Polynomial<F> {
    fn add_assign(&mut self, rhs: &Polynomial<F>) {
        for (k, &c) in &rhs.terms {
            self.add_canonical(k.clone(), c);
        }
    }
}

impl<F: Scalar> AddAssign<Polynomial<F>> for Polynomial<F> {
    fn add_assign(&mut self, rhs: Polynomial<F>) {
        for (k, c) in rhs.terms {
            self.add_canonical(k, c);
        }
    }
}

impl<F: Scalar> Add for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn add(self, rhs: &Polynomial<F>) -> Polynomial<F> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<F: Scalar> Add for Polynomial<F> {
    type Output = Polynomial<F>;
    fn add(mut self, rhs: Polynomial<F>) -> Polynomial<F> {
        self += rhs;
        self
    }
}

impl<F: Scalar> Neg for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn neg(self) -> Polynomial<F> {
        self.scale(-F::one())
    }
}

impl<F: Scalar> Neg for Polynomial<F> {
    type Output = Polynomial<F>;
    fn neg(self) -> Polynomial<F> {
        self.scale(-F::one())
    }
}

impl<F: Scalar> Sub for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn sub(self, rhs: &Polynomial<F>) -> Polynomial<F> {
        let mut out = self.clone();
        for (k, &c) in &rhs.terms {
            out.add_canonical(k.clone(), -c);
        }
        out
    }
}

impl<F: Scalar> Sub for Polynomial<F> {
    type Output = Polynomial<F>;
    fn sub(self, rhs: Polynomial<F>) -> Polynomial<F> {
        &self - &rhs
    }
}

impl<F: Scalar> Mul for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn mul(self, rhs: &Polynomial<F>) -> Polynomial<F> {
        // Accumulate raw products before pruning so cancellations that pass
        // through a tiny intermediate value are not lost.
        let mut acc: BTreeMap<VarSet, F> = BTreeMap::new();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &rhs.terms {
                *acc.entry(union(a, b)).or_insert_with(F::zero) += ca * cb;
            }
        }
        let tol = F::prune_tolerance();
        Polynomial {
            terms: acc.into_iter().filter(|(_, v)| v.abs() >= tol).collect(),
        }
    }
}

impl<F: Scalar> Mul for Polynomial<F> {
    type Output = Polynomial<F>;
    fn mul(self, rhs: Polynomial<F>) -> Polynomial<F> {
        &self * &rhs
    }
}

impl<F: Scalar> Mul<F> for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn mul(self, rhs: F) -> Polynomial<F> {
        self.scale(rhs)
    }
}

impl<F: Scalar> Mul<F> for Polynomial<F> {
    type Output = Polynomial<F>;
    fn mul(self, rhs: F) -> Polynomial<F> {
        self.scale(rhs)
    }
}

impl<F: Scalar> Objective for Polynomial<F> {
    fn num_vars(&self) -> usize {
        Polynomial::num_vars(self)
    }

    fn value(&self, x: &[u8]) -> f64 {
        self.evaluate_unchecked(x).as_f64()
    }
}

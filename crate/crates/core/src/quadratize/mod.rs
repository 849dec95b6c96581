//! Degree reduction of pseudo-Boolean polynomials to quadratic form.
//!
//! Every reducer keeps the original variables and appends auxiliaries above
//! them. The reduced polynomial `r(x, a)` is exact when
//! `min_a r(x, a) == p(x)` for every assignment `x` of the originals; the
//! [`verify`] helpers check this exhaustively for small inputs.

mod deduction;
mod elc;
mod terms;
pub mod verify;

use std::fmt;

use crate::bqm::QuboModel;
use crate::pbf::{Polynomial, VarSet};
use crate::{Error, Result, Scalar};

pub use deduction::{deduction_reduce, naive_deduction, DeducedValue, Deduction};
pub use elc::{elc_reduce, elc_term};
pub use terms::{ntr_reduce, ptr_reduce, substitution_penalty};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Substitution,
    Ntr,
    Ptr,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Substitution => "substitution",
            Method::Ntr => "ntr",
            Method::Ptr => "ptr",
        })
    }
}

/// One auxiliary variable and the term it was introduced for.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxVar {
    pub id: usize,
    pub method: Method,
    /// Variables of the monomial (or pair, for substitution) being reduced.
    pub term: VarSet,
}

/// Auxiliary ids handed out above the original variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuxAllocation {
    pub original_n: usize,
    pub aux: Vec<AuxVar>,
}

impl AuxAllocation {
    pub fn new(original_n: usize) -> Self {
        Self {
            original_n,
            aux: Vec::new(),
        }
    }

    pub fn num_aux(&self) -> usize {
        self.aux.len()
    }

    pub fn total_vars(&self) -> usize {
        self.original_n + self.aux.len()
    }

    pub fn is_aux(&self, var: usize) -> bool {
        var >= self.original_n
    }

    fn allocate(&mut self, method: Method, term: &[usize]) -> usize {
        let id = self.total_vars();
        self.aux.push(AuxVar {
            id,
            method,
            term: term.to_vec(),
        });
        id
    }

    pub fn count(&self, method: Method) -> usize {
        self.aux.iter().filter(|a| a.method == method).count()
    }

    /// One line per auxiliary: `aux <id> <method> <vars...>`.
    pub fn report(&self) -> String {
        let mut out = format!(
            "# {} original variables, {} auxiliaries\n",
            self.original_n,
            self.aux.len()
        );
        for a in &self.aux {
            out.push_str(&format!("aux {} {}", a.id, a.method));
            for v in &a.term {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult<F> {
    /// Reduced polynomial over originals and auxiliaries. Degree is at most
    /// two except after a single substitution pass, which only removes one
    /// pair.
    pub poly: Polynomial<F>,
    pub alloc: AuxAllocation,
    pub penalties_used: Vec<F>,
    pub warnings: Vec<String>,
}

impl<F: Scalar> ReductionResult<F> {
    /// The reduced polynomial as a QUBO over all variables, with its constant.
    pub fn to_qubo(&self) -> Result<(QuboModel<F>, F)> {
        self.poly.to_qubo(self.alloc.total_vars())
    }
}

/// Default substitution weight: ten times the absolute coefficient sum.
pub fn default_substitution_gamma<F: Scalar>(p: &Polynomial<F>) -> F {
    F::from_f64_lossy(10.0) * p.abs_coefficient_sum()
}

/// Replaces the pair `x_i x_j` by a fresh auxiliary in every monomial that
/// contains it and adds `gamma (x_i x_j - 2 (x_i + x_j) x_a + 3 x_a)`.
pub fn reduce_by_substitution<F: Scalar>(
    p: &Polynomial<F>,
    pair: (usize, usize),
    gamma: F,
) -> Result<ReductionResult<F>> {
    if !(gamma > F::zero()) {
        return Err(Error::invalid(format!(
            "substitution weight must be positive, got {gamma}"
        )));
    }
    let (i, j) = (pair.0.min(pair.1), pair.0.max(pair.1));
    if i == j {
        return Err(Error::invalid(
            "substitution pair needs two distinct variables",
        ));
    }
    let mut alloc = AuxAllocation::new(p.num_vars().max(j + 1));
    let present = p
        .terms()
        .any(|(vars, _)| vars.len() >= 3 && vars.contains(&i) && vars.contains(&j));
    if !present {
        return Ok(ReductionResult {
            poly: p.clone(),
            alloc,
            penalties_used: Vec::new(),
            warnings: vec![format!(
                "pair ({i}, {j}) does not occur in any term of degree 3 or more; nothing reduced"
            )],
        });
    }
    let a = alloc.allocate(Method::Substitution, &[i, j]);
    let mut out = Polynomial::zero();
    for (vars, c) in p.terms() {
        if vars.contains(&i) && vars.contains(&j) {
            out.add_term(
                vars.iter()
                    .copied()
                    .filter(|&v| v != i && v != j)
                    .chain([a]),
                c,
            );
        } else {
            out.add_term(vars.iter().copied(), c);
        }
    }
    out += substitution_penalty(i, j, a).scale(gamma);
    Ok(ReductionResult {
        poly: out,
        alloc,
        penalties_used: vec![gamma],
        warnings: Vec::new(),
    })
}

/// Repeated substitution of the most frequent pair until the polynomial is
/// quadratic. Each pass uses `gamma` (or the default for the current
/// polynomial when `None`).
pub fn quadratize_by_substitution<F: Scalar>(
    p: &Polynomial<F>,
    gamma: Option<F>,
) -> Result<ReductionResult<F>> {
    let original_n = p.num_vars();
    let mut current = p.clone();
    let mut alloc = AuxAllocation::new(original_n);
    let mut penalties = Vec::new();
    while current.degree() > 2 {
        let mut counts = std::collections::BTreeMap::<(usize, usize), usize>::new();
        for (vars, _) in current.terms() {
            if vars.len() >= 3 {
                for (k, &u) in vars.iter().enumerate() {
                    for &v in &vars[k + 1..] {
                        *counts.entry((u, v)).or_default() += 1;
                    }
                }
            }
        }
        // Most frequent pair, smallest pair on ties.
        let (&pair, _) = counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .ok_or_else(|| Error::Internal("no pair in a term of degree 3".into()))?;
        let g = gamma.unwrap_or_else(|| default_substitution_gamma(&current));
        let step = reduce_by_substitution(&current, pair, g)?;
        let a = step.alloc.aux[0].clone();
        let id = alloc.allocate(a.method, &a.term);
        debug_assert_eq!(id, a.id);
        penalties.push(g);
        current = step.poly;
    }
    Ok(ReductionResult {
        poly: current,
        alloc,
        penalties_used: penalties,
        warnings: Vec::new(),
    })
}

/// Reduces every term of degree 3 or more: NTR for negative coefficients,
/// PTR for positive ones. Auxiliaries start at `p.num_vars()` and follow the
/// sorted order of the terms.
pub fn quadratize_full<F: Scalar>(p: &Polynomial<F>) -> ReductionResult<F> {
    quadratize_full_from(p, p.num_vars())
}

/// As [`quadratize_full`], with auxiliaries allocated from `aux_base`, which
/// must be at least `p.num_vars()`.
pub fn quadratize_full_from<F: Scalar>(p: &Polynomial<F>, aux_base: usize) -> ReductionResult<F> {
    let mut alloc = AuxAllocation::new(aux_base.max(p.num_vars()));
    let mut out = Polynomial::zero();
    for (vars, c) in p.terms() {
        if vars.len() <= 2 {
            out.add_term(vars.iter().copied(), c);
            continue;
        }
        let reduced = if c < F::zero() {
            let a = alloc.allocate(Method::Ntr, vars);
            ntr_reduce(vars, c, a)
        } else {
            let ids: Vec<usize> = (0..vars.len() - 2)
                .map(|_| alloc.allocate(Method::Ptr, vars))
                .collect();
            ptr_reduce(vars, c, &ids)
        };
        out += reduced.expect("term sign and degree checked above");
    }
    ReductionResult {
        poly: out,
        alloc,
        penalties_used: Vec::new(),
        warnings: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratize::verify::check_exact;

    type P = Polynomial<f64>;

    fn example() -> P {
        P::from_terms([
            (vec![1, 2, 3], 2.0),
            (vec![2, 3, 4], 4.0),
            (vec![2, 3, 5], -5.0),
        ])
    }

    #[test]
    fn substitution_matches_worked_example() {
        let gamma = 7.0;
        let r = reduce_by_substitution(&example(), (2, 3), gamma).unwrap();
        let a = 6;
        assert_eq!(r.alloc.aux.len(), 1);
        assert_eq!(r.alloc.aux[0].id, a);
        let mut expect = P::from_terms([(vec![1, a], 2.0), (vec![a, 4], 4.0), (vec![a, 5], -5.0)]);
        expect += P::from_terms([
            (vec![2, 3], 1.0),
            (vec![2, a], -2.0),
            (vec![3, a], -2.0),
            (vec![a], 3.0),
        ])
        .scale(gamma);
        assert_eq!(r.poly, expect);
        assert_eq!(r.penalties_used, vec![gamma]);
    }

    #[test]
    fn substitution_with_large_gamma_preserves_argmin() {
        let p = example();
        let r = reduce_by_substitution(&p, (2, 3), 20.0).unwrap();
        let orig = crate::bqm::exhaustive_min(6, 20, |x| p.evaluate_unchecked(x)).unwrap();
        let red = verify::min_over_aux_all(&r.poly, 6, r.alloc.total_vars()).unwrap();
        let red_min = red.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(orig.0, red_min);
        let red_arg: Vec<u64> = (0..64u64).filter(|&i| red[i as usize] == red_min).collect();
        let orig_arg: Vec<u64> = orig.1.iter().map(|s| s.index()).collect();
        assert_eq!(red_arg, orig_arg);
    }

    #[test]
    fn substitution_of_absent_pair_warns() {
        let p = P::from_terms([(vec![0, 1], 1.0)]);
        let r = reduce_by_substitution(&p, (0, 1), 1.0).unwrap();
        assert_eq!(r.poly, p);
        assert_eq!(r.warnings.len(), 1);
        assert!(reduce_by_substitution(&p, (0, 1), 0.0).is_err());
    }

    #[test]
    fn repeated_substitution_reaches_quadratic() {
        let p = P::from_terms([
            (vec![0, 1, 2, 3], 3.0),
            (vec![1, 2, 4], -2.0),
            (vec![0], 1.0),
        ]);
        let r = quadratize_by_substitution(&p, None).unwrap();
        assert!(r.poly.degree() <= 2);
        let orig = crate::bqm::exhaustive_min(5, 20, |x| p.evaluate_unchecked(x)).unwrap();
        let red = verify::min_over_aux_all(&r.poly, 5, r.alloc.total_vars()).unwrap();
        let red_min = red.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(orig.0, red_min);
    }

    #[test]
    fn full_quadratization_is_exact_and_counts_aux() {
        let p = P::from_terms([
            (vec![0, 1, 2, 3, 4], 1.5),
            (vec![1, 2, 3], -2.0),
            (vec![0, 4], 0.25),
            (vec![2, 3, 4, 5], 0.75),
        ]);
        let r = quadratize_full(&p);
        assert!(r.poly.degree() <= 2);
        assert_eq!(r.alloc.count(Method::Ptr), 3 + 2);
        assert_eq!(r.alloc.count(Method::Ntr), 1);
        assert_eq!(check_exact(&p, &r).unwrap(), None);
    }

    #[test]
    fn quadratic_input_is_identity() {
        let p = P::from_terms([(vec![0, 1], -1.0), (vec![2], 3.0), (vec![], 1.0)]);
        let r = quadratize_full(&p);
        assert_eq!(r.poly, p);
        assert_eq!(r.alloc.num_aux(), 0);
    }
}

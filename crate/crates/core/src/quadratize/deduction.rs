use super::terms::substitution_penalty;
use crate::pbf::Polynomial;
use crate::Scalar;

/// What the product `x_i x_j` is known to equal in every ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeducedValue {
    Zero,
    EqualsVar(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Deduction {
    pub pair: (usize, usize),
    pub value: DeducedValue,
}

impl Deduction {
    pub fn zero(i: usize, j: usize) -> Self {
        Self {
            pair: (i.min(j), i.max(j)),
            value: DeducedValue::Zero,
        }
    }

    pub fn equals(i: usize, j: usize, k: usize) -> Self {
        Self {
            pair: (i.min(j), i.max(j)),
            value: DeducedValue::EqualsVar(k),
        }
    }

    fn hits(&self, vars: &[usize]) -> bool {
        vars.binary_search(&self.pair.0).is_ok() && vars.binary_search(&self.pair.1).is_ok()
    }
}

/// Term-by-term deduction substitution on monomials of degree 3 or more.
///
/// Under `x_i x_j = 0`, a term `c M` with `{i, j}` in `M` becomes
/// `c x_i x_j` when `c > 0` and is dropped when `c < 0`; both choices agree
/// with the original wherever `x_i x_j = 0` and never lower any energy.
/// Under `x_i x_j = x_k` the pair is replaced by `x_k` and the penalty
/// `|c| (x_i x_j - 2 (x_i + x_j) x_k + 3 x_k)` is added, which covers the
/// largest possible change of that term.
pub fn deduction_reduce<F: Scalar>(p: &Polynomial<F>, deductions: &[Deduction]) -> Polynomial<F> {
    let mut current = p.clone();
    for d in deductions {
        let mut out = Polynomial::zero();
        let (i, j) = d.pair;
        for (vars, c) in current.terms() {
            if vars.len() < 3 || !d.hits(vars) {
                out.add_term(vars.iter().copied(), c);
                continue;
            }
            match d.value {
                DeducedValue::Zero => {
                    if c > F::zero() {
                        out.add_term([i, j], c);
                    }
                }
                DeducedValue::EqualsVar(k) => {
                    out.add_term(
                        vars.iter()
                            .copied()
                            .filter(|&v| v != i && v != j)
                            .chain([k]),
                        c,
                    );
                    out += substitution_penalty(i, j, k).scale(c.abs());
                }
            }
        }
        current = out;
    }
    current
}

/// Global substitution of `x_i x_j = 0`: drops every monomial that contains
/// any of the pairs. Not energy-preserving in general; kept to exhibit the
/// failure.
pub fn naive_deduction<F: Scalar>(p: &Polynomial<F>, pairs: &[(usize, usize)]) -> Polynomial<F> {
    let mut out = Polynomial::zero();
    for (vars, c) in p.terms() {
        let hit = pairs.iter().any(|&(i, j)| Deduction::zero(i, j).hits(vars));
        if !hit {
            out.add_term(vars.iter().copied(), c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bqm::exhaustive_min;
    use crate::quadratize::verify::preserves_ground_state;

    type P = Polynomial<f64>;

    /// The constraint system x1+x2+x3=1, x1x4+x2x5=x3, x1+2x2=x3+2x4 as a
    /// sum of squared residuals, over variables 1..=5.
    fn constraint_hamiltonian() -> P {
        let v = P::var;
        let one = P::constant(1.0);
        let r1 = &(&(&v(1) + &v(2)) + &v(3)) - &one;
        let r2 = &(&(&v(1) * &v(4)) + &(&v(2) * &v(5))) - &v(3);
        let r3 = &(&(&v(1) + &v(2).scale(2.0)) - &v(3)) - &v(4).scale(2.0);
        &(&r1.square() + &r2.square()) + &r3.square()
    }

    #[test]
    fn expansion_matches_printed_form() {
        // The printed form lists -2 x1 x3 x5; the cross term of x1 x4 with
        // -x3 is -2 x1 x3 x4.
        let printed = P::from_terms([
            (vec![1, 2, 4, 5], 2.0),
            (vec![1, 3, 4], -2.0),
            (vec![2, 3, 5], -2.0),
            (vec![2, 3], -2.0),
            (vec![1, 2], 6.0),
            (vec![1, 4], -3.0),
            (vec![2, 4], -8.0),
            (vec![2, 5], 1.0),
            (vec![2], 3.0),
            (vec![3, 4], 4.0),
            (vec![3], 1.0),
            (vec![4], 4.0),
            (vec![], 1.0),
        ]);
        assert_eq!(constraint_hamiltonian(), printed);
    }

    #[test]
    fn naive_substitution_breaks_ground_energy() {
        let h = constraint_hamiltonian();
        let (min, _) = exhaustive_min(6, 20, |x| h.evaluate_unchecked(x)).unwrap();
        assert_eq!(min, 0.0);
        let naive = naive_deduction(&h, &[(1, 2), (2, 3), (1, 3)]);
        let spectrum: Vec<f64> = (0..64u64)
            .map(|i| naive.evaluate_unchecked(crate::bqm::BinaryState::from_index(i, 6).as_slice()))
            .collect();
        assert!(spectrum.contains(&-3.0));
        assert!(spectrum.contains(&-2.0));
        assert!(!preserves_ground_state(&h, &naive, 6).unwrap());
    }

    #[test]
    fn term_by_term_substitution_keeps_ground_energy() {
        let h = constraint_hamiltonian();
        let one = deduction_reduce(&h, &[Deduction::zero(1, 2)]);
        assert_eq!(one.coefficient([1, 2, 4, 5]), 0.0);
        assert_eq!(one.coefficient([1, 2]), 6.0 + 2.0);
        assert!(preserves_ground_state(&h, &one, 6).unwrap());

        let all = deduction_reduce(
            &h,
            &[
                Deduction::zero(1, 2),
                Deduction::zero(2, 3),
                Deduction::zero(1, 3),
            ],
        );
        assert!(all.degree() <= 2);
        assert!(preserves_ground_state(&h, &all, 6).unwrap());
        for idx in 0..64u64 {
            let x = crate::bqm::BinaryState::from_index(idx, 6);
            assert!(all.evaluate_unchecked(x.as_slice()) >= h.evaluate_unchecked(x.as_slice()));
        }
    }

    #[test]
    fn equality_deduction_never_lowers_energy() {
        // x0 x1 x2 - x0 x1 x3 with x0 x1 = x4 enforced elsewhere.
        let p = P::from_terms([(vec![0, 1, 2], 1.0), (vec![0, 1, 3], -1.0)]);
        let r = deduction_reduce(&p, &[Deduction::equals(0, 1, 4)]);
        assert!(r.degree() <= 2);
        for idx in 0..32u64 {
            let x = crate::bqm::BinaryState::from_index(idx, 5);
            let (o, n) = (
                p.evaluate_unchecked(x.as_slice()),
                r.evaluate_unchecked(x.as_slice()),
            );
            if x.get(4) == x.get(0) * x.get(1) {
                assert_eq!(o, n);
            } else {
                assert!(n >= o);
            }
        }
    }

    #[test]
    fn missing_pair_is_identity() {
        let p = P::from_terms([(vec![0, 2, 3], 1.0), (vec![1], 2.0)]);
        assert_eq!(deduction_reduce(&p, &[Deduction::zero(0, 1)]), p);
    }
}

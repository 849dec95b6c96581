use super::Polynomial;
use crate::{Error, Result, Scalar};

/// Penalty `gamma * c(x)` where `c >= 0` vanishes exactly on feasible states.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltySpec<F> {
    gamma: F,
    constraint: Polynomial<F>,
}

impl<F: Scalar> PenaltySpec<F> {
    pub fn new(gamma: F, constraint: Polynomial<F>) -> Result<Self> {
        if !(gamma > F::zero()) || !gamma.is_finite() {
            return Err(Error::invalid(format!(
                "penalty weight must be positive, got {gamma}"
            )));
        }
        Ok(Self { gamma, constraint })
    }

    /// Penalty for the linear equality `sum_i a_i x_i = rhs`, as
    /// `gamma (rhs - sum a_i x_i)^2`.
    pub fn linear_equality(gamma: F, terms: &[(usize, F)], rhs: F) -> Result<Self> {
        let mut lhs = Polynomial::constant(rhs);
        for &(i, a) in terms {
            lhs.add_term([i], -a);
        }
        Self::new(gamma, lhs.square())
    }

    pub fn gamma(&self) -> F {
        self.gamma
    }

    pub fn constraint(&self) -> &Polynomial<F> {
        &self.constraint
    }

    pub fn weighted(&self) -> Polynomial<F> {
        self.constraint.scale(self.gamma)
    }
}

/// `objective + gamma * constraint`.
pub fn add_penalty<F: Scalar>(
    objective: &Polynomial<F>,
    penalty: &PenaltySpec<F>,
) -> Polynomial<F> {
    objective + &penalty.weighted()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bqm::exhaustive_min;

    type P = Polynomial<f64>;

    fn objective() -> P {
        P::from_terms([(vec![1, 2, 3], 1.0), (vec![1, 3], 3.0), (vec![2], 2.0)])
    }

    #[test]
    fn equality_penalty_shape() {
        let pen = PenaltySpec::linear_equality(4.0, &[(1, 1.0), (2, 1.0)], 1.0).unwrap();
        let expect = P::from_terms([
            (vec![], 1.0),
            (vec![1], -1.0),
            (vec![2], -1.0),
            (vec![1, 2], 2.0),
        ]);
        assert_eq!(pen.constraint(), &expect);
        assert!(PenaltySpec::new(0.0, expect.clone()).is_err());
        assert!(PenaltySpec::new(-1.0, expect).is_err());
    }

    #[test]
    fn feasible_energies_unchanged_and_argmin_feasible() {
        let f = objective();
        let gamma = 10.0 * f.abs_coefficient_sum();
        let pen = PenaltySpec::linear_equality(gamma, &[(1, 1.0), (2, 1.0)], 1.0).unwrap();
        let g = add_penalty(&f, &pen);
        for idx in 0..16u64 {
            let x = crate::bqm::BinaryState::from_index(idx, 4);
            if x.get(1) + x.get(2) == 1 {
                assert_eq!(g.evaluate(&x).unwrap(), f.evaluate(&x).unwrap());
            }
        }
        let (_, argmin) = exhaustive_min(4, 20, |x| g.evaluate_unchecked(x)).unwrap();
        assert!(argmin.iter().all(|x| x.get(1) + x.get(2) == 1));
    }

    #[test]
    fn zero_constraint_is_identity() {
        let pen = PenaltySpec::new(3.0, P::zero()).unwrap();
        assert_eq!(add_penalty(&objective(), &pen), objective());
    }
}

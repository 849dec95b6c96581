use crate::pbf::Polynomial;
use crate::{Error, Result, Scalar};

/// `x_i x_j - 2 (x_i + x_j) x_a + 3 x_a`: zero when `x_a = x_i x_j`, at
/// least one otherwise.
pub fn substitution_penalty<F: Scalar>(i: usize, j: usize, a: usize) -> Polynomial<F> {
    let two = F::one() + F::one();
    Polynomial::from_terms([
        (vec![i, j], F::one()),
        (vec![i, a], -two),
        (vec![j, a], -two),
        (vec![a], two + F::one()),
    ])
}

/// Negative term reduction with one auxiliary `a`:
/// `c prod x_i` (c < 0) becomes `|c| ((d - 1) x_a - sum_i x_i x_a)`.
pub fn ntr_reduce<F: Scalar>(vars: &[usize], coeff: F, a: usize) -> Result<Polynomial<F>> {
    if !(coeff < F::zero()) {
        return Err(Error::invalid(format!(
            "negative term reduction needs a negative coefficient, got {coeff}"
        )));
    }
    let d = vars.len();
    if d < 3 {
        return Err(Error::invalid(format!(
            "term of degree {d} needs no reduction"
        )));
    }
    let m = coeff.abs();
    let mut p = Polynomial::term([a], m * F::from_usize(d - 1).unwrap());
    for &v in vars {
        p.add_term([v, a], -m);
    }
    Ok(p)
}

/// Positive term reduction with `d - 2` auxiliaries `aux[0..d-2]`:
/// `prod x_i` becomes
/// `sum_{i=1}^{d-2} a_i (d - i - 1 + x_i - sum_{j>i} x_j) + x_{d-1} x_d`,
/// scaled by `c > 0`. Variables are taken in the order given.
pub fn ptr_reduce<F: Scalar>(vars: &[usize], coeff: F, aux: &[usize]) -> Result<Polynomial<F>> {
    if !(coeff > F::zero()) {
        return Err(Error::invalid(format!(
            "positive term reduction needs a positive coefficient, got {coeff}"
        )));
    }
    let d = vars.len();
    if d < 3 {
        return Err(Error::invalid(format!(
            "term of degree {d} needs no reduction"
        )));
    }
    if aux.len() != d - 2 {
        return Err(Error::invalid(format!(
            "degree {d} term needs {} auxiliaries, got {}",
            d - 2,
            aux.len()
        )));
    }
    let mut p = Polynomial::zero();
    for (k, &a) in aux.iter().enumerate() {
        // k is the zero-based position, i = k + 1 in the formula.
        let constant = F::from_usize(d - k - 2).unwrap();
        p.add_term([a], coeff * constant);
        p.add_term([a, vars[k]], coeff);
        for &v in &vars[k + 1..] {
            p.add_term([a, v], -coeff);
        }
    }
    p.add_term([vars[d - 2], vars[d - 1]], coeff);
    Ok(p)
}

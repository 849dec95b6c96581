use crate::bqm::exhaustive_min;
use crate::pbf::{canonical_vars, Polynomial};
use crate::{Error, Result, Scalar};

/// Largest polynomial checked for excludability by enumeration.
const ELC_CHECK_MAX_VARS: usize = 20;

/// `|zeta| prod_i (a_i x_i + (1 - a_i)(1 - x_i))`, which equals `|zeta|` on
/// the configuration `a` and zero elsewhere.
pub fn elc_term<F: Scalar>(vars: &[usize], assignment: &[u8], zeta: F) -> Polynomial<F> {
    let mut psi = Polynomial::constant(zeta.abs());
    for (&v, &a) in vars.iter().zip(assignment) {
        let factor = if a == 1 {
            Polynomial::var(v)
        } else {
            &Polynomial::constant(F::one()) - &Polynomial::var(v)
        };
        psi = &psi * &factor;
    }
    psi
}

/// Removes the monomial over `vars` by adding the ELC term for the partial
/// assignment `assignment`.
///
/// The configuration must have the parity that makes the top coefficient of
/// the ELC term cancel the monomial: with a negative coefficient the number
/// of ones has the parity of the monomial's degree, with a positive one the
/// opposite parity. When the polynomial is small enough the configuration is
/// also checked to be excludable, meaning no ground state contains it.
pub fn elc_reduce<F: Scalar>(
    p: &Polynomial<F>,
    vars: &[usize],
    assignment: &[u8],
) -> Result<Polynomial<F>> {
    if vars.len() != assignment.len() {
        return Err(Error::invalid("ELC needs one value per variable"));
    }
    let sorted = canonical_vars(vars.iter().copied());
    if sorted.len() != vars.len() {
        return Err(Error::invalid("ELC variables must be distinct"));
    }
    let zeta = p.coefficient(vars.iter().copied());
    if zeta == F::zero() {
        return Err(Error::invalid(format!("no term over variables {vars:?}")));
    }
    let ones = assignment.iter().filter(|&&a| a == 1).count();
    let same_parity = ones % 2 == vars.len() % 2;
    if (zeta < F::zero()) != same_parity {
        return Err(Error::invalid(format!(
            "ELC parity condition fails: coefficient {zeta}, {} variables, {ones} ones",
            vars.len()
        )));
    }
    let n = p.num_vars();
    if n <= ELC_CHECK_MAX_VARS {
        let (_, argmin) = exhaustive_min(n, ELC_CHECK_MAX_VARS, |x| p.evaluate_unchecked(x))?;
        let hit = argmin
            .iter()
            .find(|s| vars.iter().zip(assignment).all(|(&v, &a)| s.get(v) == a));
        if let Some(s) = hit {
            return Err(Error::invalid(format!(
                "configuration is not excludable: ground state {s} contains it"
            )));
        }
    }
    let out = p + &elc_term(vars, assignment, zeta);
    debug_assert!(out.coefficient(vars.iter().copied()) == F::zero());
    Ok(out)
}

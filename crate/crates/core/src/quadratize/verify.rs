//! Exhaustive checks that a reduction preserves the original energies.

use super::ReductionResult;
use crate::bqm::{exhaustive_min, BinaryState};
use crate::pbf::Polynomial;
use crate::{Error, Result, Scalar};

/// Largest original variable count accepted by the exhaustive checks.
pub const MAX_ORIGINAL_VARS: usize = 20;
/// Largest number of coupled auxiliaries minimized by enumeration.
pub const MAX_COUPLED_AUX: usize = 20;

/// The polynomial in the auxiliaries left after fixing the originals.
pub fn restrict_to_aux<F: Scalar>(
    poly: &Polynomial<F>,
    original_n: usize,
    originals: &[u8],
) -> Polynomial<F> {
    let mut out = Polynomial::zero();
    for (vars, c) in poly.terms() {
        let split = vars.partition_point(|&v| v < original_n);
        if vars[..split].iter().all(|&v| originals[v] == 1) {
            out.add_term(vars[split..].iter().copied(), c);
        }
    }
    out
}

/// `min_a poly(x, a)` for the given originals `x`.
///
/// When the auxiliaries do not interact with each other (the case for NTR,
/// PTR and single-level substitution) each one is minimized independently;
/// otherwise the coupled auxiliaries are enumerated.
pub fn min_over_aux<F: Scalar>(
    poly: &Polynomial<F>,
    original_n: usize,
    originals: &[u8],
) -> Result<F> {
    let r = restrict_to_aux(poly, original_n, originals);
    if r.degree() <= 1 {
        let mut m = r.constant_term();
        for (vars, c) in r.terms() {
            if !vars.is_empty() && c < F::zero() {
                m += c;
            }
        }
        return Ok(m);
    }
    let aux: Vec<usize> = r.variables().into_iter().collect();
    if aux.len() > MAX_COUPLED_AUX {
        return Err(Error::Capacity {
            what: "coupled auxiliary count",
            n: aux.len(),
            limit: MAX_COUPLED_AUX,
        });
    }
    let compact = r.map_vars(|v| aux.binary_search(&v).unwrap());
    let (m, _) = exhaustive_min(aux.len(), MAX_COUPLED_AUX, |a| {
        compact.evaluate_unchecked(a)
    })?;
    Ok(m)
}

/// `min_a poly(x, a)` for every assignment of the first `original_n`
/// variables, indexed by the state index.
pub fn min_over_aux_all<F: Scalar>(
    poly: &Polynomial<F>,
    original_n: usize,
    total_n: usize,
) -> Result<Vec<F>> {
    if original_n > MAX_ORIGINAL_VARS {
        return Err(Error::Capacity {
            what: "original variable count",
            n: original_n,
            limit: MAX_ORIGINAL_VARS,
        });
    }
    if poly.num_vars() > total_n {
        return Err(Error::Dimension {
            expected: total_n,
            got: poly.num_vars(),
        });
    }
    (0..1u64 << original_n)
        .map(|idx| {
            let x = BinaryState::from_index(idx, original_n);
            min_over_aux(poly, original_n, x.as_slice())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample<F> {
    pub state: BinaryState,
    pub original: F,
    pub reduced: F,
}

/// Compares `min_a reduced(x, a)` with `original(x)` on every assignment of
/// the originals. Returns the first mismatch beyond a rounding tolerance
/// scaled by the coefficient magnitudes.
pub fn check_exact<F: Scalar>(
    original: &Polynomial<F>,
    result: &ReductionResult<F>,
) -> Result<Option<Counterexample<F>>> {
    let n = result.alloc.original_n;
    let mins = min_over_aux_all(&result.poly, n, result.alloc.total_vars())?;
    let scale = original.abs_coefficient_sum() + result.poly.abs_coefficient_sum();
    let tol = F::from_f64_lossy(1e-9) * (F::one() + scale);
    for (idx, &reduced) in mins.iter().enumerate() {
        let state = BinaryState::from_index(idx as u64, n);
        let orig = original.evaluate_unchecked(state.as_slice());
        if (orig - reduced).abs() > tol {
            return Ok(Some(Counterexample {
                state,
                original: orig,
                reduced,
            }));
        }
    }
    Ok(None)
}

/// Whether both polynomials have the same minimum value and the reduced
/// one keeps at least one of the original argmin states (with auxiliaries
/// minimized out).
pub fn preserves_ground_state<F: Scalar>(
    original: &Polynomial<F>,
    reduced: &Polynomial<F>,
    original_n: usize,
) -> Result<bool> {
    let (orig_min, orig_arg) = exhaustive_min(original_n, MAX_ORIGINAL_VARS, |x| {
        original.evaluate_unchecked(x)
    })?;
    let mins = min_over_aux_all(reduced, original_n, reduced.num_vars().max(original_n))?;
    let red_min = mins.iter().copied().fold(F::infinity(), F::min);
    let tol = F::from_f64_lossy(1e-9) * (F::one() + original.abs_coefficient_sum());
    if (red_min - orig_min).abs() > tol {
        return Ok(false);
    }
    Ok(orig_arg
        .iter()
        .any(|s| (mins[s.index() as usize] - red_min).abs() <= tol))
}

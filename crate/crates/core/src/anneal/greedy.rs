use std::collections::BTreeMap;

use super::{SampleSet, Sampler, SamplerRequest, Target};
use crate::bqm::{BinaryState, Objective};
use crate::{Error, Result};

/// Largest group the greedy oracle enumerates.
pub const GREEDY_MAX_GROUP: usize = 20;

/// Noiseless idealization of a cyclic inhomogeneous anneal.
///
/// For each cycle and each group in order, the group's bits are set to the
/// joint assignment minimizing the objective with all other bits fixed.
/// Ties are broken by the lowest mean energy over single-bit flips within the
/// group (the assignment sitting in the widest basin), then in favour of the
/// current assignment, then by enumeration order.
pub fn sequential_greedy(
    objective: &dyn Objective,
    groups: &[Vec<usize>],
    initial: &BinaryState,
    cycles: usize,
) -> Result<BinaryState> {
    let n = objective.num_vars();
    if initial.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: initial.len(),
        });
    }
    for g in groups {
        if g.len() > GREEDY_MAX_GROUP {
            return Err(Error::Capacity {
                what: "greedy group size",
                n: g.len(),
                limit: GREEDY_MAX_GROUP,
            });
        }
        if let Some(&v) = g.iter().find(|&&v| v >= n) {
            return Err(Error::invalid(format!("group variable {v} out of range")));
        }
    }
    let mut x = initial.clone();
    for _ in 0..cycles {
        for g in groups {
            optimize_group(objective, g, x.as_mut_slice());
        }
    }
    Ok(x)
}

fn set_group(x: &mut [u8], group: &[usize], a: usize) {
    for (b, &v) in group.iter().enumerate() {
        x[v] = ((a >> b) & 1) as u8;
    }
}

fn optimize_group(objective: &dyn Objective, group: &[usize], x: &mut [u8]) {
    if group.is_empty() {
        return;
    }
    let current = group
        .iter()
        .enumerate()
        .fold(0usize, |acc, (b, &v)| acc | ((x[v] as usize) << b));
    let mut work = x.to_vec();
    let values: Vec<f64> = (0..1usize << group.len())
        .map(|a| {
            set_group(&mut work, group, a);
            objective.value(&work)
        })
        .collect();
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * (1.0 + min.abs());
    let ties: Vec<usize> = (0..values.len())
        .filter(|&a| values[a] <= min + tol)
        .collect();
    let chosen = if ties.len() == 1 {
        ties[0]
    } else {
        let mean = |a: usize| {
            (0..group.len()).map(|b| values[a ^ (1 << b)]).sum::<f64>() / group.len() as f64
        };
        let means: Vec<f64> = ties.iter().map(|&a| mean(a)).collect();
        let best = means.iter().cloned().fold(f64::INFINITY, f64::min);
        let mtol = 1e-9 * (1.0 + best.abs());
        let widest: Vec<usize> = ties
            .iter()
            .zip(&means)
            .filter(|(_, &m)| m <= best + mtol)
            .map(|(&a, _)| a)
            .collect();
        if widest.contains(&current) {
            current
        } else {
            widest[0]
        }
    };
    set_group(x, group, chosen);
}

/// Sampler wrapper around [`sequential_greedy`]: groups come from the
/// schedule in the order they first dip below `s = 1`, cycles from the
/// schedule's cycle count. Reads without an initial state start at zero.
#[derive(Debug, Clone, Default)]
pub struct GreedySampler;

impl GreedySampler {
    pub fn groups(req: &SamplerRequest, n: usize) -> Vec<Vec<usize>> {
        req.schedule
            .dip_order()
            .into_iter()
            .map(|g| (0..n).filter(|&v| req.schedule.group_of(v) == g).collect())
            .collect()
    }
}

impl Sampler for GreedySampler {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn sample(&self, target: Target<'_>, req: &SamplerRequest) -> Result<SampleSet> {
        let n = target.num_vars();
        req.validate(n)?;
        let timing = req.timing_report()?;
        let groups = Self::groups(req, n);
        let objective = target.as_objective();
        let mut reads: Vec<BinaryState> = Vec::with_capacity(req.reads);
        // The oracle is deterministic, so repeated starts reuse their result.
        let mut seen: BTreeMap<BinaryState, BinaryState> = BTreeMap::new();
        for r in 0..req.reads {
            let start = req
                .start_for(r, reads.last())
                .cloned()
                .unwrap_or_else(|| BinaryState::zeros(n));
            let out = match seen.get(&start) {
                Some(out) => out.clone(),
                None => {
                    let out = sequential_greedy(objective, &groups, &start, req.schedule.cycles())?;
                    seen.insert(start, out.clone());
                    out
                }
            };
            reads.push(out);
        }
        Ok(SampleSet::from_reads(target, reads, timing))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bqm::exhaustive_min;
    use crate::pbf::Polynomial;

    fn hs() -> Polynomial<f64> {
        Polynomial::from_terms([(vec![0], 1.0), (vec![1], -1.0), (vec![0, 1], -2.0)])
    }

    fn hc() -> Polynomial<f64> {
        Polynomial::from_terms([
            (vec![2], 2.0),
            (vec![0, 2], 1.0),
            (vec![0, 1, 2], -2.0),
            (vec![3], 2.0),
            (vec![1, 3], -1.0),
            (vec![0, 1, 3], -2.0),
        ])
    }

    #[test]
    fn hs_needs_two_cycles() {
        let p = hs();
        let groups = vec![vec![0], vec![1]];
        let z = BinaryState::zeros(2);
        let one = sequential_greedy(&p, &groups, &z, 1).unwrap();
        assert_eq!(one.as_slice(), &[0, 1]);
        assert_eq!(p.evaluate_unchecked(one.as_slice()), -1.0);
        let two = sequential_greedy(&p, &groups, &z, 2).unwrap();
        assert_eq!(two.as_slice(), &[1, 1]);
        let (min, arg) = exhaustive_min(2, 20, |x| p.evaluate_unchecked(x)).unwrap();
        assert_eq!(min, -2.0);
        assert_eq!(arg[0], two);
    }

    #[test]
    fn hc_needs_two_cycles() {
        let p = hc();
        let groups = vec![vec![0, 2], vec![1, 3]];
        let z = BinaryState::zeros(4);
        let (min, arg) = exhaustive_min(4, 20, |x| p.evaluate_unchecked(x)).unwrap();
        assert_eq!(min, -1.0);
        let one = sequential_greedy(&p, &groups, &z, 1).unwrap();
        assert!(p.evaluate_unchecked(one.as_slice()) > min);
        let two = sequential_greedy(&p, &groups, &z, 2).unwrap();
        assert_eq!(p.evaluate_unchecked(two.as_slice()), min);
        assert!(arg.contains(&two));
    }

    #[test]
    fn single_group_is_global_minimum() {
        for p in [hs(), hc()] {
            let n = p.num_vars();
            let all: Vec<usize> = (0..n).collect();
            let x = sequential_greedy(&p, &[all], &BinaryState::zeros(n), 1).unwrap();
            let (min, _) = exhaustive_min(n, 20, |x| p.evaluate_unchecked(x)).unwrap();
            assert_eq!(p.evaluate_unchecked(x.as_slice()), min);
        }
    }

    #[test]
    fn sampler_uses_schedule_groups() {
        let p = hc();
        let sched =
            super::super::AnnealSchedule::cyclic(vec![0, 1, 0, 1], 2, 2, 0.0, 10.0).unwrap();
        let req = SamplerRequest::new(3, sched, 0)
            .with_initial(super::super::InitialState::Single(BinaryState::zeros(4)));
        let set = GreedySampler.sample(Target::Polynomial(&p), &req).unwrap();
        assert_eq!(set.records.len(), 1);
        assert_eq!(set.records[0].energy, -1.0);
    }
}

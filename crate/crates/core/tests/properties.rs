use annealdp::anneal::{
    measure, AnnealSchedule, HeuristicSampler, Sampler, SamplerRequest, StateVectorSampler, Target,
};
use annealdp::bqm::{brute_force, BinaryState, BruteForceOptions, IsingModel, QuboModel};
use annealdp::pbf::{ln_1mx_poly, ln_x_poly, BinaryEncoding, LogApproxCoefficients, Polynomial};
use annealdp::quadratize::verify::{check_exact, preserves_ground_state};
use annealdp::quadratize::{
    default_substitution_gamma, quadratize_by_substitution, quadratize_full, Method,
};
use annealdp::rbc::{
    analytic_policy_update, build_gp_pbo, default_log_coefficients, true_parameters,
    CollocationGrid, MergedConfig, MergedProblem, RbcParams, ValuationGram,
};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = f64> {
    // Quarter steps keep sums exact so energies compare bit for bit.
    (-20i32..=20).prop_map(|k| k as f64 / 4.0)
}

fn ising(max_n: usize) -> impl Strategy<Value = IsingModel<f64>> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(coeff(), n),
            prop::collection::vec(((0..n), (0..n), coeff()), 0..2 * n),
        )
            .prop_map(move |(h, js)| {
                let mut m = IsingModel::from_parts(h, []).unwrap();
                for (i, j, c) in js {
                    if i != j {
                        m.add_coupling(i, j, c).unwrap();
                    }
                }
                m
            })
    })
}

fn qubo(max_n: usize) -> impl Strategy<Value = QuboModel<f64>> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(((0..n), (0..n), coeff()), 0..3 * n).prop_map(move |es| {
            let mut q = QuboModel::new(n);
            for (i, j, c) in es {
                q.add(i, j, c).unwrap();
            }
            q
        })
    })
}

/// Random multilinear polynomial over `n` variables with terms of degree up
/// to `max_deg`.
fn pbf(max_n: usize, max_deg: usize) -> impl Strategy<Value = (Polynomial<f64>, usize)> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(
            (
                prop::collection::btree_set(0..n, 1..=max_deg.min(n)),
                -5.0..5.0f64,
            ),
            1..10,
        )
        .prop_map(move |terms| (Polynomial::from_terms(terms), n))
    })
}

fn states(n: usize) -> impl Iterator<Item = BinaryState> {
    (0..1u64 << n).map(move |i| BinaryState::from_index(i, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ising_qubo_conversions_preserve_energy(m in ising(8)) {
        let (q, off) = m.to_qubo();
        let (back, off2) = q.to_ising();
        for x in states(m.num_vars()) {
            let s = x.to_spins();
            let e = m.energy(&s).unwrap();
            prop_assert!((q.energy(&x).unwrap() + off - e).abs() < 1e-9);
            prop_assert!((back.energy(&s).unwrap() + off2 + off - e).abs() < 1e-9);
        }
    }

    #[test]
    fn brute_force_minimum_is_reproducible_and_shift_invariant(q in qubo(10), shift in coeff()) {
        let r = brute_force(&q, &BruteForceOptions::default()).unwrap();
        for s in &r.argmin_states {
            prop_assert_eq!(q.energy(s).unwrap(), r.min_energy);
        }
        let mut shifted = Polynomial::from_qubo(&q);
        shifted += Polynomial::constant(shift);
        let n = q.num_vars();
        let (_, arg) = annealdp::bqm::exhaustive_min(n, n, |x| shifted.evaluate_unchecked(x)).unwrap();
        prop_assert_eq!(arg, r.argmin_states);
    }

    #[test]
    fn coupling_order_does_not_matter(n in 2usize..6, i in 0usize..6, j in 0usize..6, c in coeff()) {
        prop_assume!(i < n && j < n);
        let mut a = QuboModel::new(n);
        let mut b = QuboModel::new(n);
        a.add(i, j, c).unwrap();
        b.add(j, i, c).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn polynomial_algebra_matches_pointwise_values((p, n) in pbf(6, 4), (q, m) in pbf(6, 4)) {
        let sum = &p + &q;
        let prod = &p * &q;
        let n = n.max(m);
        for x in states(n) {
            let (a, b) = (p.evaluate_unchecked(x.as_slice()), q.evaluate_unchecked(x.as_slice()));
            prop_assert!((sum.evaluate_unchecked(x.as_slice()) - (a + b)).abs() < 1e-9);
            prop_assert!((prod.evaluate_unchecked(x.as_slice()) - a * b).abs() < 1e-8);
        }
        // Equal on every state means equal as polynomials.
        let back = &sum - &q;
        prop_assert!((&back - &p).is_zero());
    }

    #[test]
    fn nearest_bits_is_within_half_a_step(bits in 1usize..12, scale in -5.0..5.0f64, t in 0.0..1.0f64) {
        prop_assume!(scale.abs() > 1e-3);
        let enc = BinaryEncoding::new(0, bits, scale).unwrap();
        let (lo, hi) = enc.range();
        let v = lo + t * (hi - lo);
        let p = enc.nearest_bits(v);
        prop_assert!(!p.clamped);
        let got = enc.encode_value(&p.bits).unwrap();
        prop_assert!((got - v).abs() <= enc.step() / 2.0 + 1e-12);
    }

    #[test]
    fn full_quadratization_is_exact_with_counted_aux((p, _) in pbf(10, 5)) {
        let r = quadratize_full(&p);
        prop_assert!(r.poly.degree() <= 2);
        prop_assert!(check_exact(&p, &r).unwrap().is_none());
        let mut ntr = 0;
        let mut ptr = 0;
        for (vars, c) in p.terms() {
            if vars.len() > 2 {
                if c < 0.0 { ntr += 1 } else { ptr += vars.len() - 2 }
            }
        }
        prop_assert_eq!(r.alloc.count(Method::Ntr), ntr);
        prop_assert_eq!(r.alloc.count(Method::Ptr), ptr);
    }

    #[test]
    fn substitution_with_large_gamma_keeps_the_ground_state((p, n) in pbf(7, 4)) {
        let gamma = 10.0 * p.abs_coefficient_sum();
        prop_assume!(gamma >= default_substitution_gamma(&p));
        let r = quadratize_by_substitution(&p, Some(gamma)).unwrap();
        prop_assert!(r.poly.degree() <= 2);
        prop_assert!(preserves_ground_state(&p, &r.poly, n).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn heuristic_reads_are_seed_deterministic(q in qubo(8), seed in any::<u64>()) {
        let req = SamplerRequest::new(6, AnnealSchedule::forward(20.0).unwrap(), seed);
        let s = HeuristicSampler { sweeps_per_cycle: 50, ..Default::default() };
        let a = s.sample(Target::Qubo(&q), &req).unwrap();
        let b = s.sample(Target::Qubo(&q), &req).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn state_vector_norm_is_conserved(q in qubo(4)) {
        let ev = StateVectorSampler::default()
            .evolve(Target::Qubo(&q), &AnnealSchedule::forward(10.0).unwrap(), None)
            .unwrap();
        prop_assert!(ev.max_norm_drift < 1e-9);
        prop_assert!((ev.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn adiabatic_ladder_on_random_two_qubit_models() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let sv = StateVectorSampler::default();
    let mut tested = 0;
    while tested < 5 {
        let m = IsingModel::from_parts(
            vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
            [((0, 1), rng.gen_range(-1.0..1.0))],
        )
        .unwrap();
        let (q, _) = m.to_qubo();
        let r = brute_force(&q, &BruteForceOptions::default().with_spectrum()).unwrap();
        let mut e: Vec<f64> = r.spectrum.unwrap().iter().map(|(_, e)| *e).collect();
        e.sort_by(f64::total_cmp);
        // Nondegenerate with a gap large enough for the ladder to reach it.
        if e[1] - e[0] < 0.2 {
            continue;
        }
        let g = r.argmin_states[0].index() as usize;
        let probs: Vec<f64> = [25.0, 50.0, 100.0, 200.0]
            .iter()
            .map(|&t| {
                let s = AnnealSchedule::forward(t).unwrap();
                sv.evolve(Target::Qubo(&q), &s, None)
                    .unwrap()
                    .probabilities()[g]
            })
            .collect();
        for w in probs.windows(2) {
            assert!(w[1] >= w[0] - 1e-6, "{m:?}: {probs:?}");
        }
        tested += 1;
    }
}

#[test]
fn measurements_follow_born_probabilities() {
    // Chi-square with 7 degrees of freedom; 18.48 is the 1% critical value.
    let p = [0.05, 0.1, 0.15, 0.2, 0.1, 0.1, 0.2, 0.1];
    let reads = measure(&p, 3, 10_000, 17).unwrap();
    let mut counts = [0usize; 8];
    for r in &reads {
        counts[r.index() as usize] += 1;
    }
    let chi2: f64 = counts
        .iter()
        .zip(p)
        .map(|(&c, q)| (c as f64 - 10_000.0 * q).powi(2) / (10_000.0 * q))
        .sum();
    assert!(chi2 < 18.48, "chi-square {chi2}");
}

#[test]
fn log_polynomials_have_the_stated_degrees() {
    let enc = BinaryEncoding::new(0, 7, 1.0 / 128.0).unwrap();
    for c in [LogApproxCoefficients::default(), default_log_coefficients()] {
        assert_eq!(ln_x_poly(&enc, &c).degree(), 2);
        assert_eq!(ln_1mx_poly(&enc, &c).degree(), 1);
    }
}

#[test]
fn policy_update_solves_the_first_order_condition() {
    let p = RbcParams::default();
    let ab = p.alpha_beta();
    let enc = BinaryEncoding::new(0, 7, 1.0 / 128.0).unwrap();
    let exact = |x1: f64, x3: f64| -(1.0 - x1).ln() - ab * x3 * x1.ln();
    for x3 in [0.5, 1.0, 1.4566, 2.0] {
        let x1 = analytic_policy_update(x3, &p);
        // d/dx1 of the exact objective.
        let foc = 1.0 / (1.0 - x1) - ab * x3 / x1;
        assert!(foc.abs() < 1e-10, "x3 = {x3}: residual {foc}");
        let best = (1..128)
            .map(|k| k as f64 * enc.step())
            .min_by(|a, b| exact(*a, x3).total_cmp(&exact(*b, x3)))
            .unwrap();
        assert!((best - x1).abs() <= enc.step(), "x3 = {x3}: {best} vs {x1}");
    }
}

#[test]
fn approximated_policy_pbo_tracks_the_foc_near_truth() {
    // Away from the true savings rate the fitted logs move the argmin by up
    // to three grid steps.
    let p = RbcParams::default();
    let enc = BinaryEncoding::new(0, 7, 1.0 / 128.0).unwrap();
    for (x3, steps) in [(1.3, 3.0), (1.4566, 1.0), (1.6, 3.0), (2.0, 3.0)] {
        let poly = build_gp_pbo::<f64>(x3, &enc, &default_log_coefficients(), &p).unwrap();
        let (_, arg) = annealdp::bqm::exhaustive_min(7, 7, |x| poly.evaluate_unchecked(x)).unwrap();
        let got = enc.decode(arg[0].as_slice());
        let foc = analytic_policy_update(x3, &p);
        assert!(
            (got - foc).abs() <= steps * enc.step(),
            "x3 = {x3}: {got} vs {foc}"
        );
    }
}

#[test]
fn exact_log_loss_at_truth_beats_single_bit_perturbations() {
    let p = RbcParams::default();
    let g = CollocationGrid::new(&p, 40).unwrap();
    let m = MergedProblem::build(&p, &g, MergedConfig::default()).unwrap();
    let gram = ValuationGram::new(&g, &p);
    let t = true_parameters(&p).unwrap();
    let ab = p.alpha_beta();
    let policy = |x1: f64| -(1.0 - x1).ln() - ab * t[2] * x1.ln();
    let val = |x2: f64, x3: f64| gram.value((1.0 - t[0]).ln(), t[0].ln(), x2, x3);
    let at = |x: [f64; 3]| [policy(x[0]), val(x[1], t[2]), val(t[1], x[2])];
    let base = at(t);
    for (i, enc) in [&m.enc1, &m.enc2, &m.enc3].into_iter().enumerate() {
        for j in 0..enc.bit_count() {
            for sign in [-1.0, 1.0] {
                let mut x = t;
                x[i] += sign * enc.step() * (1u64 << j) as f64;
                if i == 0 && !(x[0] > 0.0 && x[0] < 1.0) {
                    continue;
                }
                assert!(base[i] <= at(x)[i], "parameter {i}, bit {j}, sign {sign}");
            }
        }
    }
}

#[test]
fn approximated_loss_minimizers_stay_within_one_step_of_truth() {
    let p = RbcParams::default();
    let g = CollocationGrid::new(&p, 40).unwrap();
    let m = MergedProblem::build(&p, &g, MergedConfig::default()).unwrap();
    let t = true_parameters(&p).unwrap();
    let argmin = |enc: &BinaryEncoding<f64>, f: &dyn Fn(f64) -> f64| {
        let (lo, hi) = enc.range();
        let n = ((hi - lo) / enc.step()).round() as usize;
        (0..=n)
            .map(|k| lo + k as f64 * enc.step())
            .min_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap()
    };
    let x1 = argmin(&m.enc1, &|x| {
        if x > 0.0 {
            m.policy_loss(x, t[2])
        } else {
            f64::INFINITY
        }
    });
    let x2 = argmin(&m.enc2, &|x| m.valuation_loss(t[0], x, t[2]));
    let x3 = argmin(&m.enc3, &|x| m.valuation_loss(t[0], t[1], x));
    assert!((x1 - t[0]).abs() <= m.enc1.step());
    assert!((x2 - t[1]).abs() <= m.enc2.step());
    assert!((x3 - t[2]).abs() <= m.enc3.step());
}

#[test]
fn spins_round_trip_through_bits() {
    for x in states(4) {
        assert_eq!(x.to_spins().to_binary(), x);
    }
}

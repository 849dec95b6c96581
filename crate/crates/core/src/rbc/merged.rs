use rand::Rng;

use super::pbo::{build_gp_pbo, default_log_coefficients, ValuationGram};
use super::{CollocationGrid, RbcParams};
use crate::bqm::{BinaryState, Objective, QuboModel};
use crate::pbf::{ln_1mx_poly, ln_x_poly, BinaryEncoding, LogApproxCoefficients, Polynomial};
use crate::quadratize::{quadratize_full_from, ReductionResult};
use crate::{Error, Result};

/// How the policy component sees the value slope.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PolicyCoupling {
    /// `x3` enters the policy component through its bits, so one program
    /// serves every iteration.
    #[default]
    Variable,
    /// `x3` is the given constant, as in a single policy step.
    Constant(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergedConfig {
    /// Top bit index `J` of each encoding (`J + 1` bits).
    pub j1: usize,
    pub j2: usize,
    pub j3: usize,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub coeffs: LogApproxCoefficients,
    pub coupling: PolicyCoupling,
    /// Added to each component's bias beyond what keeps it positive.
    pub margin: f64,
}

impl Default for MergedConfig {
    fn default() -> Self {
        Self::with_width(6)
    }
}

impl MergedConfig {
    /// Equal widths `J` for all three parameters. The value parameters keep
    /// the ranges of the combinatorial run (`[-35.805, 0]` and `[0, 3.069]`)
    /// and `x1` covers `[0, 1)`.
    pub fn with_width(j: usize) -> Self {
        let levels = ((1u64 << (j + 1)) - 1) as f64;
        Self {
            j1: j,
            j2: j,
            j3: j,
            s1: 1.0 / (1u64 << (j + 1)) as f64,
            s2: -35.805 / levels,
            s3: 3.069 / levels,
            coeffs: default_log_coefficients(),
            coupling: PolicyCoupling::Variable,
            margin: 0.1,
        }
    }
}

/// The quadratized merged problem.
#[derive(Debug, Clone)]
pub struct MergedQubo {
    pub qubo: QuboModel<f64>,
    pub offset: f64,
    pub policy: ReductionResult<f64>,
    pub valuation: ReductionResult<f64>,
}

impl MergedQubo {
    pub fn num_aux(&self) -> usize {
        self.policy.alloc.num_aux() + self.valuation.alloc.num_aux()
    }
}

/// `g = x_p (g_p + b_p) + x_v (w g_v + b_v)` over the bits
/// `[x1][x_p][x2][x3][x_v]`, with `w` one over the node count so that the
/// valuation component is a mean squared residual.
///
/// The struct evaluates `g` in closed form from the decoded parameters;
/// [`MergedProblem::polynomial`] and [`MergedProblem::quadratize`] give the
/// same function as a polynomial and as a QUBO with auxiliaries.
#[derive(Debug, Clone)]
pub struct MergedProblem {
    pub params: RbcParams,
    pub grid: CollocationGrid,
    pub config: MergedConfig,
    pub enc1: BinaryEncoding<f64>,
    pub enc2: BinaryEncoding<f64>,
    pub enc3: BinaryEncoding<f64>,
    pub xp: usize,
    pub xv: usize,
    pub bias_p: f64,
    pub bias_v: f64,
    pub weight_v: f64,
    gram: ValuationGram,
}

impl MergedProblem {
    pub fn build(params: &RbcParams, grid: &CollocationGrid, config: MergedConfig) -> Result<Self> {
        params.validate()?;
        if config.s1 <= 0.0 || config.s3 <= 0.0 {
            return Err(Error::invalid("x1 and x3 scales must be positive"));
        }
        if let PolicyCoupling::Constant(x3) = config.coupling {
            if !(x3 > 0.0) {
                return Err(Error::invalid(format!(
                    "constant x3 must be positive, got {x3}"
                )));
            }
        }
        let enc1 = BinaryEncoding::with_top_bit(0, config.j1, config.s1)?;
        let xp = enc1.vars().end;
        let enc2 = BinaryEncoding::with_top_bit(xp + 1, config.j2, config.s2)?;
        let enc3 = BinaryEncoding::with_top_bit(enc2.vars().end, config.j3, config.s3)?;
        if enc1.range().1 >= 1.0 {
            return Err(Error::invalid("x1 encoding must stay below 1"));
        }
        let xv = enc3.vars().end;
        let mut p = Self {
            params: params.clone(),
            grid: grid.clone(),
            config,
            enc1,
            enc2,
            enc3,
            xp,
            xv,
            bias_p: 0.0,
            bias_v: 0.0,
            weight_v: 1.0 / grid.len() as f64,
            gram: ValuationGram::new(grid, params),
        };
        // g_p is affine in x3, so its minimum sits at an end of the x3 range.
        let (lo3, hi3) = p.enc3.range();
        let min_gp = (0..=p.enc1.max_integer())
            .map(|k| p.enc1.decode_integer(k))
            .flat_map(|x1| [p.policy_loss(x1, lo3), p.policy_loss(x1, hi3)])
            .fold(f64::INFINITY, f64::min);
        p.bias_p = (-min_gp).max(0.0) + p.config.margin;
        p.bias_v = p.config.margin;
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.xv + 1
    }

    /// Approximated `ln x1` and `ln(1 - x1)`.
    pub fn logs(&self, x1: f64) -> (f64, f64) {
        (self.config.coeffs.ln_x(x1), self.config.coeffs.ln_1mx(x1))
    }

    /// Policy component `-ln(1 - x1) - alpha beta x3 ln x1` (approximated
    /// logs); under constant coupling `x3` is ignored.
    pub fn policy_loss(&self, x1: f64, x3: f64) -> f64 {
        let x3 = match self.config.coupling {
            PolicyCoupling::Variable => x3,
            PolicyCoupling::Constant(c) => c,
        };
        let (lx, l1) = self.logs(x1);
        -l1 - self.params.alpha_beta() * x3 * lx
    }

    /// Valuation component: mean squared residual (approximated logs).
    pub fn valuation_loss(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        let (lx, l1) = self.logs(x1);
        self.weight_v * self.gram.value(l1, lx, x2, x3)
    }

    pub fn decode(&self, x: &[u8]) -> [f64; 3] {
        [
            self.enc1.decode(x),
            self.enc2.decode(x),
            self.enc3.decode(x),
        ]
    }

    /// State with the parameters projected onto their grids and both
    /// activation bits off.
    pub fn state_for(&self, params: [f64; 3]) -> BinaryState {
        let mut x = vec![0u8; self.num_vars()];
        for (enc, v) in [&self.enc1, &self.enc2, &self.enc3].into_iter().zip(params) {
            enc.write_integer(&mut x, enc.nearest_integer(v).0);
        }
        BinaryState::new(x).expect("binary")
    }

    /// Uniformly random parameter bits with both activation bits off.
    pub fn random_state<R: Rng>(&self, rng: &mut R) -> BinaryState {
        let mut x: Vec<u8> = (0..self.num_vars()).map(|_| rng.gen_range(0..2)).collect();
        x[self.xp] = 0;
        x[self.xv] = 0;
        BinaryState::new(x).expect("binary")
    }

    /// Group 0 holds the `x1` bits and `x_p`, group 1 the rest.
    pub fn group_of(&self) -> Vec<usize> {
        (0..self.num_vars())
            .map(|v| usize::from(v > self.xp))
            .collect()
    }

    /// Policy component as a polynomial over the `x1` (and `x3`) bits.
    pub fn policy_poly(&self) -> Polynomial<f64> {
        match self.config.coupling {
            PolicyCoupling::Constant(x3) => {
                build_gp_pbo(x3, &self.enc1, &self.config.coeffs, &self.params)
                    .expect("x3 checked at build")
            }
            PolicyCoupling::Variable => {
                let l = ln_x_poly(&self.enc1, &self.config.coeffs);
                let m = ln_1mx_poly(&self.enc1, &self.config.coeffs);
                -(m + (&l * &self.enc3.linear_poly()).scale(self.params.alpha_beta()))
            }
        }
    }

    /// Valuation component (mean squared residual) as a polynomial over all
    /// parameter bits.
    pub fn valuation_poly(&self) -> Polynomial<f64> {
        let l = ln_x_poly(&self.enc1, &self.config.coeffs);
        let x3 = self.enc3.linear_poly();
        let basis = [
            Polynomial::constant(1.0),
            ln_1mx_poly(&self.enc1, &self.config.coeffs),
            self.enc2.linear_poly(),
            x3.clone(),
            &l * &x3,
        ];
        let mut out = Polynomial::zero();
        for a in 0..5 {
            for b in a..5 {
                let c = self.gram.gram[a][b] * if a == b { 1.0 } else { 2.0 };
                out += (&basis[a] * &basis[b]).scale(c * self.weight_v);
            }
        }
        out
    }

    /// `x_p (g_p + b_p)`.
    pub fn policy_block(&self) -> Polynomial<f64> {
        (self.policy_poly() + Polynomial::constant(self.bias_p)) * Polynomial::var(self.xp)
    }

    /// `x_v (w g_v + b_v)`.
    pub fn valuation_block(&self) -> Polynomial<f64> {
        (self.valuation_poly() + Polynomial::constant(self.bias_v)) * Polynomial::var(self.xv)
    }

    pub fn polynomial(&self) -> Polynomial<f64> {
        self.policy_block() + self.valuation_block()
    }

    /// Quadratizes the two blocks separately (NTR for negative terms, PTR
    /// for positive ones), places the valuation auxiliaries after the policy
    /// ones and merges the results into one QUBO.
    pub fn quadratize(&self) -> Result<MergedQubo> {
        let n = self.num_vars();
        let policy = quadratize_full_from(&self.policy_block(), n);
        let valuation = quadratize_full_from(&self.valuation_block(), policy.alloc.total_vars());
        let merged = &policy.poly + &valuation.poly;
        if merged.degree() > 2 {
            return Err(Error::Internal(format!(
                "merged polynomial has degree {} after quadratization",
                merged.degree()
            )));
        }
        let (qubo, offset) = merged.to_qubo(valuation.alloc.total_vars())?;
        Ok(MergedQubo {
            qubo,
            offset,
            policy,
            valuation,
        })
    }
}

impl Objective for MergedProblem {
    fn num_vars(&self) -> usize {
        MergedProblem::num_vars(self)
    }

    fn value(&self, x: &[u8]) -> f64 {
        let [x1, x2, x3] = self.decode(x);
        let mut g = 0.0;
        if x[self.xp] == 1 {
            g += self.policy_loss(x1, x3) + self.bias_p;
        }
        if x[self.xv] == 1 {
            g += self.valuation_loss(x1, x2, x3) + self.bias_v;
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratize::verify::{check_exact, min_over_aux_all};
    use crate::quadratize::Method;

    fn small() -> MergedProblem {
        let p = RbcParams::default();
        let kbar = p.steady_state_capital();
        let g = CollocationGrid::from_nodes(&p, &[(0.6 * kbar, 0), (kbar, 2), (1.4 * kbar, 4)])
            .unwrap();
        MergedProblem::build(&p, &g, MergedConfig::with_width(2)).unwrap()
    }

    #[test]
    fn layout_and_biases() {
        let m = small();
        assert_eq!(m.enc1.vars(), 0..3);
        assert_eq!(m.xp, 3);
        assert_eq!(m.enc2.vars(), 4..7);
        assert_eq!(m.enc3.vars(), 7..10);
        assert_eq!(m.xv, 10);
        assert_eq!(m.group_of(), vec![0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1]);
        assert!(m.bias_p > 0.0 && m.bias_v > 0.0);
        for idx in 0..1u64 << 11 {
            let s = BinaryState::from_index(idx, 11);
            let [x1, x2, x3] = m.decode(s.as_slice());
            assert!(m.policy_loss(x1, x3) + m.bias_p > 0.0);
            assert!(m.valuation_loss(x1, x2, x3) >= 0.0);
        }
    }

    #[test]
    fn closed_form_matches_polynomial_on_all_states() {
        let m = small();
        let poly = m.polynomial();
        for idx in 0..1u64 << 11 {
            let s = BinaryState::from_index(idx, 11);
            let a = m.value(s.as_slice());
            let b = poly.evaluate_unchecked(s.as_slice());
            assert!(
                (a - b).abs() < 1e-10 * (1.0 + a.abs()),
                "state {idx}: {a} vs {b}"
            );
            if s.as_slice()[m.xp] == 0 && s.as_slice()[m.xv] == 0 {
                assert_eq!(a, 0.0);
            }
        }
    }

    #[test]
    fn quadratized_blocks_are_exact_on_reduced_instance() {
        let m = small();
        let q = m.quadratize().unwrap();
        assert!(check_exact(&m.policy_block(), &q.policy).unwrap().is_none());
        let standalone = quadratize_full_from(&m.valuation_block(), m.num_vars());
        assert!(check_exact(&m.valuation_block(), &standalone)
            .unwrap()
            .is_none());
        assert_eq!(standalone.alloc.num_aux(), q.valuation.alloc.num_aux());
        let merged = crate::pbf::Polynomial::from_qubo(&q.qubo) + Polynomial::constant(q.offset);
        let mins = min_over_aux_all(&merged, 11, q.qubo.num_vars()).unwrap();
        for (idx, v) in mins.iter().enumerate() {
            let s = BinaryState::from_index(idx as u64, 11);
            let x = s.as_slice();
            let [x1, x2, x3] = m.decode(x);
            let expect = match (x[m.xp], x[m.xv]) {
                (0, 0) => 0.0,
                (1, 0) => m.policy_loss(x1, x3) + m.bias_p,
                (0, 1) => m.valuation_loss(x1, x2, x3) + m.bias_v,
                _ => m.policy_loss(x1, x3) + m.bias_p + m.valuation_loss(x1, x2, x3) + m.bias_v,
            };
            assert!(
                (v - expect).abs() < 1e-8 * (1.0 + expect.abs()),
                "state {idx}"
            );
        }
    }

    #[test]
    fn constant_coupling_policy_block_needs_one_aux_per_pair() {
        let p = RbcParams::default();
        let g = CollocationGrid::new(&p, 3).unwrap();
        let cfg = MergedConfig {
            coupling: PolicyCoupling::Constant(1.4566),
            ..MergedConfig::default()
        };
        let m = MergedProblem::build(&p, &g, cfg).unwrap();
        let r = quadratize_full_from(&m.policy_block(), m.num_vars());
        // a2 < 0 makes every cubic term positive, so each of the
        // 7 * 6 / 2 bit pairs gets one PTR auxiliary.
        assert_eq!(r.alloc.num_aux(), 21);
        assert_eq!(r.alloc.count(Method::Ptr), 21);
        assert_eq!(r.alloc.count(Method::Ntr), 0);
        assert!(r.poly.degree() <= 2);
    }

    #[test]
    fn state_projection_round_trips() {
        let m = small();
        let s = m.state_for([0.25, -10.0, 1.5]);
        let [x1, x2, x3] = m.decode(s.as_slice());
        assert!((x1 - 0.25).abs() <= m.enc1.step() / 2.0);
        assert!((x2 + 10.0).abs() <= m.enc2.step() / 2.0 + 1e-12);
        assert!((x3 - 1.5).abs() <= m.enc3.step() / 2.0 + 1e-12);
        assert_eq!(s.as_slice()[m.xp], 0);
        assert_eq!(s.as_slice()[m.xv], 0);
    }
}

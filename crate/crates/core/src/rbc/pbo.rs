use super::{CollocationGrid, RbcParams};
use crate::bqm::{brute_force, BinaryState, BruteForceOptions, QuadraticModel, QuboModel};
use crate::linalg::least_squares;
use crate::pbf::{BinaryEncoding, LogApproxCoefficients, Polynomial};
use crate::{Error, Result, Scalar};

/// Fit interval of the default logarithm approximations.
pub const LOG_FIT_INTERVAL: (f64, f64) = (0.2, 0.45);

/// Least-squares log approximations on [`LOG_FIT_INTERVAL`], which brackets
/// the savings rate. The printed coefficients put the stationary point of
/// the approximated policy objective at a negative savings rate, so they
/// cannot drive the policy step; they stay available as
/// `LogApproxCoefficients::default()`.
pub fn default_log_coefficients() -> LogApproxCoefficients {
    LogApproxCoefficients::fit(LOG_FIT_INTERVAL.0, LOG_FIT_INTERVAL.1, 101)
        .expect("static fit interval is valid")
}

/// Policy-step PBO `-ln(1 - x1) - alpha beta x3_bar ln(x1)` with both logs
/// replaced by their polynomial approximations. The constant is kept so
/// that energies stay positive near the optimum.
pub fn build_gp_pbo<F: Scalar>(
    x3_bar: f64,
    enc1: &BinaryEncoding<F>,
    coeffs: &LogApproxCoefficients,
    params: &RbcParams,
) -> Result<Polynomial<F>> {
    if !(x3_bar > 0.0) {
        return Err(Error::invalid(format!(
            "x3_bar must be positive, got {x3_bar}"
        )));
    }
    let f = F::from_f64_lossy;
    let c = params.alpha_beta() * x3_bar;
    let mut p = Polynomial::constant(f(-(coeffs.at0 + coeffs.a0 * c)));
    for j in 0..enc1.bit_count() {
        let wj = enc1.weight(j).as_f64();
        p.add_term(
            [enc1.var(j)],
            f(-((coeffs.at1 + coeffs.a1 * c) * wj + coeffs.a2 * c * wj * wj)),
        );
        for i in 0..j {
            let wi = enc1.weight(i).as_f64();
            p.add_term(
                [enc1.var(i), enc1.var(j)],
                f(-2.0 * coeffs.a2 * c * wi * wj),
            );
        }
    }
    Ok(p)
}

/// Valuation residual coefficients aggregated over the grid, stored as grid
/// means. For node `n` with `A = ln y + ln(1 - x1)` and
/// `D = zeta + alpha beta ln x1` the squared residual is
/// `A^2 - gamma2 x2 + gamma3 x3 - gamma23 x2 x3 + gamma22 x2^2 + gamma33 x3^2`
/// with `A^2 = gamma0 + gamma1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaConstants {
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma23: f64,
    pub gamma22: f64,
    pub gamma33: f64,
    pub zeta: f64,
    pub nodes: usize,
}

impl GammaConstants {
    /// Constants for the given `ln x1` and `ln(1 - x1)`.
    pub fn from_logs(grid: &CollocationGrid, params: &RbcParams, ln_x1: f64, ln_1mx1: f64) -> Self {
        let b1 = 1.0 - params.beta;
        let ab = params.alpha_beta();
        let mut s = [0.0; 7];
        for n in 0..grid.len() {
            let ly = grid.ln_y[n];
            let zeta = grid.zeta(params, n);
            let a = ly + ln_1mx1;
            let d = zeta + ab * ln_x1;
            s[0] += ly * ly;
            s[1] += 2.0 * ly * ln_1mx1 + ln_1mx1 * ln_1mx1;
            s[2] += 2.0 * b1 * a;
            s[3] += 2.0 * a * d;
            s[4] += 2.0 * b1 * d;
            s[5] += d * d;
            s[6] += zeta;
        }
        let n = grid.len() as f64;
        Self {
            gamma0: s[0] / n,
            gamma1: s[1] / n,
            gamma2: s[2] / n,
            gamma3: s[3] / n,
            gamma23: s[4] / n,
            gamma22: b1 * b1,
            gamma33: s[5] / n,
            zeta: s[6] / n,
            nodes: grid.len(),
        }
    }

    /// Mean squared residual at `(x2, x3)`.
    pub fn mean_loss(&self, x2: f64, x3: f64) -> f64 {
        self.gamma0 + self.gamma1 - self.gamma2 * x2 + self.gamma3 * x3 - self.gamma23 * x2 * x3
            + self.gamma22 * x2 * x2
            + self.gamma33 * x3 * x3
    }

    fn is_finite(&self) -> bool {
        [
            self.gamma0,
            self.gamma1,
            self.gamma2,
            self.gamma3,
            self.gamma23,
            self.gamma22,
            self.gamma33,
            self.zeta,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Valuation PBO at a fixed policy `x1_bar`: the squared residual summed over
/// the grid, over the bits of `enc2` and `enc3`.
pub fn build_gv_pbo<F: Scalar>(
    x1_bar: f64,
    enc2: &BinaryEncoding<F>,
    enc3: &BinaryEncoding<F>,
    grid: &CollocationGrid,
    params: &RbcParams,
) -> Result<(Polynomial<F>, GammaConstants)> {
    if !(x1_bar > 0.0 && x1_bar < 1.0) {
        return Err(Error::invalid(format!(
            "x1_bar must lie in (0, 1), got {x1_bar}"
        )));
    }
    build_gv_pbo_from_logs(x1_bar.ln(), (1.0 - x1_bar).ln(), enc2, enc3, grid, params)
}

/// As [`build_gv_pbo`] with `ln x1` and `ln(1 - x1)` given directly, for
/// instance from the polynomial approximations.
pub fn build_gv_pbo_from_logs<F: Scalar>(
    ln_x1: f64,
    ln_1mx1: f64,
    enc2: &BinaryEncoding<F>,
    enc3: &BinaryEncoding<F>,
    grid: &CollocationGrid,
    params: &RbcParams,
) -> Result<(Polynomial<F>, GammaConstants)> {
    let g = GammaConstants::from_logs(grid, params, ln_x1, ln_1mx1);
    if !g.is_finite() {
        return Err(Error::invalid("valuation constants are not finite"));
    }
    let f = F::from_f64_lossy;
    let n = g.nodes as f64;
    let x2 = enc2.linear_poly();
    let x3 = enc3.linear_poly();
    let mut p = Polynomial::constant(f(n * (g.gamma0 + g.gamma1)));
    p += x2.scale(f(-n * g.gamma2));
    p += x3.scale(f(n * g.gamma3));
    p += (&x2 * &x3).scale(f(-n * g.gamma23));
    p += x2.square().scale(f(n * g.gamma22));
    p += x3.square().scale(f(n * g.gamma33));
    Ok((p, g))
}

/// Gram form of the summed squared valuation residual over the basis
/// `[1, ln(1 - x1), x2, x3, ln(x1) x3]`, valid with `x1` free. Node `n`
/// contributes the outer product of `[ln y, 1, -(1 - beta), zeta, alpha beta]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValuationGram {
    pub gram: [[f64; 5]; 5],
    pub nodes: usize,
}

impl ValuationGram {
    pub fn new(grid: &CollocationGrid, params: &RbcParams) -> Self {
        let mut gram = [[0.0; 5]; 5];
        for n in 0..grid.len() {
            let c = [
                grid.ln_y[n],
                1.0,
                -(1.0 - params.beta),
                grid.zeta(params, n),
                params.alpha_beta(),
            ];
            for a in 0..5 {
                for b in 0..5 {
                    gram[a][b] += c[a] * c[b];
                }
            }
        }
        Self {
            gram,
            nodes: grid.len(),
        }
    }

    /// Summed squared residual given `ln(1 - x1)`, `ln(x1)`, `x2` and `x3`.
    pub fn value(&self, ln_1mx1: f64, ln_x1: f64, x2: f64, x3: f64) -> f64 {
        let b = [1.0, ln_1mx1, x2, x3, ln_x1 * x3];
        let mut s = 0.0;
        for a in 0..5 {
            let row: f64 = (0..5).map(|k| self.gram[a][k] * b[k]).sum();
            s += b[a] * row;
        }
        s
    }
}

/// The valuation problem at fixed logs as a quadratic model over the bits of
/// two contiguous encodings, `x2` first. Energies come from the closed form
/// so that exhaustive search reports exact values; the QUBO form (from the
/// PBO) drives the incremental search.
#[derive(Debug, Clone)]
pub struct ValuationModel {
    pub enc2: BinaryEncoding<f64>,
    pub enc3: BinaryEncoding<f64>,
    pub ln_x1: f64,
    pub ln_1mx1: f64,
    gram: ValuationGram,
    qubo: QuboModel<f64>,
    offset: f64,
}

impl ValuationModel {
    pub fn new(
        enc2: BinaryEncoding<f64>,
        enc3: BinaryEncoding<f64>,
        grid: &CollocationGrid,
        params: &RbcParams,
        ln_x1: f64,
        ln_1mx1: f64,
    ) -> Result<Self> {
        if enc2.var_base() != 0 || enc3.var_base() != enc2.bit_count() {
            return Err(Error::invalid(
                "valuation encodings must be contiguous from bit 0",
            ));
        }
        let n = enc2.bit_count() + enc3.bit_count();
        let (pbo, _) = build_gv_pbo_from_logs(ln_x1, ln_1mx1, &enc2, &enc3, grid, params)?;
        let (qubo, offset) = pbo.to_qubo(n)?;
        Ok(Self {
            enc2,
            enc3,
            ln_x1,
            ln_1mx1,
            gram: ValuationGram::new(grid, params),
            qubo,
            offset,
        })
    }

    pub fn qubo(&self) -> (&QuboModel<f64>, f64) {
        (&self.qubo, self.offset)
    }

    pub fn decode(&self, bits: &[u8]) -> (f64, f64) {
        (self.enc2.decode(bits), self.enc3.decode(bits))
    }

    pub fn loss(&self, x2: f64, x3: f64) -> f64 {
        self.gram.value(self.ln_1mx1, self.ln_x1, x2, x3)
    }

    /// Exact argmin by exhaustive search (smallest state index among ties).
    pub fn argmin(&self) -> Result<(BinaryState, f64)> {
        let r = brute_force(
            self,
            &BruteForceOptions {
                max_argmin: 1,
                ..Default::default()
            },
        )?;
        let s = r.argmin_states.into_iter().next().expect("nonempty argmin");
        Ok((s, r.min_energy))
    }
}

impl QuadraticModel<f64> for ValuationModel {
    type State = BinaryState;

    fn num_vars(&self) -> usize {
        self.qubo.num_vars()
    }

    fn energy_of_bits(&self, bits: &[u8]) -> f64 {
        let (x2, x3) = self.decode(bits);
        self.loss(x2, x3)
    }

    fn state_from_bits(bits: BinaryState) -> BinaryState {
        bits
    }

    fn interactions(&self) -> Vec<((usize, usize), f64)> {
        self.qubo.quadratic().collect()
    }

    fn as_qubo(&self) -> (QuboModel<f64>, f64) {
        (self.qubo.clone(), self.offset)
    }
}

/// Continuous valuation step: least-squares `(x2, x3)` over the grid.
pub fn valuation_least_squares(
    grid: &CollocationGrid,
    params: &RbcParams,
    ln_x1: f64,
    ln_1mx1: f64,
) -> Result<(f64, f64)> {
    let ab = params.alpha_beta();
    let rows: Vec<Vec<f64>> = (0..grid.len())
        .map(|n| vec![-(1.0 - params.beta), grid.zeta(params, n) + ab * ln_x1])
        .collect();
    let rhs: Vec<f64> = grid.ln_y.iter().map(|ly| -(ly + ln_1mx1)).collect();
    let sol = least_squares(&rows, &rhs)?;
    Ok((sol[0], sol[1]))
}

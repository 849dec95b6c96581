use crate::{Error, Result};

/// Capital nodes per productivity level in the default collocation grid:
/// the square root of the 17,820-point VFI grid, rounded down.
pub const DEFAULT_K_NODES: usize = 133;

/// Planner problem with log utility, Cobb-Douglas output `y = z k^alpha`
/// and a Markov chain on productivity.
#[derive(Debug, Clone, PartialEq)]
pub struct RbcParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub z_grid: Vec<f64>,
    /// Row-stochastic transition matrix over `z_grid`.
    pub transition: Vec<Vec<f64>>,
}

impl Default for RbcParams {
    fn default() -> Self {
        Self {
            alpha: 0.33,
            beta: 0.95,
            delta: 1.0,
            z_grid: vec![0.9792, 0.9896, 1.0000, 1.0106, 1.0212],
            // The printed middle row sums to 1.0001; rows are rescaled.
            transition: [
                [0.9727, 0.0273, 0.0, 0.0, 0.0],
                [0.0041, 0.9806, 0.0153, 0.0, 0.0],
                [0.0, 0.0082, 0.9837, 0.0082, 0.0],
                [0.0, 0.0, 0.0153, 0.9806, 0.0041],
                [0.0, 0.0, 0.0, 0.0273, 0.9727],
            ]
            .iter()
            .map(|row| {
                let s: f64 = row.iter().sum();
                row.iter().map(|p| p / s).collect()
            })
            .collect(),
        }
    }
}

impl RbcParams {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.alpha) || !open_unit(self.beta) {
            return Err(Error::invalid(format!(
                "alpha and beta must lie in (0, 1), got {} and {}",
                self.alpha, self.beta
            )));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::invalid(format!(
                "delta must lie in (0, 1], got {}",
                self.delta
            )));
        }
        let n = self.z_grid.len();
        if n == 0 || self.z_grid.iter().any(|&z| !(z > 0.0)) {
            return Err(Error::invalid("productivity levels must be positive"));
        }
        if self.z_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "productivity levels must be strictly increasing",
            ));
        }
        if self.transition.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: self.transition.len(),
            });
        }
        for (i, row) in self.transition.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: row.len(),
                });
            }
            if row.iter().any(|&p| p < 0.0) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!(
                    "transition row {i} is not a distribution"
                )));
            }
        }
        Ok(())
    }

    pub fn alpha_beta(&self) -> f64 {
        self.alpha * self.beta
    }

    /// Stationary distribution of the productivity chain by power iteration.
    pub fn stationary(&self) -> Vec<f64> {
        let n = self.z_grid.len();
        let mut p = vec![1.0 / n as f64; n];
        for _ in 0..1_000_000 {
            let mut next = vec![0.0; n];
            for (i, row) in self.transition.iter().enumerate() {
                for (j, &t) in row.iter().enumerate() {
                    next[j] += p[i] * t;
                }
            }
            let total: f64 = next.iter().sum();
            next.iter_mut().for_each(|v| *v /= total);
            let change = p
                .iter()
                .zip(&next)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            p = next;
            if change < 1e-16 {
                break;
            }
        }
        p
    }

    /// `E[ln z' | z = z_grid[i]]`.
    pub fn expected_ln_z_next(&self, i: usize) -> f64 {
        self.transition[i]
            .iter()
            .zip(&self.z_grid)
            .map(|(p, z)| p * z.ln())
            .sum()
    }

    /// `E[ln z']` under the stationary distribution.
    pub fn stationary_expected_ln_z(&self) -> f64 {
        self.stationary()
            .iter()
            .zip(&self.z_grid)
            .map(|(p, z)| p * z.ln())
            .sum()
    }

    /// Deterministic steady-state capital,
    /// `(alpha beta / (1 - beta (1 - delta)))^(1 / (1 - alpha))`.
    pub fn steady_state_capital(&self) -> f64 {
        (self.alpha_beta() / (1.0 - self.beta * (1.0 - self.delta))).powf(1.0 / (1.0 - self.alpha))
    }

    /// Index of productivity level 1 (or the level closest to it).
    pub fn neutral_z_index(&self) -> usize {
        (0..self.z_grid.len())
            .min_by(|&a, &b| {
                (self.z_grid[a] - 1.0)
                    .abs()
                    .total_cmp(&(self.z_grid[b] - 1.0).abs())
            })
            .unwrap_or(0)
    }

    fn require_closed_form(&self) -> Result<()> {
        self.validate()?;
        if self.delta != 1.0 {
            return Err(Error::Unsupported(format!(
                "closed form needs full depreciation, got delta = {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Optimal consumption and next-period capital,
/// `c = (1 - alpha beta) z k^alpha` and `k' = alpha beta z k^alpha`.
pub fn closed_form_step(k: f64, z_index: usize, params: &RbcParams) -> Result<(f64, f64)> {
    params.require_closed_form()?;
    if !(k > 0.0) {
        return Err(Error::invalid(format!("capital must be positive, got {k}")));
    }
    let z = *params
        .z_grid
        .get(z_index)
        .ok_or_else(|| Error::invalid(format!("productivity index {z_index} out of range")))?;
    let y = z * k.powf(params.alpha);
    let ab = params.alpha_beta();
    Ok(((1.0 - ab) * y, ab * y))
}

/// Parameters `(x1, x2, x3)` of the exact solution: the savings rate and the
/// intercept and slope of `v = x2 + x3 ln y`, with the intercept's
/// expectation of `ln z'` taken under the stationary distribution.
pub fn true_parameters(params: &RbcParams) -> Result<[f64; 3]> {
    params.require_closed_form()?;
    let ab = params.alpha_beta();
    let b = params.beta;
    let x3 = 1.0 / (1.0 - ab);
    let e = params.stationary_expected_ln_z();
    let x2 = ((1.0 - ab).ln() + b * x3 * e + ab * x3 * ab.ln()) / (1.0 - b);
    Ok([ab, x2, x3])
}

/// Minimizer of `-ln(1 - x1) - alpha beta x3 ln(x1)`.
pub fn analytic_policy_update(x3_bar: f64, params: &RbcParams) -> f64 {
    let c = params.alpha_beta() * x3_bar;
    c / (1.0 + c)
}

/// Collocation nodes `(k, z)` with their output and conditional
/// expectation of next-period log productivity.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid {
    pub k: Vec<f64>,
    pub z_index: Vec<usize>,
    pub ln_y: Vec<f64>,
    /// `E[ln z' | z]` at each node.
    pub e_ln_z_next: Vec<f64>,
}

impl CollocationGrid {
    /// `k_count` evenly spaced capital levels on `[0.5 k_bar, 1.5 k_bar]`
    /// crossed with every productivity level, capital-major.
    pub fn new(params: &RbcParams, k_count: usize) -> Result<Self> {
        params.validate()?;
        if k_count == 0 {
            return Err(Error::invalid("the grid needs at least one capital node"));
        }
        let kbar = params.steady_state_capital();
        let mut nodes = Vec::with_capacity(k_count * params.z_grid.len());
        for i in 0..k_count {
            let k = if k_count == 1 {
                kbar
            } else {
                kbar * (0.5 + i as f64 / (k_count - 1) as f64)
            };
            for zi in 0..params.z_grid.len() {
                nodes.push((k, zi));
            }
        }
        Self::from_nodes(params, &nodes)
    }

    pub fn from_nodes(params: &RbcParams, nodes: &[(f64, usize)]) -> Result<Self> {
        params.validate()?;
        if nodes.is_empty() {
            return Err(Error::invalid("the grid needs at least one node"));
        }
        let mut g = Self {
            k: Vec::with_capacity(nodes.len()),
            z_index: Vec::with_capacity(nodes.len()),
            ln_y: Vec::with_capacity(nodes.len()),
            e_ln_z_next: Vec::with_capacity(nodes.len()),
        };
        for &(k, zi) in nodes {
            if !(k > 0.0) || zi >= params.z_grid.len() {
                return Err(Error::invalid(format!(
                    "invalid collocation node ({k}, {zi})"
                )));
            }
            g.k.push(k);
            g.z_index.push(zi);
            g.ln_y.push(params.z_grid[zi].ln() + params.alpha * k.ln());
            g.e_ln_z_next.push(params.expected_ln_z_next(zi));
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// `zeta = beta E[ln z'|z] + (alpha beta - 1) ln y` at node `n`.
    pub fn zeta(&self, params: &RbcParams, n: usize) -> f64 {
        params.beta * self.e_ln_z_next[n] + (params.alpha_beta() - 1.0) * self.ln_y[n]
    }
}

use std::fmt::Write as _;

use super::RbcParams;
use crate::{Error, Result};

/// Productivity levels for a negative first-period shock: `z` sits at
/// `shock_index` in period 1 and log productivity then follows its
/// conditional expectation under the transition matrix.
pub fn negative_shock_path(
    params: &RbcParams,
    shock_index: usize,
    periods: usize,
) -> Result<Vec<f64>> {
    params.validate()?;
    let n = params.z_grid.len();
    if shock_index >= n {
        return Err(Error::invalid(format!(
            "shock index {shock_index} out of range"
        )));
    }
    let ln_z: Vec<f64> = params.z_grid.iter().map(|z| z.ln()).collect();
    let mut dist = vec![0.0; n];
    dist[shock_index] = 1.0;
    let mut out = Vec::with_capacity(periods);
    for _ in 0..periods {
        out.push(
            dist.iter()
                .zip(&ln_z)
                .map(|(p, l)| p * l)
                .sum::<f64>()
                .exp(),
        );
        let mut next = vec![0.0; n];
        for (i, &p) in dist.iter().enumerate() {
            for (j, slot) in next.iter_mut().enumerate() {
                *slot += p * params.transition[i][j];
            }
        }
        dist = next;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathRow {
    pub period: usize,
    pub z: f64,
    pub k_true: f64,
    pub c_true: f64,
    pub k_hat: f64,
    pub c_hat: f64,
    /// `100 |c_hat - c_true| / c_true`.
    pub gap_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsumptionPaths {
    pub rows: Vec<PathRow>,
}

impl ConsumptionPaths {
    pub fn max_gap_pct(&self) -> f64 {
        self.rows.iter().map(|r| r.gap_pct).fold(0.0, f64::max)
    }

    /// Period with the largest consumption gap (first on ties).
    pub fn argmax_period(&self) -> Option<usize> {
        let mut best: Option<&PathRow> = None;
        for r in &self.rows {
            if best.map_or(true, |b| r.gap_pct > b.gap_pct) {
                best = Some(r);
            }
        }
        best.map(|r| r.period)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("period,z,k_true,c_true,k_hat,c_hat,gap_pct\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.period, r.z, r.k_true, r.c_true, r.k_hat, r.c_hat, r.gap_pct
            );
        }
        s
    }
}

/// Consumption `c = (1 - x1) y` and capital `k' = x1 y` under the estimated
/// savings rate, against the exact rule `x1 = alpha beta`, both starting
/// from `k0` and facing the same productivity path.
pub fn simulate_consumption(
    params: &RbcParams,
    x1_hat: f64,
    z_path: &[f64],
    k0: f64,
) -> Result<ConsumptionPaths> {
    params.validate()?;
    if !(x1_hat > 0.0 && x1_hat < 1.0) {
        return Err(Error::invalid(format!(
            "savings rate must lie in (0, 1), got {x1_hat}"
        )));
    }
    if !(k0 > 0.0) {
        return Err(Error::invalid(format!(
            "initial capital must be positive, got {k0}"
        )));
    }
    let x1 = params.alpha_beta();
    let (mut k, mut kh) = (k0, k0);
    let rows = z_path
        .iter()
        .enumerate()
        .map(|(t, &z)| {
            let y = z * k.powf(params.alpha);
            let yh = z * kh.powf(params.alpha);
            let row = PathRow {
                period: t + 1,
                z,
                k_true: k,
                c_true: (1.0 - x1) * y,
                k_hat: kh,
                c_hat: (1.0 - x1_hat) * yh,
                gap_pct: 100.0 * ((1.0 - x1_hat) * yh / ((1.0 - x1) * y) - 1.0).abs(),
            };
            k = x1 * y;
            kh = x1_hat * yh;
            row
        })
        .collect();
    Ok(ConsumptionPaths { rows })
}

/// Starting capital of the default scenario: the deterministic steady state
/// `(alpha beta)^(1 / (1 - alpha))` with `z = 1`.
pub fn default_initial_capital(params: &RbcParams) -> f64 {
    params.alpha_beta().powf(1.0 / (1.0 - params.alpha))
}

use super::{BinaryEncoding, Polynomial};
use crate::linalg::least_squares;
use crate::{Error, Result, Scalar};

/// Coefficients of `ln x ~ a0 + a1 x + a2 x^2` and `ln(1 - x) ~ at0 + at1 x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogApproxCoefficients {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub at0: f64,
    pub at1: f64,
}

impl Default for LogApproxCoefficients {
    fn default() -> Self {
        Self {
            a0: -0.10905,
            a1: 0.57570,
            a2: -1.38445,
            at0: -0.22278,
            at1: -0.28375,
        }
    }
}

impl LogApproxCoefficients {
    /// Least-squares fit of both approximations on `samples` evenly spaced
    /// points of `[lo, hi]`, which must lie inside `(0, 1)`.
    pub fn fit(lo: f64, hi: f64, samples: usize) -> Result<Self> {
        if !(0.0 < lo && lo < hi && hi < 1.0) || samples < 3 {
            return Err(Error::invalid(format!(
                "log fit needs 0 < lo < hi < 1 and at least 3 samples, got [{lo}, {hi}] with {samples}"
            )));
        }
        let ts: Vec<f64> = (0..samples)
            .map(|k| lo + (hi - lo) * k as f64 / (samples - 1) as f64)
            .collect();
        let quad: Vec<Vec<f64>> = ts.iter().map(|&t| vec![1.0, t, t * t]).collect();
        let lin: Vec<Vec<f64>> = ts.iter().map(|&t| vec![1.0, t]).collect();
        let a = least_squares(&quad, &ts.iter().map(|t| t.ln()).collect::<Vec<_>>())?;
        let at = least_squares(&lin, &ts.iter().map(|t| (1.0 - t).ln()).collect::<Vec<_>>())?;
        Ok(Self {
            a0: a[0],
            a1: a[1],
            a2: a[2],
            at0: at[0],
            at1: at[1],
        })
    }

    pub fn ln_x(&self, x: f64) -> f64 {
        self.a0 + self.a1 * x + self.a2 * x * x
    }

    pub fn ln_1mx(&self, x: f64) -> f64 {
        self.at0 + self.at1 * x
    }
}

/// Quadratic approximation of `ln x_1` on the bits of `enc`:
/// `a0 + sum_j (a1 w_j + a2 w_j^2) b_j + 2 a2 sum_{i<j} w_i w_j b_i b_j`
/// with `w_j = s 2^j`.
pub fn ln_x_poly<F: Scalar>(
    enc: &BinaryEncoding<F>,
    coeffs: &LogApproxCoefficients,
) -> Polynomial<F> {
    let a0 = F::from_f64_lossy(coeffs.a0);
    let a1 = F::from_f64_lossy(coeffs.a1);
    let a2 = F::from_f64_lossy(coeffs.a2);
    let two = F::one() + F::one();
    let mut p = Polynomial::constant(a0);
    for j in 0..enc.bit_count() {
        let wj = enc.weight(j);
        p.add_term([enc.var(j)], a1 * wj + a2 * wj * wj);
        for i in 0..j {
            p.add_term([enc.var(i), enc.var(j)], two * a2 * wj * enc.weight(i));
        }
    }
    p
}

/// Linear approximation of `ln(1 - x_1)`: `at0 + at1 sum_j s 2^j b_j`.
pub fn ln_1mx_poly<F: Scalar>(
    enc: &BinaryEncoding<F>,
    coeffs: &LogApproxCoefficients,
) -> Polynomial<F> {
    let at0 = F::from_f64_lossy(coeffs.at0);
    let at1 = F::from_f64_lossy(coeffs.at1);
    let mut p = Polynomial::constant(at0);
    for j in 0..enc.bit_count() {
        p.add_term([enc.var(j)], at1 * enc.weight(j));
    }
    p
}

/// Worst absolute error of an approximation over the encoded grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridError {
    pub max_abs_error: f64,
    /// Decoded value at which the worst error occurs.
    pub at: f64,
    pub points: usize,
}

fn grid_error(
    enc: &BinaryEncoding<f64>,
    approx: impl Fn(f64) -> f64,
    exact: impl Fn(f64) -> f64,
) -> GridError {
    let mut worst = GridError {
        max_abs_error: 0.0,
        at: f64::NAN,
        points: 0,
    };
    for k in 0..=enc.max_integer() {
        let v = enc.decode_integer(k);
        let e = exact(v);
        if !e.is_finite() {
            continue;
        }
        worst.points += 1;
        let err = (approx(v) - e).abs();
        if err > worst.max_abs_error {
            worst.max_abs_error = err;
            worst.at = v;
        }
    }
    worst
}

/// Error of the `ln x` approximation on the grid, skipping decoded zero.
pub fn ln_x_grid_error(enc: &BinaryEncoding<f64>, coeffs: &LogApproxCoefficients) -> GridError {
    grid_error(
        enc,
        |v| coeffs.ln_x(v),
        |v| if v > 0.0 { v.ln() } else { f64::NAN },
    )
}

/// Error of the `ln(1 - x)` approximation on the grid, skipping values at or
/// above one.
pub fn ln_1mx_grid_error(enc: &BinaryEncoding<f64>, coeffs: &LogApproxCoefficients) -> GridError {
    grid_error(
        enc,
        |v| coeffs.ln_1mx(v),
        |v| if v < 1.0 { (1.0 - v).ln() } else { f64::NAN },
    )
}

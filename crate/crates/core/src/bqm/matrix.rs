use super::QuboModel;
use crate::Scalar;

/// Adjacency-list form of a QUBO for inner loops that flip single bits.
#[derive(Debug, Clone)]
pub struct QuboMatrix {
    linear: Vec<f64>,
    neighbors: Vec<Vec<(u32, f64)>>,
    abs_sum: f64,
}

impl QuboMatrix {
    pub fn from_model<F: Scalar>(model: &QuboModel<F>) -> Self {
        let n = model.num_vars();
        let mut linear = vec![0.0; n];
        let mut neighbors = vec![Vec::new(); n];
        let mut abs_sum = 0.0;
        for ((i, j), v) in model.entries() {
            let v = v.as_f64();
            abs_sum += v.abs();
            if i == j {
                linear[i] += v;
            } else if v != 0.0 {
                neighbors[i].push((j as u32, v));
                neighbors[j].push((i as u32, v));
            }
        }
        Self {
            linear,
            neighbors,
            abs_sum,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn neighbors(&self, i: usize) -> &[(u32, f64)] {
        &self.neighbors[i]
    }

    /// Sum of absolute coefficients, a scale for rounding tolerances.
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }

    pub fn energy(&self, x: &[u8]) -> f64 {
        let mut e = 0.0;
        for i in 0..self.linear.len() {
            if x[i] == 0 {
                continue;
            }
            e += self.linear[i];
            for &(j, v) in &self.neighbors[i] {
                if (j as usize) > i && x[j as usize] == 1 {
                    e += v;
                }
            }
        }
        e
    }

    /// `lin_i + sum_j Q_ij x_j`, the energy gained by setting bit `i`.
    pub fn local_field(&self, x: &[u8], i: usize) -> f64 {
        let mut f = self.linear[i];
        for &(j, v) in &self.neighbors[i] {
            if x[j as usize] == 1 {
                f += v;
            }
        }
        f
    }

    /// Energy change from flipping bit `i`.
    pub fn flip_delta(&self, x: &[u8], i: usize) -> f64 {
        let f = self.local_field(x, i);
        if x[i] == 1 {
            -f
        } else {
            f
        }
    }

    /// Local fields for every bit.
    pub fn fields(&self, x: &[u8]) -> Vec<f64> {
        (0..self.num_vars())
            .map(|i| self.local_field(x, i))
            .collect()
    }

    /// Flips bit `i` and keeps `fields` consistent; returns the energy change.
    pub fn flip_with_fields(&self, x: &mut [u8], fields: &mut [f64], i: usize) -> f64 {
        let delta = if x[i] == 1 { -fields[i] } else { fields[i] };
        x[i] ^= 1;
        let sign = if x[i] == 1 { 1.0 } else { -1.0 };
        for &(j, v) in &self.neighbors[i] {
            fields[j as usize] += sign * v;
        }
        delta
    }
}

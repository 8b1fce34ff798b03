//! Dense helpers on row-major square matrices.

use crate::error::{Error, Result};

/// Lower Cholesky factor `L` with `L Lᵀ = A`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    dim: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &[f64], dim: usize) -> Result<Self> {
        if a.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "matrix has {} entries, expected {dim}x{dim}",
                a.len()
            )));
        }
        let mut l = vec![0.0; dim * dim];
        let mut min_pivot = f64::INFINITY;
        for i in 0..dim {
            for j in 0..=i {
                let dot: f64 = l[i * dim..i * dim + j]
                    .iter()
                    .zip(&l[j * dim..j * dim + j])
                    .map(|(p, q)| p * q)
                    .sum();
                let v = a[i * dim + j] - dot;
                if i == j {
                    min_pivot = min_pivot.min(v);
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(Error::NotPositiveDefinite { min_pivot });
                    }
                    l[i * dim + i] = v.sqrt();
                } else {
                    l[i * dim + j] = v / l[j * dim + j];
                }
            }
        }
        Ok(Cholesky { dim, lower: l })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `ln |A| = 2 Σ ln L_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim)
            .map(|i| self.lower[i * self.dim + i].ln())
            .sum::<f64>()
    }

    /// `(x − μ)ᵀ A⁻¹ (x − μ)` via forward substitution; `scratch` must have
    /// length `dim`.
    pub fn mahalanobis_sq(&self, x: &[f64], mu: &[f64], scratch: &mut [f64]) -> f64 {
        let d = self.dim;
        let mut total = 0.0;
        for i in 0..d {
            let row = &self.lower[i * d..i * d + i];
            let dot: f64 = row.iter().zip(&scratch[..i]).map(|(a, b)| a * b).sum();
            let z = (x[i] - mu[i] - dot) / self.lower[i * d + i];
            scratch[i] = z;
            total += z * z;
        }
        total
    }
}

/// `ln Σ exp(v_i)` with the maximum shifted out.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

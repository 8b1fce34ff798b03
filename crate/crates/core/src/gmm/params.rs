use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mixture weights, component means and full covariances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmParams {
    pub dim: usize,
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    /// Row-major `dim × dim` matrices.
    pub covariances: Vec<Vec<f64>>,
}

pub const WEIGHT_SUM_TOL: f64 = 1e-12;
pub const SYMMETRY_TOL: f64 = 1e-10;

impl GmmParams {
    pub fn new(
        weights: Vec<f64>,
        means: Vec<Vec<f64>>,
        covariances: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let k = weights.len();
        if k == 0 {
            return Err(Error::InvalidArgument("mixture needs at least one component".into()));
        }
        let dim = means.first().map_or(0, Vec::len);
        if dim == 0 || means.len() != k || covariances.len() != k {
            return Err(Error::Dimension(format!(
                "{k} weights, {} means, {} covariances, dim {dim}",
                means.len(),
                covariances.len()
            )));
        }
        let p = GmmParams {
            dim,
            weights,
            means,
            covariances,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn n_components(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if self.means.iter().any(|m| m.len() != d) || self.covariances.iter().any(|c| c.len() != d * d)
        {
            return Err(Error::Dimension("component shapes disagree with dim".into()));
        }
        if let Some(w) = self.weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument(format!("mixture weight {w} is not positive")));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidArgument(format!("mixture weights sum to {total}")));
        }
        for (j, c) in self.covariances.iter().enumerate() {
            for r in 0..d {
                for s in 0..r {
                    let (a, b) = (c[r * d + s], c[s * d + r]);
                    if (a - b).abs() > SYMMETRY_TOL * (1.0 + a.abs().max(b.abs())) {
                        return Err(Error::InvalidArgument(format!(
                            "covariance {j} is not symmetric at ({r}, {s})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Row-major `n × N_c` posterior membership probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Responsibilities {
    n_components: usize,
    values: Vec<f64>,
}

impl Responsibilities {
    pub fn new(values: Vec<f64>, n_components: usize) -> Result<Self> {
        if n_components == 0 || !values.len().is_multiple_of(n_components) {
            return Err(Error::Dimension(format!(
                "{} responsibilities do not fill rows of width {n_components}",
                values.len()
            )));
        }
        Ok(Responsibilities {
            n_components,
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.values.len() / self.n_components
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_components..(i + 1) * self.n_components]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_components)
    }

    /// Per-component total mass `n_k = Σ_n r(z_nk)`.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_components];
        for row in self.rows() {
            for (s, r) in sums.iter_mut().zip(row) {
                *s += r;
            }
        }
        sums
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub max_iter: usize,
    /// Stop once `(ll_new − ll_old) / |ll_old|` falls below this.
    pub tol: f64,
    /// Added to every covariance diagonal.
    pub reg_covar: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            max_iter: 500,
            tol: 1e-6,
            reg_covar: 1e-6,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance {} must be positive", self.tol)));
        }
        if !(self.reg_covar >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "covariance regularisation {} must be non-negative",
                self.reg_covar
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Tolerance,
    MaxIterations,
    /// The regularised update lowered the likelihood by more than the
    /// monotonicity slack; the previous parameters were kept.
    LikelihoodDecrease,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedGmm {
    pub params: GmmParams,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    /// Log-likelihood after initialisation and after every accepted M-step,
    /// counted from the last component re-initialisation.
    pub trace: Vec<f64>,
    pub reinitializations: usize,
    pub seed: u64,
}

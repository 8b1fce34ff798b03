use std::f64::consts::PI;

use super::linalg::Cholesky;
use super::params::GmmParams;
use crate::error::{Error, Result};

/// `ln φ(x | μ, Σ)` for a row-major SPD covariance, via Cholesky.
pub fn gaussian_logpdf(x: &[f64], mu: &[f64], sigma: &[f64]) -> Result<f64> {
    let d = x.len();
    if mu.len() != d || sigma.len() != d * d {
        return Err(Error::Dimension(format!(
            "x has {d} entries, mean {}, covariance {}",
            mu.len(),
            sigma.len()
        )));
    }
    let c = ComponentDensity::new(mu, sigma, 1.0)?;
    let mut scratch = vec![0.0; d];
    Ok(c.log_density(x, &mut scratch))
}

/// One mixture component with its factorisation cached.
#[derive(Debug, Clone)]
pub(crate) struct ComponentDensity<'a> {
    mean: &'a [f64],
    chol: Cholesky,
    /// `−½ (D ln 2π + ln |Σ|)`
    log_norm: f64,
    log_weight: f64,
}

impl<'a> ComponentDensity<'a> {
    pub(crate) fn new(mean: &'a [f64], cov: &[f64], weight: f64) -> Result<Self> {
        let d = mean.len();
        let chol = Cholesky::factor(cov, d)?;
        let log_norm = -0.5 * (d as f64 * (2.0 * PI).ln() + chol.log_det());
        Ok(ComponentDensity {
            mean,
            chol,
            log_norm,
            log_weight: weight.ln(),
        })
    }

    pub(crate) fn log_density(&self, x: &[f64], scratch: &mut [f64]) -> f64 {
        self.log_norm - 0.5 * self.chol.mahalanobis_sq(x, self.mean, scratch)
    }
}

/// Factorised mixture, ready for repeated row evaluation.
#[derive(Debug, Clone)]
pub(crate) struct Mixture<'a> {
    components: Vec<ComponentDensity<'a>>,
    dim: usize,
}

impl<'a> Mixture<'a> {
    pub(crate) fn new(params: &'a GmmParams) -> Result<Self> {
        let components = params
            .means
            .iter()
            .zip(&params.covariances)
            .zip(&params.weights)
            .map(|((m, c), &w)| ComponentDensity::new(m, c, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Mixture {
            components,
            dim: params.dim,
        })
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn n_components(&self) -> usize {
        self.components.len()
    }

    /// Writes normalised posteriors into `out` and returns `ln p(x | θ)`.
    ///
    /// Joint log-terms `ln ω_k + ln φ_k(x)` are max-shifted before
    /// exponentiation, so rows far from every component do not underflow.
    pub(crate) fn posterior_row(&self, x: &[f64], out: &mut [f64], scratch: &mut [f64]) -> f64 {
        let mut max = f64::NEG_INFINITY;
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.log_weight + c.log_density(x, scratch);
            max = max.max(*o);
        }
        let mut total = 0.0;
        for o in out.iter_mut() {
            *o = (*o - max).exp();
            total += *o;
        }
        for o in out.iter_mut() {
            *o /= total;
        }
        max + total.ln()
    }

    pub(crate) fn log_density(&self, x: &[f64], scratch: &mut [f64], terms: &mut [f64]) -> f64 {
        for (t, c) in terms.iter_mut().zip(&self.components) {
            *t = c.log_weight + c.log_density(x, scratch);
        }
        super::linalg::log_sum_exp(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_normal_at_mode() {
        let v = gaussian_logpdf(&[0.0], &[0.0], &[1.0]).unwrap();
        assert!((v + 0.5 * (2.0 * PI).ln()).abs() < 1e-15);
        assert!((v + 0.918_938_533_204_672_7).abs() < 1e-12);
    }

    #[test]
    fn bivariate_standard_at_mode() {
        let v = gaussian_logpdf(&[1.0, 2.0], &[1.0, 2.0], &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((v + (2.0 * PI).ln()).abs() < 1e-14);
    }

    #[test]
    fn diagonal_case_by_hand() {
        // −(ln 2π + ½ ln 4 + ½) evaluated term by term
        let expected = -((2.0 * PI).ln() + 0.5 * 4f64.ln() + 0.5);
        let v = gaussian_logpdf(&[1.0, 0.0], &[0.0, 0.0], &[1.0, 0.0, 0.0, 4.0]).unwrap();
        assert!((v - expected).abs() < 1e-14);
        assert!((v + 3.031_024_246_969_290_7).abs() < 1e-12);
    }

    #[test]
    fn singular_covariance_errors() {
        let err = gaussian_logpdf(&[0.0, 0.0], &[0.0, 0.0], &[1.0, 1.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
    }

    #[test]
    fn dimension_mismatch_errors() {
        assert!(gaussian_logpdf(&[0.0, 0.0], &[0.0], &[1.0]).is_err());
    }
}

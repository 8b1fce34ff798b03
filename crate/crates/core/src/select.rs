//! Choosing the number of mixture components by AIC or BIC.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataio::FeatureMatrix;
use crate::error::{Error, Result};
use crate::gmm::{fit, FitConfig, FittedGmm};
use crate::seed;

/// Independent EM starts per candidate; the best log-likelihood is kept.
pub const N_RESTARTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Aic,
    Bic,
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Criterion::Aic),
            "bic" => Ok(Criterion::Bic),
            _ => Err(Error::InvalidArgument(format!("unknown criterion {s:?}"))),
        }
    }
}

/// Free parameters of a full-covariance mixture: weights, means and the
/// upper triangle of each covariance.
pub fn param_count(n_components: usize, dim: usize) -> usize {
    (n_components - 1) + n_components * dim + n_components * dim * (dim + 1) / 2
}

pub fn aic(loglik: f64, k: usize) -> f64 {
    2.0 * k as f64 - 2.0 * loglik
}

pub fn bic(loglik: f64, k: usize, n: usize) -> f64 {
    (n as f64).ln() * k as f64 - 2.0 * loglik
}

/// Seed for restart `r` of candidate `k`.
pub fn restart_seed(root: u64, k: usize, restart: usize) -> u64 {
    seed::derive(root, &format!("kmeans/k{k}/restart{restart}"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateScore {
    pub loglik: f64,
    pub params: usize,
    pub aic: f64,
    pub bic: f64,
    pub model: FittedGmm,
    /// Restarts that failed and were skipped.
    pub failed_restarts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub k: usize,
    /// `Err` holds the message of the last failed restart when none succeeded.
    pub outcome: std::result::Result<CandidateScore, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionCurve {
    pub n: usize,
    pub dim: usize,
    pub candidates: Vec<Candidate>,
    pub criterion: Criterion,
    pub chosen_aic: Option<usize>,
    pub chosen_bic: Option<usize>,
}

impl SelectionCurve {
    /// The k chosen by the curve's own criterion.
    pub fn chosen(&self) -> Option<usize> {
        match self.criterion {
            Criterion::Aic => self.chosen_aic,
            Criterion::Bic => self.chosen_bic,
        }
    }

    pub fn candidate(&self, k: usize) -> Option<&Candidate> {
        self.candidates.iter().find(|c| c.k == k)
    }

    /// Best fitted model for the chosen k.
    pub fn chosen_model(&self) -> Option<&FittedGmm> {
        let k = self.chosen()?;
        self.candidate(k)?.outcome.as_ref().ok().map(|s| &s.model)
    }

    /// CSV `k,loglik,params,aic,bic`; failed candidates leave the numeric
    /// fields empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,loglik,params,aic,bic")?;
        for c in &self.candidates {
            match &c.outcome {
                Ok(s) => writeln!(w, "{},{},{},{},{}", c.k, s.loglik, s.params, s.aic, s.bic)?,
                Err(_) => writeln!(w, "{},,,,", c.k)?,
            }
        }
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }
}

/// Best of `restarts` EM fits for a single k. Fails only if every restart fails.
pub fn fit_best(x: &FeatureMatrix, k: usize, config: &FitConfig, restarts: usize) -> Result<(FittedGmm, usize)> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    let mut best: Option<FittedGmm> = None;
    let mut last_err = None;
    let mut failed = 0;
    for r in 0..restarts {
        let cfg = FitConfig {
            seed: restart_seed(config.seed, k, r),
            ..config.clone()
        };
        match fit(x, k, &cfg) {
            Ok(f) => {
                if best.as_ref().is_none_or(|b| f.log_likelihood > b.log_likelihood) {
                    best = Some(f);
                }
            }
            Err(e) => {
                log::warn!("k={k} restart {r} failed: {e}");
                failed += 1;
                last_err = Some(e);
            }
        }
    }
    match best {
        Some(b) => Ok((b, failed)),
        None => Err(last_err.expect("at least one restart ran")),
    }
}

fn argmin(values: impl Iterator<Item = (usize, f64)>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, v) in values {
        // Candidates arrive in ascending k, so strict `<` keeps the smaller k on ties.
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((k, v));
        }
    }
    best.map(|(k, _)| k)
}

/// Fits every candidate k, scores both criteria and picks the minimisers.
pub fn select_k(
    x: &FeatureMatrix,
    k_candidates: &[usize],
    config: &FitConfig,
    criterion: Criterion,
) -> Result<SelectionCurve> {
    if k_candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidate k".into()));
    }
    let (n, dim) = (x.n_rows(), x.n_cols());
    let mut ks = k_candidates.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > n) {
        return Err(Error::InvalidArgument(format!("candidate k={k} outside 1..={n}")));
    }

    let mut candidates = Vec::with_capacity(ks.len());
    for &k in &ks {
        let outcome = match fit_best(x, k, config, N_RESTARTS) {
            Ok((model, failed_restarts)) => {
                let p = param_count(k, dim);
                let ll = model.log_likelihood;
                log::info!("k={k}: loglik {ll:.4}, {} iterations", model.iterations);
                Ok(CandidateScore {
                    loglik: ll,
                    params: p,
                    aic: aic(ll, p),
                    bic: bic(ll, p, n),
                    model,
                    failed_restarts,
                })
            }
            Err(e) => {
                log::warn!("k={k} skipped: {e}");
                Err(e.to_string())
            }
        };
        candidates.push(Candidate { k, outcome });
    }

    let scored = || {
        candidates
            .iter()
            .filter_map(|c| c.outcome.as_ref().ok().map(|s| (c.k, s)))
    };
    let chosen_aic = argmin(scored().map(|(k, s)| (k, s.aic)));
    let chosen_bic = argmin(scored().map(|(k, s)| (k, s.bic)));
    Ok(SelectionCurve {
        n,
        dim,
        candidates,
        criterion,
        chosen_aic,
        chosen_bic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_counts() {
        assert_eq!(param_count(1, 1), 2);
        assert_eq!(param_count(2, 2), 1 + 4 + 6);
        assert_eq!(param_count(9, 62), 8 + 558 + 9 * 1953);
    }

    #[test]
    fn criteria_arithmetic() {
        assert_eq!(aic(0.0, 0), 0.0);
        assert_eq!(aic(-100.0, 10), 220.0);
        assert!((bic(-100.0, 10, 100) - (10.0 * 100f64.ln() + 200.0)).abs() < 1e-12);
        assert!((bic(-100.0, 10, 100) - 246.051_701_859_880_9).abs() < 1e-9);
        assert!(aic(-5.0, 3) < bic(-5.0, 3, 8));
    }

    #[test]
    fn ties_go_to_smaller_k() {
        assert_eq!(argmin([(2, 1.0), (3, 1.0), (4, 2.0)].into_iter()), Some(2));
        assert_eq!(argmin(std::iter::empty()), None);
    }

    #[test]
    fn single_candidate() {
        let x = FeatureMatrix::from_rows_unnamed(&[vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        let curve = select_k(&x, &[1], &FitConfig::default(), Criterion::Bic).unwrap();
        assert_eq!(curve.chosen(), Some(1));
        assert_eq!(curve.chosen_aic, Some(1));
    }

    #[test]
    fn oversized_candidate_rejected() {
        let x = FeatureMatrix::from_rows_unnamed(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(select_k(&x, &[1, 3], &FitConfig::default(), Criterion::Aic).is_err());
    }
}

use super::density::Mixture;
use super::kmeans::{finish_covariance, kmeans_init};
use super::params::{FitConfig, FittedGmm, GmmParams, Responsibilities, Termination};
use crate::dataio::FeatureMatrix;
use crate::error::{Error, Result};

/// Components whose responsibility mass falls below this are re-seeded.
pub const DEGENERATE_MASS: f64 = 1e-8;
/// Allowed per-step drop in log-likelihood before a step is rejected.
pub const MONOTONE_SLACK: f64 = 1e-8;

fn check_dim(x: &FeatureMatrix, params: &GmmParams) -> Result<()> {
    if x.n_cols() != params.dim {
        return Err(Error::Dimension(format!(
            "data has {} columns, model expects {}",
            x.n_cols(),
            params.dim
        )));
    }
    Ok(())
}

/// Posterior membership of every row, plus the total log-likelihood.
pub fn e_step_with_loglik(x: &FeatureMatrix, params: &GmmParams) -> Result<(Responsibilities, f64)> {
    check_dim(x, params)?;
    let mix = Mixture::new(params)?;
    let k = mix.n_components();
    let mut values = vec![0.0; x.n_rows() * k];
    let mut scratch = vec![0.0; mix.dim()];
    let mut loglik = 0.0;
    for (row, out) in x.rows().zip(values.chunks_exact_mut(k)) {
        loglik += mix.posterior_row(row, out, &mut scratch);
    }
    Ok((Responsibilities::new(values, k)?, loglik))
}

pub fn e_step(x: &FeatureMatrix, params: &GmmParams) -> Result<Responsibilities> {
    e_step_with_loglik(x, params).map(|(r, _)| r)
}

/// `Σ_i ln Σ_j ω_j φ(x_i | μ_j, Σ_j)`.
pub fn log_likelihood(x: &FeatureMatrix, params: &GmmParams) -> Result<f64> {
    check_dim(x, params)?;
    let mix = Mixture::new(params)?;
    let mut scratch = vec![0.0; mix.dim()];
    let mut terms = vec![0.0; mix.n_components()];
    Ok(x.rows()
        .map(|r| mix.log_density(r, &mut scratch, &mut terms))
        .sum())
}

/// `p(x ∈ C_j | θ)` for one applicant.
pub fn cluster_posterior(x: &[f64], params: &GmmParams) -> Result<Vec<f64>> {
    if x.len() != params.dim {
        return Err(Error::Dimension(format!(
            "row has {} entries, model expects {}",
            x.len(),
            params.dim
        )));
    }
    let mix = Mixture::new(params)?;
    let mut out = vec![0.0; mix.n_components()];
    let mut scratch = vec![0.0; mix.dim()];
    mix.posterior_row(x, &mut out, &mut scratch);
    Ok(out)
}

/// Closed-form parameter update from responsibilities: weighted means,
/// weighted (biased) covariances plus `reg_covar · I`, and `ω_k = n_k / n`.
pub fn m_step(x: &FeatureMatrix, r: &Responsibilities, reg_covar: f64) -> Result<GmmParams> {
    if r.n_rows() != x.n_rows() {
        return Err(Error::Dimension(format!(
            "{} responsibility rows for {} data rows",
            r.n_rows(),
            x.n_rows()
        )));
    }
    let (k, d) = (r.n_components(), x.n_cols());
    let mass = r.column_sums();
    if let Some(j) = mass.iter().position(|&m| !(m >= DEGENERATE_MASS)) {
        return Err(Error::DegenerateComponent {
            component: j,
            iteration: 0,
        });
    }

    let mut means = vec![vec![0.0; d]; k];
    for (row, resp) in x.rows().zip(r.rows()) {
        for (m, &w) in means.iter_mut().zip(resp) {
            for (mi, v) in m.iter_mut().zip(row) {
                *mi += w * v;
            }
        }
    }
    for (m, &nk) in means.iter_mut().zip(&mass) {
        for v in m.iter_mut() {
            *v /= nk;
        }
    }

    let mut covs = vec![vec![0.0; d * d]; k];
    let mut diff = vec![0.0; d];
    for (row, resp) in x.rows().zip(r.rows()) {
        for ((c, m), &w) in covs.iter_mut().zip(&means).zip(resp) {
            if w == 0.0 {
                continue;
            }
            for (df, (v, mu)) in diff.iter_mut().zip(row.iter().zip(m)) {
                *df = v - mu;
            }
            for a in 0..d {
                let wa = w * diff[a];
                let dst = &mut c[a * d + a..a * d + d];
                for (cv, db) in dst.iter_mut().zip(&diff[a..]) {
                    *cv += wa * db;
                }
            }
        }
    }
    for (c, &nk) in covs.iter_mut().zip(&mass) {
        finish_covariance(c, d, nk, reg_covar);
    }

    let total: f64 = mass.iter().sum();
    let weights = mass.iter().map(|m| m / total).collect();
    GmmParams::new(weights, means, covs)
}

/// Re-seeds component `j` at the worst-explained row with unit diagonal
/// covariance and weight `1 / n`, renormalising the other weights.
fn reseed_component(x: &FeatureMatrix, params: &GmmParams, j: usize) -> Result<GmmParams> {
    let mix = Mixture::new(params)?;
    let mut scratch = vec![0.0; mix.dim()];
    let mut terms = vec![0.0; mix.n_components()];
    let worst = x
        .rows()
        .map(|r| mix.log_density(r, &mut scratch, &mut terms))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);

    let d = params.dim;
    let mut next = params.clone();
    next.means[j] = x.row(worst).to_vec();
    next.covariances[j] = (0..d * d).map(|i| if i % (d + 1) == 0 { 1.0 } else { 0.0 }).collect();
    let n = x.n_rows() as f64;
    next.weights[j] = 0.0;
    let rest: f64 = next.weights.iter().sum();
    for w in next.weights.iter_mut() {
        *w *= (1.0 - 1.0 / n) / rest;
    }
    next.weights[j] = 1.0 / n;
    let total: f64 = next.weights.iter().sum();
    for w in next.weights.iter_mut() {
        *w /= total;
    }
    GmmParams::new(next.weights, next.means, next.covariances)
}

/// EM from a k-means start until the relative log-likelihood gain drops
/// below `config.tol` or `config.max_iter` M-steps have run.
pub fn fit(x: &FeatureMatrix, k: usize, config: &FitConfig) -> Result<FittedGmm> {
    config.validate()?;
    if x.n_rows() < k {
        return Err(Error::InvalidArgument(format!(
            "{} rows cannot support {k} components",
            x.n_rows()
        )));
    }
    let init = kmeans_init(x, k, config.reg_covar, config.seed)?;
    fit_from(x, init, config)
}

/// EM from explicit starting parameters.
pub fn fit_from(x: &FeatureMatrix, init: GmmParams, config: &FitConfig) -> Result<FittedGmm> {
    config.validate()?;
    let mut params = init;
    let (mut resp, mut ll) = e_step_with_loglik(x, &params)?;
    let mut trace = vec![ll];
    let mut iterations = 0;
    let mut reinitializations = 0;
    let mut collapsed_last = false;
    let mut termination = Termination::MaxIterations;

    while iterations < config.max_iter {
        iterations += 1;
        let next = match m_step(x, &resp, config.reg_covar) {
            Ok(p) => {
                collapsed_last = false;
                p
            }
            Err(Error::DegenerateComponent { component, .. }) => {
                if collapsed_last {
                    return Err(Error::DegenerateComponent {
                        component,
                        iteration: iterations,
                    });
                }
                collapsed_last = true;
                reinitializations += 1;
                log::debug!("component {component} collapsed at iteration {iterations}; re-seeding");
                let reseeded = reseed_component(x, &params, component)?;
                let (r, l) = e_step_with_loglik(x, &reseeded)?;
                params = reseeded;
                resp = r;
                ll = l;
                trace = vec![ll];
                continue;
            }
            Err(e) => return Err(e),
        };
        let (next_resp, next_ll) = e_step_with_loglik(x, &next)?;
        if next_ll < ll - MONOTONE_SLACK {
            log::debug!(
                "regularised update lowered log-likelihood by {:e}; keeping previous parameters",
                ll - next_ll
            );
            termination = Termination::LikelihoodDecrease;
            break;
        }
        let gain = (next_ll - ll) / ll.abs().max(f64::MIN_POSITIVE);
        params = next;
        resp = next_resp;
        ll = next_ll;
        trace.push(ll);
        if gain < config.tol {
            termination = Termination::Tolerance;
            break;
        }
    }

    Ok(FittedGmm {
        params,
        log_likelihood: ll,
        iterations,
        converged: termination != Termination::MaxIterations,
        termination,
        trace,
        reinitializations,
        seed: config.seed,
    })
}

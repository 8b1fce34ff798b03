//! Full-covariance Gaussian mixtures: log-densities, k-means++ start, EM.

mod density;
mod em;
mod kmeans;
mod linalg;
mod model_file;
mod params;

pub(crate) use density::Mixture;
pub(crate) use model_file::{from_versioned_json, to_versioned_json};

pub use density::gaussian_logpdf;
pub use em::{
    cluster_posterior, e_step, e_step_with_loglik, fit, fit_from, log_likelihood, m_step,
    DEGENERATE_MASS, MONOTONE_SLACK,
};
pub use kmeans::{kmeans, kmeans_init, KMeansResult, KMEANS_MAX_ITER, KMEANS_TOL};
pub use linalg::{log_sum_exp, Cholesky};
pub use model_file::{MODEL_FORMAT, MODEL_VERSION};
pub use params::{FitConfig, FittedGmm, GmmParams, Responsibilities, Termination};

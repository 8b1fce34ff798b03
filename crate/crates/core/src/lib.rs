//! Probability-of-default scoring with Gaussian mixture models.
//!
//! Applicants are clustered with a full-covariance GMM; each cluster gets a
//! responsibility-weighted pay-back rate from training labels, and a new
//! applicant's pay-back probability is the posterior-weighted average of those
//! rates. On top of the scores sit expected-loss reports and approval
//! threshold analytics.

// `!(x > 0.0)` style checks are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod balance;
pub mod dataio;
pub mod error;
pub mod eval;
pub mod gmm;
pub mod pipeline;
pub mod risk;
pub mod scoring;
pub mod seed;
pub mod select;

pub use error::{Error, Result};

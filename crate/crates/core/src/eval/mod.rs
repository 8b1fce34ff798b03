//! Classification metrics and a logistic-regression baseline.

mod logistic;
mod metrics;

pub use logistic::{
    logistic_fit, logistic_objective, logistic_predict_proba, LogisticConfig, LogisticModel,
};
pub use metrics::{auc, confusion, metrics, write_metrics, ConfusionMatrix, MetricsReport, MetricsRow};

use serde::{Deserialize, Serialize};

use crate::dataio::{FeatureMatrix, LabelVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub l2: f64,
    pub max_iter: usize,
    /// Stop once the gradient norm falls below this.
    pub tol: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            l2: 1e-4,
            max_iter: 5000,
            tol: 1e-8,
        }
    }
}

/// Weights act on raw (unstandardised) features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub objective: f64,
    pub converged: bool,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub fn logistic_predict_proba(model: &LogisticModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.weights.len() {
        return Err(Error::Dimension(format!(
            "input has {} features, model expects {}",
            x.len(),
            model.weights.len()
        )));
    }
    let z: f64 = model.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + model.bias;
    Ok(sigmoid(z))
}

/// Mean negative log-likelihood plus `l2/2 · |w|²` (bias unpenalised), with
/// its gradient in `w` and in the bias.
pub fn logistic_objective(
    x: &FeatureMatrix,
    y: &LabelVector,
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = x.n_rows() as f64;
    let mut value = 0.0;
    let mut grad = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (row, label) in x.rows().zip(y.iter()) {
        let z: f64 = weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>() + bias;
        let t = f64::from(label);
        value += softplus(z) - t * z;
        let resid = sigmoid(z) - t;
        for (g, v) in grad.iter_mut().zip(row) {
            *g += resid * v;
        }
        grad_b += resid;
    }
    let norm_sq: f64 = weights.iter().map(|w| w * w).sum();
    for (g, w) in grad.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    (value / n + 0.5 * l2 * norm_sq, grad, grad_b / n)
}

/// Full-batch gradient descent with Armijo backtracking on standardised
/// features, starting from zero.
pub fn logistic_fit(x: &FeatureMatrix, y: &LabelVector, config: &LogisticConfig) -> Result<LogisticModel> {
    if x.n_rows() != y.len() {
        return Err(Error::Dimension(format!("{} rows but {} labels", x.n_rows(), y.len())));
    }
    let (bad, good) = y.class_counts();
    if bad == 0 || good == 0 {
        return Err(Error::InvalidArgument("logistic regression needs both classes".into()));
    }
    if !(config.l2 >= 0.0) || config.max_iter == 0 || !(config.tol > 0.0) {
        return Err(Error::InvalidArgument("invalid logistic configuration".into()));
    }

    let (n, d) = (x.n_rows(), x.n_cols());
    let mut mean = vec![0.0; d];
    for row in x.rows() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut scale = vec![0.0; d];
    for row in x.rows() {
        for ((s, v), m) in scale.iter_mut().zip(row).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    for s in scale.iter_mut() {
        *s = (*s / n as f64).sqrt();
        // Constant columns standardise to zero.
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    let std_values: Vec<f64> = x
        .rows()
        .flat_map(|row| row.iter().zip(&mean).zip(&scale).map(|((v, m), s)| (v - m) / s))
        .collect();
    let xs = FeatureMatrix::new(std_values, x.columns().to_vec())?;

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let (mut f, mut g, mut gb) = logistic_objective(&xs, y, &w, b, config.l2);
    let mut step: f64 = 1.0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        let gnorm_sq = g.iter().map(|v| v * v).sum::<f64>() + gb * gb;
        if gnorm_sq.sqrt() < config.tol {
            converged = true;
            break;
        }
        iterations += 1;
        step = (step * 2.0).min(1e6);
        let accepted = loop {
            let w_try: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - step * gi).collect();
            let b_try = b - step * gb;
            let (f_try, g_try, gb_try) = logistic_objective(&xs, y, &w_try, b_try, config.l2);
            if f_try <= f - 0.5 * step * gnorm_sq {
                break Some((w_try, b_try, f_try, g_try, gb_try));
            }
            step *= 0.5;
            if step < 1e-20 {
                break None;
            }
        };
        match accepted {
            Some((w2, b2, f2, g2, gb2)) => {
                w = w2;
                b = b2;
                f = f2;
                g = g2;
                gb = gb2;
            }
            // No descent possible at machine precision: already at the optimum.
            None => {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        log::warn!("logistic regression stopped after {iterations} iterations without reaching tolerance");
    }

    // Fold the standardisation into raw-feature weights.
    let weights: Vec<f64> = w.iter().zip(&scale).map(|(wi, s)| wi / s).collect();
    let bias = b - weights.iter().zip(&mean).map(|(wi, m)| wi * m).sum::<f64>();
    Ok(LogisticModel {
        weights,
        bias,
        iterations,
        objective: f,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predict_examples() {
        let zero = LogisticModel {
            weights: vec![0.0, 0.0],
            bias: 0.0,
            iterations: 0,
            objective: 0.0,
            converged: true,
        };
        assert_eq!(logistic_predict_proba(&zero, &[3.0, -7.0]).unwrap(), 0.5);
        let one = LogisticModel {
            weights: vec![1.0],
            ..zero.clone()
        };
        assert!((logistic_predict_proba(&one, &[3f64.ln()]).unwrap() - 0.75).abs() < 1e-15);
        assert!(logistic_predict_proba(&one, &[2.0]).unwrap() > logistic_predict_proba(&one, &[1.0]).unwrap());
    }

    #[test]
    fn separable_one_dimensional() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            let jitter = (i as f64 / 19.0 - 0.5) * 0.2;
            rows.push(vec![-2.0 + jitter]);
            labels.push(0);
            rows.push(vec![2.0 + jitter]);
            labels.push(1);
        }
        let x = FeatureMatrix::from_rows_unnamed(&rows).unwrap();
        let y = LabelVector::new(labels).unwrap();
        let m = logistic_fit(&x, &y, &LogisticConfig::default()).unwrap();
        for (row, label) in x.rows().zip(y.iter()) {
            let p = logistic_predict_proba(&m, row).unwrap();
            assert_eq!(u8::from(p >= 0.5), label);
        }
    }

    #[test]
    fn needs_both_classes() {
        let x = FeatureMatrix::from_rows_unnamed(&[vec![1.0], vec![2.0]]).unwrap();
        let y = LabelVector::new(vec![1, 1]).unwrap();
        assert!(logistic_fit(&x, &y, &LogisticConfig::default()).is_err());
    }
}

//! SMOTE-style oversampling of the minority class.
//!
//! Synthetic rows are `(1 − α)·x1 + α·x2` for a uniformly drawn pair of
//! distinct same-class rows and `α ~ U[0, 1]`. Indicator columns are left
//! fractional.

use rand::Rng;
use serde::Serialize;

use crate::dataio::{FeatureMatrix, LabelVector, LabeledSet};
use crate::error::{Error, Result};
use crate::seed;

pub fn smote_interpolate(x1: &[f64], x2: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if x1.len() != x2.len() {
        return Err(Error::Dimension(format!(
            "cannot interpolate rows of length {} and {}",
            x1.len(),
            x2.len()
        )));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside [0, 1]")));
    }
    Ok(x1
        .iter()
        .zip(x2)
        .map(|(&a, &b)| (1.0 - alpha) * a + alpha * b)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SyntheticOrigin {
    /// Row positions (in the input matrix) of the two parents.
    pub first: usize,
    pub second: usize,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceReport {
    /// `(bad, good)` before oversampling.
    pub original_counts: (usize, usize),
    pub generated: usize,
    pub final_counts: (usize, usize),
    pub seed: u64,
    pub origins: Vec<SyntheticOrigin>,
}

impl std::fmt::Display for BalanceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "balance: original bad={} good={}, generated={}, final bad={} good={}, seed={}",
            self.original_counts.0,
            self.original_counts.1,
            self.generated,
            self.final_counts.0,
            self.final_counts.1,
            self.seed
        )
    }
}

/// Oversamples the minority class until both classes have equal counts.
/// Original rows come first and are unchanged; synthetic rows are appended.
pub fn balance_train(
    x: &FeatureMatrix,
    y: &LabelVector,
    seed: u64,
) -> Result<(FeatureMatrix, LabelVector, BalanceReport)> {
    if x.n_rows() != y.len() {
        return Err(Error::Dimension(format!(
            "{} feature rows vs {} labels",
            x.n_rows(),
            y.len()
        )));
    }
    let (bad, good) = y.class_counts();
    if bad < 2 || good < 2 {
        return Err(Error::InvalidArgument(format!(
            "each class needs at least 2 members to oversample (bad={bad}, good={good})"
        )));
    }
    let minority_label = u8::from(good < bad);
    let members: Vec<usize> = y
        .iter()
        .enumerate()
        .filter(|&(_, label)| label == minority_label)
        .map(|(i, _)| i)
        .collect();
    let needed = bad.abs_diff(good);

    let mut rng = seed::rng(seed);
    let mut out_x = x.clone();
    let mut out_y = y.clone();
    let mut origins = Vec::with_capacity(needed);
    for _ in 0..needed {
        let a = rng.random_range(0..members.len());
        let mut b = rng.random_range(0..members.len() - 1);
        if b >= a {
            b += 1;
        }
        let alpha: f64 = rng.random();
        let (first, second) = (members[a], members[b]);
        let row = smote_interpolate(x.row(first), x.row(second), alpha)?;
        out_x.push_row(&row);
        out_y.push(minority_label);
        origins.push(SyntheticOrigin {
            first,
            second,
            alpha,
        });
    }
    let report = BalanceReport {
        original_counts: (bad, good),
        generated: needed,
        final_counts: out_y.class_counts(),
        seed,
        origins,
    };
    Ok((out_x, out_y, report))
}

/// [`balance_train`] on a labeled set; synthetic rows get indices starting at
/// `first_synthetic_index`.
pub fn balance_set(
    set: &LabeledSet,
    first_synthetic_index: usize,
    seed: u64,
) -> Result<(LabeledSet, BalanceReport)> {
    let (x, y, report) = balance_train(&set.x, &set.y, seed)?;
    let mut orig_index = set.orig_index.clone();
    orig_index.extend(first_synthetic_index..first_synthetic_index + report.generated);
    Ok((LabeledSet::new(x, y, orig_index)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_examples() {
        assert_eq!(smote_interpolate(&[0.0, 0.0], &[2.0, 2.0], 0.5).unwrap(), vec![1.0, 1.0]);
        assert_eq!(smote_interpolate(&[1.0, 3.0], &[5.0, -1.0], 0.25).unwrap(), vec![2.0, 2.0]);
        let x1 = [0.3, -7.1];
        let x2 = [1e5, 2.0];
        assert_eq!(smote_interpolate(&x1, &x2, 0.0).unwrap(), x1.to_vec());
        assert_eq!(smote_interpolate(&x1, &x2, 1.0).unwrap(), x2.to_vec());
    }

    #[test]
    fn interpolation_errors() {
        assert!(smote_interpolate(&[0.0], &[1.0, 2.0], 0.5).is_err());
        assert!(smote_interpolate(&[0.0], &[1.0], 1.5).is_err());
        assert!(smote_interpolate(&[0.0], &[1.0], -0.1).is_err());
    }

    fn imbalanced(good: usize, bad: usize) -> (FeatureMatrix, LabelVector) {
        let rows: Vec<Vec<f64>> = (0..good + bad)
            .map(|i| vec![i as f64, (i % 7) as f64, if i % 3 == 0 { 1.0 } else { 0.0 }])
            .collect();
        let labels = (0..good + bad).map(|i| u8::from(i < good)).collect();
        (
            FeatureMatrix::from_rows_unnamed(&rows).unwrap(),
            LabelVector::new(labels).unwrap(),
        )
    }

    #[test]
    fn seventy_thirty_becomes_seventy_seventy() {
        let (x, y) = imbalanced(70, 30);
        let (bx, by, rep) = balance_train(&x, &y, 9).unwrap();
        assert_eq!(rep.generated, 40);
        assert_eq!(rep.final_counts, (70, 70));
        assert_eq!(bx.n_rows(), 140);
        assert_eq!(&bx.as_slice()[..x.as_slice().len()], x.as_slice());
        assert!(by.as_slice()[100..].iter().all(|&l| l == 0));
    }

    #[test]
    fn balanced_input_is_untouched() {
        let (x, y) = imbalanced(50, 50);
        let (bx, by, rep) = balance_train(&x, &y, 1).unwrap();
        assert_eq!(rep.generated, 0);
        assert_eq!(bx, x);
        assert_eq!(by, y);
    }

    #[test]
    fn synthetic_rows_are_convex_combinations() {
        let (x, y) = imbalanced(40, 12);
        let (bx, _, rep) = balance_train(&x, &y, 5).unwrap();
        let minority: Vec<usize> = (40..52).collect();
        for k in 0..rep.generated {
            let row = bx.row(x.n_rows() + k);
            // Independent check: search all same-class parent pairs for one
            // whose recovered alpha reproduces every coordinate.
            let found = minority.iter().any(|&p| {
                minority.iter().any(|&q| {
                    if p == q {
                        return false;
                    }
                    let (xp, xq) = (x.row(p), x.row(q));
                    let j = match (0..xp.len()).find(|&j| (xq[j] - xp[j]).abs() > 0.0) {
                        Some(j) => j,
                        None => return false,
                    };
                    let alpha = (row[j] - xp[j]) / (xq[j] - xp[j]);
                    (0.0..=1.0).contains(&alpha)
                        && (0..xp.len())
                            .all(|c| ((1.0 - alpha) * xp[c] + alpha * xq[c] - row[c]).abs() <= 1e-12)
                })
            });
            assert!(found, "synthetic row {k} is not on a same-class segment");
            assert!(row[2] >= 0.0 && row[2] <= 1.0);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let (x, y) = imbalanced(30, 10);
        let a = balance_train(&x, &y, 77).unwrap();
        let b = balance_train(&x, &y, 77).unwrap();
        assert_eq!(a.0, b.0);
        let c = balance_train(&x, &y, 78).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn singleton_class_is_rejected() {
        let (x, y) = imbalanced(10, 1);
        assert!(balance_train(&x, &y, 0).is_err());
    }
}

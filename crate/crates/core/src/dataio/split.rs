use rand::seq::SliceRandom;

use super::matrix::{FeatureMatrix, LabelVector, LabeledSet};
use crate::error::{Error, Result};
use crate::seed;

/// Number of training rows: `n × fraction` rounded half-up.
pub fn train_size(n: usize, train_fraction: f64) -> usize {
    // The small slack keeps exact halves (e.g. 999 × 2/3) from landing a ulp
    // below the rounding boundary.
    ((n as f64 * train_fraction) + 0.5 + 1e-9).floor() as usize
}

/// Seeded row-disjoint train/test partition. Both sides keep ascending
/// original-index order.
pub fn split(
    x: &FeatureMatrix,
    y: &LabelVector,
    train_fraction: f64,
    seed: u64,
) -> Result<(LabeledSet, LabeledSet)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    if x.n_rows() != y.len() {
        return Err(Error::Dimension(format!(
            "{} feature rows vs {} labels",
            x.n_rows(),
            y.len()
        )));
    }
    let n = y.len();
    let n_train = train_size(n, train_fraction);
    if n_train == 0 || n_train >= n {
        return Err(Error::InvalidArgument(format!(
            "split of {n} rows at {train_fraction} leaves an empty side"
        )));
    }

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut seed::rng(seed));
    let (train, test) = perm.split_at_mut(n_train);
    train.sort_unstable();
    test.sort_unstable();

    let side = |idx: &[usize]| LabeledSet {
        x: x.select_rows(idx),
        y: y.select(idx),
        orig_index: idx.to_vec(),
    };
    Ok((side(train), side(test)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize) -> (FeatureMatrix, LabelVector) {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let x = FeatureMatrix::from_rows_unnamed(&rows).unwrap();
        let y = LabelVector::new((0..n).map(|i| (i % 2) as u8).collect()).unwrap();
        (x, y)
    }

    #[test]
    fn sizes_round_half_up() {
        assert_eq!(train_size(999, 2.0 / 3.0), 666);
        assert_eq!(train_size(1000, 2.0 / 3.0), 667);
        assert_eq!(train_size(300_000, 0.5), 150_000);
        assert_eq!(train_size(5, 0.5), 3);
    }

    #[test]
    fn partition_of_999() {
        let (x, y) = toy(999);
        let (tr, te) = split(&x, &y, 2.0 / 3.0, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (666, 333));
    }

    #[test]
    fn seeded_and_reassemblable() {
        let (x, y) = toy(200);
        let (a, b) = split(&x, &y, 0.7, 42).unwrap();
        let (a2, _) = split(&x, &y, 0.7, 42).unwrap();
        let (c, _) = split(&x, &y, 0.7, 43).unwrap();
        assert_eq!(a, a2);
        assert_ne!(a.orig_index, c.orig_index);

        let mut all: Vec<(usize, Vec<f64>, u8)> = Vec::new();
        for s in [&a, &b] {
            for (k, &i) in s.orig_index.iter().enumerate() {
                all.push((i, s.x.row(k).to_vec(), s.y.as_slice()[k]));
            }
        }
        all.sort_by_key(|t| t.0);
        for (i, row, label) in all {
            assert_eq!(row.as_slice(), x.row(i));
            assert_eq!(label, y.as_slice()[i]);
        }
    }

    #[test]
    fn empty_side_is_an_error() {
        let (x, y) = toy(2);
        assert!(split(&x, &y, 0.1, 0).is_err());
        assert!(split(&x, &y, 1.0, 0).is_err());
    }
}

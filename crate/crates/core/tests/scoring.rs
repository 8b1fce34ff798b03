use gmm_credit::dataio::{FeatureMatrix, LabelVector};
use gmm_credit::gmm::{e_step, fit, FitConfig};
use gmm_credit::scoring::{cluster_payback_probs, write_scores, ScoringModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Two overlapping 3-D groups whose labels are noisy functions of the group.
fn labelled_data(seed: u64, n: usize) -> (FeatureMatrix, LabelVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let shift = if i % 2 == 0 { 0.0 } else { 3.0 };
        rows.push((0..3).map(|_| shift + noise.sample(&mut rng)).collect());
        let p_good = if i % 2 == 0 { 0.8 } else { 0.3 };
        labels.push(u8::from(rng.random_bool(p_good)));
    }
    (
        FeatureMatrix::from_rows_unnamed(&rows).unwrap(),
        LabelVector::new(labels).unwrap(),
    )
}

fn trained(seed: u64, k: usize) -> (ScoringModel, FeatureMatrix, LabelVector) {
    let (x, y) = labelled_data(seed, 400);
    let cfg = FitConfig {
        seed,
        ..FitConfig::default()
    };
    let gmm = fit(&x, k, &cfg).unwrap();
    let model = ScoringModel::train(gmm, &x, &y, 0.5).unwrap();
    (model, x, y)
}

#[test]
fn cluster_masses_add_up() {
    for seed in 0..5 {
        let (model, x, y) = trained(seed, 4);
        let t = &model.table;
        let (bad, good) = y.class_counts();
        let good_mass: f64 = t.good_mass.iter().sum();
        let bad_mass: f64 = t.bad_mass.iter().sum();
        assert!((good_mass - good as f64).abs() < 1e-9);
        assert!((bad_mass - bad as f64).abs() < 1e-9);
        assert_eq!(t.crisp_good.iter().sum::<usize>(), good);
        assert_eq!(t.crisp_bad.iter().sum::<usize>(), bad);
        // Each cluster rate is its good share of the responsibility mass,
        // recomputed here straight from the E-step.
        let r = e_step(&x, &model.gmm.params).unwrap();
        for j in 0..t.n_clusters() {
            let mut num = 0.0;
            let mut den = 0.0;
            for (row, label) in r.rows().zip(y.iter()) {
                den += row[j];
                if label == 1 {
                    num += row[j];
                }
            }
            assert!((t.payback[j] - num / den).abs() < 1e-12);
            assert!((t.payback[j] + t.default[j] - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn scores_are_convex_combinations_and_complementary() {
    let (model, _, _) = trained(7, 3);
    let lo = model.table.payback.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = model.table.payback.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..1000 {
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-20.0..20.0)).collect();
        let s = model.score(&x).unwrap();
        assert!((s.payback + s.default - 1.0).abs() <= 1e-12);
        assert!(s.payback >= lo - 1e-12 && s.payback <= hi + 1e-12);
    }
}

#[test]
fn training_paybacks_sum_to_good_count() {
    for seed in 0..5 {
        let (model, x, y) = trained(seed, 5);
        let total: f64 = model.score_matrix(&x).unwrap().iter().map(|s| s.payback).sum();
        let (_, good) = y.class_counts();
        assert!((total - good as f64).abs() <= 1e-9 * good as f64);
    }
}

#[test]
fn table_is_independent_of_threshold_and_reloads_exactly() {
    let (model, x, y) = trained(3, 3);
    let again = cluster_payback_probs(&model.gmm, &x, &y).unwrap();
    assert_eq!(again, model.table);

    let reloaded = ScoringModel::from_json(&model.to_json().unwrap()).unwrap();
    let a = model.score_matrix(&x).unwrap();
    let b = reloaded.score_matrix(&x).unwrap();
    for (s, t) in a.iter().zip(&b) {
        assert_eq!(s.payback.to_bits(), t.payback.to_bits());
    }
}

#[test]
fn score_files_are_byte_identical() {
    let run = || {
        let (model, x, _) = trained(5, 3);
        let scores = model.score_matrix(&x).unwrap();
        let index: Vec<usize> = (0..x.n_rows()).rev().collect();
        let mut out = Vec::new();
        write_scores(&mut out, &index, &scores, 0.5).unwrap();
        out
    };
    let a = run();
    assert_eq!(a, run());
    let text = String::from_utf8(a).unwrap();
    let first = text.lines().nth(1).unwrap();
    assert!(first.starts_with("0,"));
}

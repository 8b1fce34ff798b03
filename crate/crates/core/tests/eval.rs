use gmm_credit::dataio::{FeatureMatrix, LabelVector};
use gmm_credit::eval::{
    auc, logistic_fit, logistic_objective, logistic_predict_proba, LogisticConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn brute_force_auc(scores: &[f64], y: &[u8]) -> Option<f64> {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            if yi == 1 && yj == 0 {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    (pairs > 0.0).then(|| wins / pairs)
}

#[test]
fn auc_matches_pair_counting() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..300 {
        let n = rng.random_range(1..=200);
        // Coarse scores so ties are common.
        let scores: Vec<f64> = (0..n).map(|_| (rng.random_range(0.0..1.0f64) * 10.0).round() / 10.0).collect();
        let y: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.4))).collect();
        let fast = auc(&scores, &LabelVector::new(y.clone()).unwrap()).unwrap();
        let slow = brute_force_auc(&scores, &y);
        match (fast, slow) {
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12, "{a} vs {b}"),
            (a, b) => assert_eq!(a, b),
        }
    }
}

fn random_problem(seed: u64, n: usize, d: usize) -> (FeatureMatrix, LabelVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let z: f64 = row.iter().zip(&truth).map(|(a, b)| a * b).sum();
        labels.push(u8::from(rng.random_range(0.0..1.0) < 1.0 / (1.0 + (-z).exp())));
        rows.push(row);
    }
    (
        FeatureMatrix::from_rows_unnamed(&rows).unwrap(),
        LabelVector::new(labels).unwrap(),
    )
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for seed in 0..10 {
        let (x, y) = random_problem(seed, 80, 4);
        let w: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = rng.random_range(-1.0..1.0);
        let l2 = 1e-2;
        let (_, grad, grad_b) = logistic_objective(&x, &y, &w, b, l2);
        let h = 1e-6;
        for k in 0..4 {
            let mut up = w.clone();
            let mut down = w.clone();
            up[k] += h;
            down[k] -= h;
            let fd = (logistic_objective(&x, &y, &up, b, l2).0 - logistic_objective(&x, &y, &down, b, l2).0) / (2.0 * h);
            assert!((fd - grad[k]).abs() < 1e-5, "w[{k}]: {fd} vs {}", grad[k]);
        }
        let fd_b = (logistic_objective(&x, &y, &w, b + h, l2).0 - logistic_objective(&x, &y, &w, b - h, l2).0) / (2.0 * h);
        assert!((fd_b - grad_b).abs() < 1e-5);
    }
}

#[test]
fn objective_never_increases_with_more_iterations() {
    let (x, y) = random_problem(5, 150, 3);
    let mut last = f64::INFINITY;
    for max_iter in 1..=60 {
        let cfg = LogisticConfig {
            max_iter,
            ..LogisticConfig::default()
        };
        let m = logistic_fit(&x, &y, &cfg).unwrap();
        assert!(m.objective <= last + 1e-15, "iteration {max_iter}: {} > {last}", m.objective);
        last = m.objective;
    }
}

#[test]
fn predictions_ignore_feature_scale() {
    let (x, y) = random_problem(9, 200, 3);
    let scaled_rows: Vec<Vec<f64>> = x
        .rows()
        .map(|r| vec![r[0] * 1000.0, r[1] - 50.0, r[2] * 0.01])
        .collect();
    let xs = FeatureMatrix::from_rows_unnamed(&scaled_rows).unwrap();
    let cfg = LogisticConfig::default();
    let a = logistic_fit(&x, &y, &cfg).unwrap();
    let b = logistic_fit(&xs, &y, &cfg).unwrap();
    for (r, s) in x.rows().zip(xs.rows()) {
        let pa = logistic_predict_proba(&a, r).unwrap();
        let pb = logistic_predict_proba(&b, s).unwrap();
        assert!((pa - pb).abs() < 1e-6, "{pa} vs {pb}");
    }
}

#[test]
fn fit_beats_zero_model() {
    let (x, y) = random_problem(12, 300, 4);
    let m = logistic_fit(&x, &y, &LogisticConfig::default()).unwrap();
    let zero = logistic_objective(&x, &y, &[0.0; 4], 0.0, 1e-4).0;
    let fitted = logistic_objective(&x, &y, &m.weights, m.bias, 0.0).0;
    assert!(fitted < zero);
    let scores: Vec<f64> = x.rows().map(|r| logistic_predict_proba(&m, r).unwrap()).collect();
    assert!(auc(&scores, &y).unwrap().unwrap() > 0.7);
}

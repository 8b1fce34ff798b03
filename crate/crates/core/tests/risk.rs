use gmm_credit::dataio::LabelVector;
use gmm_credit::risk::{
    approval_curve, default_grid, el_report, expected_loss_actual, expected_loss_model,
    invert_loss_budget, loss_upper_bound, total_expected_loss, PortfolioSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_paybacks(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..=1.0)).collect()
}

#[test]
fn total_loss_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let n = rng.random_range(1..300);
        let p = random_paybacks(&mut rng, n);
        let amount = rng.random_range(1.0..5000.0);
        let recovery = rng.random_range(0.0..1.0);
        let direct: f64 = p.iter().map(|pi| amount * (1.0 - recovery) * (1.0 - pi)).sum();
        let closed = total_expected_loss(&p, amount, recovery);
        assert!((direct - closed).abs() <= 1e-9 * direct.abs().max(1.0));

        let pds: Vec<f64> = p.iter().map(|pi| 1.0 - pi).collect();
        let spec = PortfolioSpec::fixed(amount, recovery).unwrap();
        let via_model = expected_loss_model(&pds, &spec).unwrap();
        assert!((via_model - direct).abs() <= 1e-9 * direct.abs().max(1.0));
    }
}

#[test]
fn mean_pd_equal_to_default_rate_gives_zero_error() {
    // When predicted PDs average exactly to the observed default rate, model
    // and actual loss coincide under a fixed exposure.
    let y = LabelVector::new(vec![1, 0, 1, 1, 0, 1, 1, 1]).unwrap();
    let pds = vec![0.25; 8];
    let spec = PortfolioSpec::fixed(1000.0, 0.5).unwrap();
    let r = el_report(&pds, &y, &spec).unwrap();
    assert_eq!(r.el_actual, 1000.0);
    assert!(r.relative_error.unwrap().abs() <= 1e-12);
    assert_eq!(expected_loss_actual(&y, &spec).unwrap(), 1000.0);
}

#[test]
fn losses_scale_linearly_with_exposure() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pds = random_paybacks(&mut rng, 50);
    let y = LabelVector::new((0..50).map(|i| u8::from(i % 3 != 0)).collect()).unwrap();
    let one = PortfolioSpec::fixed(1000.0, 0.4).unwrap();
    let two = PortfolioSpec::fixed(2000.0, 0.4).unwrap();
    let a = el_report(&pds, &y, &one).unwrap();
    let b = el_report(&pds, &y, &two).unwrap();
    assert!((b.el_model - 2.0 * a.el_model).abs() < 1e-9 * b.el_model);
    assert!((b.el_actual - 2.0 * a.el_actual).abs() < 1e-9 * b.el_actual);
    assert!((b.relative_error.unwrap() - a.relative_error.unwrap()).abs() < 1e-12);
}

#[test]
fn bounds_hold_on_every_grid_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = default_grid();
    for _ in 0..100 {
        let n = rng.random_range(1..200);
        let p = random_paybacks(&mut rng, n);
        let spec = PortfolioSpec::fixed(1000.0, 0.5).unwrap();
        let curve = approval_curve(&p, &grid, &spec, None).unwrap();
        let mut last_m = usize::MAX;
        for pt in &curve.points {
            let m = p.iter().filter(|&&pi| pi >= pt.p_min).count();
            assert_eq!(pt.m, m);
            assert!(pt.m <= last_m);
            last_m = pt.m;
            let slack = 1e-9 * pt.loss_bound.max(1.0);
            assert!(pt.expected_loss <= pt.loss_bound + slack);
            assert!(pt.expected_income + slack >= pt.income_bound);
            assert!(pt.realized_loss.is_none());
        }
    }
}

#[test]
fn budget_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let grid = default_grid();
    let spec = PortfolioSpec::fixed(1000.0, 0.5).unwrap();
    for _ in 0..50 {
        let p = random_paybacks(&mut rng, 120);
        let curve = approval_curve(&p, &grid, &spec, None).unwrap();
        let budget = rng.random_range(0.0..40_000.0);
        let choice = invert_loss_budget(&curve, budget, 1000.0, 0.5).unwrap();
        assert!(choice.bound <= budget);
        assert_eq!(choice.bound, loss_upper_bound(choice.m, 1000.0, 0.5, choice.p_min));
        // No smaller grid p_min fits the budget.
        for pt in curve.points.iter().take_while(|pt| pt.p_min < choice.p_min) {
            assert!(pt.loss_bound > budget);
        }
    }
}

#[test]
fn truncated_grid_can_be_infeasible() {
    let p = vec![0.9; 10];
    let spec = PortfolioSpec::fixed(1000.0, 0.5).unwrap();
    let grid: Vec<f64> = (0..=5).map(|i| i as f64 / 10.0).collect();
    let curve = approval_curve(&p, &grid, &spec, None).unwrap();
    let err = invert_loss_budget(&curve, 0.0, 1000.0, 0.5).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

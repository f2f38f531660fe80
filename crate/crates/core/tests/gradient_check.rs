mod common;

use common::*;

#[test]
fn check_loss_derivative_matches_central_difference() {
    let worst = check_loss_gradient_worst(1000, 1);
    assert!(worst < 1e-6, "worst relative error {worst:e}");
}

#[test]
fn mlp_gradients_match_central_differences() {
    for (i, case) in gradient_cases().iter().enumerate() {
        let worst = mlp_gradient_worst(case, 100 + i as u64);
        assert!(
            worst < 1e-5,
            "{:?} widths {:?}, p = {}: worst relative error {worst:e}",
            case.activation,
            case.widths,
            case.input_dim
        );
    }
}

#[test]
fn sample_expectile_matches_grid_oracle() {
    let (worst, worst_mean) = expectile_oracle_worst(30, 7);
    assert!(worst < 1e-5, "worst deviation {worst:e}");
    assert!(worst_mean < 1e-10, "worst mean deviation {worst_mean:e}");
}

#[test]
fn grid_oracle_finds_two_point_expectile() {
    // Closed form for {0, 1}: tau (1 - th) = (1 - tau) th.
    let th = grid_expectile(&[0.0, 1.0], 0.9, 1e-6);
    assert!((th - 0.9).abs() < 1e-6);
}

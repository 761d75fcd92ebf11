use approx::assert_abs_diff_eq;
use paim_core::{grid_expectation, log_banana, Banana, BananaParams, TargetSpec};

const BANANA_MEAN_X1: f64 = -1.0948972559;

fn banana() -> Banana {
    Banana {
        params: BananaParams::default(),
    }
}

#[test]
fn banana_grid_mean_is_frozen() {
    let m = grid_expectation(&banana(), &[-15.0, -15.0], &[15.0, 15.0], 2001).unwrap();
    assert_abs_diff_eq!(m[0], BANANA_MEAN_X1, epsilon = 1e-8);
    assert_abs_diff_eq!(m[1], 0.0, epsilon = 1e-12);
}

#[test]
fn banana_grid_converges_under_refinement() {
    let coarse = grid_expectation(&banana(), &[-15.0, -15.0], &[15.0, 15.0], 1001).unwrap();
    let fine = grid_expectation(&banana(), &[-15.0, -15.0], &[15.0, 15.0], 2002).unwrap();
    assert!((coarse[0] - fine[0]).abs() < 1e-4);
}

#[test]
fn banana_mass_inside_box_dominates() {
    // widening the box barely moves the mean
    let narrow = grid_expectation(&banana(), &[-15.0, -15.0], &[15.0, 15.0], 1001).unwrap();
    let wide = grid_expectation(&banana(), &[-25.0, -25.0], &[25.0, 25.0], 1667).unwrap();
    assert!((narrow[0] - wide[0]).abs() < 0.05, "{narrow:?} vs {wide:?}");
}

#[test]
fn banana_is_even_in_x2() {
    let p = BananaParams::default();
    for &(a, b) in &[(0.3, 1.7), (-4.0, 2.5), (10.0, -0.1)] {
        assert_eq!(log_banana(&[a, b], &p), log_banana(&[a, -b], &p));
    }
}

#[test]
fn spec_built_target_matches_direct() {
    let spec: TargetSpec = serde_json::from_str(r#"{"kind":"banana","B":10,"eta1":4,"eta2":5,"eta3":5}"#).unwrap();
    let t = spec.build().unwrap();
    let x = [1.25, -3.0];
    assert_eq!(t.log_density(&x), log_banana(&x, &BananaParams::default()));
}

//! Convergence checks of the fractional PECE solver against closed forms and
//! classical integrators.

mod common;

use fractb::{mittag_leffler, solve_caputo_ivp, FnField, FracOrder, TimeGrid};
use proptest::prelude::*;

/// Max error of `D^α x = −x` against `E_α(−t^α)`, over every `stride`-th node.
fn decay_error_on(alpha: f64, n_steps: usize, stride: usize) -> f64 {
    let alpha = FracOrder::new(alpha).unwrap();
    let grid = TimeGrid::new(1.0, n_steps).unwrap();
    let f = FnField::new(1, |_, _, x: &[f64], dx: &mut [f64]| dx[0] = -x[0]);
    let sol = solve_caputo_ivp(&f, &[1.0], alpha, grid).unwrap();
    grid.nodes()
        .zip(sol.values())
        .step_by(stride)
        .map(|(t, x)| {
            let exact = mittag_leffler(alpha, -t.powf(alpha.value())).unwrap();
            (x[0] - exact).abs()
        })
        .fold(0.0, f64::max)
}

fn decay_error(alpha: f64, n_steps: usize) -> f64 {
    decay_error_on(alpha, n_steps, 1)
}

#[test]
fn mittag_leffler_max_error() {
    for alpha in [0.5, 0.8, 0.9, 1.0] {
        let err = decay_error(alpha, 2000);
        assert!(err < 1e-3, "alpha = {alpha}: {err:e}");
    }
}

#[test]
fn empirical_order_of_convergence() {
    for alpha in [0.5, 0.8, 0.9, 1.0] {
        // compare on the nodes of the coarsest grid, shared by all refinements
        let errs: Vec<f64> = [250, 500, 1000, 2000].iter().map(|&n| decay_error_on(alpha, n, n / 250)).collect();
        let target = (1.0f64 + alpha).min(2.0);
        for w in errs.windows(2) {
            let eoc = (w[0] / w[1]).log2();
            assert!((eoc - target).abs() <= 0.25, "alpha = {alpha}: eoc {eoc} vs {target}");
        }
    }
}

/// Nonlinear predator-prey system, smooth on [0, 5].
fn lotka_volterra(x: &[f64]) -> [f64; 2] {
    [x[0] * (1.0 - 0.5 * x[1]), x[1] * (0.4 * x[0] - 0.8)]
}

#[test]
fn alpha_one_matches_rk4() {
    let n = 2000;
    let grid = TimeGrid::new(5.0, n).unwrap();
    let f = FnField::new(2, |_, _, x: &[f64], dx: &mut [f64]| dx.copy_from_slice(&lotka_volterra(x)));
    let x0 = [2.0, 1.0];
    let pece = solve_caputo_ivp(&f, &x0, FracOrder::ONE, grid).unwrap();
    let reference = common::rk4(|_, x| lotka_volterra(x).to_vec(), &x0, 5.0, n);
    let err = pece
        .values()
        .zip(&reference)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    assert!(err < 1e-3, "{err:e}");
}

#[test]
fn repeated_solves_are_bit_identical() {
    let grid = TimeGrid::new(5.0, 500).unwrap();
    let f = FnField::new(2, |_, _, x: &[f64], dx: &mut [f64]| dx.copy_from_slice(&lotka_volterra(x)));
    let alpha = FracOrder::new(0.75).unwrap();
    let a = solve_caputo_ivp(&f, &[2.0, 1.0], alpha, grid).unwrap();
    let b = solve_caputo_ivp(&f, &[2.0, 1.0], alpha, grid).unwrap();
    assert_eq!(a, b);
}

#[test]
fn concurrent_solves_agree() {
    let grid = TimeGrid::new(5.0, 400).unwrap();
    let alpha = FracOrder::new(0.85).unwrap();
    let solve = move || {
        let f = FnField::new(2, |_, _, x: &[f64], dx: &mut [f64]| dx.copy_from_slice(&lotka_volterra(x)));
        solve_caputo_ivp(&f, &[2.0, 1.0], alpha, grid).unwrap()
    };
    let serial = solve();
    let handles: Vec<_> = (0..4).map(|_| std::thread::spawn(solve)).collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), serial);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn linear_decay_tracks_mittag_leffler(alpha in 0.5f64..=1.0, rate in 0.1f64..2.0) {
        // D^α x = -λx, x(0) = 1  =>  x(t) = E_α(-λ t^α)
        let order = FracOrder::new(alpha).unwrap();
        let grid = TimeGrid::new(1.0, 1000).unwrap();
        let f = FnField::new(1, move |_, _, x: &[f64], dx: &mut [f64]| dx[0] = -rate * x[0]);
        let sol = solve_caputo_ivp(&f, &[1.0], order, grid).unwrap();
        let exact = mittag_leffler(order, -rate).unwrap();
        prop_assert!((sol.last()[0] - exact).abs() < 2e-3);
    }

    #[test]
    fn constants_are_fixed_points(alpha in 0.01f64..=1.0, c in -1e3f64..1e3) {
        let grid = TimeGrid::new(3.0, 64).unwrap();
        let f = FnField::new(1, |_, _, _: &[f64], dx: &mut [f64]| dx[0] = 0.0);
        let sol = solve_caputo_ivp(&f, &[c], FracOrder::new(alpha).unwrap(), grid).unwrap();
        prop_assert!(sol.values().all(|x| x[0] == c));
    }
}

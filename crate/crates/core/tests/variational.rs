mod common;

use std::f64::consts::PI;

use dnls::error::Error;
use dnls::functionals::{kc, x0 as x_ratio_target, x_ratio};
use dnls::solitons::algebraic_soliton;
use dnls::spectral::{lp_norm, Grid, GridFunction};
use dnls::variational::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// ∫(x²+b)^{−k} and ∫x²(x²+b)^{−k} for the integer powers used here.
fn b() -> f64 {
    4.0 * lambda() / 3.0
}

#[test]
fn normalized_minimum_in_closed_form() {
    // ½·π/(4b^{3/2}) + ¼·2π/b^{3/2}
    let oracle = 5.0 * PI / (8.0 * b().powf(1.5));
    assert!((normalized_minimum().unwrap() - oracle).abs() < 1e-12);
    assert!((oracle - 5.0 * lambda() / 18.0).abs() < 1e-12);
}

#[test]
fn ustar_has_unit_l6_norm() {
    // ∫8/(x²+b)³ = 3π/b^{5/2}
    assert!((3.0 * PI / b().powf(2.5) - 1.0).abs() < 1e-12);
    let g = Grid::new(200.0, 8192).unwrap();
    assert!((lp_norm(&ustar(&g), 6.0).unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn ustar_solves_its_ode() {
    let l = lambda();
    let h = 1e-3;
    for x in [-30.0, -3.0, -0.4, 0.0, 0.7, 2.0, 11.0] {
        let upp = (-ustar_value(x + 2.0 * h) + 16.0 * ustar_value(x + h) - 30.0 * ustar_value(x)
            + 16.0 * ustar_value(x - h)
            - ustar_value(x - 2.0 * h))
            / (12.0 * h * h);
        let u = ustar_value(x);
        assert!((-upp + u.powi(3) - l * u.powi(5)).abs() < 1e-8, "x = {x}");
        let up = (ustar_value(x + h) - ustar_value(x - h)) / (2.0 * h);
        assert!((up - ustar_derivative(x)).abs() < 1e-6);
    }
    let g = Grid::new(200.0, 8192).unwrap();
    let res = ustar_ode_residual(&ustar(&g));
    let core: f64 = (0..g.len()).filter(|&j| g.x(j).abs() <= 100.0).map(|j| res[j] * res[j]).sum::<f64>() * g.dx();
    assert!(core.sqrt() <= 1e-7, "{:e}", core.sqrt());
}

#[test]
fn scaling_bridge() {
    for c in [0.5, 1.0, 2.0, 3.0] {
        let s = scaling_bridge_check(c).unwrap();
        assert!(s.l6_residual.abs() <= 1e-12 * constraint_level(c));
        assert!(s.ratio_residual.abs() <= 1e-12 && s.coefficient_residual.abs() <= 1e-12);
        assert!(common::rel_err(s.kc_value, minimum_value(c)) < 1e-9, "c = {c}");
        // the image is the algebraic soliton at frequency c
        let g = Grid::new(40.0, 2048).unwrap();
        let w = scaled_ustar(c, &g).unwrap();
        let q = algebraic_soliton(c, &g).unwrap();
        assert!(w.max_abs_diff(&q) < 1e-12, "c = {c}");
    }
    assert!(matches!(scaling_bridge_check(0.0), Err(Error::Parameter(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gradient_matches_central_differences(seed in any::<u64>(), c in 0.2f64..3.0) {
        let g = Grid::new(20.0, 512).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let bump = |rng: &mut ChaCha20Rng| {
            let (a, x0, w) = (rng.random_range(0.5..2.0), rng.random_range(-3.0..3.0), rng.random_range(0.7..2.0));
            move |x: f64| a * (-((x - x0) / w).powi(2)).exp()
        };
        let (fv, fh) = (bump(&mut rng), bump(&mut rng));
        let v: Vec<f64> = (0..g.len()).map(|j| fv(g.x(j))).collect();
        let h: Vec<f64> = (0..g.len()).map(|j| fh(g.x(j))).collect();
        let grad = kc_gradient(&v, c, &g);
        let analytic = g.dx() * grad.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>();
        let k = |t: f64| kc(&GridFunction::from_real_fn(&g, |x| fv(x) + t * fh(x)), c);
        let eps = 1e-4;
        let fd = (k(eps) - k(-eps)) / (2.0 * eps);
        prop_assert!((analytic - fd).abs() <= 1e-6 * fd.abs().max(1.0), "{} vs {}", analytic, fd);
    }
}

#[test]
fn descent_is_monotone_and_stays_on_the_sphere() {
    let c = 1.5;
    let g = Grid::new(50.0, 2048).unwrap();
    let init = GridFunction::from_real_fn(&g, |x| (-(x + 0.6).powi(2)).exp() * (1.0 + 0.3 * x.sin()));
    let m = minimize_kc(c, &g, &init, 20_000, 1e-9).unwrap();
    assert!(m.history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-14)), "history rose");
    assert!(common::rel_err(lp_norm(&m.minimizer, 6.0).unwrap().powi(6), constraint_level(c)) < 1e-10);
    assert!(m.value >= minimum_value(c) * (1.0 - 1e-2));
    assert!(m.value < *m.history.first().unwrap());
}

#[test]
fn gaussian_start_reaches_the_minimum() {
    let c = 2.0;
    let g = Grid::new(100.0, 8192).unwrap();
    let init = GridFunction::from_real_fn(&g, |x| (-(x - 1.3).powi(2) / 2.0).exp());
    let m = minimize_kc(c, &g, &init, 40_000, 1e-12).unwrap();
    assert!(common::rel_err(m.value, minimum_value(c)) <= 1e-2, "{}", m.value);
    assert!((x_ratio(&m.minimizer) - x_ratio_target()).abs() < 1e-3);
    let (mean, spread) = multiplier_profile(&m.minimizer, c, 0.1);
    assert!(spread < 1e-3 && (mean - m.multiplier).abs() < 1e-3 * mean.abs());
}

#[test]
fn soliton_is_stationary() {
    let g = Grid::new(400.0, 8192).unwrap();
    let q = algebraic_soliton(1.0, &g).unwrap();
    let m = minimize_kc(1.0, &g, &q, 100, 1e-9).unwrap();
    assert!((m.value - minimum_value(1.0)).abs() < 1e-6);
    assert!(m.iterations <= 2);
}

#[test]
fn invalid_inputs() {
    let g = Grid::new(10.0, 128).unwrap();
    let other = Grid::new(10.0, 256).unwrap();
    let f = GridFunction::from_real_fn(&g, |x| (-x * x).exp());
    assert!(matches!(minimize_kc(0.0, &g, &f, 10, 1e-9), Err(Error::Parameter(_))));
    assert!(matches!(minimize_kc(1.0, &g, &f, 10, 0.0), Err(Error::Parameter(_))));
    assert!(matches!(minimize_kc(1.0, &other, &f, 10, 1e-9), Err(Error::Parameter(_))));
}

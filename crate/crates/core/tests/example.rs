mod common;

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use dnls::error::Error;
use dnls::example::*;
use dnls::spectral::Grid;
use num_complex::Complex64;
use proptest::prelude::*;

/// Fourth-order central difference.
fn fd(f: impl Fn(f64) -> Complex64, x: f64) -> Complex64 {
    let h = 1e-3;
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Composite Simpson on [−r, r].
fn simpson(f: impl Fn(f64) -> f64, r: f64, n: usize) -> f64 {
    let h = 2.0 * r / n as f64;
    let mut s = f(-r) + f(r);
    for j in 1..n {
        s += if j % 2 == 1 { 4.0 } else { 2.0 } * f(-r + j as f64 * h);
    }
    s * h / 3.0
}

fn p1_density(u: impl Fn(f64) -> Complex64 + Copy, x: f64) -> f64 {
    let v = u(x);
    (v.conj() * fd(u, x)).im - 0.5 * v.norm_sqr().powi(2)
}

#[test]
fn closed_forms_at_reference_points() {
    assert!((closed_integral(1, 0.0).unwrap() - PI / SQRT_2).abs() < 1e-15);
    assert!(closed_integral(3, 0.0).unwrap().abs() < 1e-15);
    let s = 1.0 / SQRT_2;
    let two = PI / 2.0 * ((-1.0f64).exp() + SQRT_2 * (-s).exp() * s.sin());
    assert!((closed_integral(2, 1.0).unwrap() - two).abs() < 1e-15);
}

#[test]
fn first_three_closed_forms_match_quadrature() {
    for a in [0.0, 0.5, 1.0, 2.5, 7.0, 20.0] {
        for which in 1..=3 {
            let lhs = closed_form_quadrature(which, a, 1e-12).unwrap();
            let rhs = closed_integral(which, a).unwrap();
            assert!((lhs - rhs).abs() <= 1e-8, "formula {which} at a = {a}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn fourth_integral_by_residues() {
    for b in [0.0, 0.5, 1.0, 2.5, 7.0, 20.0] {
        let lhs = closed_form_quadrature(4, b, 1e-12).unwrap();
        assert!((lhs - fourth_integral_residue(b).unwrap()).abs() <= 1e-8, "b = {b}");
    }
}

#[test]
fn fourth_closed_form_as_displayed_disagrees() {
    let worst = [0.5, 1.0, 2.5, 7.0]
        .iter()
        .map(|&b| (closed_form_quadrature(4, b, 1e-12).unwrap() - closed_integral(4, b).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(worst > 1e-2, "{worst}");
    assert!(closed_integral(4, 0.0).is_err());
}

#[test]
fn phi_a_norm_in_closed_form() {
    // (1/4)(3π√2/8 + π√2/8)
    assert!((phi_a_norm2().unwrap() - PI * SQRT_2 / 8.0).abs() < 1e-12);
}

#[test]
fn eta_from_the_overlap() {
    for k in 1..=4 {
        let p = ExampleParams::new(k, 0.05).unwrap();
        let overlap = closed_integral(1, p.a).unwrap();
        let eta = -2.0 * overlap / (PI * SQRT_2 / 8.0);
        assert!(common::rel_err(p.eta, eta) < 1e-11, "k = {k}");
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let g = Grid::new(8.0, 512).unwrap();
    let (dq, dphi, printed) = (q0_derivative(&g), phi_a_derivative(3.0, &g), phi_a_derivative_printed(3.0, &g));
    let mut printed_gap = 0.0f64;
    for j in 0..g.len() {
        let x = g.x(j);
        assert!((dq.values()[j] - fd(q0_value, x)).norm() <= 1e-8, "q0' at {x}");
        // the displayed form of ∂q₀
        let q1sq = 4.0 / (x * x + 1.0);
        let q = q0_value(x);
        let shown = Complex64::new(-x / (x * x + 1.0), -0.5 + 0.75 * q1sq) * q;
        assert!((shown - dq.values()[j]).norm() <= 1e-14);
        let exact = fd(|y| phi_a_value(3.0, y), x);
        assert!((dphi.values()[j] - exact).norm() <= 1e-8, "φ' at {x}");
        printed_gap = printed_gap.max((printed.values()[j] - exact).norm());
    }
    assert!(printed_gap > 1e-2, "{printed_gap}");
}

#[test]
fn expansion_matches_direct_momentum() {
    for (a, eta) in [(2.0, 0.3), (5.0, -0.7), (0.7, 1.1)] {
        let u = |x: f64| q0_value(x) + eta * phi_a_value(a, x);
        let oracle = simpson(|x| p1_density(u, x) - p1_density(q0_value, x), 2000.0, 4_000_000);
        let e = P1Expansion::new(a).unwrap().eval(eta);
        assert!((e - oracle).abs() <= 1e-8 * (1.0 + oracle.abs()), "a = {a}: {e} vs {oracle}");
    }
}

#[test]
fn theta0_and_phase_identity() {
    let t = theta0();
    assert!(t > 0.0 && t < PI / 2.0);
    assert!((t.cos() - (SQRT_2 + 1.0) / (4.0 + 2.0 * SQRT_2).sqrt()).abs() < 1e-15);
    let g = Grid::new(20.0, 512).unwrap();
    for eps0 in [0.3, 0.1, 0.01] {
        let v = verify_p1(ExampleParams::new(3, eps0).unwrap(), &g).unwrap();
        assert!(v.theta0_residual.abs() < 1e-15);
        assert!(v.phase_residual.abs() < 1e-13);
        // the printed −ε₀ is off by 2ε₀ inside the sine
        assert!((v.printed_phase_residual.abs() - 2.0 * ((t + FRAC_PI_4).cos() * eps0.sin()).abs()).abs() < 1e-12);
    }
}

#[test]
fn default_example_is_a_critical_datum_with_positive_momentum() {
    let g = Grid::new(40.0, 4096).unwrap();
    let (u0, r) = build_example(ExampleParams::default(), &g).unwrap();
    assert_eq!(u0.len(), 4096);
    assert!(r.constraint_residual.abs() <= 1e-9 * r.params.eta.abs().max(1e-300) || r.constraint_residual.abs() <= 1e-12);
    assert!(r.mass_gap.abs() <= 1e-8, "{:e}", r.mass_gap);
    assert!(r.p1 > 0.0 && r.margins.p1_scale > 0.0);
    assert!(r.margins.remainder_ratio < 0.5, "{:?}", r.margins);
}

#[test]
fn coarse_branch_momentum_turns_negative() {
    // at ε₀ = 0.1 the η² term wins for k = 3
    let g = Grid::new(40.0, 4096).unwrap();
    let (_, r) = build_example(ExampleParams::new(3, 0.1).unwrap(), &g).unwrap();
    assert!(r.mass_gap.abs() <= 1e-8);
    assert!(r.p1_leading_order > 0.0);
    assert!(r.p1 < 0.0);
}

#[test]
fn remainder_is_second_order() {
    let (samples, slope) = gap_scaling(3, 0.1, 6).unwrap();
    assert_eq!(samples.len(), 7);
    assert!((slope - 2.0).abs() < 0.05, "{slope}");
}

#[test]
fn invalid_branches() {
    assert!(matches!(ExampleParams::new(0, 0.1), Err(Error::Parameter(_))));
    assert!(matches!(ExampleParams::new(3, 0.0), Err(Error::Parameter(_))));
    assert!(matches!(ExampleParams::new(3, 0.7), Err(Error::Parameter(_))));
    assert!(matches!(ExampleParams::from_a(-1.0), Err(Error::Parameter(_))));
    let wrong = SQRT_2 * (6.0 * PI + FRAC_PI_4);
    assert!(matches!(ExampleParams::from_a(wrong), Err(Error::Branch(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn branch_round_trip(k in 1u32..6, eps0 in 1e-3f64..0.49) {
        let p = ExampleParams::new(k, eps0).unwrap();
        prop_assert!(p.eta > 0.0);
        let q = ExampleParams::from_a(p.a).unwrap();
        prop_assert_eq!(q.k, k);
        prop_assert!((q.eps0 - eps0).abs() < 1e-10);
        prop_assert!((p.a / SQRT_2 + FRAC_PI_4 - (2.0 * k as f64 * PI - eps0)).abs() < 1e-12);
    }
}

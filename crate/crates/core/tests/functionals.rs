mod common;

use std::f64::consts::PI;

use dnls::functionals::{
    barrier_function, c_gn, conserved, gauged_functionals, gn_ratio, imaginary_residual, kc, mass, x0, x_ratio,
};
use dnls::gauge::{gauge_inverse, gauge_transform};
use dnls::solitons::algebraic_soliton;
use dnls::spectral::{lp_norm, Grid, GridFunction};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new(20.0, 1024).unwrap()
}

/// (a + bx)·exp(−((x − x0)/s)²)·e^{ikx}, closed form so it can be rescaled exactly.
#[derive(Debug, Clone, Copy)]
struct Packet {
    a: Complex64,
    b: Complex64,
    x0: f64,
    s: f64,
    k: f64,
}

impl Packet {
    fn at(&self, x: f64) -> Complex64 {
        (self.a + self.b * x) * (-((x - self.x0) / self.s).powi(2)).exp() * Complex64::from_polar(1.0, self.k * x)
    }
}

fn packet() -> impl Strategy<Value = Packet> {
    (-1.0f64..1.0, -1.0f64..1.0, -0.5f64..0.5, -0.5f64..0.5, -1.0f64..1.0, 1.0f64..2.0, -1.5f64..1.5).prop_map(
        |(ar, ai, br, bi, x0, s, k)| Packet { a: Complex64::new(ar, ai), b: Complex64::new(br, bi), x0, s, k },
    )
}

fn norm_pow(f: &GridFunction, p: i32) -> f64 {
    f.values().iter().map(|z| z.norm().powi(p)).sum::<f64>() * f.grid().dx()
}

fn im_vbar_vx(f: &GridFunction) -> f64 {
    let g = f.grid();
    let fx = g.diff(f.values(), 1);
    f.values().iter().zip(&fx).map(|(v, d)| (v.conj() * d).im).sum::<f64>() * g.dx()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauged_functionals_are_invariant(seed in any::<u64>(), nu_index in 0usize..3) {
        let nu = [0.5, 1.0, 1.5][nu_index];
        let u = common::packet_field(&grid(), seed);
        let base = conserved(&u);
        let v = gauge_transform(&u, nu).unwrap();
        let g = gauged_functionals(&v, nu);
        for (name, have, want) in [("E1", g.e1, base.e1), ("P1", g.p1, base.p1), ("E2", g.e2, base.e2), ("P2", g.p2, base.p2)] {
            prop_assert!((have - want).abs() <= 1e-8 * want.abs().max(1e-3), "{name} at nu = {nu}: {have} vs {want}");
        }
        prop_assert!((g.mass - base.mass).abs() <= 1e-14 * base.mass);
        let back = gauge_inverse(&v, nu).unwrap();
        prop_assert!(back.max_abs_diff(&u) <= 1e-12);
    }

    #[test]
    fn functionals_are_real(seed in any::<u64>()) {
        let u = common::packet_field(&grid(), seed);
        prop_assert!(imaginary_residual(&u) <= 1e-10);
    }

    #[test]
    fn shifted_momentum_identity(p in packet(), alpha_index in 0usize..3) {
        let alpha = [-1.0, 0.3, 2.0][alpha_index];
        let g = grid();
        let v = GridFunction::from_fn(&g, |x| p.at(x));
        let w = GridFunction::from_fn(&g, |x| p.at(x) * Complex64::from_polar(1.0, alpha * x));
        let q = gauged_functionals(&v, 1.5);
        let wx = g.diff(w.values(), 1);
        let dx2 = wx.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.dx();
        let rhs = dx2 - norm_pow(&w, 6) / 16.0 - 2.0 * alpha * (q.p1 - 0.25 * norm_pow(&w, 4)) - alpha * alpha * norm_pow(&w, 2);
        prop_assert!((q.e1 - rhs).abs() <= 1e-9 * (1.0 + q.e1.abs()), "{} vs {rhs}", q.e1);
    }

    #[test]
    fn rescaling_identity(p in packet(), lambda in 0.5f64..2.0, c in 0.2f64..2.0) {
        let g = grid();
        let w = GridFunction::from_fn(&g, |x| p.at(x));
        // v(x) = λ^{−1/2} e^{−icx/(2λ)} w(x/λ), so that w(x) = λ^{1/2} v(λx) e^{icx/2}
        let wide = Grid::new(40.0, 4096).unwrap();
        let v = GridFunction::from_fn(&wide, |x| p.at(x / lambda) * Complex64::from_polar(lambda.powf(-0.5), -c * x / (2.0 * lambda)));
        let qv = gauged_functionals(&v, 1.5);
        let qw = gauged_functionals(&w, 1.5);
        let rhs = (qw.e1 + c / 4.0 * norm_pow(&w, 4) - c * c / 4.0 * norm_pow(&w, 2) - c * lambda * qv.p1) / (lambda * lambda);
        prop_assert!((qv.e1 - rhs).abs() <= 1e-8 * qv.e1.abs().max(1e-2), "{} vs {rhs}", qv.e1);
        let p_rhs = (qw.p1 - c / 2.0 * norm_pow(&w, 2)) / lambda;
        prop_assert!((qv.p1 - p_rhs).abs() <= 1e-8 * qv.p1.abs().max(1e-2));
    }

    #[test]
    fn gn_bound_and_scale_invariance(p in packet(), lambda in 0.5f64..2.0) {
        let g = grid();
        let f = GridFunction::from_fn(&g, |x| p.at(x));
        let s = GridFunction::from_fn(&g, |x| lambda.sqrt() * p.at(lambda * x));
        prop_assert!(gn_ratio(&f) <= c_gn());
        prop_assert!((gn_ratio(&s) - gn_ratio(&f)).abs() <= 1e-9 * gn_ratio(&f));
        prop_assert!((x_ratio(&s) - x_ratio(&f)).abs() <= 1e-9 * x_ratio(&f));
    }
}

#[test]
fn momentum_pieces_match_the_unexpanded_display() {
    let g = grid();
    let v = common::packet_field(&g, 3);
    let q = gauged_functionals(&v, 1.5);
    assert!((q.p1 - (im_vbar_vx(&v) + 0.25 * norm_pow(&v, 4))).abs() < 1e-12);
}

#[test]
fn constants_from_their_definitions() {
    // X(Q_c) = ‖Q‖₄⁴/‖Q‖₆³ = 8π/(24π)^{1/2}, and C_GN⁶ = ‖Q‖₆⁶/(‖Q′‖₂^{1/3}‖Q‖₄^{16/3})
    let (l2dx, l4, l6) = (common::q_weighted_dx_integral(1.0, 0), common::q_power_integral(1.0, 4.0), common::q_power_integral(1.0, 6.0));
    assert!((x0() - l4 / l6.sqrt()).abs() < 1e-14);
    assert!((c_gn() - l6.powf(1.0 / 6.0) / (l2dx.powf(1.0 / 18.0) * l4.powf(2.0 / 9.0))).abs() < 1e-14);
    assert!(barrier_function(x0(), 4.0 * PI).abs() < 1e-12);
}

#[test]
fn kc_of_the_soliton() {
    // box truncation of ‖Q′‖₂² and ‖Q‖₄⁴ is O(L^-3)
    let g = Grid::new(200.0, 16384).unwrap();
    for c in [1.0, 2.0] {
        let q = algebraic_soliton(c, &g).unwrap();
        assert!(common::rel_err(kc(&q, c), 2.5 * c * c * PI) < 1e-5);
    }
}

#[test]
fn mass_is_the_rectangle_sum() {
    let u = common::packet_field(&grid(), 11);
    assert!(common::rel_err(mass(&u), common::mass_sum(&u)) < 1e-14);
    assert!(common::rel_err(lp_norm(&u, 2.0).unwrap().powi(2), mass(&u)) < 1e-14);
}

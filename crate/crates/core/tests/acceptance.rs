//! One PASS/FAIL line per acceptance criterion. Each test prints its line
//! straight to the terminal, so the full table shows even when a criterion
//! fails.

mod common;

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use dnls::density::{generate_densities, p3_appendix_check, printed, rational, substitute_soliton};
use dnls::diagnostics::fit_profile;
use dnls::example::{self, build_example, gap_scaling, ExampleParams};
use dnls::functionals::{barrier, conserved, gauged_functionals, Primitives};
use dnls::gauge::{gauge_inverse, gauge_transform};
use dnls::solitons::{algebraic_soliton, standing_wave, SolitonParams};
use dnls::spectral::{line_limit, BoxLadder, Grid, GridFunction};
use dnls::suites::{algebraic_primitives, density_functionals, moment_line_limits, standing_wave_run};
use dnls::variational::{kc_gradient, normalized_minimum, minimize_kc};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Prints the criterion line, then one indented line per failed part.
fn report(n: u8, title: &str, parts: &[(String, bool)]) {
    let pass = parts.iter().all(|p| p.1);
    let mut out = std::io::stdout().lock();
    // bypass the harness capture so passing criteria are listed too
    let mut line = format!("{} criterion {n:>2}: {title}\n", if pass { "PASS" } else { "FAIL" });
    for (what, ok) in parts {
        if !ok {
            line.push_str(&format!("       fails: {what}\n"));
        }
    }
    let _ = out.write_all(line.as_bytes());
    drop(out);
    eprint!("{line}");
    assert!(pass, "criterion {n} failed");
}

fn within_rel(what: impl Into<String>, measured: f64, expected: f64, tol: f64) -> (String, bool) {
    let e = common::rel_err(measured, expected);
    (format!("{}: {measured:.12e} vs {expected:.12e}, rel {e:.2e} > {tol:e}", what.into()), e <= tol)
}

fn within_abs(what: impl Into<String>, measured: f64, expected: f64, tol: f64) -> (String, bool) {
    let e = (measured - expected).abs();
    (format!("{}: {measured:.12e} vs {expected:.12e}, abs {e:.2e} > {tol:e}", what.into()), e <= tol)
}

fn timed(what: &str, secs: f64, limit: f64) -> (String, bool) {
    (format!("{what} took {secs:.2} s, limit {limit} s"), secs < limit)
}

#[test]
fn criterion_01_moments() {
    let start = Instant::now();
    let mut parts = Vec::new();
    for c in [0.5, 1.0, 2.0] {
        let oracle = common::moment_oracle(c);
        for (i, v) in moment_line_limits(c).unwrap().into_iter().enumerate() {
            parts.push(within_rel(format!("moment {i} at c = {c} (beta oracle)"), v, oracle[i], 1e-6));
            parts.push(within_rel(format!("moment {i} at c = {c} (printed)"), v, common::printed_moment(c, i), 1e-6));
        }
    }
    parts.push(timed("moment suite", start.elapsed().as_secs_f64(), 5.0));
    report(1, "moments of Q_c for c in {1/2, 1, 2}, rel 1e-6, under 5 s", &parts);
}

#[test]
fn criterion_02_densities() {
    let start = Instant::now();
    let z = generate_densities(4).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let mut parts: Vec<(String, bool)> = z
        .iter()
        .zip(printed::densities())
        .enumerate()
        .map(|(i, (g, p))| {
            let d = g.sub(&p).len();
            (format!("Z({}) differs in {d} terms", i + 1), d == 0)
        })
        .collect();
    parts.push(timed("generate_densities(4)", secs, 1.0));
    report(2, "generate_densities(4) equals the printed Z(1)..Z(4) exactly, under 1 s", &parts);
}

#[test]
fn criterion_03_appendix() {
    let check = p3_appendix_check().unwrap();
    let mut parts = vec![(format!("P3(q0) total {}", check.total), check.total == rational(0, 1))];
    let expected = [rational(-17, 1), rational(47, 2), rational(-13, 2)];
    parts.push((format!("{} partial sums", check.partial_sums.len()), check.partial_sums.len() == 3));
    for (ps, e) in check.partial_sums.iter().zip(&expected) {
        parts.push((format!("partial sum {} vs {e}", ps.value), ps.value == *e));
    }
    for (i, (d, p)) in generate_densities(4).unwrap().iter().zip(printed::soliton_densities()).enumerate() {
        let diff = substitute_soliton(d).unwrap().raw.sub(&p).len();
        parts.push((format!("Z({}) along q0 differs in {diff} terms", i + 1), diff == 0));
    }
    report(3, "P3(q0) = -17 + 47/2 - 13/2 = 0 exactly, soliton substitutions exact", &parts);
}

#[test]
fn criterion_04_duality() {
    let grid = Grid::new(20.0, 1024).unwrap();
    let z = generate_densities(4).unwrap();
    let mut parts = Vec::new();
    for seed in 0..5 {
        let u = common::packet_field(&grid, seed);
        let c = conserved(&u);
        let d = density_functionals(&z, &u).unwrap();
        parts.push(within_rel(format!("2Re int Z(1) = P1, field {seed}"), d[0], c.p1, 1e-7));
        parts.push(within_rel(format!("-2Im int Z(2) = E1, field {seed}"), d[1], c.e1, 1e-7));
        parts.push(within_rel(format!("2Re int Z(3) = P2, field {seed}"), d[2], c.p2, 1e-7));
        parts.push(within_rel(format!("-2Im int Z(4) = E2, field {seed}"), d[3], c.e2, 1e-7));
    }
    report(4, "density integrals reproduce P1, E1, P2, E2 on 5 random fields, rel 1e-7", &parts);
}

#[test]
fn criterion_05_gauge() {
    let grid = Grid::new(20.0, 1024).unwrap();
    let names = ["mass", "E1", "P1", "E2", "P2"];
    let mut parts = Vec::new();
    for seed in 10..13 {
        let u = common::packet_field(&grid, seed);
        let base = conserved(&u).to_array();
        for nu in [0.5, 1.0, 1.5] {
            let v = gauge_transform(&u, nu).unwrap();
            let g = gauged_functionals(&v, nu).to_array();
            for i in 0..5 {
                parts.push(within_rel(format!("gauged {} at nu = {nu}, field {seed}", names[i]), g[i], base[i], 1e-7));
            }
            let back = gauge_inverse(&v, nu).unwrap();
            parts.push(within_abs(format!("round trip at nu = {nu}, field {seed}"), back.max_abs_diff(&u), 0.0, 1e-12));
        }
    }
    report(5, "gauged functionals match for nu in {1/2, 1, 3/2}, rel 1e-7; round trip 1e-12", &parts);
}

#[test]
fn criterion_06_soliton_zeros() {
    let q0 = algebraic_primitives(1.0).unwrap();
    let mut parts = vec![
        within_abs("E1(q_{1/4,1})", q0.e1, 0.0, 1e-7),
        within_abs("P1(q_{1/4,1})", q0.p1, 0.0, 1e-7),
        within_abs("E2(q_{1/4,1})", q0.e2, 0.0, 1e-7),
        within_abs("P2(q_{1/4,1})", q0.p2, 0.0, 1e-7),
    ];
    let grid = Grid::new(20.0, 1024).unwrap();
    let c = conserved(&standing_wave(SolitonParams::new(1.0, 1.0).unwrap(), 0.0, &grid).unwrap());
    parts.push(within_abs("E1(q_{1,1})", c.e1, -3f64.sqrt(), 1e-6));
    parts.push(within_abs("P1(q_{1,1})", c.p1, 2.0 * 3f64.sqrt(), 1e-6));
    parts.push(within_abs("mass of phi_{1,1}", c.mass, 8.0 * PI / 3.0, 1e-6));
    report(6, "E1, P1, E2, P2 vanish on q_{1/4,1}; q_{1,1} values; mass 8pi/3", &parts);
}

#[test]
fn criterion_07_dynamics() {
    let start = Instant::now();
    let runs: Vec<_> = [4e-4, 2e-4, 1e-4].into_iter().map(|dt| standing_wave_run(dt).unwrap()).collect();
    let fine = &runs[2];
    let grid = fine.last_state.grid().clone();
    // ω = c = 1: φ² = 3/(cosh(√3y) − 1/2) and ∫_{−∞}^y φ² = 4(arctan(√3 tanh(√3y/2)) + π/3)
    let exact = GridFunction::from_fn(&grid, |x| {
        let y = x + 1.0;
        let r3 = 3f64.sqrt();
        let phi = (3.0 / ((r3 * y).cosh() - 0.5)).sqrt();
        let mass_left = 4.0 * ((r3 * (0.5 * r3 * y).tanh()).atan() + PI / 3.0);
        Complex64::from_polar(phi, 1.0 - 0.5 * y + 0.75 * mass_left)
    });
    let err = fine.last_state.l2_distance(&exact) / common::mass_sum(&exact).sqrt();
    let mut parts = vec![within_abs("relative L2 error at t = 1", err, 0.0, 1e-6)];
    for (name, d) in ["mass", "E1", "P1", "E2", "P2"].iter().zip(fine.max_drift()) {
        parts.push((format!("drift of {name} {d:.2e} > 1e-7"), d <= 1e-7));
    }
    let ratio = runs[0].last_state.l2_distance(&runs[1].last_state) / runs[1].last_state.l2_distance(&fine.last_state);
    parts.push((format!("self-convergence ratio {ratio:.3} outside [12, 20]"), (12.0..=20.0).contains(&ratio)));
    parts.push(timed("dynamics", start.elapsed().as_secs_f64(), 120.0));
    report(7, "standing wave to t = 1: L2 error 1e-6, drifts 1e-7, ratio in [12, 20], under 2 min", &parts);
}

#[test]
fn criterion_08_closed_forms() {
    let mut parts = Vec::new();
    for a in [0.0, 0.5, 1.0, 2.0, 5.0, 25.4] {
        for which in 1..=4u8 {
            let q = example::closed_form_quadrature(which, a, 1e-11).unwrap();
            match example::closed_integral(which, a) {
                Ok(c) => parts.push(within_abs(format!("closed form {which} at a = {a}"), q, c, 1e-8)),
                Err(e) => parts.push((format!("closed form {which} at a = {a}: {e}"), false)),
            }
        }
    }
    report(8, "four closed-form integrals against quadrature at 6 values of a, abs 1e-8", &parts);
}

#[test]
fn criterion_09_example() {
    let grid = Grid::new(40.0, 8192).unwrap();
    let (u0, r) = build_example(ExampleParams::new(3, 0.1).unwrap(), &grid).unwrap();
    let mut parts = vec![
        within_abs("mass gap ||u0||^2 - 4pi", r.mass_gap, 0.0, 1e-8),
        (format!("P1(u0) = {:.6e} not positive (leading order {:.6e})", r.p1, r.p1_leading_order), r.p1 > 0.0),
        (format!("margin P1/(eta e^(-a/sqrt2)) = {:.4} not positive", r.margins.p1_scale), r.margins.p1_scale > 0.0),
    ];
    // the box sum sees the same datum
    parts.push(within_rel("sampled mass against 4pi (box)", common::mass_sum(&u0), 4.0 * PI, 0.2));
    let (_, slope) = gap_scaling(3, 0.1, 3).unwrap();
    parts.push(within_abs("log-slope of P1 - leading order against eta", slope, 2.0, 0.2));
    report(9, "build_example(3, 0.1): mass 4pi within 1e-8, P1 > 0, remainder O(eta^2)", &parts);
}

#[test]
fn criterion_10_variational() {
    let mut parts = Vec::new();
    let grid = Grid::new(100.0, 8192).unwrap();
    for c in [1.0, 2.0] {
        let gauss = GridFunction::from_real_fn(&grid, |x| (-(x - 1.3).powi(2) / 2.0).exp());
        let m = minimize_kc(c, &grid, &gauss, 40_000, 1e-12).unwrap();
        parts.push(within_rel(format!("min K_c at c = {c}"), m.value, 2.5 * c * c * PI, 1e-2));
    }
    let lambda = 0.75 * (3.0 * PI).powf(0.4);
    parts.push(within_abs("normalized minimum value", normalized_minimum().unwrap(), 5.0 * lambda / 18.0, 1e-4));
    let ladder = BoxLadder::doubling(40.0, 0.05).unwrap();
    let lim = line_limit(&ladder, |g| Ok(Primitives::of(&algebraic_soliton(1.0, g)?).to_vec())).unwrap();
    let c_gn = 3f64.powf(1.0 / 6.0) * (2.0 * PI).powf(-1.0 / 9.0);
    parts.push(within_abs("GN ratio of Q_1", Primitives::from_slice(&lim.values).gn_ratio(), c_gn, 1e-9));
    // directional derivatives along random bumps
    let g = Grid::new(20.0, 512).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (a, x0, w) = (rng.random_range(0.5..2.0), rng.random_range(-2.0..2.0), rng.random_range(0.7..2.0));
        let (b, y0) = (rng.random_range(-1.0..1.0), rng.random_range(-3.0..3.0));
        let v = |x: f64| a * (-((x - x0) / w).powi(2)).exp();
        let h = |x: f64| b * (-(x - y0).powi(2)).exp();
        let vs: Vec<f64> = (0..g.len()).map(|j| v(g.x(j))).collect();
        let grad = kc_gradient(&vs, 1.0, &g);
        let analytic: f64 = (0..g.len()).map(|j| grad[j] * h(g.x(j))).sum::<f64>() * g.dx();
        let k = |t: f64| dnls::functionals::kc(&GridFunction::from_real_fn(&g, |x| v(x) + t * h(x)), 1.0);
        let fd = (k(1e-4) - k(-1e-4)) / 2e-4;
        worst = worst.max((analytic - fd).abs() / fd.abs().max(1.0));
    }
    parts.push(within_abs("gradient against central differences", worst, 0.0, 1e-6));
    report(10, "minimize_kc within 1%; normalized value 5 lambda/18; C_GN on Q_1; gradient check", &parts);
}

#[test]
fn criterion_11_diagnostics() {
    let mut parts = Vec::new();
    let grid = Grid::new(40.0, 8192).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let mut worst = [0.0f64; 3];
    for _ in 0..100 {
        let lambda = rng.random_range(0.05..1.0);
        let gamma = rng.random_range(0.0..2.0 * PI);
        let x0 = rng.random_range(-10.0..10.0);
        let v = GridFunction::from_fn(&grid, |y| {
            Complex64::from_polar(common::q(1.0, y / lambda - x0) / lambda.sqrt(), gamma - y / (2.0 * lambda))
        });
        let fit = fit_profile(&v, 1.0).unwrap();
        let dg = (fit.gamma - gamma + PI).rem_euclid(2.0 * PI) - PI;
        worst[0] = worst[0].max((fit.lambda - lambda).abs());
        worst[1] = worst[1].max(dg.abs());
        worst[2] = worst[2].max((fit.x0 - x0).abs());
    }
    for (name, w) in ["lambda", "gamma", "x0"].iter().zip(worst) {
        parts.push(within_abs(format!("worst planted {name} error"), w, 0.0, 1e-6));
    }
    let x0_target = 2f64.powf(1.5) / 3f64.sqrt() * PI.sqrt();
    for c in [0.5, 1.0, 2.0] {
        let ladder = BoxLadder::doubling(40.0 / c, 0.05 / c).unwrap();
        let lim = line_limit(&ladder, |g| Ok(Primitives::of(&algebraic_soliton(c, g)?).to_vec())).unwrap();
        parts.push(within_abs(format!("x_ratio of Q_c at c = {c}"), Primitives::from_slice(&lim.values).x_ratio(), x0_target, 1e-9));
    }
    let mut barrier_parts = |name: String, v: &GridFunction| {
        let b = barrier(v);
        parts.push((format!("barrier left {:.3e} < -1e-9, {name}", b.left), b.left >= -1e-9));
        parts.push((format!("barrier left - right {:.3e} > 1e-7, {name}", b.left - b.right), b.left - b.right <= 1e-7));
    };
    let g40 = Grid::new(40.0, 4096).unwrap();
    for (omega, c) in [(0.25, 1.0), (1.0, 1.0), (2.0, 1.0), (1.0, 0.5)] {
        let v = gauge_transform(&standing_wave(SolitonParams::new(omega, c).unwrap(), 0.0, &g40).unwrap(), 1.5).unwrap();
        barrier_parts(format!("gauged soliton omega = {omega}, c = {c}"), &v);
    }
    let g20 = Grid::new(20.0, 1024).unwrap();
    for seed in 100..110 {
        let f = common::packet_field(&g20, seed);
        let f = f.scaled((4.0 * PI / common::mass_sum(&f)).sqrt());
        barrier_parts(format!("random 4pi-mass field {seed}"), &f);
    }
    report(11, "planted recovery 1e-6 over 100 profiles; x_ratio(Q_c) = X0 to 1e-9; barrier inequality", &parts);
}

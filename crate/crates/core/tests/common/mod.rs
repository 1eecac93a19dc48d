//! Oracles shared by the integration tests. Nothing here calls into the
//! library's own closed forms.
#![allow(dead_code)]

use std::f64::consts::PI;

use dnls::spectral::{Grid, GridFunction};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::function::gamma::ln_gamma;

/// Q_c(x) = √(4c/((cx)² + 1)).
pub fn q(c: f64, x: f64) -> f64 {
    (4.0 * c / ((c * x).powi(2) + 1.0)).sqrt()
}

/// Q_c′(x) = −2c^{5/2} x ((cx)² + 1)^{−3/2}, differentiated by hand.
pub fn q_prime(c: f64, x: f64) -> f64 {
    -2.0 * c.powf(2.5) * x * ((c * x).powi(2) + 1.0).powf(-1.5)
}

fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// ∫ Q_c^p dx: substitute y = cx, then ∫(1+y²)^{−s} dy = B(1/2, s−1/2).
pub fn q_power_integral(c: f64, p: f64) -> f64 {
    (4.0 * c).powf(p / 2.0) / c * beta(0.5, p / 2.0 - 0.5)
}

/// ∫ Q_c^{2m} (Q_c′)² dx via ∫ y²(1+y²)^{−s} dy = B(3/2, s−3/2).
pub fn q_weighted_dx_integral(c: f64, m: u32) -> f64 {
    let s = m as f64 + 3.0;
    4f64.powi(m as i32 + 1) * c.powi(m as i32 + 2) * beta(1.5, s - 1.5)
}

/// ∫ (Q_c′)⁴ dx = 16c⁵ ∫ y⁴(1+y²)^{−6} dy.
pub fn q_dx_l4_integral(c: f64) -> f64 {
    16.0 * c.powi(5) * beta(2.5, 3.5)
}

/// The eleven tabulated moments in library order.
pub fn moment_oracle(c: f64) -> [f64; 11] {
    [
        q_power_integral(c, 2.0),
        q_power_integral(c, 4.0),
        q_power_integral(c, 6.0),
        q_power_integral(c, 8.0),
        q_power_integral(c, 10.0),
        q_power_integral(c, 12.0),
        q_weighted_dx_integral(c, 0),
        q_weighted_dx_integral(c, 1),
        q_weighted_dx_integral(c, 2),
        q_weighted_dx_integral(c, 3),
        q_dx_l4_integral(c),
    ]
}

/// The same moments as printed, in units of π at c = 1, with their c-powers.
pub const PRINTED_MOMENTS: [(f64, i32); 11] = [
    (4.0, 0),
    (8.0, 1),
    (24.0, 2),
    (80.0, 3),
    (280.0, 4),
    (1008.0, 5),
    (0.5, 2),
    (1.0, 3),
    (2.5, 4),
    (7.0, 5),
    (3.0 / 16.0, 5),
];

pub fn printed_moment(c: f64, i: usize) -> f64 {
    let (k, p) = PRINTED_MOMENTS[i];
    k * c.powi(p) * PI
}

/// Sum of a few Gaussian wave packets with random amplitudes, centres,
/// widths and carrier frequencies. Deliberately unlike the library's own
/// test-field generator.
pub fn packet_field(grid: &Grid, seed: u64) -> GridFunction {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let packets: Vec<(Complex64, f64, f64, f64)> = (0..3)
        .map(|_| {
            let amp = Complex64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..2.0 * PI));
            (amp, rng.random_range(-2.0..2.0), rng.random_range(0.8..1.6), rng.random_range(-1.5..1.5))
        })
        .collect();
    GridFunction::from_fn(grid, |x| {
        packets
            .iter()
            .map(|(a, x0, w, k)| a * (-((x - x0) / w).powi(2)).exp() * Complex64::from_polar(1.0, k * x))
            .sum()
    })
}

pub fn rel_err(measured: f64, expected: f64) -> f64 {
    (measured - expected).abs() / expected.abs()
}

/// Mass M = ‖u‖₂² by direct rectangle sum.
pub fn mass_sum(u: &GridFunction) -> f64 {
    u.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * u.grid().dx()
}

//! Reproducible random test fields.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::{Grid, GridFunction};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian envelope (width 1–2, centre within ±1) times a random
/// trigonometric polynomial with 2–4 modes, |k| ≤ 2.
pub fn random_smooth_field(grid: &Grid, rng: &mut impl Rng) -> GridFunction {
    let width: f64 = rng.random_range(1.0..2.0);
    let centre: f64 = rng.random_range(-1.0..1.0);
    let modes: Vec<(Complex64, f64)> = (0..rng.random_range(2..=4))
        .map(|_| {
            let a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (a, rng.random_range(-2.0..2.0))
        })
        .collect();
    GridFunction::from_fn(grid, |x| {
        let env = (-(x - centre).powi(2) / (2.0 * width * width)).exp();
        env * modes.iter().map(|(a, k)| a * Complex64::from_polar(1.0, k * x)).sum::<Complex64>()
    })
}

/// [`random_smooth_field`] rescaled to ‖f‖₂² = 4π.
pub fn random_critical_field(grid: &Grid, rng: &mut impl Rng) -> GridFunction {
    let f = random_smooth_field(grid, rng);
    let m = grid.power_integral(f.values(), 2.0);
    f.scaled((4.0 * PI / m).sqrt())
}

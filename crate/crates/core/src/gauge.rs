//! Gauge transformations G_ν u = u·exp(−i(ν/2)∫_{−L}^x |u|²).

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::{cumulative_integral, GridFunction};

/// Multiplies by exp(i·sign·(ν/2)∫|f|²); |f| is unchanged so the same
/// phase serves both directions.
fn rotate(f: &GridFunction, nu: f64, sign: f64) -> Result<(GridFunction, Option<String>)> {
    if nu == 0.0 {
        return Ok((f.clone(), None));
    }
    let density = GridFunction::from_parts(
        f.grid(),
        f.abs2().into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    );
    let cum = cumulative_integral(&density)?;
    let values = f
        .values()
        .iter()
        .zip(&cum.values)
        .map(|(z, s)| z * Complex64::from_polar(1.0, sign * 0.5 * nu * s))
        .collect();
    Ok((GridFunction::from_parts(f.grid(), values), cum.decay_warning))
}

/// v = G_ν u.
pub fn gauge_transform(u: &GridFunction, nu: f64) -> Result<GridFunction> {
    rotate(u, nu, -1.0).map(|(v, _)| v)
}

/// G_ν u together with the decay warning of the phase integral, if any.
pub fn gauge_transform_checked(u: &GridFunction, nu: f64) -> Result<(GridFunction, Option<String>)> {
    rotate(u, nu, -1.0)
}

/// u = G_ν⁻¹ v, using |v| = |u|.
pub fn gauge_inverse(v: &GridFunction, nu: f64) -> Result<GridFunction> {
    rotate(v, nu, 1.0).map(|(u, _)| u)
}

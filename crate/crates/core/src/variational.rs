//! Constrained minimization of K_c(v) = ‖∂v‖₂² + (c/4)‖v‖₄⁴ on the sphere
//! ‖v‖₆⁶ = 24c²π, and the explicit minimizer of the normalized problem
//! min{½‖∂u‖₂² + ¼‖u‖₄⁴ : ‖u‖₆ = 1}.
//!
//! The descent direction is the (c² − ∂²)⁻¹-preconditioned gradient with its
//! component along the constraint normal removed; the iterate is then pulled
//! back to the sphere by amplitude rescaling and recentred.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{kc, x_ratio};
use crate::spectral::{line_quadrature_with, Grid, GridFunction, TailModel};

/// λ = 3(3π)^{2/5}/4.
pub fn lambda() -> f64 {
    0.75 * (3.0 * PI).powf(0.4)
}

fn ustar_b() -> f64 {
    4.0 * lambda() / 3.0
}

/// u*(x) = √(2/(x² + 4λ/3)).
pub fn ustar_value(x: f64) -> f64 {
    (2.0 / (x * x + ustar_b())).sqrt()
}

pub fn ustar_derivative(x: f64) -> f64 {
    -2f64.sqrt() * x * (x * x + ustar_b()).powf(-1.5)
}

pub fn ustar(grid: &Grid) -> GridFunction {
    GridFunction::from_real_fn(grid, ustar_value)
}

/// −u″ + u³ − λu⁵ with a spectral second derivative.
pub fn ustar_ode_residual(u: &GridFunction) -> Vec<f64> {
    let g = u.grid();
    let uxx = g.diff(u.values(), 2);
    let l = lambda();
    u.values().iter().zip(&uxx).map(|(v, d)| -d.re + v.re.powi(3) - l * v.re.powi(5)).collect()
}

/// ½‖∂u*‖₂² + ¼‖u*‖₄⁴ on the line, by quadrature.
pub fn normalized_minimum() -> Result<f64> {
    let (dx2, l4) = ustar_norms()?;
    Ok(0.5 * dx2 + 0.25 * l4)
}

fn ustar_norms() -> Result<(f64, f64)> {
    let tail = TailModel::Sampled { power: 4.0 };
    let dx2 = line_quadrature_with(|x| ustar_derivative(x).powi(2), 1e-13, tail)?.value;
    let l4 = line_quadrature_with(|x| ustar_value(x).powi(4), 1e-13, tail)?.value;
    Ok((dx2, l4))
}

/// ‖v‖₆⁶ on the constraint sphere.
pub fn constraint_level(c: f64) -> f64 {
    24.0 * c * c * PI
}

/// The minimum value (5/2)c²π.
pub fn minimum_value(c: f64) -> f64 {
    2.5 * c * c * PI
}

/// L² gradient of K_c for real v: −2v″ + cv³.
pub fn kc_gradient(v: &[f64], c: f64, grid: &Grid) -> Vec<f64> {
    let vxx = grid.diff(&complexify(v), 2);
    v.iter().zip(&vxx).map(|(x, d)| -2.0 * d.re + c * x.powi(3)).collect()
}

fn complexify(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn kc_real(v: &[f64], c: f64, grid: &Grid) -> f64 {
    kc(&GridFunction::from_parts(grid, complexify(v)), c)
}

fn l6(v: &[f64], grid: &Grid) -> f64 {
    grid.dx() * v.iter().map(|x| x.powi(6)).sum::<f64>()
}

fn project(v: &mut [f64], c: f64, grid: &Grid) {
    let s = (constraint_level(c) / l6(v, grid)).powf(1.0 / 6.0);
    v.iter_mut().for_each(|x| *x *= s);
}

/// (c² − ∂²)⁻¹f; 1/c is the natural length of the c-problem.
fn smooth(f: &[f64], c: f64, grid: &Grid) -> Vec<f64> {
    let mut h = grid.fft(&complexify(f));
    for (j, z) in h.iter_mut().enumerate() {
        *z /= c * c + grid.wavenumber(j).powi(2);
    }
    grid.ifft_in_place(&mut h);
    h.iter().map(|z| z.re).collect()
}

fn recenter(v: &mut [f64]) {
    let peak = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mid = v.len() / 2;
    if peak < mid {
        v.rotate_right(mid - peak);
    } else {
        v.rotate_left(peak - mid);
    }
    if v[mid] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Minimization {
    #[serde(skip)]
    pub minimizer: GridFunction,
    pub value: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
    /// μ in −2v″ + cv³ = 6μv⁵, by least squares.
    pub multiplier: f64,
    /// ‖−2v″ + cv³ − 6μv⁵‖₂.
    pub euler_lagrange_residual: f64,
}

pub fn minimize_kc(c: f64, grid: &Grid, init: &GridFunction, max_iters: usize, tol: f64) -> Result<Minimization> {
    if !(c > 0.0) || !(tol > 0.0) {
        return Err(Error::Parameter(format!("need c > 0 and tol > 0, got c = {c}, tol = {tol}")));
    }
    if init.grid() != grid {
        return Err(Error::Parameter("initial field lives on a different grid".into()));
    }
    if init.values().iter().any(|z| z.im.abs() > 1e-12 * (1.0 + z.re.abs())) {
        return Err(Error::Parameter("initial field must be real".into()));
    }
    let mut v: Vec<f64> = init.real_parts();
    if !(l6(&v, grid) > 0.0) {
        return Err(Error::Parameter("initial field vanishes".into()));
    }
    project(&mut v, c, grid);
    let mut value = kc_real(&v, c, grid);
    let mut history = vec![value];
    for it in 1..=max_iters {
        let g = kc_gradient(&v, c, grid);
        let n: Vec<f64> = v.iter().map(|x| 6.0 * x.powi(5)).collect();
        let (sg, sn) = (smooth(&g, c, grid), smooth(&n, c, grid));
        let beta = dot(&sg, &n) / dot(&sn, &n);
        let d: Vec<f64> = sg.iter().zip(&sn).map(|(a, b)| a - beta * b).collect();

        let mut alpha = 1.0;
        let mut next = None;
        while alpha > 1e-16 {
            let mut trial: Vec<f64> = v.iter().zip(&d).map(|(x, y)| x - alpha * y).collect();
            project(&mut trial, c, grid);
            let k = kc_real(&trial, c, grid);
            if k <= value {
                next = Some((trial, k));
                break;
            }
            alpha *= 0.5;
        }
        let Some((mut trial, k)) = next else {
            return finish(v, c, grid, value, it, history);
        };
        recenter(&mut trial);
        let decrease = (value - k) / k.abs();
        v = trial;
        value = k;
        history.push(value);
        if decrease < tol {
            return finish(v, c, grid, value, it, history);
        }
    }
    Err(Error::NoConvergence {
        what: "K_c minimization",
        iterations: max_iters,
        last: value,
        history,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn finish(v: Vec<f64>, c: f64, grid: &Grid, value: f64, iterations: usize, history: Vec<f64>) -> Result<Minimization> {
    let g = kc_gradient(&v, c, grid);
    let n: Vec<f64> = v.iter().map(|x| 6.0 * x.powi(5)).collect();
    let multiplier = dot(&g, &n) / dot(&n, &n);
    let r2: f64 = g.iter().zip(&n).map(|(a, b)| (a - multiplier * b).powi(2)).sum();
    Ok(Minimization {
        minimizer: GridFunction::from_parts(grid, complexify(&v)),
        value,
        iterations,
        history,
        multiplier,
        euler_lagrange_residual: (r2 * grid.dx()).sqrt(),
    })
}

/// Pointwise (−2v″ + cv³)/(6v⁵) where |v| ≥ floor·max|v|: (mean, max relative
/// deviation from the mean).
pub fn multiplier_profile(v: &GridFunction, c: f64, floor: f64) -> (f64, f64) {
    let re = v.real_parts();
    let g = kc_gradient(&re, c, v.grid());
    let top = re.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let ratios: Vec<f64> = re
        .iter()
        .zip(&g)
        .filter(|(x, _)| x.abs() >= floor * top)
        .map(|(x, gx)| gx / (6.0 * x.powi(5)))
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| ((r - mean) / mean).abs()).fold(0.0, f64::max);
    (mean, spread)
}

/// Final-state summary for reports.
#[derive(Debug, Clone, Serialize)]
pub struct MinimizerSummary {
    pub c: f64,
    pub value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub multiplier: f64,
    pub euler_lagrange_residual: f64,
    pub x_ratio: f64,
}

impl Minimization {
    pub fn summary(&self, c: f64) -> MinimizerSummary {
        MinimizerSummary {
            c,
            value: self.value,
            gap: self.value - minimum_value(c),
            iterations: self.iterations,
            multiplier: self.multiplier,
            euler_lagrange_residual: self.euler_lagrange_residual,
            x_ratio: x_ratio(&self.minimizer),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingBridge {
    pub c: f64,
    pub nu: f64,
    pub mu: f64,
    /// μ/ν⁶ − 24c²π.
    pub l6_residual: f64,
    /// (ν/μ)² − c/2.
    pub ratio_residual: f64,
    /// (3/4)(3π)^{2/5}ν⁴/μ² − 3/16.
    pub coefficient_residual: f64,
    /// K_c((1/ν)u*(·/μ)) on the line.
    pub kc_value: f64,
    pub kc_gap: f64,
}

/// ν² = (3π)^{1/10}/(2√3√π c), μ = 2(3π)^{1/5}ν², and the image of u* under
/// u ↦ (1/ν)u(·/μ).
pub fn scaling_bridge_check(c: f64) -> Result<ScalingBridge> {
    if !(c > 0.0) {
        return Err(Error::Parameter(format!("c must be positive, got {c}")));
    }
    let t = 3.0 * PI;
    let nu2 = t.powf(0.1) / (2.0 * 3f64.sqrt() * PI.sqrt() * c);
    let nu = nu2.sqrt();
    let mu = 2.0 * t.powf(0.2) * nu2;
    let (dx2, l4) = ustar_norms()?;
    // ‖∂w‖² = ‖∂u*‖²/(ν²μ), ‖w‖₄⁴ = μ‖u*‖₄⁴/ν⁴
    let kc_value = dx2 / (nu2 * mu) + 0.25 * c * mu * l4 / (nu2 * nu2);
    Ok(ScalingBridge {
        c,
        nu,
        mu,
        l6_residual: mu / nu2.powi(3) - constraint_level(c),
        ratio_residual: nu2 / (mu * mu) - 0.5 * c,
        coefficient_residual: 0.75 * t.powf(0.4) * nu2 * nu2 / (mu * mu) - 3.0 / 16.0,
        kc_value,
        kc_gap: kc_value - minimum_value(c),
    })
}

/// (1/ν)u*(x/μ) sampled on `grid`.
pub fn scaled_ustar(c: f64, grid: &Grid) -> Result<GridFunction> {
    let b = scaling_bridge_check(c)?;
    Ok(GridFunction::from_real_fn(grid, |x| ustar_value(x / b.mu) / b.nu))
}

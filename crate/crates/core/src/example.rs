//! A 4π-mass datum with positive momentum: u₀ = q₀ + ηφ_a.
//!
//! q₀ = Q₁e^{iΘ} with Θ = −x/2 + 3(arctan x + π/2) is the algebraic standing
//! wave, and φ_a shares its phase up to an extra e^{−iax}. Every quantity the
//! construction needs is a line integral of a closed-form integrand, so the
//! report is computed by quadrature; grids are only used for sampling and
//! for the independent box checks.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::momentum_p1;
use crate::spectral::{line_limit, line_quadrature_with, BoxLadder, Grid, GridFunction, TailModel};

pub const DEFAULT_K: u32 = 3;
/// Smaller than the commonly quoted 0.1: at ε₀ = 0.1 the η² remainder
/// already outweighs the leading term when k = 3.
pub const DEFAULT_EPS0: f64 = 0.01;

const QUAD_TOL: f64 = 1e-13;

fn phase(x: f64) -> f64 {
    -0.5 * x + 3.0 * (x.atan() + FRAC_PI_2)
}

/// q₀(x) = (2/√(x²+1))·e^{iΘ(x)}.
pub fn q0_value(x: f64) -> Complex64 {
    Complex64::from_polar(2.0 / (x * x + 1.0).sqrt(), phase(x))
}

/// φ_a(x) = (√(x²+1)/(2(x⁴+1)))·e^{iΘ(x) − iax}.
pub fn phi_a_value(a: f64, x: f64) -> Complex64 {
    Complex64::from_polar(phi_a_modulus(x), phase(x) - a * x)
}

fn phi_a_modulus(x: f64) -> f64 {
    (x * x + 1.0).sqrt() / (2.0 * (x.powi(4) + 1.0))
}

/// ∂ₓ log q₀ = −x/(x²+1) + iΘ'.
fn q0_log_derivative(x: f64) -> Complex64 {
    Complex64::new(-x / (x * x + 1.0), -0.5 + 3.0 / (x * x + 1.0))
}

/// ∂ₓ log φ_a = x/(x²+1) − 4x³/(x⁴+1) + i(Θ' − a).
fn phi_a_log_derivative(a: f64, x: f64) -> Complex64 {
    let x2 = x * x;
    Complex64::new(x / (x2 + 1.0) - 4.0 * x * x2 / (x2 * x2 + 1.0), -0.5 + 3.0 / (x2 + 1.0) - a)
}

pub fn q0(grid: &Grid) -> GridFunction {
    GridFunction::from_fn(grid, q0_value)
}

pub fn q0_derivative(grid: &Grid) -> GridFunction {
    GridFunction::from_fn(grid, |x| q0_log_derivative(x) * q0_value(x))
}

pub fn phi_a(a: f64, grid: &Grid) -> GridFunction {
    GridFunction::from_fn(grid, |x| phi_a_value(a, x))
}

pub fn phi_a_derivative(a: f64, grid: &Grid) -> GridFunction {
    GridFunction::from_fn(grid, |x| phi_a_log_derivative(a, x) * phi_a_value(a, x))
}

/// The derivative of φ_a with the coefficient x/√(x²+1) as it is usually
/// printed; the modulus actually contributes x/(x²+1).
pub fn phi_a_derivative_printed(a: f64, grid: &Grid) -> GridFunction {
    GridFunction::from_fn(grid, |x| {
        let x2 = x * x;
        let re = x / (x2 + 1.0).sqrt() - 4.0 * x * x2 / (x2 * x2 + 1.0);
        Complex64::new(re, -0.5 + 3.0 / (x2 + 1.0) - a) * phi_a_value(a, x)
    })
}

fn quad(f: impl Fn(f64) -> f64, power: f64) -> Result<f64> {
    Ok(line_quadrature_with(f, QUAD_TOL, TailModel::Sampled { power })?.value)
}

/// ‖φ_a‖₂² = (1/4)∫(1+x²)/(1+x⁴)², independent of a.
pub fn phi_a_norm2() -> Result<f64> {
    quad(|x| phi_a_modulus(x).powi(2), 6.0)
}

/// Right-hand sides of the four closed forms, as displayed.
pub fn closed_integral(which: u8, a: f64) -> Result<f64> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::Parameter(format!("closed forms need a ≥ 0, got {a}")));
    }
    let s = a / SQRT_2;
    let e = (-s).exp();
    match which {
        1 => Ok(PI * e * (s + FRAC_PI_4).sin()),
        2 => Ok(FRAC_PI_2 * ((-a).exp() + SQRT_2 * e * s.sin())),
        3 => Ok(FRAC_PI_2 * ((-a).exp() - e * s.cos() + e * s.sin())),
        4 => {
            if a == 0.0 {
                return Err(Error::Parameter("the fourth closed form needs b > 0".into()));
            }
            Ok(2.0 * PI * (-2.0 * (-a).exp() + 0.25 * s.cos() * e + 0.25 * (1.0 - 2.0 / SQRT_2) * s.sin() * e))
        }
        _ => Err(Error::Parameter(format!("closed form index {which} not in 1..=4"))),
    }
}

/// Residue evaluation of ∫cos(bx − 3arctan x)√(x²+1)/(x⁴+1), valid for b ≥ 0.
pub fn fourth_integral_residue(b: f64) -> Result<f64> {
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::Parameter(format!("needs b ≥ 0, got {b}")));
    }
    let s = b / SQRT_2;
    Ok(4.0 * PI * (-b).exp() - PI * (SQRT_2 + 1.0) * (-s).exp() * (s.cos() + (s + FRAC_PI_4).cos()))
}

/// Integrand f(a, x) and its algebraic decay power.
pub type Integrand = (fn(f64, f64) -> f64, f64);

/// Left-hand integrand of closed form `which`.
pub fn closed_form_integrand(which: u8) -> Result<Integrand> {
    fn f1(a: f64, x: f64) -> f64 {
        (a * x).cos() / (1.0 + x.powi(4))
    }
    fn f2(a: f64, x: f64) -> f64 {
        (a * x).cos() / ((x * x + 1.0) * (x.powi(4) + 1.0))
    }
    fn f3(a: f64, x: f64) -> f64 {
        x * (a * x).sin() / ((x * x + 1.0) * (x.powi(4) + 1.0))
    }
    fn f4(b: f64, x: f64) -> f64 {
        (b * x - 3.0 * x.atan()).cos() * (x * x + 1.0).sqrt() / (x.powi(4) + 1.0)
    }
    match which {
        1 => Ok((f1, 4.0)),
        2 => Ok((f2, 6.0)),
        3 => Ok((f3, 5.0)),
        4 => Ok((f4, 3.0)),
        _ => Err(Error::Parameter(format!("closed form index {which} not in 1..=4"))),
    }
}

/// Quadrature of the left side of closed form `which`.
pub fn closed_form_quadrature(which: u8, a: f64, tolerance: f64) -> Result<f64> {
    let (f, power) = closed_form_integrand(which)?;
    Ok(line_quadrature_with(|x| f(a, x), tolerance, TailModel::Sampled { power })?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExampleParams {
    pub k: u32,
    pub eps0: f64,
    pub a: f64,
    pub eta: f64,
}

impl Default for ExampleParams {
    fn default() -> Self {
        Self::new(DEFAULT_K, DEFAULT_EPS0).expect("default branch is valid")
    }
}

impl ExampleParams {
    /// a/√2 + π/4 = 2kπ − ε₀, η from the mass constraint.
    pub fn new(k: u32, eps0: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Parameter("branch index k must be positive".into()));
        }
        if !(eps0 > 0.0 && eps0 < 0.5) {
            return Err(Error::Parameter(format!("eps0 must lie in (0, 0.5), got {eps0}")));
        }
        let a = SQRT_2 * (2.0 * k as f64 * PI - eps0 - FRAC_PI_4);
        let mut p = Self::from_a(a)?;
        p.k = k;
        p.eps0 = eps0;
        Ok(p)
    }

    /// Arbitrary a > 0; k and ε₀ are recovered from the nearest branch.
    pub fn from_a(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Parameter(format!("a must be positive, got {a}")));
        }
        let eta = mass_eta(a)?;
        if !(eta > 0.0) {
            return Err(Error::Branch(eta));
        }
        let turns = (a / SQRT_2 + FRAC_PI_4) / (2.0 * PI);
        let k = turns.ceil() as u32;
        let eps0 = 2.0 * k as f64 * PI - a / SQRT_2 - FRAC_PI_4;
        Ok(Self { k, eps0, a, eta })
    }
}

/// η = −(2π/‖φ_a‖²)e^{−a/√2}sin(a/√2 + π/4).
pub fn mass_eta(a: f64) -> Result<f64> {
    let s = a / SQRT_2;
    Ok(-2.0 * PI / phi_a_norm2()? * (-s).exp() * (s + FRAC_PI_4).sin())
}

/// P₁(q₀ + ηφ_a) = A₁η + A₂η² + A₃η³ + A₄η⁴, using P₁(q₀) = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct P1Expansion {
    pub coefficients: [f64; 4],
}

impl P1Expansion {
    pub fn new(a: f64) -> Result<Self> {
        // integrands built from q₀φ̄_a, |q₀|², |φ_a|² and the log-derivatives
        let cross = |x: f64| q0_value(x) * phi_a_value(a, x).conj();
        let a1 = quad(
            |x| {
                let c = cross(x);
                2.0 * (q0_log_derivative(x) * c).im - 2.0 * q0_value(x).norm_sqr() * c.re
            },
            4.0,
        )?;
        let a2 = quad(
            |x| {
                let c = cross(x);
                let m2 = phi_a_modulus(x).powi(2);
                phi_a_log_derivative(a, x).im * m2 - 2.0 * c.re * c.re - q0_value(x).norm_sqr() * m2
            },
            4.0,
        )?;
        let a3 = quad(|x| -2.0 * phi_a_modulus(x).powi(2) * cross(x).re, 6.0)?;
        let a4 = quad(|x| -0.5 * phi_a_modulus(x).powi(4), 12.0)?;
        Ok(Self { coefficients: [a1, a2, a3, a4] })
    }

    pub fn eval(&self, eta: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| (acc + c) * eta)
    }
}

/// θ₀ ∈ (0, π/2) with cos θ₀ = (√2+1)/√(4+2√2).
pub fn theta0() -> f64 {
    (1.0f64).atan2(SQRT_2 + 1.0)
}

/// −ηπ(2e^{−a} + e^{−a/√2}√(4+2√2)sin(a/√2 − θ₀)).
pub fn p1_leading_order(a: f64, eta: f64) -> f64 {
    let s = a / SQRT_2;
    -eta * PI * (2.0 * (-a).exp() + (-s).exp() * (4.0 + 2.0 * SQRT_2).sqrt() * (s - theta0()).sin())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margins {
    /// η / (e^{−a/√2}ε₀); bounded by an O(1) constant.
    pub eta_scale: f64,
    /// e^{−a}/e^{−a/√2}.
    pub exp_ratio: f64,
    /// −sin(a/√2 − θ₀).
    pub sine: f64,
    /// P₁ / (ηe^{−a/√2}); positive when the sign claim holds.
    pub p1_scale: f64,
    /// |P₁ − leading| / |leading|.
    pub remainder_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleReport {
    pub params: ExampleParams,
    pub phi_a_norm2: f64,
    /// η‖φ_a‖² + 2Re⟨q₀, φ_a⟩.
    pub constraint_residual: f64,
    /// Line-limit ‖u₀‖² − 4π from a box ladder at the grid spacing.
    pub mass_gap: f64,
    pub p1: f64,
    pub p1_leading_order: f64,
    /// P₁ on the sampling grid, for cross-checks against box computations.
    pub p1_grid: f64,
    pub expansion: P1Expansion,
    pub margins: Margins,
}

fn report(params: ExampleParams, grid: &Grid, u0: &GridFunction) -> Result<ExampleReport> {
    let ExampleParams { a, eta, eps0, .. } = params;
    let norm2 = phi_a_norm2()?;
    let overlap = quad(|x| (q0_value(x) * phi_a_value(a, x).conj()).re, 4.0)?;
    let ladder = BoxLadder::doubling(grid.half_width(), grid.dx())?;
    let limit = line_limit(&ladder, |g| {
        let u = GridFunction::from_fn(g, |x| q0_value(x) + eta * phi_a_value(a, x));
        Ok(vec![g.integrate_real(&u.abs2())])
    })?;
    let expansion = P1Expansion::new(a)?;
    let p1 = expansion.eval(eta);
    let lead = p1_leading_order(a, eta);
    let e = (-a / SQRT_2).exp();
    Ok(ExampleReport {
        params,
        phi_a_norm2: norm2,
        constraint_residual: eta * norm2 + 2.0 * overlap,
        mass_gap: limit.values[0] - 4.0 * PI,
        p1,
        p1_leading_order: lead,
        p1_grid: momentum_p1(u0),
        expansion,
        margins: Margins {
            eta_scale: eta / (e * eps0),
            exp_ratio: (-a).exp() / e,
            sine: -(a / SQRT_2 - theta0()).sin(),
            p1_scale: p1 / (eta * e),
            remainder_ratio: ((p1 - lead) / lead).abs(),
        },
    })
}

/// Samples u₀ and reports mass, momentum and margins.
pub fn build_example(params: ExampleParams, grid: &Grid) -> Result<(GridFunction, ExampleReport)> {
    if !(params.eta > 0.0) {
        return Err(Error::Branch(params.eta));
    }
    let u0 = GridFunction::from_fn(grid, |x| q0_value(x) + params.eta * phi_a_value(params.a, x));
    let r = report(params, grid, &u0)?;
    Ok((u0, r))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct P1Verification {
    pub theta0: f64,
    /// sin θ₀ − 1/√(4+2√2).
    pub theta0_residual: f64,
    /// sin(a/√2 − θ₀) + sin(θ₀ + π/4 + ε₀), which follows from a/√2 + π/4 = 2kπ − ε₀.
    pub phase_residual: f64,
    /// The same identity with −ε₀ inside the sine, as printed in the source.
    pub printed_phase_residual: f64,
    pub p1: f64,
    pub p1_leading_order: f64,
    pub gap: f64,
    pub p1_grid: f64,
}

pub fn verify_p1(params: ExampleParams, grid: &Grid) -> Result<P1Verification> {
    let expansion = P1Expansion::new(params.a)?;
    let p1 = expansion.eval(params.eta);
    let lead = p1_leading_order(params.a, params.eta);
    let u0 = GridFunction::from_fn(grid, |x| q0_value(x) + params.eta * phi_a_value(params.a, x));
    let t = theta0();
    Ok(P1Verification {
        theta0: t,
        theta0_residual: t.sin() - 1.0 / (4.0 + 2.0 * SQRT_2).sqrt(),
        phase_residual: (params.a / SQRT_2 - t).sin() + (t + FRAC_PI_4 + params.eps0).sin(),
        printed_phase_residual: (params.a / SQRT_2 - t).sin() + (t + FRAC_PI_4 - params.eps0).sin(),
        p1,
        p1_leading_order: lead,
        gap: p1 - lead,
        p1_grid: momentum_p1(&u0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapSample {
    pub eps0: f64,
    pub eta: f64,
    pub gap: f64,
}

/// P₁ − leading order along ε₀, ε₀/2, …; returns the samples and the fitted
/// log–log slope of |gap| against η.
pub fn gap_scaling(k: u32, eps0: f64, halvings: usize) -> Result<(Vec<GapSample>, f64)> {
    let mut samples = Vec::with_capacity(halvings + 1);
    for m in 0..=halvings {
        let p = ExampleParams::new(k, eps0 / 2f64.powi(m as i32))?;
        let gap = P1Expansion::new(p.a)?.eval(p.eta) - p1_leading_order(p.a, p.eta);
        samples.push(GapSample { eps0: p.eps0, eta: p.eta, gap });
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.eta.ln(), s.gap.abs().ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok((samples, sxy / sxx))
}

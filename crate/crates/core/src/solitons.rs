//! Ground states φ_{ω,c}, the algebraic soliton Q_c and standing waves q_{ω,c}.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::gmres;
use crate::spectral::{Grid, GridFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    pub omega: f64,
    pub c: f64,
}

impl SolitonParams {
    pub fn new(omega: f64, c: f64) -> Result<Self> {
        if !(c > 0.0) || !omega.is_finite() {
            return Err(Error::Parameter(format!("need c > 0, got c = {c}")));
        }
        if omega < c * c / 4.0 * (1.0 - 1e-14) {
            return Err(Error::Parameter(format!("need omega >= c^2/4, got omega = {omega}, c = {c}")));
        }
        Ok(Self { omega, c })
    }

    /// The boundary case ω = c²/4, whose ground state is Q_c.
    pub fn algebraic(c: f64) -> Result<Self> {
        Self::new(c * c / 4.0, c)
    }

    pub fn is_algebraic(&self) -> bool {
        (self.omega - self.c * self.c / 4.0).abs() <= 1e-14 * self.omega.abs().max(1.0)
    }

    /// √(4ω − c²).
    pub fn kappa(&self) -> f64 {
        (4.0 * self.omega - self.c * self.c).max(0.0).sqrt()
    }

    /// ‖φ_{ω,c}‖₂² = 8·arctan(√((√(4ω)+c)/(√(4ω)−c))); equals 4π at ω = c²/4.
    pub fn mass(&self) -> f64 {
        if self.is_algebraic() {
            return 4.0 * PI;
        }
        let s = (4.0 * self.omega).sqrt();
        8.0 * ((s + self.c) / (s - self.c)).sqrt().atan()
    }

    /// E₁(q_{ω,c}) = −c√(4ω−c²).
    pub fn energy_e1(&self) -> f64 {
        -self.c * self.kappa()
    }

    /// P₁(q_{ω,c}) = 2√(4ω−c²).
    pub fn momentum_p1(&self) -> f64 {
        2.0 * self.kappa()
    }
}

/// Q_c(x) = √(4c/((cx)² + 1)).
pub fn algebraic_profile(c: f64, x: f64) -> f64 {
    (4.0 * c / ((c * x).powi(2) + 1.0)).sqrt()
}

pub fn algebraic_soliton(c: f64, grid: &Grid) -> Result<GridFunction> {
    if !(c > 0.0) {
        return Err(Error::Parameter(format!("need c > 0, got {c}")));
    }
    Ok(GridFunction::from_real_fn(grid, |x| algebraic_profile(c, x)))
}

/// Outcome of the Newton solve for φ_{ω,c}.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub field: GridFunction,
    /// Discrete L² norm of the residual, one entry per Newton iterate.
    pub residual_history: Vec<f64>,
}

/// φ_{ω,c}: the positive even solution of
/// −φ″ + (ω − c²/4)φ + (c/2)φ³ − (3/16)φ⁵ = 0.
pub fn ground_state(params: SolitonParams, grid: &Grid, tolerance: f64) -> Result<GridFunction> {
    solve_ground_state(params, grid, tolerance).map(|g| g.field)
}

/// Damped Newton on the collocated ODE, restricted to even functions.
///
/// Each linear solve is GMRES right-preconditioned by (−∂² + a)⁻¹. The
/// starting guess A·sech(κx/2) has the exact decay rate and the exact peak
/// height A² = 2(c + √(4ω)), read off the first integral at φ′ = 0.
pub fn solve_ground_state(params: SolitonParams, grid: &Grid, tolerance: f64) -> Result<GroundState> {
    if params.is_algebraic() {
        let field = algebraic_soliton(params.c, grid)?;
        let r = ode_residual(params, grid, &field.real_parts());
        return Ok(GroundState { field, residual_history: vec![l2(grid, &r)] });
    }
    let a = params.omega - params.c * params.c / 4.0;
    let c = params.c;
    let mut phi = shooting_guess(a, c, grid);

    let k2: Vec<f64> = grid.wavenumbers().iter().map(|k| k * k).collect();
    let precondition = |v: &[f64]| -> Vec<f64> {
        let mut h = grid.fft(&to_complex(v));
        for (z, kk) in h.iter_mut().zip(&k2) {
            *z /= kk + a;
        }
        grid.ifft_in_place(&mut h);
        h.iter().map(|z| z.re).collect()
    };

    let mut history = Vec::new();
    let mut res = ode_residual(params, grid, &phi);
    let mut rnorm = l2(grid, &res);
    history.push(rnorm);
    let max_iters = 60;
    for _ in 0..max_iters {
        if rnorm <= tolerance {
            return Ok(GroundState {
                field: GridFunction::from_parts(grid, to_complex(&phi)),
                residual_history: history,
            });
        }
        let p2: Vec<f64> = phi.iter().map(|p| p * p).collect();
        let apply = |h: &[f64]| -> Vec<f64> {
            let hxx = grid.diff(&to_complex(h), 2);
            h.iter()
                .zip(&hxx)
                .zip(&p2)
                .map(|((hi, hxx), p2)| -hxx.re + a * hi + 1.5 * c * p2 * hi - 15.0 / 16.0 * p2 * p2 * hi)
                .collect()
        };
        let rhs: Vec<f64> = res.iter().map(|r| -r).collect();
        let (mut delta, _) = gmres(apply, precondition, &rhs, 1e-12, 60, 8);
        symmetrize(&mut delta);

        let mut step = 1.0;
        loop {
            let trial: Vec<f64> = phi.iter().zip(&delta).map(|(p, d)| p + step * d).collect();
            let tr = ode_residual(params, grid, &trial);
            let tn = l2(grid, &tr);
            if tn < rnorm {
                phi = trial;
                res = tr;
                rnorm = tn;
                break;
            }
            step *= 0.5;
            if step < 1e-4 {
                // no descent left: the residual has reached its roundoff floor
                break;
            }
        }
        if step < 1e-4 {
            break;
        }
        symmetrize(&mut phi);
        history.push(rnorm);
    }
    if rnorm <= tolerance {
        return Ok(GroundState { field: GridFunction::from_parts(grid, to_complex(&phi)), residual_history: history });
    }
    Err(Error::NoConvergence { what: "ground state Newton", iterations: max_iters, last: rnorm, history })
}

/// Initial profile: RK4 on φ'' = aφ + ½cφ³ − (3/16)φ⁵ from the turning point
/// φ(0)² = 2(c + √(c² + 4a)), φ'(0) = 0, continued by the linear tail
/// e^{−√a·x} once φ has decayed. The shot rides an unstable separatrix, so it
/// is cut as soon as it stops decreasing.
fn shooting_guess(a: f64, c: f64, grid: &Grid) -> Vec<f64> {
    let peak = (2.0 * (c + (c * c + 4.0 * a).sqrt())).sqrt();
    let force = |p: f64| a * p + 0.5 * c * p.powi(3) - 3.0 / 16.0 * p.powi(5);
    let h = grid.dx() / 8.0;
    let (mut p, mut q) = (peak, 0.0);
    let mut samples = vec![peak];
    while p > 1e-4 * peak && (samples.len() as f64) * h < grid.half_width() {
        let (k1p, k1q) = (q, force(p));
        let (k2p, k2q) = (q + 0.5 * h * k1q, force(p + 0.5 * h * k1p));
        let (k3p, k3q) = (q + 0.5 * h * k2q, force(p + 0.5 * h * k2p));
        let (k4p, k4q) = (q + h * k3q, force(p + h * k3p));
        let next = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        if !(next > 0.0 && next < p && q < 0.0) {
            break;
        }
        p = next;
        samples.push(p);
    }
    let reach = (samples.len() - 1) as f64 * h;
    let last = *samples.last().expect("non-empty");
    grid.nodes()
        .iter()
        .map(|&x| {
            let t = x.abs();
            if t >= reach {
                last * (-a.sqrt() * (t - reach)).exp()
            } else {
                let s = t / h;
                let i = s.floor() as usize;
                let f = s - i as f64;
                samples[i] * (1.0 - f) + samples[(i + 1).min(samples.len() - 1)] * f
            }
        })
        .collect()
}

/// Left side of the profile ODE evaluated with spectral derivatives.
pub fn ode_residual(params: SolitonParams, grid: &Grid, phi: &[f64]) -> Vec<f64> {
    let a = params.omega - params.c * params.c / 4.0;
    let pxx = grid.diff(&to_complex(phi), 2);
    phi.iter()
        .zip(&pxx)
        .map(|(p, d)| -d.re + a * p + 0.5 * params.c * p.powi(3) - 3.0 / 16.0 * p.powi(5))
        .collect()
}

fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn l2(grid: &Grid, v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() * grid.dx()).sqrt()
}

/// Even part under x ↦ −x; on the periodic grid node j reflects to N − j.
fn symmetrize(v: &mut [f64]) {
    let n = v.len();
    for j in 1..n / 2 {
        let m = 0.5 * (v[j] + v[n - j]);
        v[j] = m;
        v[n - j] = m;
    }
}

/// q_{ω,c}(t, x) = φ(x+ct)·exp(iωt − i(c/2)(x+ct) + i(3/4)∫_{−L}^{x+ct} φ²).
///
/// The phase integral starts at −L instead of −∞; the constant offset is
/// invisible to every gauge-invariant functional.
pub fn standing_wave(params: SolitonParams, t: f64, grid: &Grid) -> Result<GridFunction> {
    let phi = if params.is_algebraic() {
        algebraic_soliton(params.c, grid)?
    } else {
        ground_state(params, grid, 1e-10)?
    };
    Ok(standing_wave_from_profile(params, &phi.real_parts(), t, grid))
}

/// As [`standing_wave`], for a profile already sampled on `grid`.
pub fn standing_wave_from_profile(params: SolitonParams, phi: &[f64], t: f64, grid: &Grid) -> GridFunction {
    let s = params.c * t;
    let density: Vec<f64> = phi.iter().map(|p| p * p).collect();
    let phase_integral = grid.antiderivative_at(&density, s);
    let shifted: Vec<f64> = if s == 0.0 {
        phi.to_vec()
    } else if params.is_algebraic() {
        grid.nodes().iter().map(|&x| algebraic_profile(params.c, x + s)).collect()
    } else {
        let mut h = grid.fft(&to_complex(phi));
        for (j, z) in h.iter_mut().enumerate() {
            *z *= Complex64::from_polar(1.0, grid.wavenumber(j) * s);
        }
        grid.ifft_in_place(&mut h);
        h.iter().map(|z| z.re).collect()
    };
    let values = (0..grid.len())
        .map(|j| {
            let y = grid.x(j) + s;
            let theta = params.omega * t - 0.5 * params.c * y + 0.75 * phase_integral[j];
            Complex64::from_polar(shifted[j], theta)
        })
        .collect();
    GridFunction::from_parts(grid, values)
}

/// Net phase gained across [−L, L] by G_ν q_{c²/4,c}:
/// −cL + (3/4 − ν/2)·∫_{−L}^{L} Q_c² with ∫ Q_c² = 8·arctan(cL).
///
/// Boxes where this is a multiple of 2π make the sampled field continuous
/// across the periodic seam.
pub fn algebraic_phase_winding(c: f64, nu: f64, half_width: f64) -> f64 {
    -c * half_width + (0.75 - 0.5 * nu) * 8.0 * (c * half_width).atan()
}

/// The eleven tabulated moments of Q_c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MomentKind {
    L2,
    L4,
    L6,
    L8,
    L10,
    L12,
    /// ‖∂ₓQ‖₂²
    Dx,
    /// ‖Q∂ₓQ‖₂²
    QDx,
    /// ‖Q²∂ₓQ‖₂²
    Q2Dx,
    /// ‖Q³∂ₓQ‖₂²
    Q3Dx,
    /// ‖∂ₓQ‖₄⁴
    DxL4,
}

impl MomentKind {
    pub const ALL: [MomentKind; 11] = [
        MomentKind::L2,
        MomentKind::L4,
        MomentKind::L6,
        MomentKind::L8,
        MomentKind::L10,
        MomentKind::L12,
        MomentKind::Dx,
        MomentKind::QDx,
        MomentKind::Q2Dx,
        MomentKind::Q3Dx,
        MomentKind::DxL4,
    ];

    /// (coefficient of π at c = 1, power of c).
    fn table(self) -> (f64, i32) {
        match self {
            MomentKind::L2 => (4.0, 0),
            MomentKind::L4 => (8.0, 1),
            MomentKind::L6 => (24.0, 2),
            MomentKind::L8 => (80.0, 3),
            MomentKind::L10 => (280.0, 4),
            MomentKind::L12 => (1008.0, 5),
            MomentKind::Dx => (0.5, 2),
            MomentKind::QDx => (1.0, 3),
            MomentKind::Q2Dx => (2.5, 4),
            MomentKind::Q3Dx => (7.0, 5),
            MomentKind::DxL4 => (3.0 / 16.0, 5),
        }
    }

    /// The same moment computed from samples q and q′.
    pub fn of_samples(self, grid: &Grid, q: &[f64], qx: &[f64]) -> f64 {
        let s: f64 = match self {
            MomentKind::L2 => q.iter().map(|v| v.powi(2)).sum(),
            MomentKind::L4 => q.iter().map(|v| v.powi(4)).sum(),
            MomentKind::L6 => q.iter().map(|v| v.powi(6)).sum(),
            MomentKind::L8 => q.iter().map(|v| v.powi(8)).sum(),
            MomentKind::L10 => q.iter().map(|v| v.powi(10)).sum(),
            MomentKind::L12 => q.iter().map(|v| v.powi(12)).sum(),
            MomentKind::Dx => qx.iter().map(|d| d * d).sum(),
            MomentKind::QDx => q.iter().zip(qx).map(|(v, d)| (v * d).powi(2)).sum(),
            MomentKind::Q2Dx => q.iter().zip(qx).map(|(v, d)| (v * v * d).powi(2)).sum(),
            MomentKind::Q3Dx => q.iter().zip(qx).map(|(v, d)| (v.powi(3) * d).powi(2)).sum(),
            MomentKind::DxL4 => qx.iter().map(|d| d.powi(4)).sum(),
        };
        s * grid.dx()
    }
}

impl fmt::Display for MomentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MomentKind::L2 => "L2",
            MomentKind::L4 => "L4",
            MomentKind::L6 => "L6",
            MomentKind::L8 => "L8",
            MomentKind::L10 => "L10",
            MomentKind::L12 => "L12",
            MomentKind::Dx => "dx",
            MomentKind::QDx => "q-dx",
            MomentKind::Q2Dx => "q2-dx",
            MomentKind::Q3Dx => "q3-dx",
            MomentKind::DxL4 => "dx-L4",
        };
        f.write_str(s)
    }
}

impl FromStr for MomentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MomentKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown moment selector {s:?}")))
    }
}

/// Closed-form moment of Q_c from the tabulated values.
pub fn soliton_moment(c: f64, kind: MomentKind) -> f64 {
    let (coef, power) = kind.table();
    coef * c.powi(power) * PI
}

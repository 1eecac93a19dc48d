//! Conserved functionals of the derivative NLS and its gauged forms, plus the
//! scalar quantities built from them (K_c, the GN ratio, the X ratio and the
//! blow-up barrier).
//!
//! Every functional is a literal transcription of its display: spectral
//! derivatives, physical-space products, ⟨f, g⟩ = ∫ f ḡ dx. No integration by
//! parts is applied.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spectral::{Grid, GridFunction};

/// Sharp Gagliardo–Nirenberg constant 3^{1/6}(2π)^{−1/9}.
pub fn c_gn() -> f64 {
    3f64.powf(1.0 / 6.0) * (2.0 * PI).powf(-1.0 / 9.0)
}

/// X₀ = 2^{3/2}·3^{−1/2}·π^{1/2}, the value of the X ratio on Q_c.
pub fn x0() -> f64 {
    2f64.powf(1.5) / 3f64.sqrt() * PI.sqrt()
}

/// α₀ = 2^{−5/2}·3^{−1/2}·π^{−1/2}.
pub fn alpha0() -> f64 {
    2f64.powf(-2.5) / 3f64.sqrt() / PI.sqrt()
}

/// Field with its first two derivatives and |u|², shared by the functionals.
pub(crate) struct Jet<'a> {
    pub grid: &'a Grid,
    pub u: &'a [Complex64],
    pub ux: Vec<Complex64>,
    pub uxx: Vec<Complex64>,
    pub a2: Vec<f64>,
}

impl<'a> Jet<'a> {
    pub fn new(f: &'a GridFunction) -> Self {
        let grid = f.grid();
        let u = f.values();
        Self { grid, u, ux: grid.diff(u, 1), uxx: grid.diff(u, 2), a2: f.abs2() }
    }

    fn ip(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        self.grid.inner(f, g)
    }

    fn int(&self, f: impl Iterator<Item = f64>) -> f64 {
        f.sum::<f64>() * self.grid.dx()
    }

    fn norm_pow(&self, p: i32) -> f64 {
        self.int(self.a2.iter().map(|a| a.powi(p / 2)))
    }

    fn times(&self, w: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
        (0..self.u.len()).map(w).collect()
    }

    pub fn mass(&self) -> f64 {
        self.norm_pow(2)
    }

    /// ‖∂u‖² − (3/2)Im⟨∂u, |u|²u⟩ + (1/2)‖u‖₆⁶.
    pub fn e1(&self) -> f64 {
        let a2u = self.times(|j| self.u[j] * self.a2[j]);
        self.ip(&self.ux, &self.ux).re - 1.5 * self.ip(&self.ux, &a2u).im + 0.5 * self.norm_pow(6)
    }

    /// Im⟨∂u, u⟩ − (1/2)‖u‖₄⁴.
    pub fn p1(&self) -> f64 {
        self.ip(&self.ux, self.u).im - 0.5 * self.norm_pow(4)
    }

    /// ‖∂²u‖² + (7/8)‖u‖₁₀¹⁰ + (25/2)‖|u|²∂u‖² + 5Re⟨(∂u)², |u|²u²⟩
    /// − 5Im⟨∂²u, |u|²∂u⟩ − (35/8)Im⟨∂u, |u|⁶u⟩.
    pub fn e2(&self) -> f64 {
        let a2ux = self.times(|j| self.ux[j] * self.a2[j]);
        let ux2 = self.times(|j| self.ux[j] * self.ux[j]);
        let a2u2 = self.times(|j| self.u[j] * self.u[j] * self.a2[j]);
        let a6u = self.times(|j| self.u[j] * self.a2[j].powi(3));
        self.ip(&self.uxx, &self.uxx).re + 7.0 / 8.0 * self.norm_pow(10) + 12.5 * self.ip(&a2ux, &a2ux).re
            + 5.0 * self.ip(&ux2, &a2u2).re
            - 5.0 * self.ip(&self.uxx, &a2ux).im
            - 35.0 / 8.0 * self.ip(&self.ux, &a6u).im
    }

    /// (1/2)Im⟨∂²u, ∂u⟩ − (5/16)‖u‖₈⁸ − 2‖u∂u‖² − (1/2)Re⟨(∂u)², u²⟩
    /// + (5/4)Im⟨∂u, |u|⁴u⟩.
    pub fn p2(&self) -> f64 {
        let uux = self.times(|j| self.u[j] * self.ux[j]);
        let ux2 = self.times(|j| self.ux[j] * self.ux[j]);
        let u2 = self.times(|j| self.u[j] * self.u[j]);
        let a4u = self.times(|j| self.u[j] * self.a2[j] * self.a2[j]);
        0.5 * self.ip(&self.uxx, &self.ux).im - 5.0 / 16.0 * self.norm_pow(8) - 2.0 * self.ip(&uux, &uux).re
            - 0.5 * self.ip(&ux2, &u2).re
            + 1.25 * self.ip(&self.ux, &a4u).im
    }

    /// Largest imaginary part among the inner products that enter as norms
    /// (⟨f, f⟩ terms); these must vanish for the functionals to be real.
    pub fn imaginary_residual(&self) -> f64 {
        let a2ux = self.times(|j| self.ux[j] * self.a2[j]);
        let uux = self.times(|j| self.u[j] * self.ux[j]);
        [
            self.ip(&self.ux, &self.ux).im,
            self.ip(&self.uxx, &self.uxx).im,
            self.ip(&a2ux, &a2ux).im,
            self.ip(&uux, &uux).im,
        ]
        .into_iter()
        .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// The gauged quintuple (ℳ, ℰ₁ν, 𝒫₁ν, ℰ₂ν, 𝒫₂ν).
    pub fn gauged(&self, nu: f64) -> Conserved {
        let dx = self.grid.dx();
        let im_vbar_vx: Vec<f64> = (0..self.u.len()).map(|j| (self.u[j].conj() * self.ux[j]).im).collect();
        let e1 = self.ip(&self.ux, &self.ux).re
            + dx * (0..self.u.len())
                .map(|j| {
                    -(1.5 - nu) * self.a2[j] * im_vbar_vx[j] + (2.0 - nu) * (1.0 - nu) / 4.0 * self.a2[j].powi(3)
                })
                .sum::<f64>();
        let p1 = dx * (0..self.u.len()).map(|j| im_vbar_vx[j] - (1.0 - nu) / 2.0 * self.a2[j].powi(2)).sum::<f64>();

        let a2ux = self.times(|j| self.ux[j] * self.a2[j]);
        let ux2 = self.times(|j| self.ux[j] * self.ux[j]);
        let a2u2 = self.times(|j| self.u[j] * self.u[j] * self.a2[j]);
        let u2cux = self.times(|j| self.u[j] * self.u[j] * self.ux[j].conj());
        let a6u = self.times(|j| self.u[j] * self.a2[j].powi(3));
        let e2 = self.e2()
            + nu / 16.0 * (nu.powi(3) - 10.0 * nu * nu + 30.0 * nu - 35.0) * self.norm_pow(10)
            + nu * (4.0 * nu - 15.0) * self.ip(&a2ux, &a2ux).re
            + 2.5 * nu * (nu - 3.0) * self.ip(&ux2, &a2u2).re
            + 3.0 * nu * self.ip(&self.uxx, &a2ux).im
            + nu * self.ip(&self.uxx, &u2cux).im
            + nu / 4.0 * (2.0 * nu * nu - 15.0 * nu + 30.0) * self.ip(&self.ux, &a6u).im;

        let uux = self.times(|j| self.u[j] * self.ux[j]);
        let u2 = self.times(|j| self.u[j] * self.u[j]);
        let a4u = self.times(|j| self.u[j] * self.a2[j] * self.a2[j]);
        let p2 = self.p2()
            + nu / 16.0 * (nu * nu - 6.0 * nu + 10.0) * self.norm_pow(8)
            + 1.25 * nu * self.ip(&uux, &uux).re
            + nu / 2.0 * self.ip(&ux2, &u2).re
            + 3.0 / 8.0 * nu * (nu - 4.0) * self.ip(&self.ux, &a4u).im;

        Conserved { mass: self.mass(), e1, p1, e2, p2 }
    }

    pub fn conserved(&self) -> Conserved {
        Conserved { mass: self.mass(), e1: self.e1(), p1: self.p1(), e2: self.e2(), p2: self.p2() }
    }
}

/// The five explicit conserved quantities (M, E₁, P₁, E₂, P₂), or their gauged
/// counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conserved {
    pub mass: f64,
    pub e1: f64,
    pub p1: f64,
    pub e2: f64,
    pub p2: f64,
}

impl Conserved {
    pub const NAMES: [&'static str; 5] = ["mass", "e1", "p1", "e2", "p2"];

    pub fn to_array(self) -> [f64; 5] {
        [self.mass, self.e1, self.p1, self.e2, self.p2]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self { mass: a[0], e1: a[1], p1: a[2], e2: a[3], p2: a[4] }
    }
}

pub fn mass(u: &GridFunction) -> f64 {
    u.grid().integrate_real(&u.abs2())
}

pub fn energy_e1(u: &GridFunction) -> f64 {
    Jet::new(u).e1()
}

pub fn momentum_p1(u: &GridFunction) -> f64 {
    Jet::new(u).p1()
}

pub fn energy_e2(u: &GridFunction) -> f64 {
    Jet::new(u).e2()
}

pub fn momentum_p2(u: &GridFunction) -> f64 {
    Jet::new(u).p2()
}

pub fn conserved(u: &GridFunction) -> Conserved {
    Jet::new(u).conserved()
}

pub fn gauged_functionals(v: &GridFunction, nu: f64) -> Conserved {
    Jet::new(v).gauged(nu)
}

pub fn imaginary_residual(u: &GridFunction) -> f64 {
    Jet::new(u).imaginary_residual()
}

/// K_c(f) = ‖∂f‖₂² + (c/4)‖f‖₄⁴.
pub fn kc(f: &GridFunction, c: f64) -> f64 {
    let g = f.grid();
    let fx = g.diff(f.values(), 1);
    g.power_integral(&fx, 2.0) + 0.25 * c * g.power_integral(f.values(), 4.0)
}

/// ‖f‖₆ / (‖∂f‖₂^{1/9}·‖f‖₄^{8/9}).
pub fn gn_ratio(f: &GridFunction) -> f64 {
    let g = f.grid();
    let fx = g.diff(f.values(), 1);
    gn_ratio_from(g.power_integral(&fx, 2.0), g.power_integral(f.values(), 4.0), g.power_integral(f.values(), 6.0))
}

/// GN ratio from ‖∂f‖₂², ‖f‖₄⁴ and ‖f‖₆⁶.
pub fn gn_ratio_from(dx2: f64, l4: f64, l6: f64) -> f64 {
    l6.powf(1.0 / 6.0) / (dx2.powf(1.0 / 18.0) * l4.powf(2.0 / 9.0))
}

/// X = ‖v‖₄⁴/‖v‖₆³.
pub fn x_ratio(v: &GridFunction) -> f64 {
    let g = v.grid();
    x_ratio_from(g.power_integral(v.values(), 4.0), g.power_integral(v.values(), 6.0))
}

pub fn x_ratio_from(l4: f64, l6: f64) -> f64 {
    l4 / l6.sqrt()
}

/// The barrier function f(x) = x/4 + C_GN^{−18}/(2α₀x⁴) − (‖v‖₂²/2)α₀ − 1/(32α₀).
pub fn barrier_function(x: f64, mass: f64) -> f64 {
    let a = alpha0();
    x / 4.0 + c_gn().powi(-18) / (2.0 * a * x.powi(4)) - 0.5 * mass * a - 1.0 / (32.0 * a)
}

/// Both sides of the bound f(X)·‖v‖₆³ ≤ ℰ_{1,3/2}(v)/(2α₀‖v‖₆³) + 𝒫_{1,3/2}(v).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Barrier {
    pub left: f64,
    pub right: f64,
}

pub fn barrier(v: &GridFunction) -> Barrier {
    let g = v.grid();
    let jet = Jet::new(v);
    let q = jet.gauged(1.5);
    barrier_from(q.mass, g.power_integral(v.values(), 4.0), g.power_integral(v.values(), 6.0), q.e1, q.p1)
}

/// Barrier from mass, ‖v‖₄⁴, ‖v‖₆⁶, ℰ_{1,3/2} and 𝒫_{1,3/2}.
pub fn barrier_from(mass: f64, l4: f64, l6: f64, e1: f64, p1: f64) -> Barrier {
    let l6_cubed = l6.sqrt();
    let x = x_ratio_from(l4, l6);
    Barrier {
        left: barrier_function(x, mass) * l6_cubed,
        right: e1 / (2.0 * alpha0() * l6_cubed) + p1,
    }
}

/// Time-stamped conserved values with drift relative to a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservedReport {
    pub time: f64,
    pub values: Conserved,
    /// (label n, ∫Z⁽ⁿ⁾) for any generated densities being tracked.
    pub densities: Vec<(u32, [f64; 2])>,
    /// |value(t) − value(0)| / max(1, |value(0)|) per quantity.
    pub drift: [f64; 5],
    pub density_drift: Vec<f64>,
}

impl ConservedReport {
    pub fn new(time: f64, values: Conserved, densities: Vec<(u32, [f64; 2])>, reference: Option<&ConservedReport>) -> Self {
        let (drift, density_drift) = match reference {
            None => ([0.0; 5], vec![0.0; densities.len()]),
            Some(r) => {
                let now = values.to_array();
                let then = r.values.to_array();
                let mut d = [0.0; 5];
                for i in 0..5 {
                    d[i] = (now[i] - then[i]).abs() / then[i].abs().max(1.0);
                }
                let dd = densities
                    .iter()
                    .zip(&r.densities)
                    .map(|((_, a), (_, b))| {
                        let diff = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                        diff / (b[0].hypot(b[1])).max(1.0)
                    })
                    .collect();
                (d, dd)
            }
        };
        Self { time, values, densities, drift, density_drift }
    }

    pub fn max_drift(&self) -> f64 {
        self.drift.iter().chain(&self.density_drift).fold(0.0, |m, v| m.max(*v))
    }
}

/// Primitive integrals of a field, ordered for box-ladder extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Primitives {
    pub mass: f64,
    pub l4: f64,
    pub l6: f64,
    pub dx2: f64,
    pub e1: f64,
    pub p1: f64,
    pub e2: f64,
    pub p2: f64,
    /// ℰ_{1,3/2}, 𝒫_{1,3/2}: the ν = 3/2 gauged energy and momentum of the field itself.
    pub ge1: f64,
    pub gp1: f64,
}

impl Primitives {
    pub const LEN: usize = 10;

    pub fn of(u: &GridFunction) -> Self {
        let jet = Jet::new(u);
        let g = u.grid();
        let c = jet.conserved();
        let gauged = jet.gauged(1.5);
        Self {
            mass: c.mass,
            l4: g.power_integral(u.values(), 4.0),
            l6: g.power_integral(u.values(), 6.0),
            dx2: g.power_integral(&jet.ux, 2.0),
            e1: c.e1,
            p1: c.p1,
            e2: c.e2,
            p2: c.p2,
            ge1: gauged.e1,
            gp1: gauged.p1,
        }
    }

    pub fn to_vec(self) -> Vec<f64> {
        vec![self.mass, self.l4, self.l6, self.dx2, self.e1, self.p1, self.e2, self.p2, self.ge1, self.gp1]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self {
            mass: v[0],
            l4: v[1],
            l6: v[2],
            dx2: v[3],
            e1: v[4],
            p1: v[5],
            e2: v[6],
            p2: v[7],
            ge1: v[8],
            gp1: v[9],
        }
    }

    pub fn gn_ratio(&self) -> f64 {
        gn_ratio_from(self.dx2, self.l4, self.l6)
    }

    pub fn x_ratio(&self) -> f64 {
        x_ratio_from(self.l4, self.l6)
    }

    pub fn barrier(&self) -> Barrier {
        barrier_from(self.mass, self.l4, self.l6, self.ge1, self.gp1)
    }
}

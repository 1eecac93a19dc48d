//! Integrating-factor RK4 for the derivative NLS and its gauged forms.
//!
//! The dispersion i∂ₓ² is integrated exactly in Fourier space; the
//! nonlinearity is advanced in the interaction picture (Lawson RK4).

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::{generate_densities, DensityPolynomial};
use crate::error::{Error, Result};
use crate::functionals::{self, Conserved, ConservedReport};
use crate::gauge::gauge_inverse;
use crate::spectral::{lp_norm, Grid, GridFunction};

/// Fixed dt may not exceed this multiple of dx².
pub const FIXED_DT_SAFETY: f64 = 2.0;
/// Default blow-up threshold relative to the initial ‖v‖₆.
pub const BLOWUP_FACTOR: f64 = 1e3;
pub const DEFAULT_CFL: f64 = 0.05;
pub const MIN_DT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Equation {
    /// i u_t + u_xx = i ∂ₓ(|u|²u).
    Original,
    /// i v_t + v_xx = i(2−ν)|v|²v_x + i(1−ν)v²v̄_x + (ν(1−ν)/4)|v|⁴v.
    Gauged(f64),
}

impl Equation {
    pub fn nu(self) -> f64 {
        match self {
            Equation::Original => 0.0,
            Equation::Gauged(nu) => nu,
        }
    }

    /// Right-side coefficients (i(2−ν), i(1−ν), ν(1−ν)/4) of the i∂ₜ form.
    pub fn coefficients(self) -> [Complex64; 3] {
        let nu = self.nu();
        [
            Complex64::new(0.0, 2.0 - nu),
            Complex64::new(0.0, 1.0 - nu),
            Complex64::new(nu * (1.0 - nu) / 4.0, 0.0),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeStep {
    Fixed(f64),
    /// dt = min(dt_max, cfl·dx / max(1, max|v|²)).
    Adaptive { dt_max: f64, cfl: f64 },
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub equation: Equation,
    pub grid: Grid,
    pub dt: TimeStep,
    pub t_end: f64,
    /// Record a frame every this many steps (plus the final state).
    pub record_every: usize,
    /// Absolute ‖v‖₆ threshold; `None` means 10³ × the initial value.
    pub blowup_threshold: Option<f64>,
    pub dealias: bool,
    /// Track ∫Z⁽ⁿ⁾ for n = 1..=this (0 disables).
    pub track_densities: usize,
    /// Keep field snapshots in the trajectory.
    pub keep_snapshots: bool,
}

impl SimConfig {
    pub fn new(equation: Equation, grid: Grid, dt: f64, t_end: f64) -> Self {
        Self {
            equation,
            grid,
            dt: TimeStep::Fixed(dt),
            t_end,
            record_every: 100,
            blowup_threshold: None,
            dealias: true,
            track_densities: 0,
            keep_snapshots: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return bad(format!("t_end must be finite and nonnegative, got {}", self.t_end));
        }
        if self.record_every == 0 {
            return bad("record_every must be positive".into());
        }
        if let Some(t) = self.blowup_threshold {
            if !(t > 0.0) {
                return bad(format!("blow-up threshold must be positive, got {t}"));
            }
        }
        if !self.equation.nu().is_finite() {
            return bad("gauge parameter must be finite".into());
        }
        if self.track_densities > 8 {
            return bad("at most 8 densities can be tracked".into());
        }
        match self.dt {
            TimeStep::Fixed(dt) => {
                let limit = FIXED_DT_SAFETY * self.grid.dx().powi(2);
                if !(dt > 0.0) {
                    return bad(format!("dt must be positive, got {dt}"));
                }
                if dt > limit {
                    return bad(format!("dt = {dt:e} exceeds {FIXED_DT_SAFETY}·dx² = {limit:e}"));
                }
            }
            TimeStep::Adaptive { dt_max, cfl } => {
                if !(dt_max > 0.0) || !(cfl > 0.0) {
                    return bad("adaptive dt_max and cfl must be positive".into());
                }
            }
        }
        Ok(())
    }
}

/// Precomputed propagators and scratch space for one grid and equation.
pub struct Stepper {
    grid: Grid,
    equation: Equation,
    ik: Vec<Complex64>,
    mask: Vec<f64>,
    k2: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: &Grid, equation: Equation, dealias: bool) -> Self {
        let cutoff = grid.dealias_cutoff();
        let ks = grid.wavenumbers();
        let mask = ks
            .iter()
            .enumerate()
            .map(|(j, k)| {
                if j == grid.nyquist() || (dealias && k.abs() > cutoff) {
                    0.0
                } else {
                    1.0
                }
            })
            .collect();
        Self {
            grid: grid.clone(),
            equation,
            ik: grid.derivative_symbol(1),
            mask,
            k2: ks.iter().map(|k| k * k).collect(),
        }
    }

    /// Fourier transform of the nonlinear right side, masked.
    fn nonlinear_hat(&self, hat: &[Complex64]) -> Vec<Complex64> {
        let u = self.grid.ifft(hat);
        let mut out: Vec<Complex64> = match self.equation {
            Equation::Original => {
                let cubic: Vec<Complex64> = u.iter().map(|z| z * z.norm_sqr()).collect();
                let mut h = self.grid.fft(&cubic);
                for (v, s) in h.iter_mut().zip(&self.ik) {
                    *v *= s;
                }
                h
            }
            Equation::Gauged(nu) => {
                let ux_hat: Vec<Complex64> = hat.iter().zip(&self.ik).map(|(a, b)| a * b).collect();
                let ux = self.grid.ifft(&ux_hat);
                let (a, b, q) = (2.0 - nu, 1.0 - nu, nu * (1.0 - nu) / 4.0);
                let pointwise: Vec<Complex64> = u
                    .iter()
                    .zip(&ux)
                    .map(|(v, vx)| {
                        let m = v.norm_sqr();
                        a * m * vx + b * v * v * vx.conj() - Complex64::new(0.0, q) * m * m * v
                    })
                    .collect();
                self.grid.fft(&pointwise)
            }
        };
        for (v, m) in out.iter_mut().zip(&self.mask) {
            *v *= m;
        }
        out
    }

    /// One Lawson RK4 step of size dt (negative dt runs backwards).
    pub fn step_hat(&self, hat: &[Complex64], dt: f64) -> Vec<Complex64> {
        let e: Vec<Complex64> = self.k2.iter().map(|k2| Complex64::from_polar(1.0, -k2 * dt / 2.0)).collect();
        let n = hat.len();
        let scale = |v: Vec<Complex64>| -> Vec<Complex64> { v.into_iter().map(|z| z * dt).collect() };
        let a = scale(self.nonlinear_hat(hat));
        let s1: Vec<Complex64> = (0..n).map(|j| e[j] * (hat[j] + 0.5 * a[j])).collect();
        let b = scale(self.nonlinear_hat(&s1));
        let s2: Vec<Complex64> = (0..n).map(|j| e[j] * hat[j] + 0.5 * b[j]).collect();
        let c = scale(self.nonlinear_hat(&s2));
        let s3: Vec<Complex64> = (0..n).map(|j| e[j] * e[j] * hat[j] + e[j] * c[j]).collect();
        let d = scale(self.nonlinear_hat(&s3));
        (0..n)
            .map(|j| {
                let e2 = e[j] * e[j];
                e2 * hat[j] + (e2 * a[j] + 2.0 * e[j] * (b[j] + c[j]) + d[j]) / 6.0
            })
            .collect()
    }
}

/// Time derivative ∂ₜu of the chosen equation (dispersion plus nonlinearity).
pub fn rhs(state: &GridFunction, equation: Equation, dealias: bool) -> GridFunction {
    let grid = state.grid();
    let stepper = Stepper::new(grid, equation, dealias);
    let hat = grid.fft(state.values());
    let mut total = stepper.nonlinear_hat(&hat);
    for ((t, h), k2) in total.iter_mut().zip(&hat).zip(&stepper.k2) {
        *t += Complex64::new(0.0, -k2) * h;
    }
    GridFunction::from_parts(grid, grid.ifft(&total))
}

/// One IF-RK4 step; a non-finite result is returned as a terminal state.
pub fn step(state: &GridFunction, dt: f64, equation: Equation) -> Result<GridFunction> {
    if !(dt.abs() > 0.0) {
        return Err(Error::Parameter(format!("dt must be nonzero, got {dt}")));
    }
    let grid = state.grid();
    let stepper = Stepper::new(grid, equation, true);
    let next = grid.ifft(&stepper.step_hat(&grid.fft(state.values()), dt));
    Ok(finish(grid, next))
}

fn finish(grid: &Grid, values: Vec<Complex64>) -> GridFunction {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        GridFunction::from_parts(grid, values)
    } else {
        GridFunction::terminal(grid.clone(), values)
    }
}

/// Share of spectral energy in the top third of the resolved modes.
pub fn spectral_tail_fraction(f: &GridFunction) -> f64 {
    let grid = f.grid();
    let h = grid.fft(f.values());
    let cutoff = grid.dealias_cutoff();
    let mut tail = 0.0;
    let mut total = 0.0;
    for (j, z) in h.iter().enumerate() {
        let e = z.norm_sqr();
        total += e;
        if grid.wavenumber(j).abs() > cutoff {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    Completed,
    BlowUp { time: f64, l6: f64, threshold: f64 },
    NonFinite { time: f64 },
    DtUnderflow { time: f64, dt: f64 },
}

#[derive(Debug, Clone)]
pub struct Frame {
    pub time: f64,
    pub snapshot: Option<GridFunction>,
    pub report: ConservedReport,
    pub l6: f64,
    pub tail_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub equation: Equation,
    pub frames: Vec<Frame>,
    pub termination: Termination,
    /// Last finite state reached.
    pub last_state: GridFunction,
    pub steps: usize,
}

impl Trajectory {
    pub fn max_drift(&self) -> [f64; 5] {
        let mut m = [0.0f64; 5];
        for f in &self.frames {
            for (a, b) in m.iter_mut().zip(f.report.drift) {
                *a = a.max(b);
            }
        }
        m
    }

    pub fn max_density_drift(&self) -> f64 {
        self.frames.iter().flat_map(|f| f.report.density_drift.iter().copied()).fold(0.0, f64::max)
    }

    /// time, conserved values, drifts, ‖v‖₆ and tail fraction per frame.
    pub fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        let mut header = vec!["time".to_string()];
        header.extend(Conserved::NAMES.iter().map(|s| s.to_string()));
        header.extend(Conserved::NAMES.iter().map(|s| format!("drift_{s}")));
        if let Some(f) = self.frames.first() {
            for (n, _) in &f.report.densities {
                header.push(format!("re_z{n}"));
                header.push(format!("im_z{n}"));
            }
        }
        header.push("l6".into());
        header.push("tail_fraction".into());
        writeln!(out, "{}", header.join(","))?;
        for f in &self.frames {
            let mut row = vec![f.time];
            row.extend(f.report.values.to_array());
            row.extend(f.report.drift);
            for (_, z) in &f.report.densities {
                row.extend(z);
            }
            row.push(f.l6);
            row.push(f.tail_fraction);
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// x, Re v, Im v columns.
pub fn write_snapshot(f: &GridFunction, out: &mut impl Write) -> Result<()> {
    writeln!(out, "x,re,im")?;
    for (j, z) in f.values().iter().enumerate() {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", f.grid().x(j), z.re, z.im)?;
    }
    Ok(())
}

struct Monitor {
    equation: Equation,
    densities: Vec<DensityPolynomial>,
}

impl Monitor {
    fn report(&self, time: f64, v: &GridFunction, reference: Option<&ConservedReport>) -> Result<ConservedReport> {
        let values = match self.equation {
            Equation::Original => functionals::conserved(v),
            Equation::Gauged(nu) => functionals::gauged_functionals(v, nu),
        };
        let mut dens = Vec::with_capacity(self.densities.len());
        if !self.densities.is_empty() {
            let u = match self.equation {
                Equation::Original => v.clone(),
                Equation::Gauged(nu) => gauge_inverse(v, nu)?,
            };
            for (n, z) in self.densities.iter().enumerate() {
                let iz = u.grid().integrate(z.evaluate_on_grid(&u)?.values());
                dens.push((n as u32 + 1, [iz.re, iz.im]));
            }
        }
        Ok(ConservedReport::new(time, values, dens, reference))
    }
}

pub fn simulate(config: &SimConfig, initial: &GridFunction) -> Result<Trajectory> {
    config.validate()?;
    if initial.grid() != &config.grid {
        return Err(Error::Config("initial data lives on a different grid".into()));
    }
    if !initial.is_finite() {
        return Err(Error::NonFinite);
    }
    let grid = &config.grid;
    let stepper = Stepper::new(grid, config.equation, config.dealias);
    let monitor = Monitor {
        equation: config.equation,
        densities: if config.track_densities > 0 { generate_densities(config.track_densities)? } else { Vec::new() },
    };
    let l6_0 = lp_norm(initial, 6.0)?;
    let threshold = config.blowup_threshold.unwrap_or(BLOWUP_FACTOR * l6_0);

    let frame = |time: f64, v: &GridFunction, reference: Option<&ConservedReport>| -> Result<Frame> {
        Ok(Frame {
            time,
            snapshot: config.keep_snapshots.then(|| v.clone()),
            report: monitor.report(time, v, reference)?,
            l6: lp_norm(v, 6.0)?,
            tail_fraction: spectral_tail_fraction(v),
        })
    };

    let first = frame(0.0, initial, None)?;
    let reference = first.report.clone();
    let mut frames = vec![first];
    let mut hat = grid.fft(initial.values());
    let mut state = initial.clone();
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut termination = Termination::Completed;
    let eps = 1e-12 * config.t_end.max(1.0);

    while t < config.t_end - eps {
        let mut dt = match config.dt {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Adaptive { dt_max, cfl } => {
                let peak = state.abs2().into_iter().fold(0.0, f64::max);
                dt_max.min(cfl * grid.dx() / peak.max(1.0))
            }
        };
        if dt < MIN_DT {
            termination = Termination::DtUnderflow { time: t, dt };
            break;
        }
        dt = dt.min(config.t_end - t);
        let next_hat = stepper.step_hat(&hat, dt);
        let values = grid.ifft(&next_hat);
        let next = finish(grid, values);
        if next.is_terminal() {
            termination = Termination::NonFinite { time: t + dt };
            break;
        }
        hat = next_hat;
        state = next;
        t += dt;
        steps += 1;
        let l6 = lp_norm(&state, 6.0)?;
        let done = t >= config.t_end - eps;
        if l6 > threshold {
            frames.push(frame(t, &state, Some(&reference))?);
            termination = Termination::BlowUp { time: t, l6, threshold };
            break;
        }
        if steps.is_multiple_of(config.record_every) || done {
            frames.push(frame(t, &state, Some(&reference))?);
        }
    }
    Ok(Trajectory { equation: config.equation, frames, termination, last_state: state, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_at_nu_two() {
        let [a, b, q] = Equation::Gauged(2.0).coefficients();
        assert_eq!(a, Complex64::new(0.0, 0.0));
        assert_eq!(b, Complex64::new(0.0, -1.0));
        assert_eq!(q, Complex64::new(-0.5, 0.0));
        let [a, b, q] = Equation::Gauged(1.5).coefficients();
        assert_eq!((a.im, b.im, q.re), (0.5, -0.5, -3.0 / 16.0));
    }

    #[test]
    fn zero_state_has_zero_rhs() {
        let g = Grid::new(10.0, 64).unwrap();
        let z = GridFunction::zeros(&g);
        for eq in [Equation::Original, Equation::Gauged(1.5)] {
            assert!(rhs(&z, eq, true).values().iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn linear_mode_is_propagated_exactly() {
        let g = Grid::new(std::f64::consts::PI, 32).unwrap();
        let amp = 1e-6;
        let u = GridFunction::from_fn(&g, |x| Complex64::from_polar(amp, 3.0 * x));
        let v = step(&u, 0.1, Equation::Original).unwrap();
        // |u|²u is constant in x for a single mode, so its derivative vanishes.
        let expect = GridFunction::from_fn(&g, |x| Complex64::from_polar(amp, 3.0 * x - 0.9));
        assert!(v.max_abs_diff(&expect) < 1e-18);
    }

    #[test]
    fn oversized_fixed_step_is_rejected() {
        let g = Grid::new(10.0, 64).unwrap();
        let cfg = SimConfig::new(Equation::Original, g.clone(), 1.0, 1.0);
        assert!(matches!(simulate(&cfg, &GridFunction::zeros(&g)), Err(Error::Config(_))));
    }
}

//! Box-size extrapolation to the line limit.
//!
//! Fields that decay only algebraically (Q_c ~ 2/|x|) leave O(1/L) truncation
//! errors in every box integral. Evaluating the same primitive integrals on a
//! ladder of boxes with equal spacing and fitting
//!
//!   F(L) = F∞ + a₁/L + a₃/L³ + a₄/L⁴ + a₅/L⁵
//!
//! removes them. For Q_c-type integrands the tail expansion has no 1/L² term.
//! Nonlinear derived quantities (ratios, roots) must be formed from the
//! extrapolated primitives, not extrapolated themselves.

use std::f64::consts::PI;

use super::Grid;
use crate::error::{Error, Result};
use crate::linalg::solve_dense;

/// Exponents of the truncation-error model.
pub const TAIL_EXPONENTS: [i32; 4] = [1, 3, 4, 5];

#[derive(Debug, Clone)]
pub struct BoxLadder {
    grids: Vec<Grid>,
}

impl BoxLadder {
    /// Boxes L₀·2^m, m = 0..=4, at fixed spacing `dx`.
    pub fn doubling(l0: f64, dx: f64) -> Result<Self> {
        Self::from_half_widths((0..5).map(|m| l0 * 2f64.powi(m)).collect(), dx)
    }

    /// Like [`Self::doubling`], but each L is moved to the nearest root of
    /// `mismatch(L) ∈ 2πℤ`, so that a field whose phase winds by mismatch(L)
    /// across the box is continuous at the periodic seam.
    pub fn phase_matched(l0: f64, dx: f64, mismatch: impl Fn(f64) -> f64) -> Result<Self> {
        let mut half_widths = Vec::with_capacity(5);
        for m in 0..5 {
            let target = l0 * 2f64.powi(m);
            half_widths.push(nearest_phase_root(target, &mismatch)?);
        }
        Self::from_half_widths(half_widths, dx)
    }

    pub fn from_half_widths(half_widths: Vec<f64>, dx: f64) -> Result<Self> {
        if half_widths.len() != TAIL_EXPONENTS.len() + 1 {
            return Err(Error::Parameter(format!(
                "ladder needs {} boxes, got {}",
                TAIL_EXPONENTS.len() + 1,
                half_widths.len()
            )));
        }
        let grids = half_widths
            .into_iter()
            .map(|l| Grid::new(l, 2 * (l / dx).round() as usize))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grids })
    }

    pub fn grids(&self) -> &[Grid] {
        &self.grids
    }
}

/// Root of mismatch(L) − 2πm nearest to `target`, by bisection on the
/// bracket between the two neighbouring multiples.
fn nearest_phase_root(target: f64, mismatch: &impl Fn(f64) -> f64) -> Result<f64> {
    let m = (mismatch(target) / (2.0 * PI)).round();
    let g = |l: f64| mismatch(l) - 2.0 * PI * m;
    let mut step = 0.5;
    let (mut lo, mut hi) = (target, target);
    while g(lo).signum() == g(hi).signum() {
        lo = (target - step).max(1e-3);
        hi = target + step;
        step *= 2.0;
        if step > target {
            return Err(Error::Parameter(format!("no phase-matched box near L = {target}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == g(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone)]
pub struct LineLimit {
    /// Extrapolated values, one per primitive.
    pub values: Vec<f64>,
    /// Raw values per box (outer index: ladder level).
    pub raw: Vec<Vec<f64>>,
    pub half_widths: Vec<f64>,
}

impl LineLimit {
    /// Spread between the extrapolation and the raw finest-box value.
    pub fn correction(&self, i: usize) -> f64 {
        self.values[i] - self.raw.last().expect("non-empty ladder")[i]
    }
}

/// Evaluates `primitives` on every box and extrapolates each component.
pub fn line_limit(ladder: &BoxLadder, primitives: impl Fn(&Grid) -> Result<Vec<f64>>) -> Result<LineLimit> {
    let raw = ladder.grids.iter().map(&primitives).collect::<Result<Vec<_>>>()?;
    let half_widths: Vec<f64> = ladder.grids.iter().map(Grid::half_width).collect();
    let width = raw[0].len();
    if raw.iter().any(|r| r.len() != width) {
        return Err(Error::Parameter("primitive count changed across the ladder".into()));
    }
    let rows: Vec<Vec<f64>> = half_widths
        .iter()
        .map(|&l| {
            std::iter::once(1.0)
                .chain(TAIL_EXPONENTS.iter().map(|&p| l.powi(-p)))
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(width);
    for i in 0..width {
        let rhs: Vec<f64> = raw.iter().map(|r| r[i]).collect();
        values.push(solve_dense(rows.clone(), rhs)?[0]);
    }
    Ok(LineLimit { values, raw, half_widths })
}

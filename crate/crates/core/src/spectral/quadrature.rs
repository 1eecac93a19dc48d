//! Globally adaptive Gauss–Kronrod (10/21) quadrature over the line.
//!
//! The line is truncated to [−X, X] and the discarded tails are bounded by an
//! algebraic envelope |f(x)| ≤ C|x|^{−p}. X grows until the tail bound is below
//! a tenth of the requested tolerance.

// Tabulated nodes and weights are kept to the digits they were published with.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208025432993,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

const MAX_PANELS: usize = 1 << 21;
const MAX_HALF_WIDTH: f64 = 1.0e7;

/// Envelope |f(x)| ≤ constant·|x|^{−power} valid for |x| ≥ the truncation point.
#[derive(Debug, Clone, Copy)]
pub enum TailModel {
    /// Fixed envelope supplied by the caller.
    Known { constant: f64, power: f64 },
    /// Power given; constant estimated by sampling |f|·|x|^p on [X, 16X], doubled.
    Sampled { power: f64 },
}

impl Default for TailModel {
    fn default() -> Self {
        TailModel::Sampled { power: 2.0 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: f64,
    /// Interior error estimate plus tail bound.
    pub error_bound: f64,
    pub tail_bound: f64,
    pub truncation: f64,
    pub panels: usize,
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[10] * fc;
    let mut g = 0.0;
    for i in 0..10 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Panel { a, b, value: k * h, error: ((k - g) * h).abs() }
}

fn tail_bound<F: Fn(f64) -> f64>(f: &F, x: f64, model: TailModel) -> f64 {
    let (constant, power) = match model {
        TailModel::Known { constant, power } => (constant, power),
        TailModel::Sampled { power } => {
            let samples = 4096;
            let mut c: f64 = 0.0;
            for i in 0..=samples {
                let t = x * 16f64.powf(i as f64 / samples as f64);
                let env = f(t).abs().max(f(-t).abs()) * t.powf(power);
                c = c.max(env);
            }
            (2.0 * c, power)
        }
    };
    2.0 * constant * x.powf(1.0 - power) / (power - 1.0)
}

/// ∫_ℝ f with the default x^{−2} envelope; absolute error ≤ `tolerance`.
pub fn line_quadrature<F: Fn(f64) -> f64>(integrand: F, tolerance: f64) -> Result<QuadratureResult> {
    line_quadrature_with(integrand, tolerance, TailModel::default())
}

pub fn line_quadrature_with<F: Fn(f64) -> f64>(
    integrand: F,
    tolerance: f64,
    tail: TailModel,
) -> Result<QuadratureResult> {
    let power = match tail {
        TailModel::Known { power, .. } | TailModel::Sampled { power } => power,
    };
    if !(tolerance > 0.0) || !(power > 1.0) {
        return Err(Error::Parameter("tolerance and tail power must exceed 0 and 1".into()));
    }
    let mut x = 32.0;
    let mut tb = tail_bound(&integrand, x, tail);
    while tb > 0.1 * tolerance {
        x *= 2.0;
        if x > MAX_HALF_WIDTH {
            return Err(Error::Quadrature { estimate: f64::NAN, bound: tb });
        }
        tb = tail_bound(&integrand, x, tail);
    }

    let budget = tolerance - tb;
    let initial = ((2.0 * x).ceil() as usize).clamp(16, MAX_PANELS / 4);
    let width = 2.0 * x / initial as f64;
    let mut heap = BinaryHeap::with_capacity(2 * initial);
    let mut total = 0.0;
    let mut err = 0.0;
    for i in 0..initial {
        let a = -x + i as f64 * width;
        let p = kronrod(&integrand, a, a + width);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    while err > budget {
        if heap.len() >= MAX_PANELS {
            return Err(Error::Quadrature { estimate: total, bound: err + tb });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(&integrand, worst.a, mid);
        let right = kronrod(&integrand, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if heap.len() % 4096 == 0 {
            // guard against drift in the running sums
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let interior: f64 = heap.iter().map(|p| p.error).sum();
    Ok(QuadratureResult {
        value,
        error_bound: interior + tb,
        tail_bound: tb,
        truncation: x,
        panels: heap.len(),
    })
}

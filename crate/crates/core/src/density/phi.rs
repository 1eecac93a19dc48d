//! Polynomials in φ = Q₁ and φ_x, and the substitution q = φ·e^{iΘ}.
//!
//! Along the c = 1 algebraic soliton q₀ = φ·e^{iΘ} with Θ' = −½ + ¾φ², every
//! derivative q_n is A_n·e^{iΘ} where A₀ = φ and A_{n+1} = ∂A_n + iΘ'A_n.
//! On φ-polynomials ∂ acts by φ ↦ φ_x and φ_x ↦ ½φ³ − (3/16)φ⁵. Balanced
//! monomials (equal numbers of q and r factors) lose the phase, so any
//! density maps to a polynomial in φ, φ_x.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{
    coefficient, format_coefficient, imag_coefficient, parse_coefficient, real_coefficient,
    Coefficient, DensityPolynomial, Rational, Symbol,
};
use crate::error::{Error, Result};

/// φ^phi · φ_x^phi_x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhiMonomial {
    pub phi_x: u32,
    pub phi: u32,
}

impl PhiMonomial {
    pub fn new(phi: u32, phi_x: u32) -> Self {
        Self { phi, phi_x }
    }
}

impl fmt::Display for PhiMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.phi {
            0 => {}
            1 => parts.push("φ".to_string()),
            p => parts.push(format!("φ^{p}")),
        }
        match self.phi_x {
            0 => {}
            1 => parts.push("φ_x".to_string()),
            p => parts.push(format!("φ_x^{p}")),
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

/// Sorted by φ_x-degree, then φ-degree.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PhiPolynomial {
    terms: BTreeMap<PhiMonomial, Coefficient>,
}

impl fmt::Debug for PhiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PhiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "  0");
        }
        for (m, c) in &self.terms {
            writeln!(f, "  {} * {}", format_coefficient(c), m)?;
        }
        Ok(())
    }
}

impl PhiPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Coefficient) -> Self {
        Self::term(c, 0, 0)
    }

    pub fn term(c: Coefficient, phi: u32, phi_x: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(PhiMonomial::new(phi, phi_x), c);
        p
    }

    pub fn phi() -> Self {
        Self::term(Coefficient::one(), 1, 0)
    }

    pub fn phi_x() -> Self {
        Self::term(Coefficient::one(), 0, 1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PhiMonomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient_of(&self, phi: u32, phi_x: u32) -> Coefficient {
        self.terms.get(&PhiMonomial::new(phi, phi_x)).cloned().unwrap_or_else(Coefficient::zero)
    }

    pub fn max_phi_x_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.phi_x).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: PhiMonomial, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&m) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(*m, c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&real_coefficient(-1, 1)))
    }

    pub fn scale(&self, s: &Coefficient) -> Self {
        let mut p = Self::zero();
        for (m, c) in &self.terms {
            p.add_term(*m, c.clone() * s.clone());
        }
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                p.add_term(PhiMonomial::new(ma.phi + mb.phi, ma.phi_x + mb.phi_x), ca.clone() * cb.clone());
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(Coefficient::one()), |acc, _| acc.mul(self))
    }

    pub fn conj(&self) -> Self {
        let mut p = Self::zero();
        for (m, c) in &self.terms {
            p.add_term(*m, c.conj());
        }
        p
    }

    pub fn re(&self) -> Self {
        let mut p = Self::zero();
        for (m, c) in &self.terms {
            p.add_term(*m, coefficient(c.re.clone(), Rational::zero()));
        }
        p
    }

    /// Imaginary part as a real polynomial.
    pub fn im(&self) -> Self {
        let mut p = Self::zero();
        for (m, c) in &self.terms {
            p.add_term(*m, coefficient(c.im.clone(), Rational::zero()));
        }
        p
    }

    /// d/dx along the soliton, using φ'' = ½φ³ − (3/16)φ⁵.
    pub fn derivative(&self) -> Self {
        let phi_xx = Self::term(real_coefficient(1, 2), 3, 0).add(&Self::term(real_coefficient(-3, 16), 5, 0));
        let mut p = Self::zero();
        for (m, c) in &self.terms {
            if m.phi > 0 {
                p.add_term(PhiMonomial::new(m.phi - 1, m.phi_x + 1), c.clone() * real_coefficient(m.phi as i64, 1));
            }
            if m.phi_x > 0 {
                let rest = Self::term(c.clone() * real_coefficient(m.phi_x as i64, 1), m.phi, m.phi_x - 1);
                p = p.add(&rest.mul(&phi_xx));
            }
        }
        p
    }

    /// Eliminates φ_x² with the first integral φ_x² = φ⁴/4 − φ⁶/16.
    pub fn reduce(&self) -> Self {
        let sq = Self::term(real_coefficient(1, 4), 4, 0).add(&Self::term(real_coefficient(-1, 16), 6, 0));
        let mut p = Self::zero();
        for (m, c) in &self.terms {
            let base = Self::term(c.clone(), m.phi, m.phi_x % 2);
            p = p.add(&base.mul(&sq.pow(m.phi_x / 2)));
        }
        p
    }

    /// Exact division by φ; fails if some term has no φ factor.
    pub fn divide_by_phi(&self) -> Result<Self> {
        let mut p = Self::zero();
        for (m, c) in &self.terms {
            if m.phi == 0 {
                return Err(Error::NotDivisible(format!("{} {} is not divisible by φ", format_coefficient(c), m)));
            }
            p.add_term(PhiMonomial::new(m.phi - 1, m.phi_x), c.clone());
        }
        Ok(p)
    }

    /// Parses `coef * φ^a φ_x^b` lines (`phi`, `phi_x` also accepted).
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Self::zero();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line == "0" {
                continue;
            }
            let (c, m) = line
                .split_once(" * ")
                .ok_or_else(|| Error::Parameter(format!("expected `coef * monomial`, got {line:?}")))?;
            let mut mono = PhiMonomial::new(0, 0);
            for tok in m.split_whitespace() {
                if tok == "1" {
                    continue;
                }
                let (base, pow) = match tok.split_once('^') {
                    Some((b, e)) => (b, e.parse::<u32>().map_err(|_| Error::Parameter(format!("bad power {tok:?}")))?),
                    None => (tok, 1),
                };
                match base {
                    "φ" | "phi" => mono.phi += pow,
                    "φ_x" | "phi_x" => mono.phi_x += pow,
                    _ => return Err(Error::Parameter(format!("bad factor {tok:?}"))),
                }
            }
            p.add_term(mono, parse_coefficient(c.trim())?);
        }
        Ok(p)
    }
}

/// A_n for n = 0..=order, with q_n = A_n e^{iΘ}.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonTable {
    entries: Vec<PhiPolynomial>,
}

impl SolitonTable {
    /// Recursively generated table of any order.
    pub fn derived(order: usize) -> Self {
        let theta_x = PhiPolynomial::constant(imag_coefficient(-1, 2))
            .add(&PhiPolynomial::term(imag_coefficient(3, 4), 2, 0));
        let mut entries = vec![PhiPolynomial::phi()];
        for n in 0..order {
            let a = &entries[n];
            let next = a.derivative().add(&theta_x.mul(a));
            entries.push(next);
        }
        Self { entries }
    }

    /// From explicit entries A₀, A₁, ….
    pub fn from_entries(entries: Vec<PhiPolynomial>) -> Self {
        Self { entries }
    }

    pub fn order(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn entry(&self, n: usize) -> Result<&PhiPolynomial> {
        self.entries.get(n).ok_or(Error::TableOrder(n as u32))
    }
}

/// Substitution result before and after eliminating φ_x².
#[derive(Debug, Clone, PartialEq)]
pub struct Substituted {
    pub raw: PhiPolynomial,
    pub reduced: PhiPolynomial,
}

/// Substitutes with the derivative table up to q_xxxx as displayed.
pub fn substitute_soliton(z: &DensityPolynomial) -> Result<Substituted> {
    substitute_soliton_with(z, &super::printed::soliton_table())
}

pub fn substitute_soliton_with(z: &DensityPolynomial, table: &SolitonTable) -> Result<Substituted> {
    if z.has_inverse_powers() {
        return Err(Error::NotDivisible("inverse powers of q cannot be substituted".into()));
    }
    let mut raw = PhiPolynomial::zero();
    for (m, c) in z.terms() {
        if m.charge() != 0 {
            return Err(Error::Parameter(format!("unbalanced monomial {m} keeps the soliton phase")));
        }
        let mut t = PhiPolynomial::constant(c.clone());
        for (s, p) in m.factors() {
            let factor = match s {
                Symbol::Q(k) => table.entry(k)?.clone(),
                Symbol::R(k) => table.entry(k)?.conj(),
            };
            t = t.mul(&factor.pow(p as u32));
        }
        raw = raw.add(&t);
    }
    let reduced = raw.reduce();
    Ok(Substituted { raw, reduced })
}

/// Exact complex-rational multiple of π.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiMultiple(pub Coefficient);

impl PiMultiple {
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn value(&self) -> num_complex::Complex64 {
        super::coefficient_to_f64(&self.0) * std::f64::consts::PI
    }
}

impl fmt::Display for PiMultiple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            f.write_str("0")
        } else if self.0.im.is_zero() {
            write!(f, "{}·π", format_coefficient(&self.0))
        } else {
            write!(f, "({})·π", format_coefficient(&self.0))
        }
    }
}

fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

/// ∫φ^{2k} / π = 4^k (2k−3)!!/(2k−2)!!.
fn even_moment(k: u32) -> Rational {
    let num = BigInt::from(4u32).pow(k) * double_factorial(2 * k as i64 - 3);
    BigRational::new(num, double_factorial(2 * k as i64 - 2))
}

/// ∫φ^a φ_x^b / π, or an error when the integral is not a rational
/// multiple of π (odd φ-power without φ_x) or diverges.
pub fn phi_moment(phi: u32, phi_x: u32) -> Result<Rational> {
    let mono = PhiPolynomial::term(Coefficient::one(), phi, phi_x);
    let v = integrate_phi_polynomial(&mono)?;
    Ok(v.0.re)
}

/// ∫P dx along the soliton. Even φ_x powers are reduced first; any term
/// φ^a φ_x is a total derivative and drops.
pub fn integrate_phi_polynomial(p: &PhiPolynomial) -> Result<PiMultiple> {
    let mut total = Coefficient::zero();
    for (m, c) in p.reduce().terms() {
        if m.phi_x == 1 {
            continue;
        }
        if m.phi == 0 {
            return Err(Error::OddPower(format!("constant term {} does not decay", format_coefficient(c))));
        }
        if m.phi % 2 == 1 {
            return Err(Error::OddPower(format!("{} {}", format_coefficient(c), m)));
        }
        total += c.clone() * coefficient(even_moment(m.phi / 2), Rational::zero());
    }
    Ok(PiMultiple(total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        super::super::rational(n, d)
    }

    #[test]
    fn moment_table() {
        let expect = [(1, 4), (2, 8), (3, 24), (4, 80), (5, 280), (6, 1008)];
        for (k, v) in expect {
            assert_eq!(even_moment(k), r(v, 1));
        }
        assert_eq!(phi_moment(0, 2).unwrap(), r(1, 2));
        assert_eq!(phi_moment(0, 4).unwrap(), r(3, 16));
        assert_eq!(phi_moment(6, 2).unwrap(), r(7, 1));
    }

    #[test]
    fn odd_powers_are_rejected() {
        assert!(matches!(phi_moment(3, 0), Err(Error::OddPower(_))));
        assert!(matches!(phi_moment(0, 0), Err(Error::OddPower(_))));
        assert_eq!(phi_moment(3, 1).unwrap(), r(0, 1));
    }

    #[test]
    fn derivative_is_consistent_with_first_integral() {
        // d/dx(φ_x² − φ⁴/4 + φ⁶/16) vanishes identically.
        let e = PhiPolynomial::term(real_coefficient(1, 1), 0, 2)
            .add(&PhiPolynomial::term(real_coefficient(-1, 4), 4, 0))
            .add(&PhiPolynomial::term(real_coefficient(1, 16), 6, 0));
        assert!(e.derivative().is_empty());
        assert!(e.reduce().is_empty());
    }

    #[test]
    fn total_derivatives_integrate_to_zero() {
        let p = PhiPolynomial::term(real_coefficient(3, 7), 3, 1).add(&PhiPolynomial::term(real_coefficient(1, 1), 1, 3));
        assert!(integrate_phi_polynomial(&p.derivative()).unwrap().is_zero());
    }

    #[test]
    fn text_round_trip() {
        let p = PhiPolynomial::term(coefficient(r(1, 4), r(-1, 2)), 3, 1).add(&PhiPolynomial::term(real_coefficient(2, 1), 0, 0));
        assert_eq!(PhiPolynomial::parse(&p.to_string()).unwrap(), p);
    }
}

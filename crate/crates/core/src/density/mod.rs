//! Conserved densities Z⁽ⁿ⁾ of the derivative NLS in exact arithmetic.
//!
//! A density is a polynomial in the formal symbols q, r and their
//! x-derivatives with complex-rational coefficients. The hierarchy is
//! generated by
//!
//!   Z⁽ⁿ⁺¹⁾ = Σ_{k=1}^{n−1} Z⁽ᵏ⁾Z⁽ⁿ⁻ᵏ⁾ + i q r Z⁽ⁿ⁾ + q ∂ₓ(Z⁽ⁿ⁾/q),
//!   Z⁽¹⁾ = −¼q²r² + (i/2) q r_x,
//!
//! with q∂ₓ(Z/q) expanded as ∂ₓZ − (q_x/q)Z using a formal inverse power of q.

mod appendix;
mod phi;
pub mod printed;

pub use appendix::{p3_appendix_check, soliton_integrals, P3Check, PartialSum};
pub use phi::{
    integrate_phi_polynomial, phi_moment, substitute_soliton, substitute_soliton_with, PhiMonomial,
    PhiPolynomial, PiMultiple, SolitonTable, Substituted,
};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::spectral::GridFunction;

pub type Rational = BigRational;
pub type Coefficient = Complex<BigRational>;

/// Highest derivative order a monomial may carry.
pub const MAX_ORDER: usize = 16;
const SLOTS: usize = 2 * (MAX_ORDER + 1) + 1;
const QINV: usize = SLOTS - 1;

pub fn rational(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn coefficient(re: Rational, im: Rational) -> Coefficient {
    Complex::new(re, im)
}

pub(crate) fn real_coefficient(n: i64, d: i64) -> Coefficient {
    Complex::new(rational(n, d), Rational::zero())
}

pub(crate) fn imag_coefficient(n: i64, d: i64) -> Coefficient {
    Complex::new(Rational::zero(), rational(n, d))
}

pub(crate) fn coefficient_to_f64(c: &Coefficient) -> Complex64 {
    Complex64::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN))
}

/// Formal symbol: q or r with a derivative order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Q(usize),
    R(usize),
}

impl Symbol {
    fn slot(self) -> usize {
        match self {
            Symbol::Q(k) => k,
            Symbol::R(k) => MAX_ORDER + 1 + k,
        }
    }

    fn from_slot(s: usize) -> Self {
        if s <= MAX_ORDER {
            Symbol::Q(s)
        } else {
            Symbol::R(s - MAX_ORDER - 1)
        }
    }

    pub fn order(self) -> usize {
        match self {
            Symbol::Q(k) | Symbol::R(k) => k,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (base, k) = match self {
            Symbol::Q(k) => ('q', *k),
            Symbol::R(k) => ('r', *k),
        };
        match k {
            0 => write!(f, "{base}"),
            1..=4 => write!(f, "{base}_{}", "x".repeat(k)),
            _ => write!(f, "{base}_{{{k}x}}"),
        }
    }
}

/// Exponent map over {q, q_x, …, r, r_x, …} plus a nonnegative power of q⁻¹.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    e: [u16; SLOTS],
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monomial({self})")
    }
}

impl Monomial {
    pub fn one() -> Self {
        Self { e: [0; SLOTS] }
    }

    pub fn from_factors(factors: &[(Symbol, u16)]) -> Self {
        let mut m = Self::one();
        for &(s, p) in factors {
            m.e[s.slot()] += p;
        }
        m
    }

    pub fn exponent(&self, s: Symbol) -> u16 {
        self.e[s.slot()]
    }

    pub fn inverse_q_power(&self) -> u16 {
        self.e[QINV]
    }

    pub fn factors(&self) -> impl Iterator<Item = (Symbol, u16)> + '_ {
        (0..QINV).filter(|&s| self.e[s] > 0).map(|s| (Symbol::from_slot(s), self.e[s]))
    }

    /// Number of q-type factors minus r-type factors; zero means the
    /// monomial is invariant under q ↦ e^{iθ}q, r ↦ e^{−iθ}r.
    pub fn charge(&self) -> i64 {
        let mut n: i64 = -(self.e[QINV] as i64);
        for (s, p) in self.factors() {
            match s {
                Symbol::Q(_) => n += p as i64,
                Symbol::R(_) => n -= p as i64,
            }
        }
        n
    }

    pub fn degree(&self) -> u32 {
        self.e[..QINV].iter().map(|&v| v as u32).sum()
    }

    pub fn max_order(&self) -> usize {
        self.factors().map(|(s, _)| s.order()).max().unwrap_or(0)
    }

    fn mul(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for i in 0..SLOTS {
            m.e[i] += other.e[i];
        }
        m.cancel();
        m
    }

    /// Cancels q·q⁻¹ pairs.
    fn cancel(&mut self) {
        let k = self.e[0].min(self.e[QINV]);
        self.e[0] -= k;
        self.e[QINV] -= k;
    }

    fn canonical_key(&self) -> (u32, [u16; SLOTS]) {
        (self.degree(), self.e)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded order: higher total degree first, then lexicographically larger
/// exponent vectors (q before q_x before … before r …) first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.canonical_key().cmp(&self.canonical_key())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .factors()
            .map(|(s, p)| if p == 1 { s.to_string() } else { format!("{s}^{p}") })
            .collect();
        if self.e[QINV] > 0 {
            parts.push(format!("q^-{}", self.e[QINV]));
        }
        if parts.is_empty() {
            return f.write_str("1");
        }
        f.write_str(&parts.join(" "))
    }
}

/// Z⁽ⁿ⁾ as a fully combined map from monomials to nonzero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct DensityPolynomial {
    label: Option<u32>,
    terms: BTreeMap<Monomial, Coefficient>,
}

impl fmt::Debug for DensityPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl DensityPolynomial {
    pub fn zero() -> Self {
        Self { label: None, terms: BTreeMap::new() }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Coefficient, Monomial)>) -> Self {
        let mut p = Self::zero();
        for (c, m) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn with_label(mut self, n: u32) -> Self {
        self.label = Some(n);
        self
    }

    pub fn label(&self) -> Option<u32> {
        self.label
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient_of(&self, m: &Monomial) -> Option<&Coefficient> {
        self.terms.get(m)
    }

    fn add_term(&mut self, m: Monomial, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = Self { label: None, terms: self.terms.clone() };
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&real_coefficient(-1, 1)))
    }

    pub fn scale(&self, s: &Coefficient) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (c.clone() * s.clone(), m.clone())))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                p.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        p
    }

    pub fn monomial(c: Coefficient, m: Monomial) -> Self {
        Self::from_terms([(c, m)])
    }

    pub fn max_order(&self) -> usize {
        self.terms.keys().map(Monomial::max_order).max().unwrap_or(0)
    }

    pub fn has_inverse_powers(&self) -> bool {
        self.terms.keys().any(|m| m.inverse_q_power() > 0)
    }

    /// Leibniz expansion of ∂ₓ: q_k ↦ q_{k+1}, r_k ↦ r_{k+1},
    /// q⁻ᵐ ↦ −m q⁻ᵐ⁻¹ q_x.
    pub fn formal_derivative(&self) -> Self {
        let mut p = Self::zero();
        for (m, c) in &self.terms {
            for s in 0..QINV {
                let e = m.e[s];
                if e == 0 {
                    continue;
                }
                let sym = Symbol::from_slot(s);
                let next = match sym {
                    Symbol::Q(k) => Symbol::Q(k + 1),
                    Symbol::R(k) => Symbol::R(k + 1),
                };
                assert!(next.order() <= MAX_ORDER, "derivative order exceeds {MAX_ORDER}");
                let mut t = m.clone();
                t.e[s] -= 1;
                t.e[next.slot()] += 1;
                t.cancel();
                p.add_term(t, c.clone() * real_coefficient(e as i64, 1));
            }
            let inv = m.e[QINV];
            if inv > 0 {
                let mut t = m.clone();
                t.e[QINV] += 1;
                t.e[Symbol::Q(1).slot()] += 1;
                t.cancel();
                p.add_term(t, c.clone() * real_coefficient(-(inv as i64), 1));
            }
        }
        p
    }

    /// Numeric evaluation with q = u, r = ū and spectral derivatives.
    pub fn evaluate_on_grid(&self, u: &GridFunction) -> Result<GridFunction> {
        if self.has_inverse_powers() {
            return Err(Error::NotDivisible(self.offending_terms()));
        }
        let grid = u.grid();
        let order = self.max_order();
        let r_vals: Vec<Complex64> = u.values().iter().map(|z| z.conj()).collect();
        let qd: Vec<Vec<Complex64>> = (0..=order).map(|k| grid.diff(u.values(), k as u32)).collect();
        let rd: Vec<Vec<Complex64>> = (0..=order).map(|k| grid.diff(&r_vals, k as u32)).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (m, c) in &self.terms {
            let cf = coefficient_to_f64(c);
            let factors: Vec<(Symbol, u16)> = m.factors().collect();
            for (j, o) in out.iter_mut().enumerate() {
                let mut v = cf;
                for &(s, p) in &factors {
                    let base = match s {
                        Symbol::Q(k) => qd[k][j],
                        Symbol::R(k) => rd[k][j],
                    };
                    v *= base.powu(p as u32);
                }
                *o += v;
            }
        }
        Ok(GridFunction::from_parts(grid, out))
    }

    fn offending_terms(&self) -> String {
        self.terms
            .iter()
            .filter(|(m, _)| m.inverse_q_power() > 0)
            .map(|(m, c)| format!("{} {}", format_coefficient(c), m))
            .collect::<Vec<_>>()
            .join("; ")
    }

    /// Parses the text form written by `Display`, one term per line
    /// (`coef * monomial`); blank lines and a `Z(n):` header are allowed.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Self::zero();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("Z(") {
                let n = rest.trim_end_matches("):").trim_end_matches(')');
                p.label = Some(n.parse().map_err(|_| Error::Parameter(format!("bad header {line:?}")))?);
                continue;
            }
            if line == "0" {
                continue;
            }
            let (c, m) = line
                .split_once(" * ")
                .ok_or_else(|| Error::Parameter(format!("expected `coef * monomial`, got {line:?}")))?;
            p.add_term(parse_monomial(m.trim())?, parse_coefficient(c.trim())?);
        }
        Ok(p)
    }
}

impl fmt::Display for DensityPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.label {
            writeln!(f, "Z({n}):")?;
        }
        if self.terms.is_empty() {
            return writeln!(f, "  0");
        }
        for (m, c) in &self.terms {
            writeln!(f, "  {} * {}", format_coefficient(c), m)?;
        }
        Ok(())
    }
}

fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `a/b`, `c/d·i`, or `a/b + c/d·i` / `a/b - c/d·i`.
pub fn format_coefficient(c: &Coefficient) -> String {
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => format_rational(&c.re),
        (true, false) => format!("{}·i", format_rational(&c.im)),
        (false, false) => {
            let sign = if c.im.is_negative() { '-' } else { '+' };
            format!("{} {} {}·i", format_rational(&c.re), sign, format_rational(&c.im.abs()))
        }
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parameter(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

fn parse_coefficient(s: &str) -> Result<Coefficient> {
    if let Some(im) = s.strip_suffix("·i") {
        for (i, ch) in im.char_indices().skip(1) {
            if (ch == '+' || ch == '-') && im[..i].ends_with(' ') {
                let re = parse_rational(im[..i].trim())?;
                let mag = parse_rational(im[i + 1..].trim())?;
                let imag = if ch == '-' { -mag } else { mag };
                return Ok(coefficient(re, imag));
            }
        }
        return Ok(coefficient(Rational::zero(), parse_rational(im.trim())?));
    }
    Ok(coefficient(parse_rational(s)?, Rational::zero()))
}

fn parse_symbol(s: &str) -> Result<Symbol> {
    let bad = || Error::Parameter(format!("bad symbol {s:?}"));
    let (base, rest) = s.split_at(1);
    let order = if rest.is_empty() {
        0
    } else {
        let sub = rest.strip_prefix('_').ok_or_else(bad)?;
        if let Some(inner) = sub.strip_prefix('{').and_then(|t| t.strip_suffix("x}")) {
            inner.parse().map_err(|_| bad())?
        } else if !sub.is_empty() && sub.chars().all(|c| c == 'x') {
            sub.len()
        } else {
            return Err(bad());
        }
    };
    if order > MAX_ORDER {
        return Err(bad());
    }
    match base {
        "q" => Ok(Symbol::Q(order)),
        "r" => Ok(Symbol::R(order)),
        _ => Err(bad()),
    }
}

fn parse_monomial(s: &str) -> Result<Monomial> {
    let mut m = Monomial::one();
    if s == "1" {
        return Ok(m);
    }
    for tok in s.split_whitespace() {
        if let Some(inv) = tok.strip_prefix("q^-") {
            m.e[QINV] += inv.parse::<u16>().map_err(|_| Error::Parameter(format!("bad factor {tok:?}")))?;
            continue;
        }
        let (sym, pow) = match tok.split_once('^') {
            Some((b, p)) => (b, p.parse::<u16>().map_err(|_| Error::Parameter(format!("bad factor {tok:?}")))?),
            None => (tok, 1),
        };
        m.e[parse_symbol(sym)?.slot()] += pow;
    }
    Ok(m)
}

/// Z⁽¹⁾ = −¼q²r² + (i/2) q r_x.
pub fn seed() -> DensityPolynomial {
    DensityPolynomial::from_terms([
        (real_coefficient(-1, 4), Monomial::from_factors(&[(Symbol::Q(0), 2), (Symbol::R(0), 2)])),
        (imag_coefficient(1, 2), Monomial::from_factors(&[(Symbol::Q(0), 1), (Symbol::R(1), 1)])),
    ])
    .with_label(1)
}

/// Z⁽⁰⁾ = q r, the mass density.
pub fn mass_density() -> DensityPolynomial {
    DensityPolynomial::monomial(
        Coefficient::one(),
        Monomial::from_factors(&[(Symbol::Q(0), 1), (Symbol::R(0), 1)]),
    )
    .with_label(0)
}

/// Z⁽ⁿ⁺¹⁾ from [Z⁽¹⁾, …, Z⁽ⁿ⁾].
pub fn recurrence_step(history: &[DensityPolynomial]) -> Result<DensityPolynomial> {
    let n = history.len();
    if n == 0 {
        return Err(Error::Parameter("history must start with the seed".into()));
    }
    let mut next = DensityPolynomial::zero();
    for k in 1..n {
        next = next.add(&history[k - 1].mul(&history[n - k - 1]));
    }
    let zn = &history[n - 1];
    let qr = DensityPolynomial::monomial(
        imag_coefficient(1, 1),
        Monomial::from_factors(&[(Symbol::Q(0), 1), (Symbol::R(0), 1)]),
    );
    next = next.add(&qr.mul(zn));
    let qx_over_q = DensityPolynomial::monomial(real_coefficient(1, 1), {
        let mut m = Monomial::from_factors(&[(Symbol::Q(1), 1)]);
        m.e[QINV] = 1;
        m
    });
    next = next.add(&zn.formal_derivative()).sub(&qx_over_q.mul(zn));
    if next.has_inverse_powers() {
        return Err(Error::NotDivisible(next.offending_terms()));
    }
    Ok(next.with_label(n as u32 + 1))
}

/// [Z⁽¹⁾, …, Z⁽ᴺ⁾].
pub fn generate_densities(n: usize) -> Result<Vec<DensityPolynomial>> {
    if n == 0 {
        return Err(Error::Parameter("need at least one density".into()));
    }
    if n + 1 > MAX_ORDER {
        return Err(Error::Parameter(format!("at most {} densities are supported", MAX_ORDER - 1)));
    }
    let mut out = vec![seed()];
    while out.len() < n {
        let next = recurrence_step(&out)?;
        out.push(next);
    }
    Ok(out)
}

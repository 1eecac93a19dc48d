//! The fifth density along q₀ and the exact value of P₃(q₀).

use num_rational::BigRational;
use num_traits::Zero;

use super::phi::{
    integrate_phi_polynomial, phi_moment, substitute_soliton, substitute_soliton_with, PhiMonomial,
    PhiPolynomial, PiMultiple, SolitonTable,
};
use super::{generate_densities, real_coefficient, Coefficient, Rational};
use crate::error::{Error, Result};

/// Sum of the per-term contributions whose reduced denominators lie in
/// `denominators`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSum {
    pub denominators: Vec<u64>,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct P3Term {
    pub monomial: PhiMonomial,
    pub coefficient: Rational,
    /// ∫φ^a φ_x^b / π.
    pub moment: Rational,
    pub contribution: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct P3Check {
    /// 2Re(Z⁽¹⁾Z⁽³⁾) + Re((Z⁽²⁾)²) − (φ_x/φ)Re Z⁽⁴⁾ − (½ + ¼φ²)Im Z⁽⁴⁾.
    pub integrand: PhiPolynomial,
    /// The four pieces above, in order, before combination.
    pub pieces: [PhiPolynomial; 4],
    pub terms: Vec<P3Term>,
    pub partial_sums: Vec<PartialSum>,
    /// P₃(q₀)/(2π) = ∫integrand/π.
    pub total: Rational,
}

impl P3Check {
    pub fn p3(&self) -> PiMultiple {
        PiMultiple(Coefficient::new(self.total.clone() * BigRational::from_integer(2.into()), Rational::zero()))
    }
}

fn real(c: &Coefficient) -> Result<Rational> {
    if !c.im.is_zero() {
        return Err(Error::Parameter("expected a real coefficient".into()));
    }
    Ok(c.re.clone())
}

/// Assembles the fifth-density integrand from the substituted Z⁽¹⁾…Z⁽⁴⁾
/// and integrates it term by term with the moment table.
pub fn p3_appendix_check() -> Result<P3Check> {
    let z = generate_densities(4)?;
    let s: Vec<PhiPolynomial> = z.iter().map(|d| substitute_soliton(d).map(|s| s.raw)).collect::<Result<_>>()?;
    let two = real_coefficient(2, 1);
    let z1z3 = s[0].mul(&s[2]).re();
    let z2sq = s[1].mul(&s[1]).re();
    let ratio = s[3].re().mul(&PhiPolynomial::phi_x()).divide_by_phi()?;
    let weight = PhiPolynomial::constant(real_coefficient(1, 2)).add(&PhiPolynomial::term(real_coefficient(1, 4), 2, 0));
    let weighted = weight.mul(&s[3].im());
    let integrand = z1z3.scale(&two).add(&z2sq).sub(&ratio).sub(&weighted);

    let mut terms = Vec::new();
    for (m, c) in integrand.terms() {
        let coefficient = real(c)?;
        let moment = phi_moment(m.phi, m.phi_x)?;
        let contribution = coefficient.clone() * moment.clone();
        terms.push(P3Term { monomial: *m, coefficient, moment, contribution });
    }
    let total: Rational = terms.iter().map(|t| t.contribution.clone()).sum();
    let groups: [&[u64]; 3] = [&[16], &[8], &[32, 64]];
    let partial_sums = groups
        .iter()
        .map(|g| PartialSum {
            denominators: g.to_vec(),
            value: terms
                .iter()
                .filter(|t| g.iter().any(|d| t.contribution.denom() == &(*d).into()))
                .map(|t| t.contribution.clone())
                .sum(),
        })
        .collect();
    Ok(P3Check { integrand, pieces: [z1z3, z2sq, ratio, weighted], terms, partial_sums, total })
}

/// ∫Z⁽ⁿ⁾ along q₀ for n = 1..=count, exactly.
pub fn soliton_integrals(count: usize) -> Result<Vec<PiMultiple>> {
    let z = generate_densities(count)?;
    let table = SolitonTable::derived(count);
    z.iter()
        .map(|d| substitute_soliton_with(d, &table).and_then(|s| integrate_phi_polynomial(&s.reduced)))
        .collect()
}

//! Published densities and soliton substitutions, transcribed verbatim.

use super::phi::{PhiPolynomial, SolitonTable};
use super::DensityPolynomial;

pub const Z1: &str = "
  -1/4 * q^2 r^2
  1/2·i * q r_x
";

pub const Z2: &str = "
  -1/4 * q q_x r^2
  -1 * q^2 r r_x
  -1/4·i * q^3 r^3
  1/2·i * q r_xx
";

pub const Z3: &str = "
  5/16 * q^4 r^4
  -5/4 * q^2 r_x^2
  -3/2 * q^2 r r_xx
  -3/2 * q q_x r r_x
  -1/4 * q q_xx r^2
  -2·i * q^3 r^2 r_x
  -3/4·i * q^2 q_x r^3
  1/2·i * q r_xxx
";

pub const Z4: &str = "
  4 * q^4 r^3 r_x
  29/16 * q^3 q_x r^4
  -9/2 * q^2 r_x r_xx
  -2 * q^2 r r_xxx
  -11/4 * q q_x r_x^2
  -3 * q q_x r r_xx
  -2 * q q_xx r r_x
  -1/4 * q q_xxx r^2
  7/16·i * q^5 r^5
  -15/4·i * q^3 r^2 r_xx
  -25/4·i * q^3 r r_x^2
  -8·i * q^2 q_x r^2 r_x
  -1·i * q^2 q_xx r^3
  -3/4·i * q q_x^2 r^3
  1/2·i * q r_xxxx
";

/// q_x e^{−iΘ}, …, q_xxxx e^{−iΘ} along q₀.
pub const SOLITON_TABLE: [&str; 4] = [
    "
  1 * φ_x
  -1/2·i * φ
  3/4·i * φ^3
",
    "
  -1/4 * φ
  5/4 * φ^3
  -3/4 * φ^5
  -1·i * φ_x
  3·i * φ^2 φ_x
",
    "
  -3/4 * φ_x
  6 * φ^2 φ_x
  -6 * φ^4 φ_x
  1/8·i * φ
  -21/16·i * φ^3
  3·i * φ^5
  -9/8·i * φ^7
  6·i * φ φ_x^2
",
    "
  1/16 * φ
  -9/8 * φ^3
  45/8 * φ^5
  -111/16 * φ^7
  63/32 * φ^9
  15 * φ φ_x^2
  -57/2 * φ^3 φ_x^2
  1/2·i * φ_x
  -15/2·i * φ^2 φ_x
  57/2·i * φ^4 φ_x
  -117/8·i * φ^6 φ_x
  6·i * φ_x^3
",
];

pub const Z1_SOLITON: &str = "
  1/8 * φ^4
  -1/4 * φ^2
  1/2·i * φ φ_x
";

pub const Z2_SOLITON: &str = "
  1/4 * φ^3 φ_x
  -1/2 * φ φ_x
  -1/8·i * φ^2
  1/4·i * φ^4
  -1/16·i * φ^6
";

pub const Z3_SOLITON: &str = "
  1/16 * φ^2
  -9/32 * φ^4
  1/8 * φ^6
  -1/64 * φ^8
  1/4 * φ^2 φ_x^2
  -3/8·i * φ φ_x
  1/2·i * φ^3 φ_x
  -1/8·i * φ^5 φ_x
";

pub const Z4_SOLITON: &str = "
  1/4 * φ φ_x
  -5/8 * φ^3 φ_x
  5/16 * φ^5 φ_x
  -3/64 * φ^7 φ_x
  1/4 * φ φ_x^3
  1/32·i * φ^2
  -1/4·i * φ^4
  5/32·i * φ^6
  -5/128·i * φ^8
  1/256·i * φ^10
  5/8·i * φ^2 φ_x^2
  -3/16·i * φ^4 φ_x^2
";

/// Re(Z⁽¹⁾Z⁽³⁾) along q₀.
pub const RE_Z1_Z3: &str = "
  -1/64 * φ^4
  5/64 * φ^6
  -17/256 * φ^8
  5/256 * φ^10
  -1/512 * φ^12
  3/16 * φ^2 φ_x^2
  -5/16 * φ^4 φ_x^2
  3/32 * φ^6 φ_x^2
";

/// Re((Z⁽²⁾)²) along q₀.
pub const RE_Z2_SQUARED: &str = "
  -1/64 * φ^4
  1/16 * φ^6
  -5/64 * φ^8
  1/32 * φ^10
  -1/256 * φ^12
  1/4 * φ^2 φ_x^2
  -1/4 * φ^4 φ_x^2
  1/16 * φ^6 φ_x^2
";

/// (φ_x/φ)·Re Z⁽⁴⁾ along q₀.
pub const PHI_X_OVER_PHI_RE_Z4: &str = "
  1/4 * φ_x^2
  -5/8 * φ^2 φ_x^2
  5/16 * φ^4 φ_x^2
  -3/64 * φ^6 φ_x^2
  1/4 * φ_x^4
";

/// (½ + ¼φ²)·Im Z⁽⁴⁾ along q₀.
pub const WEIGHTED_IM_Z4: &str = "
  1/64 * φ^2
  -15/128 * φ^4
  1/64 * φ^6
  5/256 * φ^8
  -1/128 * φ^10
  1/1024 * φ^12
  5/16 * φ^2 φ_x^2
  1/16 * φ^4 φ_x^2
  -3/64 * φ^6 φ_x^2
";

/// The assembled real part of the fifth density along q₀.
pub const ZR51: &str = "
  -1/64 * φ^2
  9/128 * φ^4
  13/64 * φ^6
  -59/256 * φ^8
  5/64 * φ^10
  -9/1024 * φ^12
  -1/4 * φ_x^2
  15/16 * φ^2 φ_x^2
  -5/4 * φ^4 φ_x^2
  11/32 * φ^6 φ_x^2
  -1/4 * φ_x^4
";

/// Grouped partial sums of P₃(q₀)/(2π).
pub const P3_PARTIAL_SUMS: [(i64, i64); 3] = [(-17, 1), (47, 2), (-13, 2)];

fn density(text: &str, n: u32) -> DensityPolynomial {
    DensityPolynomial::parse(text).expect("transcription parses").with_label(n)
}

fn phi(text: &str) -> PhiPolynomial {
    PhiPolynomial::parse(text).expect("transcription parses")
}

/// Z⁽¹⁾…Z⁽⁴⁾.
pub fn densities() -> Vec<DensityPolynomial> {
    [Z1, Z2, Z3, Z4].iter().zip(1..).map(|(t, n)| density(t, n)).collect()
}

/// Substituted Z⁽¹⁾…Z⁽⁴⁾.
pub fn soliton_densities() -> Vec<PhiPolynomial> {
    [Z1_SOLITON, Z2_SOLITON, Z3_SOLITON, Z4_SOLITON].iter().map(|t| phi(t)).collect()
}

/// A₀ = φ followed by the displayed q_x … q_xxxx entries.
pub fn soliton_table() -> SolitonTable {
    let mut entries = vec![PhiPolynomial::phi()];
    entries.extend(SOLITON_TABLE.iter().map(|t| phi(t)));
    SolitonTable::from_entries(entries)
}

pub fn zr51() -> PhiPolynomial {
    phi(ZR51)
}

pub fn p3_pieces() -> [PhiPolynomial; 4] {
    [phi(RE_Z1_Z3), phi(RE_Z2_SQUARED), phi(PHI_X_OVER_PHI_RE_Z4), phi(WEIGHTED_IM_Z4)]
}

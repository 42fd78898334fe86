//! Sparse univariate polynomials `c_0 z^{m_0} + ... + c_N z^{m_N}` with complex
//! coefficients and strictly increasing exponents.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex coefficient type shared by every module.
pub type ComplexCoeff = Complex64;

/// Largest exponent accepted anywhere in the crate.
pub const MAX_EXPONENT: u64 = 1 << 40;

/// Products below this fraction of the largest partial product are treated as
/// cancelled in [`SparseUniPoly::multiply`].
pub const CANCELLATION_THRESHOLD: f64 = 1e-14;

/// `e(t) = exp(2 pi i t)`.
pub fn unit_character(t: f64) -> Complex64 {
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// `e(num / den)` with the phase reduced exactly in integers first.
pub fn rational_character(num: u64, den: u64) -> Complex64 {
    let r = num % den;
    unit_character(r as f64 / den as f64)
}

/// A nonzero sparse polynomial. Terms are stored by strictly increasing
/// exponent and every coefficient is finite and nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct SparseUniPoly {
    terms: Vec<(u64, ComplexCoeff)>,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    terms: Vec<(u64, [f64; 2])>,
}

impl TryFrom<PolyJson> for SparseUniPoly {
    type Error = Error;

    fn try_from(json: PolyJson) -> Result<Self> {
        SparseUniPoly::new(
            json.terms
                .into_iter()
                .map(|(m, [re, im])| (m, Complex64::new(re, im)))
                .collect(),
        )
    }
}

impl From<SparseUniPoly> for PolyJson {
    fn from(p: SparseUniPoly) -> Self {
        PolyJson {
            terms: p.terms.into_iter().map(|(m, c)| (m, [c.re, c.im])).collect(),
        }
    }
}

impl SparseUniPoly {
    /// Validates and wraps a term list.
    pub fn new(terms: Vec<(u64, ComplexCoeff)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        for (i, &(m, c)) in terms.iter().enumerate() {
            if m > MAX_EXPONENT {
                return Err(Error::ExponentTooLarge {
                    exponent: m as i128,
                    max: MAX_EXPONENT,
                });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidPolynomial(format!(
                    "coefficient of z^{m} is not finite"
                )));
            }
            if c.norm() == 0.0 {
                return Err(Error::InvalidPolynomial(format!(
                    "coefficient of z^{m} is zero"
                )));
            }
            if i > 0 && terms[i - 1].0 >= m {
                return Err(Error::InvalidPolynomial(
                    "exponents must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self { terms })
    }

    /// Builds a polynomial from real `(exponent, coefficient)` pairs.
    pub fn from_real(terms: &[(u64, f64)]) -> Result<Self> {
        Self::new(
            terms
                .iter()
                .map(|&(m, c)| (m, Complex64::new(c, 0.0)))
                .collect(),
        )
    }

    /// Builds a polynomial from a dense coefficient vector, skipping exact zeros.
    pub fn from_dense(coeffs: &[ComplexCoeff]) -> Result<Self> {
        Self::new(
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm() != 0.0)
                .map(|(m, &c)| (m as u64, c))
                .collect(),
        )
    }

    pub fn constant(c: ComplexCoeff) -> Result<Self> {
        Self::new(vec![(0, c)])
    }

    pub fn terms(&self) -> &[(u64, ComplexCoeff)] {
        &self.terms
    }

    /// `N`, the number of terms minus one.
    pub fn sparsity(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn min_exponent(&self) -> u64 {
        self.terms[0].0
    }

    pub fn max_exponent(&self) -> u64 {
        self.terms[self.terms.len() - 1].0
    }

    /// Degree after shifting the lowest exponent to zero.
    pub fn dense_degree(&self) -> u64 {
        self.max_exponent() - self.min_exponent()
    }

    pub fn leading_coeff(&self) -> ComplexCoeff {
        self.terms[self.terms.len() - 1].1
    }

    /// Sum of coefficient moduli, the maximum of `|p|` on the unit circle.
    pub fn coeff_scale(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).sum()
    }

    /// Greatest common divisor of the exponent gaps (0 for a monomial).
    pub fn exponent_gcd(&self) -> u64 {
        let base = self.min_exponent();
        self.terms
            .iter()
            .fold(0, |g, &(m, _)| num_integer::gcd(g, m - base))
    }

    /// Evaluates the trigonometric form `sum c_n e(m_n t)`.
    pub fn evaluate(&self, t: f64) -> ComplexCoeff {
        self.terms
            .iter()
            .map(|&(m, c)| c * unit_character((m as f64 * t).fract()))
            .sum()
    }

    /// Evaluates at the grid point `t = j / grid` with the phases reduced exactly.
    pub fn evaluate_grid_point(&self, j: u64, grid: u64) -> ComplexCoeff {
        self.terms
            .iter()
            .map(|&(m, c)| {
                let phase = ((m % grid) as u128 * j as u128 % grid as u128) as u64;
                c * rational_character(phase, grid)
            })
            .sum()
    }

    /// Formal derivative; errors on constants.
    pub fn derivative(&self) -> Result<Self> {
        let terms: Vec<_> = self
            .terms
            .iter()
            .filter(|(m, _)| *m > 0)
            .map(|&(m, c)| (m - 1, c * m as f64))
            .collect();
        if terms.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Self::new(terms)
    }

    /// The reciprocal polynomial `z^{m_N} p(1/z)`.
    pub fn reverse(&self) -> Self {
        let top = self.max_exponent();
        let terms = self.terms.iter().rev().map(|&(m, c)| (top - m, c)).collect();
        Self { terms }
    }

    /// `z^{-m_0} p(z)`.
    pub fn normalize(&self) -> Self {
        let base = self.min_exponent();
        let terms = self.terms.iter().map(|&(m, c)| (m - base, c)).collect();
        Self { terms }
    }

    /// Substitutes `z^g -> z` where `g` divides every exponent gap; the result
    /// is normalized. Mahler measure is unchanged by this map.
    pub fn deflate_exponents(&self) -> Self {
        let g = self.exponent_gcd().max(1);
        let base = self.min_exponent();
        let terms = self.terms.iter().map(|&(m, c)| ((m - base) / g, c)).collect();
        Self { terms }
    }

    pub fn scale(&self, factor: ComplexCoeff) -> Result<Self> {
        Self::new(self.terms.iter().map(|&(m, c)| (m, c * factor)).collect())
    }

    /// Product, dropping coefficients that cancel below
    /// [`CANCELLATION_THRESHOLD`] times the largest partial product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let mut acc: BTreeMap<u64, ComplexCoeff> = BTreeMap::new();
        let mut largest = 0.0f64;
        for &(m, c) in &self.terms {
            for &(k, d) in &other.terms {
                let prod = c * d;
                largest = largest.max(prod.norm());
                *acc.entry(m + k).or_default() += prod;
            }
        }
        let cutoff = CANCELLATION_THRESHOLD * largest;
        let terms: Vec<_> = acc.into_iter().filter(|(_, c)| c.norm() > cutoff).collect();
        if terms.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Self::new(terms)
    }

    /// Dense coefficients of the normalized polynomial, lowest degree first.
    pub fn to_dense(&self) -> Vec<ComplexCoeff> {
        let base = self.min_exponent();
        let mut dense = vec![Complex64::new(0.0, 0.0); (self.dense_degree() + 1) as usize];
        for &(m, c) in &self.terms {
            dense[(m - base) as usize] = c;
        }
        dense
    }
}

/// Expands `(z + shift)^n` with exact binomial coefficients.
pub fn binomial_power(n: u32, shift: f64) -> Result<SparseUniPoly> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..n {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] += c * shift;
            next[i + 1] += c;
        }
        coeffs = next;
    }
    SparseUniPoly::from_dense(&coeffs)
}

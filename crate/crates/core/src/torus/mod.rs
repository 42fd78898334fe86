//! Trigonometric polynomials on the torus `(R/Z)^M`: evaluation, discrete
//! Fourier round trips, specialization along integer directions, tensor-grid
//! Mahler measures and limits of univariate specializations.

mod grid;
mod limit;
mod theorem;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::sparse_poly::{rational_character, unit_character, ComplexCoeff, SparseUniPoly, MAX_EXPONENT};

pub use grid::{mahler_torus_grid, MAX_TORUS_DIM, MAX_TORUS_POINTS};
pub use limit::{mahler_limit, LimitEntry, LimitTrace, PointSource};
pub use theorem::{check_theorem2, dual_ordering_report, torus_measure, DualOrderingReport};

/// Smallest coefficient modulus accepted in a support.
pub const MIN_COEFF: f64 = 1e-14;
/// Largest number of samples used by a Fourier round trip.
const MAX_ROUNDTRIP_POINTS: u64 = 1 << 24;

/// `F(x) = sum_k c_k e(k . x)` with terms kept in lexicographic order of `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TorusJson", into = "TorusJson")]
pub struct TorusPoly {
    dim: usize,
    terms: Vec<(LatticePoint, ComplexCoeff)>,
}

#[derive(Serialize, Deserialize)]
struct TorusJson {
    #[serde(rename = "M")]
    m: usize,
    coeffs: Vec<(LatticePoint, [f64; 2])>,
}

impl TryFrom<TorusJson> for TorusPoly {
    type Error = Error;

    fn try_from(json: TorusJson) -> Result<Self> {
        let terms = json
            .coeffs
            .into_iter()
            .map(|(k, [re, im])| (k, Complex64::new(re, im)))
            .collect();
        TorusPoly::new(json.m, terms)
    }
}

impl From<TorusPoly> for TorusJson {
    fn from(f: TorusPoly) -> Self {
        TorusJson {
            m: f.dim,
            coeffs: f.terms.into_iter().map(|(k, c)| (k, [c.re, c.im])).collect(),
        }
    }
}

impl TorusPoly {
    pub fn new(dim: usize, terms: Vec<(LatticePoint, ComplexCoeff)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPolynomial("dimension must be positive".into()));
        }
        if terms.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.dim() });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidPolynomial(format!(
                    "coefficient at {:?} is not finite",
                    k.coords()
                )));
            }
            if c.norm() < MIN_COEFF {
                return Err(Error::InvalidPolynomial(format!(
                    "coefficient at {:?} has modulus below {MIN_COEFF:e}",
                    k.coords()
                )));
            }
            if map.insert(k.clone(), c).is_some() {
                return Err(Error::InvalidPolynomial(format!(
                    "repeated support point {:?}",
                    k.coords()
                )));
            }
        }
        Ok(Self { dim, terms: map.into_iter().collect() })
    }

    /// Real coefficients given as `(k, c)` pairs.
    pub fn from_real(dim: usize, terms: &[(&[i64], f64)]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|&(k, c)| Ok((LatticePoint::new(k.to_vec())?, Complex64::new(c, 0.0))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, terms)
    }

    /// Embeds `p(e(x_axis))` into `dim` variables.
    pub fn from_univariate(p: &SparseUniPoly, dim: usize, axis: usize) -> Result<Self> {
        if axis >= dim {
            return Err(Error::InvalidArgument(format!("axis {axis} outside dimension {dim}")));
        }
        let terms = p
            .terms()
            .iter()
            .map(|&(m, c)| {
                let mut k = vec![0i64; dim];
                k[axis] = i64::try_from(m).map_err(|_| Error::Overflow(m))?;
                Ok((LatticePoint::new(k)?, c))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(LatticePoint, ComplexCoeff)] {
        &self.terms
    }

    pub fn support(&self) -> Vec<LatticePoint> {
        self.terms.iter().map(|(k, _)| k.clone()).collect()
    }

    pub fn coeff(&self, k: &LatticePoint) -> Option<ComplexCoeff> {
        self.terms
            .binary_search_by(|(p, _)| p.cmp(k))
            .ok()
            .map(|i| self.terms[i].1)
    }

    pub fn support_norm(&self) -> u64 {
        self.terms.iter().map(|(k, _)| k.inf_norm()).max().unwrap_or(0)
    }

    pub fn coeff_scale(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).sum()
    }

    pub fn eval_torus(&self, x: &[f64]) -> Result<ComplexCoeff> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(self
            .terms
            .iter()
            .map(|(k, c)| {
                // reduce each product mod 1 before summing to keep phases small
                let phase: f64 = k
                    .coords()
                    .iter()
                    .zip(x)
                    .map(|(&ki, &xi)| (ki as f64 * xi).rem_euclid(1.0))
                    .sum();
                c * unit_character(phase)
            })
            .sum())
    }

    /// Recomputes every stored coefficient from samples on the `grid^M` tensor
    /// grid and returns the largest deviation.
    pub fn fourier_roundtrip_check(&self, grid: u64) -> Result<f64> {
        let required = 2 * self.support_norm() + 2;
        if grid < required {
            return Err(Error::GridTooCoarse { grid: grid as usize, required: required as usize });
        }
        let total = grid
            .checked_pow(self.dim as u32)
            .filter(|&t| t <= MAX_ROUNDTRIP_POINTS)
            .ok_or_else(|| Error::InvalidArgument(format!("grid {grid}^{} is too large", self.dim)))?;
        let residue = |k: &LatticePoint, idx: &[u64]| -> u64 {
            let g = grid as i128;
            let s: i128 = k.coords().iter().zip(idx).map(|(&c, &j)| c as i128 * j as i128).sum();
            s.rem_euclid(g) as u64
        };
        let mut idx = vec![0u64; self.dim];
        let mut samples = Vec::with_capacity(total as usize);
        let mut indices = Vec::with_capacity(total as usize);
        for _ in 0..total {
            let value: Complex64 = self
                .terms
                .iter()
                .map(|(k, c)| c * rational_character(residue(k, &idx), grid))
                .sum();
            samples.push(value);
            indices.push(idx.clone());
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot < grid {
                    break;
                }
                *slot = 0;
            }
        }
        let mut worst = 0.0f64;
        for (k, c) in &self.terms {
            let recovered: Complex64 = samples
                .iter()
                .zip(&indices)
                .map(|(v, j)| v * rational_character(residue(k, j), grid).conj())
                .sum::<Complex64>()
                / total as f64;
            worst = worst.max((recovered - c).norm());
        }
        Ok(worst)
    }

    /// `F_a(z) = sum_k c_k z^(k . a - min)`.
    pub fn specialize(&self, a: &LatticePoint) -> Result<SparseUniPoly> {
        let mut exps = Vec::with_capacity(self.terms.len());
        for (k, c) in &self.terms {
            exps.push((k.dot(a)?, *c));
        }
        exps.sort_by_key(|&(e, _)| e);
        if let Some(w) = exps.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::ExponentCollision { exponent: w[0].0 });
        }
        let min = exps[0].0;
        let terms = exps
            .into_iter()
            .map(|(e, c)| {
                let shifted = e - min;
                if shifted > MAX_EXPONENT as i128 {
                    return Err(Error::ExponentTooLarge { exponent: shifted, max: MAX_EXPONENT });
                }
                Ok((shifted as u64, c))
            })
            .collect::<Result<Vec<_>>>()?;
        SparseUniPoly::new(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn one_plus_x_plus_y() -> TorusPoly {
        TorusPoly::from_real(2, &[(&[0, 0], 1.0), (&[1, 0], 1.0), (&[0, 1], 1.0)]).unwrap()
    }

    fn lp(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c.to_vec()).unwrap()
    }

    fn random_torus(rng: &mut ChaCha8Rng, terms: usize, radius: i64) -> TorusPoly {
        let mut map = BTreeMap::new();
        while map.len() < terms {
            let k = vec![rng.random_range(-radius..=radius), rng.random_range(-radius..=radius)];
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if c.norm() > 0.05 {
                map.insert(lp(&k), c);
            }
        }
        TorusPoly::new(2, map.into_iter().collect()).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let f = one_plus_x_plus_y();
        assert!((f.eval_torus(&[0.0, 0.0]).unwrap() - 3.0).norm() < 1e-15);
        assert!((f.eval_torus(&[0.5, 0.5]).unwrap() + 1.0).norm() < 1e-15);
        let g = TorusPoly::from_real(2, &[(&[1, 0], 1.0)]).unwrap();
        assert!((g.eval_torus(&[0.3, 0.9]).unwrap().norm() - 1.0).abs() < 1e-15);
        assert!(matches!(f.eval_torus(&[0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn construction_rules() {
        assert!(TorusPoly::from_real(2, &[(&[0, 0], 1e-15)]).is_err());
        assert!(TorusPoly::from_real(2, &[(&[0, 0], 1.0), (&[0, 0], 2.0)]).is_err());
        assert!(TorusPoly::from_real(2, &[(&[0, 0, 1], 1.0)]).is_err());
        assert!(TorusPoly::new(2, vec![]).is_err());
        let f = one_plus_x_plus_y();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"M":2,"coeffs":[[[0,0],[1.0,0.0]],[[0,1],[1.0,0.0]],[[1,0],[1.0,0.0]]]}"#);
        let back: TorusPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn fourier_roundtrip() {
        let f = TorusPoly::from_real(2, &[(&[-1, 1], 0.5), (&[1, 0], -2.0), (&[0, 0], 1.0)]).unwrap();
        assert!(f.fourier_roundtrip_check(8).unwrap() <= 1e-12);
        let one = TorusPoly::from_real(2, &[(&[0, 0], 1.0)]).unwrap();
        assert!(one.fourier_roundtrip_check(2).unwrap() <= 1e-15);
        assert!(matches!(f.fourier_roundtrip_check(3), Err(Error::GridTooCoarse { .. })));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_torus(&mut rng, 5, 3);
        assert!(g.fourier_roundtrip_check(16).unwrap() <= 1e-12);
    }

    #[test]
    fn specialization_examples() {
        let f = one_plus_x_plus_y();
        let p = f.specialize(&lp(&[1, 2])).unwrap();
        assert_eq!(p, SparseUniPoly::from_real(&[(0, 1.0), (1, 1.0), (2, 1.0)]).unwrap());
        let p = f.specialize(&lp(&[1, 37])).unwrap();
        assert_eq!(p, SparseUniPoly::from_real(&[(0, 1.0), (1, 1.0), (37, 1.0)]).unwrap());
        let g = TorusPoly::from_real(2, &[(&[1, 0], 1.0), (&[0, 1], 1.0)]).unwrap();
        assert!(matches!(g.specialize(&lp(&[1, 1])), Err(Error::ExponentCollision { exponent: 1 })));
        // negative exponents are shifted to start at zero
        let h = TorusPoly::from_real(2, &[(&[-1, 0], 2.0), (&[0, 1], 1.0)]).unwrap();
        assert_eq!(
            h.specialize(&lp(&[3, 1])).unwrap(),
            SparseUniPoly::from_real(&[(0, 2.0), (4, 1.0)]).unwrap()
        );
    }

    #[test]
    fn univariate_embedding() {
        let p = SparseUniPoly::from_real(&[(0, 1.0), (3, -2.0)]).unwrap();
        let f = TorusPoly::from_univariate(&p, 3, 1).unwrap();
        assert_eq!(f.coeff(&lp(&[0, 3, 0])), Some(Complex64::new(-2.0, 0.0)));
        assert_eq!(f.support_norm(), 3);
    }

    proptest! {
        #[test]
        fn specialization_matches_restriction(
            seed in any::<u64>(),
            a0 in -50i64..=50,
            a1 in -50i64..=50,
            t in 0.0f64..1.0,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let terms = rng.random_range(1..=6);
            let f = random_torus(&mut rng, terms, 4);
            let a = lp(&[a0, a1]);
            match f.specialize(&a) {
                Ok(p) => {
                    let x = [(a0 as f64 * t).rem_euclid(1.0), (a1 as f64 * t).rem_euclid(1.0)];
                    let lhs = p.evaluate(t).norm();
                    let rhs = f.eval_torus(&x).unwrap().norm();
                    prop_assert!((lhs - rhs).abs() <= 1e-12);
                }
                Err(Error::ExponentCollision { .. }) => {}
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}

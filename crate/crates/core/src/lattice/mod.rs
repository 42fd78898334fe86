//! Archimedean orderings of `Z^M` induced by a direction `alpha`, the function
//! `nu(a)` (smallest sup-norm of a nonzero integer vector orthogonal to `a`),
//! Dirichlet approximation, and generators of lattice points whose integer
//! ordering of a support agrees with the `alpha` ordering.

mod direction;
mod dirichlet;
mod nu;
mod order;
mod points;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use direction::{DirectionVector, Precision, EXACT_DIGITS};
pub use dirichlet::{approximation_quality, dirichlet_step, in_dirichlet_set, DirichletStep};
pub use nu::{check_distinct, nu, nu_capped, DistinctReport, NuCertificate, DEFAULT_SHELL_CAP};
pub use order::{order_support, phi, OrderedSupport};
pub use points::{generate_b_points, is_member, scaled_direction_points, PointSearch};

/// Largest coordinate magnitude accepted in a lattice point.
pub const MAX_COORD: i64 = 1 << 31;

/// A point of `Z^M`, `M >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct LatticePoint(Vec<i64>);

impl TryFrom<Vec<i64>> for LatticePoint {
    type Error = Error;

    fn try_from(coords: Vec<i64>) -> Result<Self> {
        LatticePoint::new(coords)
    }
}

impl From<LatticePoint> for Vec<i64> {
    fn from(p: LatticePoint) -> Self {
        p.0
    }
}

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidLatticePoint("dimension must be at least 1".into()));
        }
        if let Some(c) = coords.iter().find(|c| c.abs() > MAX_COORD) {
            return Err(Error::InvalidLatticePoint(format!(
                "coordinate {c} exceeds 2^31 in magnitude"
            )));
        }
        Ok(Self(coords))
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim.max(1)])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn inf_norm(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// Exact integer inner product.
    pub fn dot(&self, other: &LatticePoint) -> Result<i128> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(&x, &y)| x as i128 * y as i128)
            .sum())
    }

    /// Parses `"1,-2,3"`.
    pub fn parse(text: &str) -> Result<Self> {
        let coords = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::InvalidLatticePoint(format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coords)
    }
}

/// Largest sup-norm over a set of points.
pub fn support_norm(points: &[LatticePoint]) -> u64 {
    points.iter().map(LatticePoint::inf_norm).max().unwrap_or(0)
}

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::direction::{pow10, DirectionVector, EXACT_DIGITS};
use super::{support_norm, LatticePoint};
use crate::error::{Error, Result};
use crate::numeric::compensated_dot;

/// Relative gap below which double-precision values count as tied.
const DOUBLE_TIE: f64 = 1e-9;
/// Relative gap below which the exact path is consulted.
const EXACT_SWITCH: f64 = 1e-6;
/// Decimal digits kept as guard for exact tie detection.
const EXACT_TIE_DIGITS: u32 = 40;

/// `phi_alpha(k) = k . alpha` with a compensated dot product.
pub fn phi(alpha: &DirectionVector, k: &LatticePoint) -> Result<f64> {
    check_dim(alpha, k)?;
    Ok(compensated_dot(k.coords(), alpha.alphas()))
}

fn phi_exact(exact: &[BigInt], k: &LatticePoint) -> BigInt {
    k.coords()
        .iter()
        .zip(exact)
        .map(|(&c, x)| x * BigInt::from(c))
        .sum()
}

fn check_dim(alpha: &DirectionVector, k: &LatticePoint) -> Result<()> {
    if alpha.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: alpha.dim(),
            found: k.dim(),
        });
    }
    Ok(())
}

/// A support sorted by increasing `phi_alpha`.
#[derive(Debug, Clone, Serialize)]
pub struct OrderedSupport {
    pub points: Vec<LatticePoint>,
    #[serde(skip)]
    pub alpha: DirectionVector,
    pub values: Vec<f64>,
    /// Smallest gap between consecutive values.
    pub eta: f64,
    pub norm_s: u64,
}

impl OrderedSupport {
    pub fn dim(&self) -> usize {
        self.alpha.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Sorts `support` by `phi_alpha`, failing with [`Error::TieDetected`] when two
/// points cannot be separated at the working precision.
pub fn order_support(support: &[LatticePoint], alpha: &DirectionVector) -> Result<OrderedSupport> {
    if support.is_empty() {
        return Err(Error::InvalidArgument("empty support".into()));
    }
    for k in support {
        check_dim(alpha, k)?;
    }
    let mut sorted_check = support.to_vec();
    sorted_check.sort();
    if let Some(w) = sorted_check.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(format!("repeated point {:?}", w[0].coords())));
    }

    let values: Vec<f64> = support
        .iter()
        .map(|k| compensated_dot(k.coords(), alpha.alphas()))
        .collect();
    let scale = 1.0 + values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let exact: Option<Vec<BigInt>> = alpha
        .exact()
        .map(|e| support.iter().map(|k| phi_exact(e, k)).collect());

    let mut idx: Vec<usize> = (0..support.len()).collect();
    idx.sort_by(|&i, &j| {
        let gap = (values[i] - values[j]).abs();
        match &exact {
            Some(ex) if gap < EXACT_SWITCH * scale => ex[i].cmp(&ex[j]),
            _ => values[i].partial_cmp(&values[j]).unwrap_or(Ordering::Equal),
        }
    });

    let mut eta = f64::INFINITY;
    for w in idx.windows(2) {
        let (i, j) = (w[0], w[1]);
        let gap = match &exact {
            Some(ex) => {
                let diff = &ex[j] - &ex[i];
                let tolerance = pow10(EXACT_DIGITS - EXACT_TIE_DIGITS) * BigInt::from(scale.ceil() as i64);
                if diff.abs() <= tolerance {
                    return Err(tie(support, i, j));
                }
                if diff.is_zero() {
                    0.0
                } else {
                    DirectionVector::exact_value(&diff)
                }
            }
            None => {
                let gap = values[j] - values[i];
                if gap <= DOUBLE_TIE * scale {
                    return Err(tie(support, i, j));
                }
                gap
            }
        };
        eta = eta.min(gap);
    }

    Ok(OrderedSupport {
        points: idx.iter().map(|&i| support[i].clone()).collect(),
        alpha: alpha.clone(),
        values: idx.iter().map(|&i| values[i]).collect(),
        eta,
        norm_s: support_norm(support),
    })
}

fn tie(support: &[LatticePoint], i: usize, j: usize) -> Error {
    Error::TieDetected {
        left: support[i].coords().to_vec(),
        right: support[j].coords().to_vec(),
    }
}

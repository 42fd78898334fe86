use serde::{Deserialize, Serialize};

use super::{DirectionVector, LatticePoint, MAX_COORD};
use crate::error::{Error, Result};
use crate::numeric::two_product;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletStep {
    pub q: u64,
    pub b: LatticePoint,
    /// `max_m ||q alpha_m||`, distance to the nearest integer.
    pub quality: f64,
}

/// `max_m ||q alpha_m||` together with the nearest integer vector to `q alpha`.
pub fn approximation_quality(alpha: &DirectionVector, q: u64) -> (f64, Vec<i64>) {
    let qf = q as f64;
    let mut worst = 0.0f64;
    let mut nearest = Vec::with_capacity(alpha.dim());
    for &a in alpha.alphas() {
        let (hi, lo) = two_product(qf, a);
        let n = hi.round();
        let dist = ((hi - n) + lo).abs();
        // the correction can carry the product across a half-integer
        let (n, dist) = if dist > 0.5 {
            let n2 = n + ((hi - n) + lo).signum();
            (n2, ((hi - n2) + lo).abs())
        } else {
            (n, dist)
        };
        worst = worst.max(dist);
        nearest.push(n as i64);
    }
    (worst, nearest)
}

/// Whether `q` satisfies `max_m ||q alpha_m|| <= (q + 1)^(-1/M)`.
pub fn in_dirichlet_set(alpha: &DirectionVector, q: u64) -> bool {
    let bound = ((q + 1) as f64).powf(-1.0 / alpha.dim() as f64);
    approximation_quality(alpha, q).0 <= bound
}

/// Smallest `q <= q_max` with `max_m ||q alpha_m|| <= (q_max + 1)^(-1/M)`.
pub fn dirichlet_step(alpha: &DirectionVector, q_max: u64) -> Result<DirichletStep> {
    if q_max == 0 {
        return Err(Error::InvalidArgument("Q must be positive".into()));
    }
    let bound = ((q_max + 1) as f64).powf(-1.0 / alpha.dim() as f64);
    let mut best = (0u64, f64::INFINITY);
    for q in 1..=q_max {
        let (quality, nearest) = approximation_quality(alpha, q);
        if quality <= bound {
            if nearest.iter().any(|c| c.abs() > MAX_COORD) {
                break;
            }
            return Ok(DirichletStep { q, b: LatticePoint::new(nearest)?, quality });
        }
        if quality < best.1 {
            best = (q, quality);
        }
    }
    Err(Error::NotFound {
        limit: q_max,
        best_q: best.0,
        best_quality: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_sqrt3_q100() {
        let alpha = DirectionVector::parse("sqrt2,sqrt3").unwrap();
        let step = dirichlet_step(&alpha, 100).unwrap();
        assert!(step.q <= 100);
        assert!(step.quality <= 101f64.powf(-0.5));
        // independent check of minimality with plain arithmetic
        for q in 1..step.q {
            let worst = alpha
                .alphas()
                .iter()
                .map(|a| {
                    let x = q as f64 * a;
                    (x - x.round()).abs()
                })
                .fold(0.0, f64::max);
            assert!(worst > 101f64.powf(-0.5));
        }
        let expected: Vec<i64> = alpha.alphas().iter().map(|a| (step.q as f64 * a).round() as i64).collect();
        assert_eq!(step.b.coords(), &expected[..]);
    }

    #[test]
    fn dirichlet_theorem_always_succeeds() {
        for tokens in ["sqrt2,sqrt3", "phi,log2", "sqrt5,sqrt7,log3", "0.123,0.456"] {
            let alpha = DirectionVector::parse(tokens).unwrap();
            for q_max in [1u64, 10, 1000, 50_000] {
                assert!(dirichlet_step(&alpha, q_max).is_ok(), "{tokens} {q_max}");
            }
        }
    }

    #[test]
    fn rational_exact_hit() {
        let alpha = DirectionVector::parse("0.5,0.25").unwrap();
        let step = dirichlet_step(&alpha, 4).unwrap();
        assert_eq!((step.q, step.b.coords(), step.quality), (4, &[2, 1][..], 0.0));
    }

    #[test]
    fn golden_ratio_follows_fibonacci() {
        let alpha = DirectionVector::parse("phi").unwrap();
        let step = dirichlet_step(&alpha, 12).unwrap();
        assert_eq!(step.q, 8);
        assert_eq!(step.b.coords(), &[13]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((step.quality - (8.0 * phi - 13.0).abs()).abs() < 1e-14);
        assert!(step.quality <= 1.0 / 13.0);
    }

    #[test]
    fn not_found_reports_best() {
        let alpha = DirectionVector::parse("0.5").unwrap();
        // Q = 1 with bound 1/2: ||0.5|| = 0.5 qualifies.
        assert_eq!(dirichlet_step(&alpha, 1).unwrap().q, 1);
        assert!(dirichlet_step(&alpha, 0).is_err());
    }

    #[test]
    fn quality_of_exact_products() {
        let alpha = DirectionVector::from_f64(vec![0.25, -1.75]).unwrap();
        let (quality, nearest) = approximation_quality(&alpha, 4);
        assert_eq!(quality, 0.0);
        assert_eq!(nearest, vec![1, -7]);
        assert!(in_dirichlet_set(&alpha, 4));
    }
}

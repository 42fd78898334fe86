//! Integer directions `a` for which `k -> k . a` orders a support exactly as
//! `phi_alpha` does and `nu(a) > 2 ||S||_inf`.

use serde::{Deserialize, Serialize};

use super::dirichlet::approximation_quality;
use super::nu::{nu_capped, NuCertificate};
use super::order::OrderedSupport;
use super::{LatticePoint, MAX_COORD};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSearch {
    pub certificates: Vec<NuCertificate>,
    /// Scale parameter (`q` or `C`) that produced each point.
    pub scales: Vec<u64>,
    /// True when the search stopped before `count` points were found.
    pub exhausted: bool,
}

impl PointSearch {
    fn new() -> Self {
        Self { certificates: Vec::new(), scales: Vec::new(), exhausted: false }
    }

    pub fn len(&self) -> usize {
        self.certificates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.certificates.is_empty()
    }

    fn push(&mut self, certificate: NuCertificate, scale: u64) {
        self.certificates.push(certificate);
        self.scales.push(scale);
    }
}

fn orders_like(ordered: &OrderedSupport, a: &LatticePoint) -> Result<bool> {
    let mut previous: Option<i128> = None;
    for k in &ordered.points {
        let v = k.dot(a)?;
        if previous.is_some_and(|p| p >= v) {
            return Ok(false);
        }
        previous = Some(v);
    }
    Ok(true)
}

/// Membership test for the ordered support: strict agreement of the integer
/// ordering and `nu(a) > 2 ||S||_inf`. Returns the `nu` certificate on success.
pub fn is_member(ordered: &OrderedSupport, a: &LatticePoint, nu_cap: u64) -> Result<Option<NuCertificate>> {
    if a.dim() != ordered.dim() {
        return Err(Error::DimensionMismatch { expected: ordered.dim(), found: a.dim() });
    }
    if a.is_zero() || !orders_like(ordered, a)? {
        return Ok(None);
    }
    let certificate = nu_capped(a, nu_cap)?;
    Ok((certificate.nu > 2 * ordered.norm_s).then_some(certificate))
}

enum Step {
    Accept(NuCertificate),
    Skip,
    Stop,
}

fn examine(ordered: &OrderedSupport, a: &LatticePoint, nu_cap: u64, last_nu: u64) -> Result<Step> {
    match is_member(ordered, a, nu_cap) {
        Ok(Some(c)) if c.nu > last_nu => Ok(Step::Accept(c)),
        Ok(_) => Ok(Step::Skip),
        Err(Error::ShellCapExceeded { .. }) => Ok(Step::Stop),
        Err(e) => Err(e),
    }
}

fn require_dim(ordered: &OrderedSupport) -> Result<()> {
    if ordered.dim() < 2 {
        return Err(Error::InvalidArgument("lattice points need dimension at least 2".into()));
    }
    Ok(())
}

/// Walks `q = 1, 2, ...` through the Dirichlet set of `alpha`, keeping the
/// rounded vectors `b_q` that belong to the support's admissible set with
/// strictly increasing `nu`.
pub fn generate_b_points(
    ordered: &OrderedSupport,
    count: usize,
    q_cap: u64,
    nu_cap: u64,
) -> Result<PointSearch> {
    require_dim(ordered)?;
    let m = ordered.dim() as f64;
    let mut out = PointSearch::new();
    let mut last_nu = 0;
    for q in 1..=q_cap {
        if out.len() == count {
            return Ok(out);
        }
        let (quality, nearest) = approximation_quality(&ordered.alpha, q);
        if quality > ((q + 1) as f64).powf(-1.0 / m) {
            continue;
        }
        if nearest.iter().any(|c| c.abs() > MAX_COORD) {
            break;
        }
        let b = LatticePoint::new(nearest)?;
        match examine(ordered, &b, nu_cap, last_nu)? {
            Step::Accept(certificate) => {
                last_nu = certificate.nu;
                out.push(certificate, q);
            }
            Step::Skip => {}
            Step::Stop => break,
        }
    }
    out.exhausted = out.len() < count;
    Ok(out)
}

/// Rounds `C alpha` for `C = 1, 2, 4, ...`, keeping admissible vectors with
/// strictly increasing `nu`.
pub fn scaled_direction_points(ordered: &OrderedSupport, count: usize, nu_cap: u64) -> Result<PointSearch> {
    require_dim(ordered)?;
    let mut out = PointSearch::new();
    let mut last_nu = 0;
    for j in 0..62 {
        if out.len() == count {
            return Ok(out);
        }
        let c = 1u64 << j;
        let nearest = ordered.alpha.round_scaled(c);
        if nearest.iter().any(|x| x.abs() > MAX_COORD) {
            break;
        }
        let a = LatticePoint::new(nearest)?;
        match examine(ordered, &a, nu_cap, last_nu)? {
            Step::Accept(certificate) => {
                last_nu = certificate.nu;
                out.push(certificate, c);
            }
            Step::Skip => {}
            Step::Stop => break,
        }
    }
    out.exhausted = out.len() < count;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{order_support, DirectionVector};
    use proptest::prelude::*;

    fn pts(list: &[&[i64]]) -> Vec<LatticePoint> {
        list.iter().map(|c| LatticePoint::new(c.to_vec()).unwrap()).collect()
    }

    fn unit_square() -> Vec<LatticePoint> {
        pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
    }

    /// Independent membership oracle: sorts by the integer values and checks
    /// the permutation, then scans the cube for short orthogonal vectors.
    fn oracle_member(ordered: &OrderedSupport, a: &[i64]) -> bool {
        let mut by_int: Vec<(i128, usize)> = ordered
            .points
            .iter()
            .enumerate()
            .map(|(i, k)| (k.coords().iter().zip(a).map(|(&x, &y)| x as i128 * y as i128).sum(), i))
            .collect();
        by_int.sort();
        let same_order = by_int.iter().enumerate().all(|(pos, &(_, i))| pos == i)
            && by_int.windows(2).all(|w| w[0].0 < w[1].0);
        let bound = 2 * ordered.norm_s as i64;
        let mut short = false;
        let m = a.len();
        let mut v = vec![-bound; m];
        'outer: loop {
            if v.iter().any(|&c| c != 0)
                && v.iter().zip(a).map(|(&x, &y)| x as i128 * y as i128).sum::<i128>() == 0
            {
                short = true;
                break;
            }
            let mut i = 0;
            while i < m && v[i] == bound {
                v[i] = -bound;
                i += 1;
            }
            if i == m {
                break 'outer;
            }
            v[i] += 1;
        }
        same_order && !short
    }

    #[test]
    fn sqrt2_sqrt3_b_points() {
        let alpha = DirectionVector::parse("sqrt2,sqrt3").unwrap();
        let ordered = order_support(&unit_square(), &alpha).unwrap();
        let found = generate_b_points(&ordered, 5, 1_000_000, 64).unwrap();
        assert_eq!(found.len(), 5);
        assert!(!found.exhausted);
        assert!(found.certificates.windows(2).all(|w| w[0].nu < w[1].nu));
        for c in &found.certificates {
            assert!(c.nu > 2);
            assert!(oracle_member(&ordered, c.a.coords()));
            let report = crate::lattice::check_distinct(&ordered.points, &c.a).unwrap();
            assert!(report.hypothesis_holds && report.distinct);
            assert!(report.values.windows(2).all(|w| w[0] < w[1]));
        }
        let first = generate_b_points(&ordered, 1, u64::MAX, 64).unwrap();
        assert_eq!(first.len(), 1);
    }

    #[test]
    fn rational_direction_ties_upstream() {
        let alpha = DirectionVector::parse("1,2").unwrap();
        let s = pts(&[&[0, 0], &[2, 0], &[0, 1]]);
        assert!(matches!(order_support(&s, &alpha), Err(Error::TieDetected { .. })));
    }

    #[test]
    fn rational_direction_has_bounded_nu() {
        // (1, 2) orders this support, but every b_q is a multiple of (1, 2)
        // and nu stays at 2, so no point is admissible.
        let alpha = DirectionVector::parse("1,2").unwrap();
        let ordered = order_support(&pts(&[&[0, 0], &[1, 0]]), &alpha).unwrap();
        let found = generate_b_points(&ordered, 3, 1000, 64).unwrap();
        assert!(found.exhausted);
        assert!(found.is_empty());
    }

    #[test]
    fn nu_cap_exhausts() {
        let alpha = DirectionVector::parse("sqrt2,sqrt3").unwrap();
        let ordered = order_support(&unit_square(), &alpha).unwrap();
        let found = generate_b_points(&ordered, 50, 1_000_000, 64).unwrap();
        assert!(found.exhausted);
        assert!(found.certificates.iter().all(|c| c.nu <= 64));
        assert!(found.certificates.windows(2).all(|w| w[0].nu < w[1].nu));
    }

    #[test]
    fn scaled_points_need_large_c_for_small_gaps() {
        let alpha = DirectionVector::parse("1,1.0001").unwrap();
        let s = pts(&[&[0, 0], &[1, 0], &[0, 1], &[3, 0], &[0, 3]]);
        let ordered = order_support(&s, &alpha).unwrap();
        assert!(ordered.eta < 2e-4);
        let found = scaled_direction_points(&ordered, 3, 1 << 20).unwrap();
        assert_eq!(found.len(), 3);
        assert!(found.scales[0] >= 1 << 13);
        for c in &found.certificates {
            assert!(oracle_member(&ordered, c.a.coords()));
        }
    }

    #[test]
    fn scaled_points_on_unit_square() {
        let alpha = DirectionVector::parse("sqrt2,sqrt3").unwrap();
        let ordered = order_support(&pts(&[&[0, 0], &[1, 0], &[0, 1]]), &alpha).unwrap();
        let found = scaled_direction_points(&ordered, 2, 64).unwrap();
        assert_eq!(found.len(), 2);
        for c in &found.certificates {
            assert!(oracle_member(&ordered, c.a.coords()));
        }
        let none = scaled_direction_points(&ordered, 0, 64).unwrap();
        assert!(none.is_empty() && !none.exhausted);
    }

    #[test]
    fn dimension_checks() {
        let alpha = DirectionVector::parse("sqrt2").unwrap();
        let ordered = order_support(&pts(&[&[0], &[1]]), &alpha).unwrap();
        assert!(generate_b_points(&ordered, 1, 10, 10).is_err());
        let alpha2 = DirectionVector::parse("sqrt2,sqrt3").unwrap();
        let ordered2 = order_support(&unit_square(), &alpha2).unwrap();
        assert!(is_member(&ordered2, &LatticePoint::zero(3), 10).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn membership_matches_oracle(a in proptest::collection::vec(-30i64..=30, 2)) {
            let alpha = DirectionVector::parse("sqrt2,sqrt3").unwrap();
            let ordered = order_support(&unit_square(), &alpha).unwrap();
            let lp = LatticePoint::new(a.clone()).unwrap();
            let got = is_member(&ordered, &lp, 100).unwrap().is_some();
            prop_assert_eq!(got, !lp.is_zero() && oracle_member(&ordered, &a));
        }
    }
}

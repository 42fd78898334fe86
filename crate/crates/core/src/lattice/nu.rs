//! `nu(a) = min { ||b||_inf : b in Z^M \ {0}, b . a = 0 }`, computed by
//! enumerating the boundary of the cube `[-r, r]^M` for `r = 1, 2, ...`.
//! On each face one coordinate is fixed to `+-r`, a pivot coordinate is solved
//! for exactly, and the remaining ones are enumerated.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{support_norm, LatticePoint};
use crate::error::{Error, Result};

pub const DEFAULT_SHELL_CAP: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuCertificate {
    pub a: LatticePoint,
    pub nu: u64,
    /// Lexicographically smallest primitive minimizer with a positive leading entry.
    pub witness: LatticePoint,
}

pub fn nu(a: &LatticePoint) -> Result<NuCertificate> {
    nu_capped(a, DEFAULT_SHELL_CAP)
}

pub fn nu_capped(a: &LatticePoint, cap: u64) -> Result<NuCertificate> {
    if a.is_zero() {
        return Err(Error::ZeroVector);
    }
    let coeffs: Vec<i128> = a.coords().iter().map(|&c| c as i128).collect();
    for r in 1..=cap {
        if let Some(witness) = shell_minimum(&coeffs, r as i64) {
            return Ok(NuCertificate {
                a: a.clone(),
                nu: r,
                witness: LatticePoint::new(witness)?,
            });
        }
    }
    Err(Error::ShellCapExceeded { cap })
}

fn normalize_sign(v: &mut [i64]) {
    if v.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
        v.iter_mut().for_each(|c| *c = -*c);
    }
}

fn is_primitive(v: &[i64]) -> bool {
    v.iter().fold(0i64, |g, &c| g.gcd(&c)) == 1
}

/// Smallest orthogonal primitive vector with sup-norm exactly `r`, if any.
fn shell_minimum(a: &[i128], r: i64) -> Option<Vec<i64>> {
    let m = a.len();
    let mut best: Option<Vec<i64>> = None;
    let mut consider = |mut v: Vec<i64>| {
        normalize_sign(&mut v);
        if is_primitive(&v) && best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    };

    for fixed in 0..m {
        let pivot = (0..m)
            .filter(|&i| i != fixed && a[i] != 0)
            .max_by_key(|&i| (a[i].abs(), std::cmp::Reverse(i)));
        let free: Vec<usize> = (0..m).filter(|&i| i != fixed && Some(i) != pivot).collect();
        for sign in [1i64, -1] {
            let base = sign as i128 * r as i128 * a[fixed];
            let mut v = vec![0i64; m];
            v[fixed] = sign * r;
            let mut digits = vec![-r; free.len()];
            loop {
                let mut partial = base;
                for (slot, &i) in free.iter().enumerate() {
                    v[i] = digits[slot];
                    partial += digits[slot] as i128 * a[i];
                }
                match pivot {
                    Some(p) => {
                        if partial % a[p] == 0 {
                            let x = -partial / a[p];
                            if x.abs() <= r as i128 {
                                v[p] = x as i64;
                                consider(v.clone());
                            }
                        }
                    }
                    None => {
                        if partial == 0 {
                            consider(v.clone());
                        }
                    }
                }
                // odometer step over [-r, r]^free
                let mut slot = 0;
                while slot < digits.len() && digits[slot] == r {
                    digits[slot] = -r;
                    slot += 1;
                }
                if slot == digits.len() {
                    break;
                }
                digits[slot] += 1;
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinctReport {
    /// `k . a` for each support point, in input order.
    pub values: Vec<i128>,
    pub norm_s: u64,
    /// Whether `nu(a) > 2 ||S||_inf` was certified.
    pub hypothesis_holds: bool,
    pub distinct: bool,
}

/// Evaluates `k . a` over the support and reports whether the values are
/// distinct. When `nu(a) > 2 ||S||_inf` they always are.
pub fn check_distinct(support: &[LatticePoint], a: &LatticePoint) -> Result<DistinctReport> {
    let values = support.iter().map(|k| k.dot(a)).collect::<Result<Vec<_>>>()?;
    let norm_s = support_norm(support);
    let hypothesis_holds = match nu_capped(a, 2 * norm_s) {
        Err(Error::ShellCapExceeded { .. }) => true,
        Ok(_) => false,
        Err(e) => return Err(e),
    };
    let mut sorted = values.clone();
    sorted.sort_unstable();
    let distinct = sorted.windows(2).all(|w| w[0] != w[1]);
    if hypothesis_holds && !distinct {
        return Err(Error::InvalidArgument(
            "support contains repeated points".into(),
        ));
    }
    Ok(DistinctReport { values, norm_s, hypothesis_holds, distinct })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lp(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c.to_vec()).unwrap()
    }

    /// Scans the whole cube `[-r, r]^M` in increasing `r`.
    fn brute_nu(a: &[i64], cap: i64) -> Option<(u64, Vec<i64>)> {
        let m = a.len();
        for r in 1..=cap {
            let mut best: Option<Vec<i64>> = None;
            let mut v = vec![-r; m];
            loop {
                let norm = v.iter().map(|c: &i64| c.abs()).max().unwrap();
                let dot: i128 = v.iter().zip(a).map(|(&x, &y)| x as i128 * y as i128).sum();
                let leading_positive = v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0);
                if norm == r && dot == 0 && leading_positive && best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v.clone());
                }
                let mut i = 0;
                while i < m && v[i] == r {
                    v[i] = -r;
                    i += 1;
                }
                if i == m {
                    break;
                }
                v[i] += 1;
            }
            if let Some(b) = best {
                return Some((r as u64, b));
            }
        }
        None
    }

    #[test]
    fn small_examples() {
        let c = nu(&lp(&[1, 1])).unwrap();
        assert_eq!((c.nu, c.witness.coords()), (1, &[1, -1][..]));
        let c = nu(&lp(&[2, 3])).unwrap();
        assert_eq!((c.nu, c.witness.coords()), (3, &[3, -2][..]));
        let c = nu(&lp(&[1, 0, 0])).unwrap();
        assert_eq!((c.nu, c.witness.coords()), (1, &[0, 0, 1][..]));
        assert_eq!(nu(&lp(&[0, 0])), Err(Error::ZeroVector));
        assert_eq!(nu_capped(&lp(&[7, 11]), 5), Err(Error::ShellCapExceeded { cap: 5 }));
        assert_eq!(nu_capped(&lp(&[5]), 10), Err(Error::ShellCapExceeded { cap: 10 }));
    }

    #[test]
    fn certificate_json() {
        let c = nu(&lp(&[2, 3])).unwrap();
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"a":[2,3],"nu":3,"witness":[3,-2]}"#
        );
    }

    #[test]
    fn distinctness_examples() {
        let s = vec![lp(&[0, 0]), lp(&[1, 0]), lp(&[0, 1]), lp(&[1, 1])];
        let r = check_distinct(&s, &lp(&[3, 5])).unwrap();
        assert!(r.hypothesis_holds && r.distinct);
        assert_eq!(r.values, vec![0, 3, 5, 8]);
        let r = check_distinct(&s, &lp(&[1, 1])).unwrap();
        assert!(!r.hypothesis_holds && !r.distinct);
        let tri = vec![lp(&[0, 0]), lp(&[1, 0]), lp(&[0, 1])];
        let r = check_distinct(&tri, &lp(&[3, 7])).unwrap();
        assert!(r.hypothesis_holds && r.distinct);
        assert_eq!(r.values, vec![0, 3, 7]);
        let r = check_distinct(&[lp(&[4, 4])], &lp(&[1, 1])).unwrap();
        assert!(r.distinct);
        assert_eq!(r.values, vec![8]);
    }

    #[test]
    fn one_n_closed_form() {
        for n in 1..=20 {
            let c = nu(&lp(&[1, n])).unwrap();
            assert_eq!(c.nu, n as u64);
            assert_eq!(Some((c.nu, c.witness.coords().to_vec())), brute_nu(&[1, n], 20));
        }
    }

    proptest! {
        #[test]
        fn matches_brute_force(a in proptest::collection::vec(-9i64..=9, 2..=3)) {
            prop_assume!(a.iter().any(|&c| c != 0));
            let got = nu_capped(&lp(&a), 12);
            match brute_nu(&a, 12) {
                Some((n, w)) => {
                    let c = got.unwrap();
                    prop_assert_eq!(c.nu, n);
                    prop_assert_eq!(c.witness.coords(), &w[..]);
                }
                None => {
                    let capped = matches!(got, Err(Error::ShellCapExceeded { .. }));
                    prop_assert!(capped);
                }
            }
        }

        #[test]
        fn four_dimensional_certificates(a in proptest::collection::vec(-100i64..=100, 4)) {
            prop_assume!(a.iter().any(|&c| c != 0));
            let c = nu_capped(&lp(&a), 12).unwrap();
            prop_assert_eq!(c.witness.dot(&lp(&a)).unwrap(), 0);
            prop_assert_eq!(c.witness.inf_norm(), c.nu);
            let (n, w) = brute_nu(&a, c.nu as i64).unwrap();
            prop_assert_eq!(n, c.nu);
            prop_assert_eq!(c.witness.coords(), &w[..]);
        }

        #[test]
        fn two_dimensional_closed_form(x in -500i64..=500, y in -500i64..=500) {
            prop_assume!(x != 0 || y != 0);
            let g = x.gcd(&y);
            let expected = (x.abs().max(y.abs()) / g) as u64;
            prop_assert_eq!(nu_capped(&lp(&[x, y]), 1000).unwrap().nu, expected);
        }

        #[test]
        fn hypothesis_forces_distinct_values(
            a in proptest::collection::vec(-40i64..=40, 2..=3),
            raw in proptest::collection::btree_set(proptest::collection::vec(-3i64..=3, 3), 1..10),
        ) {
            prop_assume!(a.iter().any(|&c| c != 0));
            let m = a.len();
            let s: Vec<LatticePoint> = raw.into_iter()
                .map(|c| LatticePoint::new(c[..m].to_vec()).unwrap())
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            let report = check_distinct(&s, &lp(&a)).unwrap();
            if report.hypothesis_holds {
                prop_assert!(report.distinct);
            }
            let nu_value = nu_capped(&lp(&a), 200).map(|c| c.nu).unwrap_or(u64::MAX);
            prop_assert_eq!(report.hypothesis_holds, nu_value > 2 * report.norm_s);
        }
    }
}

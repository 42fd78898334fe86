use serde::{Deserialize, Serialize};

use super::{mahler_limit, mahler_torus_grid, TorusPoly, MAX_TORUS_DIM};
use crate::bounds::{bound_report, BoundReport, TermKey};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::lattice::{order_support, DirectionVector, LatticePoint, OrderedSupport};
use crate::mahler::{MeasureDetail, MeasureResult, Method};

/// Entries requested from the limit pipeline when `M > 3`.
const LIMIT_ENTRIES: usize = 16;

/// `M(F)` from the tensor grid when `M <= 3`, otherwise from the limit of
/// specializations along `alpha`. Returns the measure and its source label.
pub fn torus_measure(f: &TorusPoly, alpha: &DirectionVector, config: &Config) -> Result<(MeasureResult, &'static str)> {
    if f.dim() <= MAX_TORUS_DIM {
        let m = mahler_torus_grid(f, config.grid_start, config.tol_torus)?;
        return Ok((m, "torus-grid"));
    }
    let trace = mahler_limit(f, alpha, LIMIT_ENTRIES, config.tol_limit, config)?;
    let gap = trace.final_gap.unwrap_or(f64::INFINITY);
    if !trace.converged {
        return Err(Error::NonConvergence { grid: trace.last_nu(), difference: gap });
    }
    let m = MeasureResult::from_log(
        trace.estimate.ln(),
        Method::SpecializationLimit,
        trace.estimate * gap,
        MeasureDetail::Limit { entries: trace.entries.len(), last_nu: trace.last_nu() },
    );
    Ok((m, "specialization-limit"))
}

fn report_for(f: &TorusPoly, ordered: &OrderedSupport, measure: MeasureResult, source: &str) -> Result<BoundReport> {
    let terms = ordered
        .points
        .iter()
        .map(|k| {
            let c = f.coeff(k).expect("ordered support comes from F");
            (TermKey::Point(k.coords().to_vec()), c.norm())
        })
        .collect();
    bound_report(terms, measure, source, Some(ordered.alpha.alphas().to_vec()))
}

/// Indexes the support by increasing `k . alpha` and checks
/// `|F^(k_n)| <= binom(N, n) M(F)` for every `n`.
pub fn check_theorem2(f: &TorusPoly, alpha: &DirectionVector, config: &Config) -> Result<BoundReport> {
    let ordered = order_support(&f.support(), alpha)?;
    let (measure, source) = torus_measure(f, alpha, config)?;
    report_for(f, &ordered, measure, source)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualOrderingReport {
    pub alpha_order: Vec<LatticePoint>,
    pub beta_order: Vec<LatticePoint>,
    /// Positions at which the two orderings place different points.
    pub differing_indices: Vec<usize>,
    pub alpha_report: BoundReport,
    pub beta_report: BoundReport,
}

impl DualOrderingReport {
    pub fn permutations_differ(&self) -> bool {
        !self.differing_indices.is_empty()
    }
}

/// Bound systems for two directions sharing one measure computation.
pub fn dual_ordering_report(
    f: &TorusPoly,
    alpha: &DirectionVector,
    beta: &DirectionVector,
    config: &Config,
) -> Result<DualOrderingReport> {
    let support = f.support();
    let a = order_support(&support, alpha)?;
    let b = order_support(&support, beta)?;
    let (measure, source) = torus_measure(f, alpha, config)?;
    let differing_indices = a
        .points
        .iter()
        .zip(&b.points)
        .enumerate()
        .filter(|(_, (x, y))| x != y)
        .map(|(i, _)| i)
        .collect();
    Ok(DualOrderingReport {
        alpha_report: report_for(f, &a, measure.clone(), source)?,
        beta_report: report_for(f, &b, measure, source)?,
        alpha_order: a.points,
        beta_order: b.points,
        differing_indices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::tests::one_plus_x_plus_y;

    fn product() -> TorusPoly {
        TorusPoly::from_real(2, &[(&[0, 0], 1.0), (&[1, 0], 1.0), (&[0, 1], 1.0), (&[1, 1], 1.0)]).unwrap()
    }

    #[test]
    fn separable_product_bounds() {
        let alpha = DirectionVector::parse("sqrt2,sqrt3").unwrap();
        let r = check_theorem2(&product(), &alpha, &Config::default()).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.measure_source, "torus-grid");
        let binoms: Vec<u64> = r.records.iter().map(|t| t.binom).collect();
        assert_eq!(binoms, vec![1, 3, 3, 1]);
        assert!((r.measure.value - 1.0).abs() < 1e-4);
        assert!(r.records[1].ratio < 0.34 && r.records[2].ratio < 0.34);
    }

    #[test]
    fn two_directions_two_permutations() {
        let f = one_plus_x_plus_y();
        let alpha = DirectionVector::parse("sqrt2,sqrt3").unwrap();
        let beta = DirectionVector::parse("sqrt3,sqrt2").unwrap();
        let d = dual_ordering_report(&f, &alpha, &beta, &Config::default()).unwrap();
        assert_eq!(d.differing_indices, vec![1, 2]);
        assert!(d.alpha_report.satisfied && d.beta_report.satisfied);
        assert_eq!(d.alpha_order[1].coords(), &[1, 0]);
        assert_eq!(d.beta_order[1].coords(), &[0, 1]);
    }

    #[test]
    fn positive_scaling_keeps_permutation() {
        let f = one_plus_x_plus_y();
        let alpha = DirectionVector::parse("sqrt2,sqrt3").unwrap();
        let d = dual_ordering_report(&f, &alpha, &alpha.scaled(2.0).unwrap(), &Config::default()).unwrap();
        assert!(!d.permutations_differ());
        let single = TorusPoly::from_real(2, &[(&[1, 1], 2.0)]).unwrap();
        let d = dual_ordering_report(&single, &alpha, &DirectionVector::parse("sqrt3,sqrt2").unwrap(), &Config::default()).unwrap();
        assert!(!d.permutations_differ());
    }

    #[test]
    fn monomial_is_equality() {
        let f = TorusPoly::from_real(2, &[(&[4, -3], 0.75)]).unwrap();
        let r = check_theorem2(&f, &DirectionVector::parse("phi,1").unwrap(), &Config::default()).unwrap();
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.records[0].binom, 1);
        assert_eq!(r.max_ratio, 1.0);
        assert!(r.satisfied);
    }

    #[test]
    fn ties_propagate() {
        let f = one_plus_x_plus_y();
        let alpha = DirectionVector::parse("1,1").unwrap();
        assert!(matches!(check_theorem2(&f, &alpha, &Config::default()), Err(Error::TieDetected { .. })));
    }

    #[test]
    fn four_variables_use_the_limit() {
        let f = TorusPoly::from_real(4, &[(&[0, 0, 0, 0], 2.0), (&[1, 0, 0, 0], 0.5), (&[0, 0, 1, 1], 0.25)]).unwrap();
        let alpha = DirectionVector::parse("sqrt2,sqrt3,sqrt5,sqrt7").unwrap();
        let r = check_theorem2(&f, &alpha, &Config::default()).unwrap();
        assert_eq!(r.measure_source, "specialization-limit");
        // 2 dominates the other terms, so the measure is 2 exactly
        assert!((r.measure.value - 2.0).abs() < 1e-9);
        assert!(r.satisfied);
    }
}

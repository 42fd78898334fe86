//! Checks of the sparse binomial lower bound `|c_n| <= binom(N, n) M(P)`, where
//! `N + 1` counts monomials rather than the degree.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::mahler::{mahler, MeasureResult};
use crate::sparse_poly::{binomial_power, SparseUniPoly};

/// Largest `N` for which binomials are computed exactly.
pub const MAX_BINOMIAL_N: u64 = 62;

/// `binom(N, n)`, zero outside `0 <= n <= N`.
pub fn binomial(total: u64, n: i64) -> Result<u64> {
    if total > MAX_BINOMIAL_N {
        return Err(Error::Overflow(total));
    }
    if n < 0 || n as u64 > total {
        return Ok(0);
    }
    let k = (n as u64).min(total - n as u64);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (total - i) as u128 / (i + 1) as u128;
    }
    Ok(acc as u64)
}

/// Identifies a term: a univariate exponent or a lattice point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TermKey {
    Exponent(u64),
    Point(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermBound {
    pub index: usize,
    pub key: TermKey,
    pub abs_coeff: f64,
    pub binom: u64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub records: Vec<TermBound>,
    pub measure: MeasureResult,
    /// Where the measure came from, e.g. `"mahler"` or `"torus-grid"`.
    pub measure_source: String,
    /// Direction vector that indexed the support, for multivariate reports.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub direction: Option<Vec<f64>>,
    pub slack: f64,
    pub satisfied: bool,
    pub max_ratio: f64,
}

/// Slack allowed above ratio 1: `1e-9` plus ten relative measure errors.
pub fn slack_for(measure: &MeasureResult) -> f64 {
    1e-9 + 10.0 * measure.error_estimate / measure.value
}

/// Builds a report from coefficient moduli already listed in index order.
pub fn bound_report(
    terms: Vec<(TermKey, f64)>,
    measure: MeasureResult,
    measure_source: &str,
    direction: Option<Vec<f64>>,
) -> Result<BoundReport> {
    let total = terms.len() as u64 - 1;
    let mut records = Vec::with_capacity(terms.len());
    for (index, (key, abs_coeff)) in terms.into_iter().enumerate() {
        let binom = binomial(total, index as i64)?;
        let bound = binom as f64 * measure.value;
        records.push(TermBound {
            index,
            key,
            abs_coeff,
            binom,
            bound,
            ratio: abs_coeff / bound,
        });
    }
    let max_ratio = records.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let slack = slack_for(&measure);
    Ok(BoundReport {
        records,
        satisfied: max_ratio <= 1.0 + slack,
        max_ratio,
        slack,
        measure,
        measure_source: measure_source.to_string(),
        direction,
    })
}

/// Checks every coefficient of `p` against `binom(N, n) M(p)`.
pub fn check_theorem1(p: &SparseUniPoly, config: &Config) -> Result<BoundReport> {
    let q = p.normalize();
    binomial(q.sparsity() as u64, 0)?;
    let measure = mahler(&q, config)?;
    let terms = q
        .terms()
        .iter()
        .zip(p.terms())
        .map(|(&(_, c), &(m, _))| (TermKey::Exponent(m), c.norm()))
        .collect();
    bound_report(terms, measure, "mahler", None)
}

/// Polynomial generator for [`tightness_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScanFamily {
    /// `N` uniform in `1..=max_sparsity`, distinct exponents in
    /// `0..=exponent_cap`, moduli log-uniform in `[1e-3, 1e3]`, uniform phases.
    Random { max_sparsity: usize, exponent_cap: u64 },
    /// The fixed polynomial `(z + shift)^degree`.
    BinomialPower { degree: u32, shift: f64 },
}

impl ScanFamily {
    pub fn generate(&self, rng: &mut ChaCha8Rng) -> Result<SparseUniPoly> {
        match *self {
            ScanFamily::Random { max_sparsity, exponent_cap } => {
                let sparsity = rng.random_range(1..=max_sparsity.max(1));
                if sparsity as u64 > exponent_cap {
                    return Err(Error::InvalidArgument(
                        "exponent cap too small for the requested sparsity".into(),
                    ));
                }
                let mut exponents = BTreeSet::new();
                while exponents.len() < sparsity + 1 {
                    exponents.insert(rng.random_range(0..=exponent_cap));
                }
                let terms = exponents
                    .into_iter()
                    .map(|m| {
                        let modulus = 10f64.powf(rng.random_range(-3.0..=3.0));
                        let phase = rng.random_range(0.0..TAU);
                        (m, Complex64::from_polar(modulus, phase))
                    })
                    .collect();
                SparseUniPoly::new(terms)
            }
            ScanFamily::BinomialPower { degree, shift } => binomial_power(degree, shift),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub sample: usize,
    pub sparsity: usize,
    pub degree: u64,
    pub measure: f64,
    pub method: String,
    pub error_estimate: f64,
    pub max_ratio: f64,
    pub satisfied: bool,
    /// Numerical failure message when the measure could not be computed.
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub rows: Vec<ScanRow>,
    pub samples: usize,
    pub violations: usize,
    pub failures: usize,
    pub max_ratio: f64,
    pub median_ratio: f64,
}

impl ScanSummary {
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "sample",
            "sparsity",
            "degree",
            "measure",
            "method",
            "error_estimate",
            "max_ratio",
            "satisfied",
            "error",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.sample.to_string(),
                r.sparsity.to_string(),
                r.degree.to_string(),
                format!("{:e}", r.measure),
                r.method.clone(),
                format!("{:e}", r.error_estimate),
                format!("{:e}", r.max_ratio),
                r.satisfied.to_string(),
                r.error.clone(),
            ])?;
        }
        w.flush()
    }
}

/// Runs [`check_theorem1`] on `samples` generated polynomials. Polynomials are
/// drawn sequentially from a ChaCha8 stream seeded by `seed`, then checked in
/// parallel and merged in sample order, so the output depends only on the seed.
pub fn tightness_scan(family: &ScanFamily, samples: usize, seed: u64, config: &Config) -> Result<ScanSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let polys = (0..samples)
        .map(|_| family.generate(&mut rng))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ScanRow> = polys
        .par_iter()
        .enumerate()
        .map(|(sample, p)| {
            let base = ScanRow {
                sample,
                sparsity: p.sparsity(),
                degree: p.dense_degree(),
                measure: f64::NAN,
                method: String::new(),
                error_estimate: f64::NAN,
                max_ratio: f64::NAN,
                satisfied: false,
                error: String::new(),
            };
            match check_theorem1(p, config) {
                Ok(report) => ScanRow {
                    measure: report.measure.value,
                    method: format!("{:?}", report.measure.method),
                    error_estimate: report.measure.error_estimate,
                    max_ratio: report.max_ratio,
                    satisfied: report.satisfied,
                    ..base
                },
                Err(e) => ScanRow {
                    error: e.to_string(),
                    ..base
                },
            }
        })
        .collect();
    let failures = rows.iter().filter(|r| !r.error.is_empty()).count();
    let violations = rows
        .iter()
        .filter(|r| r.error.is_empty() && !r.satisfied)
        .count();
    let mut ratios: Vec<f64> = rows
        .iter()
        .filter(|r| r.error.is_empty())
        .map(|r| r.max_ratio)
        .collect();
    ratios.sort_by(f64::total_cmp);
    Ok(ScanSummary {
        samples,
        violations,
        failures,
        max_ratio: ratios.last().copied().unwrap_or(0.0),
        median_ratio: ratios.get(ratios.len() / 2).copied().unwrap_or(0.0),
        rows,
    })
}

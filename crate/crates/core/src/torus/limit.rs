use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TorusPoly;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::lattice::{generate_b_points, order_support, scaled_direction_points, DirectionVector, LatticePoint};
use crate::mahler::{mahler, MeasureResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSource {
    /// Rounded multiples `b_q` of the direction along the Dirichlet set.
    Dirichlet,
    /// Rounded dyadic multiples `C alpha`.
    Scaled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEntry {
    /// Multiplier `q` or scale `C` that produced `a`.
    pub q: u64,
    pub a: LatticePoint,
    pub nu: u64,
    pub measure: MeasureResult,
    /// Relative change from the previous entry.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitTrace {
    pub entries: Vec<LimitEntry>,
    pub estimate: f64,
    pub converged: bool,
    pub final_gap: Option<f64>,
    /// Fewer entries than requested could be certified.
    pub exhausted: bool,
    pub source: PointSource,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    index: usize,
    q: u64,
    a: String,
    nu: u64,
    measure: f64,
    method: &'a str,
    error_estimate: f64,
    gap: Option<f64>,
}

impl LimitTrace {
    pub fn last_nu(&self) -> u64 {
        self.entries.last().map_or(0, |e| e.nu)
    }

    /// One row per entry; the lattice point is written as `k1;k2;...`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.entries.is_empty() {
            w.write_record(["index", "q", "a", "nu", "measure", "method", "error_estimate", "gap"])?;
        }
        for (index, e) in self.entries.iter().enumerate() {
            let method = format!("{:?}", e.measure.method);
            w.serialize(CsvRow {
                index,
                q: e.q,
                a: e.a.coords().iter().map(i64::to_string).collect::<Vec<_>>().join(";"),
                nu: e.nu,
                measure: e.measure.value,
                method: &method,
                error_estimate: e.measure.error_estimate,
                gap: e.gap,
            })?;
        }
        w.flush()
    }
}

/// Measures of the specializations `F_a` along admissible points of strictly
/// increasing `nu`. Points come from the Dirichlet walk; when that walk stops
/// short, dyadic scalings of `alpha` are tried and the longer sequence is kept.
///
/// The trace is converged when the last two measures differ by less than `tol`
/// relative. A search that ends early is returned with `exhausted = true`.
pub fn mahler_limit(
    f: &TorusPoly,
    alpha: &DirectionVector,
    count: usize,
    tol: f64,
    config: &Config,
) -> Result<LimitTrace> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be positive".into()));
    }
    if f.dim() < 2 {
        return Err(Error::InvalidArgument(
            "limits need at least two variables; use the univariate engine".into(),
        ));
    }
    let ordered = order_support(&f.support(), alpha)?;
    let mut search = generate_b_points(&ordered, count, config.q_cap, config.nu_shell_cap)?;
    let mut source = PointSource::Dirichlet;
    if search.exhausted {
        let scaled = scaled_direction_points(&ordered, count, config.nu_shell_cap)?;
        if scaled.len() > search.len() {
            search = scaled;
            source = PointSource::Scaled;
        }
    }

    let measures = search
        .certificates
        .par_iter()
        .map(|c| mahler(&f.specialize(&c.a)?, config))
        .collect::<Result<Vec<_>>>()?;

    let mut entries: Vec<LimitEntry> = Vec::with_capacity(measures.len());
    for (i, measure) in measures.into_iter().enumerate() {
        let gap = entries
            .last()
            .map(|prev| (measure.value - prev.measure.value).abs() / measure.value);
        entries.push(LimitEntry {
            q: search.scales[i],
            a: search.certificates[i].a.clone(),
            nu: search.certificates[i].nu,
            measure,
            gap,
        });
    }

    let single_term = f.terms().len() == 1;
    let final_gap = if single_term && !entries.is_empty() {
        Some(0.0)
    } else {
        entries.last().and_then(|e| e.gap)
    };
    Ok(LimitTrace {
        estimate: entries.last().map_or(f64::NAN, |e| e.measure.value),
        converged: final_gap.is_some_and(|g| g < tol),
        final_gap,
        exhausted: search.exhausted,
        source,
        entries,
    })
}

//! Mahler measure of univariate polynomials via two independent engines: the
//! root product `|c_N| prod max(1, |alpha|)` and the circle average of
//! `log |p(e(t))|`.

mod quadrature;
mod roots;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::sparse_poly::SparseUniPoly;

pub use quadrature::{mahler_quadrature, MAX_CIRCLE_GRID};
pub use roots::{find_roots, mahler_roots, RootSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    RootProduct,
    CircleQuadrature,
    TorusGrid,
    SpecializationLimit,
}

/// Method-specific diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureDetail {
    Exact,
    Roots {
        root_count: usize,
        clusters: usize,
        max_residual: f64,
    },
    Grid {
        grid: u64,
        levels: usize,
        singular_samples: usize,
        /// Roots near the circle whose trapezoid error was subtracted exactly.
        #[serde(default)]
        located_roots: usize,
    },
    Limit {
        entries: usize,
        last_nu: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub value: f64,
    pub log_value: f64,
    pub method: Method,
    pub error_estimate: f64,
    pub detail: MeasureDetail,
}

impl MeasureResult {
    pub fn from_log(log_value: f64, method: Method, error_estimate: f64, detail: MeasureDetail) -> Self {
        Self {
            value: log_value.exp(),
            log_value,
            method,
            error_estimate,
            detail,
        }
    }

    /// A value known in closed form (monomials).
    pub fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            log_value: value.ln(),
            method,
            error_estimate: 0.0,
            detail: MeasureDetail::Exact,
        }
    }

    /// `error_estimate / value`.
    pub fn relative_error(&self) -> f64 {
        self.error_estimate / self.value
    }
}

/// Dispatches to the root product when the normalized degree is at most
/// `config.dense_degree_cap` and to circle quadrature otherwise.
pub fn mahler(p: &SparseUniPoly, config: &Config) -> Result<MeasureResult> {
    if p.sparsity() == 0 {
        return Ok(MeasureResult::exact(p.leading_coeff().norm(), Method::RootProduct));
    }
    if p.dense_degree() <= config.dense_degree_cap {
        match mahler_roots(p, config.dense_degree_cap) {
            Err(Error::ConvergenceFailure { .. }) => {
                mahler_quadrature(p, config.grid_start, config.tol_quadrature)
            }
            other => other,
        }
    } else {
        mahler_quadrature(p, config.grid_start, config.tol_quadrature)
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical knobs shared by the library entry points and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Stopping tolerance for circle quadrature (absolute, in log space).
    pub tol_quadrature: f64,
    /// Stopping tolerance for tensor-grid torus quadrature (absolute, in log space).
    pub tol_torus: f64,
    /// Relative stopping tolerance for specialization limits.
    pub tol_limit: f64,
    /// Largest normalized degree handled by the root-product engine.
    pub dense_degree_cap: u64,
    /// Largest shell radius searched when computing `nu`.
    pub nu_shell_cap: u64,
    /// Largest multiplier scanned by the Dirichlet-based point generator.
    pub q_cap: u64,
    /// Initial circle-quadrature grid (power of two, at least 64).
    pub grid_start: u64,
    pub seed: u64,
    /// Worker threads for deterministic fan-out; results never depend on it.
    pub workers: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tol_quadrature: 1e-9,
            tol_torus: 1e-6,
            tol_limit: 1e-3,
            dense_degree_cap: 4096,
            nu_shell_cap: 64,
            q_cap: 1_000_000,
            grid_start: 64,
            seed: 0,
            workers: 1,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
            }
        };
        positive("tol_quadrature", self.tol_quadrature)?;
        positive("tol_torus", self.tol_torus)?;
        positive("tol_limit", self.tol_limit)?;
        for (name, v) in [
            ("dense_degree_cap", self.dense_degree_cap),
            ("nu_shell_cap", self.nu_shell_cap),
            ("q_cap", self.q_cap),
            ("workers", self.workers as u64),
        ] {
            if v < 1 {
                return Err(Error::InvalidArgument(format!("{name} must be at least 1")));
            }
        }
        if self.grid_start < 64 || !self.grid_start.is_power_of_two() {
            return Err(Error::InvalidArgument(
                "grid_start must be a power of two >= 64".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = Config::default();
        c.validate().unwrap();
        assert_eq!(c.dense_degree_cap, 4096);
        assert_eq!(c.nu_shell_cap, 64);
        assert_eq!(c.q_cap, 1_000_000);
    }

    #[test]
    fn rejects_bad_values() {
        let c = Config { tol_limit: 0.0, ..Config::default() };
        assert!(c.validate().is_err());
        let c = Config { grid_start: 100, ..Config::default() };
        assert!(c.validate().is_err());
        let c = Config { nu_shell_cap: 0, ..Config::default() };
        assert!(c.validate().is_err());
    }
}

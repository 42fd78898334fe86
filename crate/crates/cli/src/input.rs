use std::path::Path;

use mahler_core::{Config, DirectionVector, LatticePoint, SparseUniPoly, TorusPoly};

use crate::failure::Failure;
use crate::GlobalArgs;

pub enum PolyInput {
    Univariate(SparseUniPoly),
    Torus(TorusPoly),
}

pub fn load_config(args: &GlobalArgs) -> Result<Config, Failure> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?
        }
        None => Config::default(),
    };
    macro_rules! apply {
        ($($field:ident),*) => {$(
            if let Some(v) = args.$field {
                config.$field = v;
            }
        )*};
    }
    apply!(tol_quadrature, tol_torus, tol_limit, dense_degree_cap, nu_shell_cap, q_cap, grid_start, seed, workers);
    config.validate()?;
    Ok(config)
}

/// Reads either `{"terms": ...}` or `{"M": ..., "coeffs": ...}`.
pub fn load_poly(path: &Path) -> Result<PolyInput, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let parsed = if value.get("M").is_some() {
        serde_json::from_value(value).map(PolyInput::Torus)
    } else {
        serde_json::from_value(value).map(PolyInput::Univariate)
    };
    parsed.map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

pub fn load_torus(path: &Path) -> Result<TorusPoly, Failure> {
    match load_poly(path)? {
        PolyInput::Torus(f) => Ok(f),
        PolyInput::Univariate(_) => Err(Failure::parse(format!("{}: expected a torus polynomial", path.display()))),
    }
}

pub fn direction(text: &str) -> Result<DirectionVector, Failure> {
    Ok(DirectionVector::parse(text)?)
}

/// Parses `0,0;1,0;0,1`.
pub fn support(text: &str) -> Result<Vec<LatticePoint>, Failure> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| LatticePoint::parse(s).map_err(Failure::from))
        .collect()
}

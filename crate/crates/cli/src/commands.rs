use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use mahler_core::bounds::{check_theorem1, tightness_scan, BoundReport, ScanFamily, TermKey};
use mahler_core::lattice::{dirichlet_step, generate_b_points, nu_capped, order_support, scaled_direction_points};
use mahler_core::mahler::mahler_quadrature;
use mahler_core::torus::{check_theorem2, dual_ordering_report, mahler_limit, mahler_torus_grid, torus_measure};
use mahler_core::{mahler, Config, LatticePoint, MeasureResult};
use serde::Serialize;

use crate::failure::{Failure, EXIT_EXHAUSTED};
use crate::input::{direction, load_poly, load_torus, support, PolyInput};
use crate::Format;

type Outcome = Result<ExitCode, Failure>;

fn write_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Failure::numerical(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::Writer::from_writer(out)
}

fn csv_error(e: csv::Error) -> Failure {
    Failure::numerical(e.to_string())
}

fn join(coords: &[i64]) -> String {
    coords.iter().map(i64::to_string).collect::<Vec<_>>().join(";")
}

fn measure_csv<W: Write>(out: &mut W, m: &MeasureResult) -> Result<(), Failure> {
    let mut w = csv_writer(out);
    w.write_record(["value", "log_value", "method", "error_estimate"]).map_err(csv_error)?;
    w.write_record([
        m.value.to_string(),
        m.log_value.to_string(),
        format!("{:?}", m.method),
        m.error_estimate.to_string(),
    ])
    .map_err(csv_error)?;
    w.flush()?;
    Ok(())
}

pub fn measure<W: Write>(
    out: &mut W,
    file: &Path,
    grid: bool,
    alpha: Option<&str>,
    config: &Config,
    format: Option<Format>,
) -> Outcome {
    let result = match load_poly(file)? {
        PolyInput::Univariate(p) if grid => mahler_quadrature(&p, config.grid_start, config.tol_quadrature)?,
        PolyInput::Univariate(p) => mahler(&p, config)?,
        PolyInput::Torus(f) if grid || f.dim() <= 3 => mahler_torus_grid(&f, config.grid_start, config.tol_torus)?,
        PolyInput::Torus(f) => {
            let alpha = alpha.ok_or_else(|| Failure::parse("--alpha is required for more than three variables"))?;
            torus_measure(&f, &direction(alpha)?, config)?.0
        }
    };
    match format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &result)?,
        Format::Csv => measure_csv(out, &result)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn report_rows<W: Write>(w: &mut csv::Writer<W>, label: &str, report: &BoundReport) -> Result<(), Failure> {
    for r in &report.records {
        let key = match &r.key {
            TermKey::Exponent(m) => m.to_string(),
            TermKey::Point(k) => join(k),
        };
        w.write_record([
            label.to_string(),
            r.index.to_string(),
            key,
            r.abs_coeff.to_string(),
            r.binom.to_string(),
            r.bound.to_string(),
            r.ratio.to_string(),
        ])
        .map_err(csv_error)?;
    }
    Ok(())
}

fn reports_csv<W: Write>(out: &mut W, reports: &[(&str, &BoundReport)]) -> Result<(), Failure> {
    let mut w = csv_writer(out);
    w.write_record(["ordering", "index", "key", "abs_coeff", "binom", "bound", "ratio"])
        .map_err(csv_error)?;
    for (label, report) in reports {
        report_rows(&mut w, label, report)?;
    }
    w.flush()?;
    Ok(())
}

pub fn bounds<W: Write>(
    out: &mut W,
    file: &Path,
    alpha: Option<&str>,
    beta: Option<&str>,
    config: &Config,
    format: Option<Format>,
) -> Outcome {
    let format = format.unwrap_or(Format::Json);
    match load_poly(file)? {
        PolyInput::Univariate(p) => {
            if alpha.is_some() || beta.is_some() {
                return Err(Failure::parse("--alpha and --beta apply to torus polynomials only"));
            }
            let report = check_theorem1(&p, config)?;
            match format {
                Format::Json => write_json(out, &report)?,
                Format::Csv => reports_csv(out, &[("exponent", &report)])?,
            }
        }
        PolyInput::Torus(f) => {
            let alpha = direction(alpha.ok_or_else(|| Failure::parse("--alpha is required for torus polynomials"))?)?;
            match beta {
                None => {
                    let report = check_theorem2(&f, &alpha, config)?;
                    match format {
                        Format::Json => write_json(out, &report)?,
                        Format::Csv => reports_csv(out, &[("alpha", &report)])?,
                    }
                }
                Some(beta) => {
                    let dual = dual_ordering_report(&f, &alpha, &direction(beta)?, config)?;
                    match format {
                        Format::Json => write_json(out, &dual)?,
                        Format::Csv => reports_csv(out, &[("alpha", &dual.alpha_report), ("beta", &dual.beta_report)])?,
                    }
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn nu<W: Write>(out: &mut W, a: &str, config: &Config, format: Option<Format>) -> Outcome {
    let a = LatticePoint::parse(a)?;
    let certificate = nu_capped(&a, config.nu_shell_cap)?;
    match format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &certificate)?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["a", "nu", "witness"]).map_err(csv_error)?;
            w.write_record([join(certificate.a.coords()), certificate.nu.to_string(), join(certificate.witness.coords())])
                .map_err(csv_error)?;
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn dirichlet<W: Write>(out: &mut W, alpha: &str, q_max: u64, format: Option<Format>) -> Outcome {
    let step = dirichlet_step(&direction(alpha)?, q_max)?;
    match format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &step)?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["q", "b", "quality"]).map_err(csv_error)?;
            w.write_record([step.q.to_string(), join(step.b.coords()), step.quality.to_string()])
                .map_err(csv_error)?;
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn bpoints<W: Write>(
    out: &mut W,
    support_text: &str,
    alpha: &str,
    count: usize,
    scaled: bool,
    config: &Config,
    format: Option<Format>,
) -> Outcome {
    let ordered = order_support(&support(support_text)?, &direction(alpha)?)?;
    let search = if scaled {
        scaled_direction_points(&ordered, count, config.nu_shell_cap)?
    } else {
        generate_b_points(&ordered, count, config.q_cap, config.nu_shell_cap)?
    };
    match format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &search)?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["scale", "a", "nu", "witness"]).map_err(csv_error)?;
            for (c, scale) in search.certificates.iter().zip(&search.scales) {
                w.write_record([scale.to_string(), join(c.a.coords()), c.nu.to_string(), join(c.witness.coords())])
                    .map_err(csv_error)?;
            }
            w.flush()?;
        }
    }
    Ok(if search.exhausted { ExitCode::from(EXIT_EXHAUSTED) } else { ExitCode::SUCCESS })
}

pub fn limit<W: Write>(
    out: &mut W,
    file: &Path,
    alpha: &str,
    count: usize,
    config: &Config,
    format: Option<Format>,
) -> Outcome {
    let f = load_torus(file)?;
    let trace = mahler_limit(&f, &direction(alpha)?, count, config.tol_limit, config)?;
    match format.unwrap_or(Format::Csv) {
        Format::Json => write_json(out, &trace)?,
        Format::Csv => trace.write_csv(&mut *out)?,
    }
    let partial = trace.exhausted || !trace.converged;
    Ok(if partial { ExitCode::from(EXIT_EXHAUSTED) } else { ExitCode::SUCCESS })
}

pub fn scan<W: Write>(out: &mut W, family: &ScanFamily, samples: usize, config: &Config, format: Option<Format>) -> Outcome {
    let summary = tightness_scan(family, samples, config.seed, config)?;
    match format.unwrap_or(Format::Csv) {
        Format::Json => write_json(out, &summary)?,
        Format::Csv => summary.write_csv(&mut *out)?,
    }
    Ok(ExitCode::SUCCESS)
}

mod commands;
mod failure;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use failure::Failure;

#[derive(Parser)]
#[command(name = "mahler", version, about = "Mahler measures, sparse coefficient bounds and lattice orderings")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// TOML file with configuration values; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Inter-grid tolerance of circle quadrature (default 1e-9).
    #[arg(long, global = true)]
    tol_quadrature: Option<f64>,
    /// Inter-grid tolerance of the torus grid (default 1e-6).
    #[arg(long, global = true)]
    tol_torus: Option<f64>,
    /// Relative gap at which a specialization trace counts as converged.
    #[arg(long, global = true)]
    tol_limit: Option<f64>,
    /// Largest degree sent to the root engine (default 4096).
    #[arg(long, global = true)]
    dense_degree_cap: Option<u64>,
    /// Largest shell searched when certifying nu.
    #[arg(long, global = true)]
    nu_shell_cap: Option<u64>,
    /// Largest multiplier q tried by the Dirichlet search.
    #[arg(long, global = true)]
    q_cap: Option<u64>,
    /// First grid size, a power of two >= 64.
    #[arg(long, global = true)]
    grid_start: Option<u64>,
    /// Seed for sampled families.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Mahler measure of a univariate or torus polynomial file.
    Measure {
        file: PathBuf,
        /// Use uniform-grid quadrature instead of the default engine.
        #[arg(long)]
        grid: bool,
        /// Direction for the limit pipeline when the torus has more than three variables.
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Binomial coefficient bounds; `--beta` compares two orderings.
    Bounds {
        file: PathBuf,
        /// Direction ordering the support of a torus polynomial, e.g. `sqrt2,phi`.
        #[arg(long)]
        alpha: Option<String>,
        /// Second direction; reports both bound systems side by side.
        #[arg(long)]
        beta: Option<String>,
    },
    /// Lattice utilities.
    #[command(subcommand)]
    Lattice(LatticeCommand),
    /// Trace of specialization measures converging to M(F).
    Limit {
        file: PathBuf,
        #[arg(long)]
        alpha: String,
        /// Number of specializations in the trace.
        #[arg(long, default_value_t = 8)]
        count: usize,
    },
    /// Seeded scan of the coefficient bounds over a polynomial family.
    Scan {
        #[arg(long)]
        samples: usize,
        /// Random sparse polynomials, or repeated copies of `(z + shift)^degree`.
        #[arg(long, value_enum, default_value_t = Family::Random)]
        family: Family,
        #[arg(long, default_value_t = 12)]
        max_sparsity: usize,
        #[arg(long, default_value_t = 10_000)]
        exponent_cap: u64,
        #[arg(long, default_value_t = 10)]
        degree: u32,
        #[arg(long, default_value_t = 1.0)]
        shift: f64,
    },
}

#[derive(Subcommand)]
enum LatticeCommand {
    /// Smallest sup-norm of a nonzero integer vector orthogonal to `a`.
    Nu { a: String },
    /// First `q <= Q` meeting the simultaneous approximation bound.
    Dirichlet {
        alpha: String,
        #[arg(long = "Q")]
        q_max: u64,
    },
    /// Admissible lattice points for a support ordered by `alpha`.
    Bpoints {
        /// Points separated by `;`, coordinates by `,`, e.g. `0,0;1,0;0,1`.
        #[arg(long)]
        support: String,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 3)]
        count: usize,
        /// Use dyadic scalings of alpha instead of the Dirichlet walk.
        #[arg(long)]
        scaled: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Random,
    Binomial,
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let config = input::load_config(&cli.global)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build_global()
        .map_err(|e| Failure::numerical(format!("cannot start worker pool: {e}")))?;
    let format = cli.global.format;
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Measure { file, grid, alpha } => commands::measure(&mut out, &file, grid, alpha.as_deref(), &config, format),
        Command::Bounds { file, alpha, beta } => {
            commands::bounds(&mut out, &file, alpha.as_deref(), beta.as_deref(), &config, format)
        }
        Command::Lattice(sub) => match sub {
            LatticeCommand::Nu { a } => commands::nu(&mut out, &a, &config, format),
            LatticeCommand::Dirichlet { alpha, q_max } => commands::dirichlet(&mut out, &alpha, q_max, format),
            LatticeCommand::Bpoints { support, alpha, count, scaled } => {
                commands::bpoints(&mut out, &support, &alpha, count, scaled, &config, format)
            }
        },
        Command::Limit { file, alpha, count } => commands::limit(&mut out, &file, &alpha, count, &config, format),
        Command::Scan { samples, family, max_sparsity, exponent_cap, degree, shift } => {
            let family = match family {
                Family::Random => mahler_core::bounds::ScanFamily::Random { max_sparsity, exponent_cap },
                Family::Binomial => mahler_core::bounds::ScanFamily::BinomialPower { degree, shift },
            };
            commands::scan(&mut out, &family, samples, &config, format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

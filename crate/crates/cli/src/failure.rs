use mahler_core::Error;

pub const EXIT_PARSE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_EXHAUSTED: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn parse(message: impl Into<String>) -> Self {
        Self { code: EXIT_PARSE, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self { code: EXIT_NUMERICAL, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ZeroPolynomial
            | Error::InvalidPolynomial(_)
            | Error::ExponentTooLarge { .. }
            | Error::DimensionMismatch { .. }
            | Error::ZeroVector
            | Error::InvalidDirection(_)
            | Error::InvalidLatticePoint(_)
            | Error::InvalidArgument(_) => EXIT_PARSE,
            Error::ShellCapExceeded { .. } | Error::NotFound { .. } => EXIT_EXHAUSTED,
            Error::DegreeCapExceeded { .. }
            | Error::ConvergenceFailure { .. }
            | Error::NonConvergence { .. }
            | Error::Overflow(_)
            | Error::TieDetected { .. }
            | Error::ExponentCollision { .. }
            | Error::GridTooCoarse { .. }
            | Error::DimensionTooLarge(_) => EXIT_NUMERICAL,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::parse(e.to_string())
    }
}

use thiserror::Error;

/// Error type shared by every module in the crate.
///
/// The variants map one-to-one onto the CLI exit codes (see `exit_code`),
/// so library consumers and shell scripts see the same failure taxonomy.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation
    /// (classically forbidden point, quantum number out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// API misuse: inconsistent grids, duplicate fermionic labels,
    /// wrong mode representation.
    #[error("usage error: {0}")]
    Usage(String),

    /// A numerical procedure failed to reach its documented tolerance
    /// (eigensolver non-convergence, quadrature stagnation, spectra
    /// outside their certified bounds).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A documented size cap would be exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Malformed experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the CLI for this error class.
    ///
    /// 2 = configuration / invalid input, 3 = numerical, 4 = resource, 5 = i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Usage(_) => 2,
            Error::Numerical(_) => 3,
            Error::Resource(_) => 4,
            Error::Io(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

//! Crate-wide error type.

use std::fmt;
use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// Underlying I/O failure, with the path that triggered it.
    Io { path: PathBuf, source: std::io::Error },
    /// Malformed line in an input file (1-based line number).
    Parse { path: PathBuf, line: u64, message: String },
    /// Operation undefined on the given input (empty multiset, 0/0 ratio, ...).
    Domain(String),
    /// Feature vectors of different shapes cannot be compared.
    DimensionMismatch { left: usize, right: usize },
    /// Requested sample exceeds the population.
    SampleTooLarge { requested: u64, available: u64 },
    /// A grid statistic referenced a cell that was never provided.
    IncompleteGrid(String),
    /// A plan or manifest referenced an unknown label.
    UnknownLabel(String),
    /// Invalid run configuration (bad checkpoints, bad plan, ...).
    Config(String),
    /// Ingestion exceeded the configured memory ceiling.
    MemoryLimit { limit: u64, estimated: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io { path, source } => write!(f, "{}: {}", path.display(), source),
            Error::Parse { path, line, message } => {
                write!(f, "{}:{}: {}", path.display(), line, message)
            }
            Error::Domain(msg) => write!(f, "{msg}"),
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::SampleTooLarge { requested, available } => {
                write!(f, "cannot sample {requested} passwords from a multiset of {available}")
            }
            Error::IncompleteGrid(msg) => write!(f, "incomplete grid: {msg}"),
            Error::UnknownLabel(label) => write!(f, "unknown label: {label}"),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::MemoryLimit { limit, estimated } => {
                write!(f, "memory ceiling exceeded: estimated {estimated} bytes > limit {limit}")
            }
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl Error {
    /// True for errors caused by bad configuration rather than bad data.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_) | Error::UnknownLabel(_))
    }
}

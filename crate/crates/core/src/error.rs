use std::fmt;

use crate::approx::ApproxKind;

/// Errors surfaced by the engine and the oracle.
///
/// Domain wipe-outs are *not* errors: propagation reports them through
/// `Status::Failed` / boolean update results. An `Error` means the caller
/// violated a contract (arity, variable ids, ...) or a computation left the
/// supported envelope (64-bit overflow, oversized materialization).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Arithmetic on view or propagator bounds left the i64 range.
    Overflow,
    /// A tuple-set or box operation received operands of different arity.
    ArityMismatch { expected: usize, found: usize },
    /// Materializing a Cartesian product or box would exceed the size cap.
    UniverseTooLarge(u128),
    /// The approximation kind is not supported by this operation.
    UnsupportedKind(ApproxKind),
    /// A view refers to a variable that is not registered in the store.
    UnknownVariable(usize),
    /// Variable creation with lo > hi.
    EmptyVariableDomain { lo: i64, hi: i64 },
    /// A model builder was given inconsistent instance parameters.
    InvalidSpec(String),
    /// The requested decomposition variant cannot express this constraint.
    UnsupportedVariant(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Overflow => write!(f, "arithmetic overflow in bound computation"),
            Error::ArityMismatch { expected, found } => {
                write!(f, "arity mismatch: expected {expected}, found {found}")
            }
            Error::UniverseTooLarge(n) => {
                write!(f, "refusing to materialize {n} tuples (cap is {})", crate::approx::MAX_MATERIALIZED_TUPLES)
            }
            Error::UnsupportedKind(k) => write!(f, "approximation kind {k:?} not supported here"),
            Error::UnknownVariable(v) => write!(f, "unknown variable id {v}"),
            Error::EmptyVariableDomain { lo, hi } => {
                write!(f, "cannot create variable with empty domain [{lo}..{hi}]")
            }
            Error::InvalidSpec(msg) => write!(f, "invalid instance spec: {msg}"),
            Error::UnsupportedVariant(msg) => write!(f, "unsupported variant: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

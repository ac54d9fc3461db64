//! A finite-domain constraint propagation engine built on box views.
//!
//! Decomposable constraints (arbitrary arithmetic and logical expressions)
//! are propagated either through auxiliary variables in the classical style,
//! or through *box views*: objects exposing the bounds of an expression
//! directly over the variable store, with no intermediate variables. Views
//! come in two flavours with identical semantics: a compile-time specialized
//! composition and a runtime-dispatched object tree.
//!
//! The crate ships:
//!
//! - [`approx`]: tuple sets, intervals, boxes and the approximation algebra;
//! - [`oracle`]: slow, trusted reference semantics used to validate
//!   everything else;
//! - [`views`]: the box view contract and its two dispatch realizations;
//! - [`propagators`]: primitive propagators over views plus constraint
//!   decomposition;
//! - [`engine`]: variable store, trailing, propagation queue, search;
//! - [`models`]: builders for the benchmark problem families;
//! - [`verify`]: the validation suites run by tests and the CLI.

pub mod approx;
pub mod engine;
pub mod error;
pub mod models;
pub mod oracle;
pub mod propagators;
pub mod verify;
pub mod views;

pub use approx::{ApproxKind, IntBox, Interval, TupleSet};
pub use engine::{Brancher, Event, SearchStats, Store, VarId};
pub use error::{Error, Result};
pub use propagators::Status;
pub use views::{BoxView, DispatchMode, ViewNode};

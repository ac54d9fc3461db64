//! Primitive propagators over box views.
//!
//! A propagator owns the views of one constraint and is generic over the
//! view type, so the same filtering code runs over plain variables, over
//! statically composed expressions and over dynamically dispatched ones.
//! Each `execute` runs to a local fixpoint (repeated passes until its view
//! bounds stop moving) and reports one of three states.

mod decompose;
mod distinct;
mod mul;
mod primitives;
mod sum;

pub use decompose::{
    chain_nodes, post_decomposed, post_fixed, ChainShape, DecomposeOptions, Decomposition, Leaf,
    Relation,
};
pub(crate) use decompose::Flattener;
pub use distinct::DistinctBounds;
pub use mul::MulEq;
pub use primitives::{Eq, Leq, Neq};
pub use sum::{linear_eq, LinearEq, SumEq, SumGeq, SumLeq};

use crate::engine::{DomainStore, Event, VarId};
use crate::error::Result;

/// Outcome of one propagator execution.
///
/// `Failed` means a domain emptied. `Idempotent` promises that an immediate
/// re-execution on the same store would change nothing; because updates on
/// composite views need not persist, a propagator may only report it after
/// re-reading the bounds it relied on. Everything else is `Suspend`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Failed,
    Idempotent,
    Suspend,
}

pub trait Propagator {
    fn execute(&mut self, s: &mut DomainStore) -> Result<Status>;

    /// The variable events this propagator must be woken on, derived from
    /// its views' trigger maps.
    fn subscriptions(&self, s: &DomainStore) -> Vec<(VarId, Event)>;

    /// True when the subscription set can shrink as the store gets fixed
    /// (conditional expressions move their triggers); the engine then
    /// refreshes subscriptions after each execution.
    fn movable_triggers(&self) -> bool {
        false
    }
}

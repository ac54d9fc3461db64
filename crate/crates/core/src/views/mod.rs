//! Box views: bound access and bound updates over arbitrary expressions.
//!
//! A box view exposes the interval domain of an expression directly on the
//! variable store, so a propagator written against views never needs
//! auxiliary variables. The same expression tree can be *built* two ways:
//!
//! - [`DispatchMode::Static`]: the tree is compiled into one specialized
//!   object ([`CompiledView`]) whose node transitions are direct calls the
//!   compiler can flatten;
//! - [`DispatchMode::Dynamic`]: every node becomes a separately dispatched
//!   object ([`DynView`]), each method invocation going through a vtable and
//!   counted in the `calls` instrumentation column.
//!
//! Both modes share the formulas in [`ops`] and must behave identically on
//! identical stores.

pub mod arith;
mod compiled;
mod dynamic;
mod node;
pub mod ops;

pub use compiled::{build_static, CompiledView};
pub use dynamic::{build_dynamic, DynView};
pub use node::ViewNode;

use crate::engine::{DomainStore, Event, VarId};
use crate::error::Result;

/// The box view contract.
///
/// `get_min`/`get_max` report the current bounds of the expression;
/// `upd_min(i)`/`upd_max(i)` contract the underlying variables so that no
/// value supporting an expression value past the requested bound is lost,
/// returning false exactly when some variable domain empties. Updates on
/// composite expressions are not guaranteed to be persistent: re-reading the
/// bound right after an update may still see the old value.
pub trait BoxView {
    fn get_min(&self, s: &DomainStore) -> Result<i64>;
    fn get_max(&self, s: &DomainStore) -> Result<i64>;
    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool>;
    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool>;

    /// Expands an expression-level trigger into variable-level
    /// subscriptions (the attach/detach half of the contract: the engine
    /// registers the returned pairs for the subscribing propagator).
    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>);

    fn is_ground(&self, s: &DomainStore) -> Result<bool> {
        Ok(self.get_min(s)? == self.get_max(s)?)
    }

    /// True when the trigger map can change as the store gets fixed
    /// (conditional expressions drop their dead branch).
    fn triggers_can_move(&self) -> bool {
        false
    }
}

impl<V: BoxView + ?Sized> BoxView for &V {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        (**self).get_min(s)
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        (**self).get_max(s)
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        (**self).upd_min(s, bound)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        (**self).upd_max(s, bound)
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        (**self).triggers(s, event, out)
    }

    fn triggers_can_move(&self) -> bool {
        (**self).triggers_can_move()
    }
}

impl<V: BoxView + ?Sized> BoxView for std::rc::Rc<V> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        (**self).get_min(s)
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        (**self).get_max(s)
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        (**self).upd_min(s, bound)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        (**self).upd_max(s, bound)
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        (**self).triggers(s, event, out)
    }

    fn triggers_can_move(&self) -> bool {
        (**self).triggers_can_move()
    }
}

/// How an expression tree is turned into a live view.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DispatchMode {
    Static,
    Dynamic,
}

/// A built view of either mode, for callers that choose the mode at runtime.
#[derive(Clone)]
pub enum AnyView {
    Static(CompiledView),
    Dynamic(DynView),
}

impl BoxView for AnyView {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        match self {
            AnyView::Static(v) => v.get_min(s),
            AnyView::Dynamic(v) => v.get_min(s),
        }
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        match self {
            AnyView::Static(v) => v.get_max(s),
            AnyView::Dynamic(v) => v.get_max(s),
        }
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        match self {
            AnyView::Static(v) => v.upd_min(s, bound),
            AnyView::Dynamic(v) => v.upd_min(s, bound),
        }
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        match self {
            AnyView::Static(v) => v.upd_max(s, bound),
            AnyView::Dynamic(v) => v.upd_max(s, bound),
        }
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        match self {
            AnyView::Static(v) => v.triggers(s, event, out),
            AnyView::Dynamic(v) => v.triggers(s, event, out),
        }
    }

    fn triggers_can_move(&self) -> bool {
        match self {
            AnyView::Static(v) => v.triggers_can_move(),
            AnyView::Dynamic(v) => v.triggers_can_move(),
        }
    }
}

/// Builds a view for `node` under the chosen dispatch mode, validating that
/// every variable leaf is registered in the store.
pub fn build_view(node: &ViewNode, mode: DispatchMode, s: &DomainStore) -> Result<AnyView> {
    match mode {
        DispatchMode::Static => Ok(AnyView::Static(build_static(node, s)?)),
        DispatchMode::Dynamic => Ok(AnyView::Dynamic(build_dynamic(node, s)?)),
    }
}

/// The subscription set an expression-level trigger expands to.
pub fn trigger_map<V: BoxView>(view: &V, s: &DomainStore, event: Event) -> Vec<(VarId, Event)> {
    let mut out = Vec::new();
    view.triggers(s, event, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Both-bounds subscriptions of a view, the usual propagator registration.
pub fn bound_triggers<V: BoxView>(view: &V, s: &DomainStore) -> Vec<(VarId, Event)> {
    let mut out = Vec::new();
    view.triggers(s, Event::MinChange, &mut out);
    view.triggers(s, Event::MaxChange, &mut out);
    out.sort();
    out.dedup();
    out
}

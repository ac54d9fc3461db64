//! The dynamically dispatched view realization.
//!
//! Every expression node is a separately allocated object behind a trait
//! pointer; crossing from one node to a child goes through the vtable. Each
//! bound-method invocation on a node counts once in the `calls` column.

use std::rc::Rc;

use crate::engine::{DomainStore, Event, VarId};
use crate::error::{Error, Result};
use crate::views::ops::*;
use crate::views::{BoxView, ViewNode};

/// A node of a dynamically composed view. Cloning shares the node.
#[derive(Clone)]
pub struct DynView(Rc<dyn BoxView>);

impl DynView {
    pub fn new<V: BoxView + 'static>(v: V) -> DynView {
        DynView(Rc::new(v))
    }
}

impl BoxView for DynView {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        s.count_call();
        self.0.get_min(s)
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        s.count_call();
        self.0.get_max(s)
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        s.count_call();
        self.0.upd_min(s, bound)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        s.count_call();
        self.0.upd_max(s, bound)
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        self.0.triggers(s, event, out)
    }

    fn triggers_can_move(&self) -> bool {
        self.0.triggers_can_move()
    }
}

/// Builds the expression as a tree of separately dispatched node objects.
/// Large subtrees get the same transient bound memo as static builds.
pub fn build_dynamic(node: &ViewNode, s: &DomainStore) -> Result<DynView> {
    let built = build_dynamic_inner(node, s)?;
    Ok(if node.size() >= crate::views::compiled::CACHE_MIN_SUBTREE {
        DynView::new(CachedView::new(built))
    } else {
        built
    })
}

fn build_dynamic_inner(node: &ViewNode, s: &DomainStore) -> Result<DynView> {
    let b = |n: &ViewNode| build_dynamic(n, s);
    Ok(match node {
        ViewNode::Var(v) => {
            if v.index() >= s.num_vars() {
                return Err(Error::UnknownVariable(v.index()));
            }
            DynView::new(VarView(*v))
        }
        ViewNode::Const(k) => DynView::new(ConstView(*k)),
        ViewNode::Add(x, y) => DynView::new(AddView { x: b(x)?, y: b(y)? }),
        ViewNode::Sub(x, y) => DynView::new(SubView { x: b(x)?, y: b(y)? }),
        ViewNode::Neg(x) => DynView::new(NegView { x: b(x)? }),
        ViewNode::Mul(x, y) => DynView::new(MulView { x: b(x)?, y: b(y)? }),
        ViewNode::Abs(x) => DynView::new(AbsView { x: b(x)? }),
        ViewNode::Sqr(x) => DynView::new(SqrView { x: b(x)? }),
        ViewNode::Min2(x, y) => DynView::new(Min2View { x: b(x)?, y: b(y)? }),
        ViewNode::Max2(x, y) => DynView::new(Max2View { x: b(x)?, y: b(y)? }),
        ViewNode::Linear(c, x) => {
            if *c == 0 {
                return Err(Error::InvalidSpec("zero coefficient in linear view".into()));
            }
            DynView::new(LinearView { coeff: *c, x: b(x)? })
        }
        ViewNode::Sum(ts) => {
            if ts.is_empty() {
                return Err(Error::InvalidSpec("empty sum".into()));
            }
            let terms: Result<Vec<DynView>> = ts.iter().map(b).collect();
            DynView::new(SumView { terms: terms? })
        }
        ViewNode::ReifEq(x, y) => DynView::new(ReifEqView { x: b(x)?, y: b(y)? }),
        ViewNode::ReifNeq(x, y) => DynView::new(ReifNeqView { x: b(x)?, y: b(y)? }),
        ViewNode::ReifLeq(x, y) => DynView::new(ReifLeqView { x: b(x)?, y: b(y)? }),
        ViewNode::Ite(c, t, f) => {
            DynView::new(IteView { cond: b(c)?, then_: b(t)?, else_: b(f)? })
        }
    })
}

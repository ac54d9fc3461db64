//! The statically composed view realization.
//!
//! The whole expression is compiled into a single object. Beyond walking the
//! tree with direct (inlinable) calls, the build specializes structure the
//! way a compiler would: linear subexpressions (chains of additions,
//! subtractions, negations, scalings) collapse into one flat form with
//! step-identical update semantics, nodes over plain leaves drop their boxed
//! children, and large remaining subtrees get a transient bound memo. No
//! per-node method dispatch is counted; the build-level audit mode instead
//! wraps every node in an explicit counting shell.

use crate::engine::{DomainStore, Event, VarId};
use crate::error::{Error, Result};
use crate::views::ops::*;
use crate::views::{BoxView, ViewNode};

#[derive(Clone, Debug)]
pub enum CompiledView {
    Var(VarId),
    Const(i64),
    Add(Box<CompiledView>, Box<CompiledView>),
    Sub(Box<CompiledView>, Box<CompiledView>),
    Neg(Box<CompiledView>),
    Mul(Box<CompiledView>, Box<CompiledView>),
    Abs(Box<CompiledView>),
    Sqr(Box<CompiledView>),
    Min2(Box<CompiledView>, Box<CompiledView>),
    Max2(Box<CompiledView>, Box<CompiledView>),
    Linear(i64, Box<CompiledView>),
    Sum(Vec<CompiledView>),
    ReifEq(Box<CompiledView>, Box<CompiledView>),
    ReifNeq(Box<CompiledView>, Box<CompiledView>),
    ReifLeq(Box<CompiledView>, Box<CompiledView>),
    Ite(Box<CompiledView>, Box<CompiledView>, Box<CompiledView>),
    /// Fused linear expression.
    LinearForm(LinearFormView),
    /// Leaf-specialized binary nodes: children held inline, no pointer hops.
    AddL(Leaf, Leaf),
    SubL(Leaf, Leaf),
    MulL(Leaf, Leaf),
    Min2L(Leaf, Leaf),
    Max2L(Leaf, Leaf),
    ReifEqL(Leaf, Leaf),
    ReifNeqL(Leaf, Leaf),
    ReifLeqL(Leaf, Leaf),
    AbsL(Leaf),
    SqrL(Leaf),
    /// Transparent bound memo around a large subtree.
    Cached(CacheSlot, Box<CompiledView>),
    /// Audit shell: counts every method invocation like a dispatched node.
    Counted(Box<CompiledView>),
}

/// Subtrees at least this large get a transient bound cache, which keeps a
/// single update of a deep composition at a linear number of reads.
pub(crate) const CACHE_MIN_SUBTREE: usize = 4;

/// Value-range guard for fusing linear forms: fusion computes in wide
/// arithmetic, so it is applied only where the original tree provably
/// cannot overflow either, keeping error behavior identical.
const FUSE_MAGNITUDE_CAP: i128 = 1 << 40;

/// Compiles `node` into a single specialized view object. Cache wrap points
/// are decided on the source expression, so both dispatch realizations
/// memoize at identical positions and stay bit-for-bit equivalent.
pub fn build_static(node: &ViewNode, s: &DomainStore) -> Result<CompiledView> {
    let built = build_specialized(node, s)?;
    let built = if node.size() >= CACHE_MIN_SUBTREE {
        CompiledView::Cached(CacheSlot::default(), Box::new(built))
    } else {
        built
    };
    Ok(if s.uniform_call_counting() {
        CompiledView::Counted(Box::new(built))
    } else {
        built
    })
}

/// Attempts to flatten `node` into scaled variable occurrences plus a
/// constant, in leaf order. Returns None when the shape is not linear or
/// the magnitude guard fails.
fn linearize(
    node: &ViewNode,
    s: &DomainStore,
    scale: i64,
    out: &mut Vec<(i64, Leaf)>,
) -> Option<()> {
    match node {
        ViewNode::Var(v) => {
            if v.index() >= s.num_vars() {
                return None; // let the normal build report the error
            }
            out.push((scale, Leaf::Var(*v)));
            Some(())
        }
        ViewNode::Const(k) => {
            out.push((scale, Leaf::Const(*k)));
            Some(())
        }
        ViewNode::Add(a, b) => {
            linearize(a, s, scale, out)?;
            linearize(b, s, scale, out)
        }
        ViewNode::Sub(a, b) => {
            linearize(a, s, scale, out)?;
            linearize(b, s, scale.checked_neg()?, out)
        }
        ViewNode::Neg(a) => linearize(a, s, scale.checked_neg()?, out),
        ViewNode::Linear(c, a) => linearize(a, s, scale.checked_mul(*c)?, out),
        ViewNode::Sum(ts) => {
            for t in ts {
                linearize(t, s, scale, out)?;
            }
            Some(())
        }
        _ => None,
    }
}

fn try_fuse_linear(node: &ViewNode, s: &DomainStore) -> Option<CompiledView> {
    if matches!(node, ViewNode::Var(_) | ViewNode::Const(_)) {
        return None; // leaves stay leaves
    }
    let mut terms = Vec::new();
    linearize(node, s, 1, &mut terms)?;
    if terms.is_empty() {
        return None;
    }
    // a variable occurring with both signs couples the touched and the read
    // bound sides, which would let the fused cascade drift from the tree's
    for (i, &(c1, l1)) in terms.iter().enumerate() {
        if let Leaf::Var(v1) = l1 {
            for &(c2, l2) in &terms[i + 1..] {
                if let Leaf::Var(v2) = l2 {
                    if v1 == v2 && (c1 > 0) != (c2 > 0) {
                        return None;
                    }
                }
            }
        }
    }
    // magnitude guard: neither the fused form nor the original tree may be
    // able to overflow, so error behavior stays identical
    let mut magnitude = 0i128;
    for &(c, l) in &terms {
        let span = match l {
            Leaf::Var(v) => {
                let d = s.dom(v);
                if d.is_empty() {
                    return None;
                }
                d.lo().abs().max(d.hi().abs()) as i128
            }
            Leaf::Const(k) => k.abs() as i128,
        };
        magnitude += (c as i128).abs() * span;
    }
    if magnitude >= FUSE_MAGNITUDE_CAP {
        return None;
    }
    Some(CompiledView::LinearForm(LinearFormView { terms }))
}

fn as_leaf(node: &ViewNode, s: &DomainStore) -> Option<Leaf> {
    match node {
        ViewNode::Var(v) if v.index() < s.num_vars() => Some(Leaf::Var(*v)),
        ViewNode::Const(k) => Some(Leaf::Const(*k)),
        _ => None,
    }
}

fn build_specialized(node: &ViewNode, s: &DomainStore) -> Result<CompiledView> {
    match node {
        ViewNode::Add(a, b) => {
            if let (Some(la), Some(lb)) = (as_leaf(a, s), as_leaf(b, s)) {
                return Ok(CompiledView::AddL(la, lb));
            }
        }
        ViewNode::Sub(a, b) => {
            if let (Some(la), Some(lb)) = (as_leaf(a, s), as_leaf(b, s)) {
                return Ok(CompiledView::SubL(la, lb));
            }
        }
        _ => {}
    }
    if let Some(fused) = try_fuse_linear(node, s) {
        return Ok(fused);
    }
    match node {
        ViewNode::Mul(a, b) => {
            if let (Some(la), Some(lb)) = (as_leaf(a, s), as_leaf(b, s)) {
                return Ok(CompiledView::MulL(la, lb));
            }
        }
        ViewNode::Min2(a, b) => {
            if let (Some(la), Some(lb)) = (as_leaf(a, s), as_leaf(b, s)) {
                return Ok(CompiledView::Min2L(la, lb));
            }
        }
        ViewNode::Max2(a, b) => {
            if let (Some(la), Some(lb)) = (as_leaf(a, s), as_leaf(b, s)) {
                return Ok(CompiledView::Max2L(la, lb));
            }
        }
        ViewNode::ReifEq(a, b) => {
            if let (Some(la), Some(lb)) = (as_leaf(a, s), as_leaf(b, s)) {
                return Ok(CompiledView::ReifEqL(la, lb));
            }
        }
        ViewNode::ReifNeq(a, b) => {
            if let (Some(la), Some(lb)) = (as_leaf(a, s), as_leaf(b, s)) {
                return Ok(CompiledView::ReifNeqL(la, lb));
            }
        }
        ViewNode::ReifLeq(a, b) => {
            if let (Some(la), Some(lb)) = (as_leaf(a, s), as_leaf(b, s)) {
                return Ok(CompiledView::ReifLeqL(la, lb));
            }
        }
        ViewNode::Abs(a) => {
            if let Some(la) = as_leaf(a, s) {
                return Ok(CompiledView::AbsL(la));
            }
        }
        ViewNode::Sqr(a) => {
            if let Some(la) = as_leaf(a, s) {
                return Ok(CompiledView::SqrL(la));
            }
        }
        _ => {}
    }
    build_plain(node, s)
}

fn build_plain(node: &ViewNode, s: &DomainStore) -> Result<CompiledView> {
    let b = |n: &ViewNode| -> Result<Box<CompiledView>> {
        let child = build_specialized(n, s)?;
        Ok(Box::new(if n.size() >= CACHE_MIN_SUBTREE {
            CompiledView::Cached(CacheSlot::default(), Box::new(child))
        } else {
            child
        }))
    };
    Ok(match node {
        ViewNode::Var(v) => {
            if v.index() >= s.num_vars() {
                return Err(Error::UnknownVariable(v.index()));
            }
            CompiledView::Var(*v)
        }
        ViewNode::Const(k) => CompiledView::Const(*k),
        ViewNode::Add(x, y) => CompiledView::Add(b(x)?, b(y)?),
        ViewNode::Sub(x, y) => CompiledView::Sub(b(x)?, b(y)?),
        ViewNode::Neg(x) => CompiledView::Neg(b(x)?),
        ViewNode::Mul(x, y) => CompiledView::Mul(b(x)?, b(y)?),
        ViewNode::Abs(x) => CompiledView::Abs(b(x)?),
        ViewNode::Sqr(x) => CompiledView::Sqr(b(x)?),
        ViewNode::Min2(x, y) => CompiledView::Min2(b(x)?, b(y)?),
        ViewNode::Max2(x, y) => CompiledView::Max2(b(x)?, b(y)?),
        ViewNode::Linear(c, x) => {
            if *c == 0 {
                return Err(Error::InvalidSpec("zero coefficient in linear view".into()));
            }
            CompiledView::Linear(*c, b(x)?)
        }
        ViewNode::Sum(ts) => {
            if ts.is_empty() {
                return Err(Error::InvalidSpec("empty sum".into()));
            }
            CompiledView::Sum(
                ts.iter()
                    .map(|t| Ok(*b(t)?))
                    .collect::<Result<_>>()?,
            )
        }
        ViewNode::ReifEq(x, y) => CompiledView::ReifEq(b(x)?, b(y)?),
        ViewNode::ReifNeq(x, y) => CompiledView::ReifNeq(b(x)?, b(y)?),
        ViewNode::ReifLeq(x, y) => CompiledView::ReifLeq(b(x)?, b(y)?),
        ViewNode::Ite(c, t, f) => CompiledView::Ite(b(c)?, b(t)?, b(f)?),
    })
}

macro_rules! dispatch {
    ($self:ident, $s:ident, $method:ident ( $($arg:expr),* )) => {
        match $self {
            CompiledView::Var(v) => VarView(*v).$method($s, $($arg),*),
            CompiledView::Const(k) => ConstView(*k).$method($s, $($arg),*),
            CompiledView::Add(x, y) => AddView { x: &**x, y: &**y }.$method($s, $($arg),*),
            CompiledView::Sub(x, y) => SubView { x: &**x, y: &**y }.$method($s, $($arg),*),
            CompiledView::Neg(x) => NegView { x: &**x }.$method($s, $($arg),*),
            CompiledView::Mul(x, y) => MulView { x: &**x, y: &**y }.$method($s, $($arg),*),
            CompiledView::Abs(x) => AbsView { x: &**x }.$method($s, $($arg),*),
            CompiledView::Sqr(x) => SqrView { x: &**x }.$method($s, $($arg),*),
            CompiledView::Min2(x, y) => Min2View { x: &**x, y: &**y }.$method($s, $($arg),*),
            CompiledView::Max2(x, y) => Max2View { x: &**x, y: &**y }.$method($s, $($arg),*),
            CompiledView::Linear(c, x) => {
                LinearView { coeff: *c, x: &**x }.$method($s, $($arg),*)
            }
            CompiledView::ReifEq(x, y) => ReifEqView { x: &**x, y: &**y }.$method($s, $($arg),*),
            CompiledView::ReifNeq(x, y) => {
                ReifNeqView { x: &**x, y: &**y }.$method($s, $($arg),*)
            }
            CompiledView::ReifLeq(x, y) => {
                ReifLeqView { x: &**x, y: &**y }.$method($s, $($arg),*)
            }
            CompiledView::Ite(c, t, f) => {
                IteView { cond: &**c, then_: &**t, else_: &**f }.$method($s, $($arg),*)
            }
            CompiledView::LinearForm(form) => form.$method($s, $($arg),*),
            CompiledView::AddL(x, y) => AddView { x: *x, y: *y }.$method($s, $($arg),*),
            CompiledView::SubL(x, y) => SubView { x: *x, y: *y }.$method($s, $($arg),*),
            CompiledView::MulL(x, y) => MulView { x: *x, y: *y }.$method($s, $($arg),*),
            CompiledView::Min2L(x, y) => Min2View { x: *x, y: *y }.$method($s, $($arg),*),
            CompiledView::Max2L(x, y) => Max2View { x: *x, y: *y }.$method($s, $($arg),*),
            CompiledView::ReifEqL(x, y) => ReifEqView { x: *x, y: *y }.$method($s, $($arg),*),
            CompiledView::ReifNeqL(x, y) => ReifNeqView { x: *x, y: *y }.$method($s, $($arg),*),
            CompiledView::ReifLeqL(x, y) => ReifLeqView { x: *x, y: *y }.$method($s, $($arg),*),
            CompiledView::AbsL(x) => AbsView { x: *x }.$method($s, $($arg),*),
            CompiledView::SqrL(x) => SqrView { x: *x }.$method($s, $($arg),*),
            CompiledView::Sum(_) | CompiledView::Cached(..) | CompiledView::Counted(_) => {
                unreachable!()
            }
        }
    };
}

impl BoxView for CompiledView {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        match self {
            CompiledView::Cached(slot, inner) => {
                if !s.cache_enabled() {
                    return inner.get_min(s);
                }
                if slot.stale(s) {
                    slot.fill(inner.get_min(s)?, inner.get_max(s)?, s.pass());
                }
                Ok(slot.lo())
            }
            CompiledView::Counted(inner) => {
                s.count_call();
                inner.get_min(s)
            }
            CompiledView::Sum(ts) => sum_get_min(ts, s),
            _ => dispatch!(self, s, get_min()),
        }
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        match self {
            CompiledView::Cached(slot, inner) => {
                if !s.cache_enabled() {
                    return inner.get_max(s);
                }
                if slot.stale(s) {
                    slot.fill(inner.get_min(s)?, inner.get_max(s)?, s.pass());
                }
                Ok(slot.hi())
            }
            CompiledView::Counted(inner) => {
                s.count_call();
                inner.get_max(s)
            }
            CompiledView::Sum(ts) => sum_get_max(ts, s),
            _ => dispatch!(self, s, get_max()),
        }
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        match self {
            CompiledView::Cached(_, inner) => inner.upd_min(s, bound),
            CompiledView::Counted(inner) => {
                s.count_call();
                inner.upd_min(s, bound)
            }
            CompiledView::Sum(ts) => sum_upd_min(ts, s, bound),
            _ => dispatch!(self, s, upd_min(bound)),
        }
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        match self {
            CompiledView::Cached(_, inner) => inner.upd_max(s, bound),
            CompiledView::Counted(inner) => {
                s.count_call();
                inner.upd_max(s, bound)
            }
            CompiledView::Sum(ts) => sum_upd_max(ts, s, bound),
            _ => dispatch!(self, s, upd_max(bound)),
        }
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        match self {
            CompiledView::Cached(_, inner) | CompiledView::Counted(inner) => {
                inner.triggers(s, event, out)
            }
            CompiledView::Sum(ts) => {
                for t in ts {
                    t.triggers(s, event, out);
                }
            }
            _ => dispatch!(self, s, triggers(event, out)),
        }
    }

    fn triggers_can_move(&self) -> bool {
        match self {
            CompiledView::Ite(..) => true,
            CompiledView::Var(_)
            | CompiledView::Const(_)
            | CompiledView::LinearForm(_)
            | CompiledView::AddL(..)
            | CompiledView::SubL(..)
            | CompiledView::MulL(..)
            | CompiledView::Min2L(..)
            | CompiledView::Max2L(..)
            | CompiledView::ReifEqL(..)
            | CompiledView::ReifNeqL(..)
            | CompiledView::ReifLeqL(..)
            | CompiledView::AbsL(_)
            | CompiledView::SqrL(_) => false,
            CompiledView::Add(a, b)
            | CompiledView::Sub(a, b)
            | CompiledView::Mul(a, b)
            | CompiledView::Min2(a, b)
            | CompiledView::Max2(a, b)
            | CompiledView::ReifEq(a, b)
            | CompiledView::ReifNeq(a, b)
            | CompiledView::ReifLeq(a, b) => a.triggers_can_move() || b.triggers_can_move(),
            CompiledView::Neg(a)
            | CompiledView::Abs(a)
            | CompiledView::Sqr(a)
            | CompiledView::Linear(_, a) => a.triggers_can_move(),
            CompiledView::Sum(ts) => ts.iter().any(|t| t.triggers_can_move()),
            CompiledView::Cached(_, a) | CompiledView::Counted(a) => a.triggers_can_move(),
        }
    }
}

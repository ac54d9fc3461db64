//! Generic box view compositions.
//!
//! Each struct implements the box view contract for one expression kind over
//! arbitrary child views. The statically composed and the dynamically
//! dispatched realizations both delegate here, so the bound formulas exist
//! exactly once.
//!
//! Update conventions: a composite update touches its left child first, then
//! re-reads sibling bounds before touching the right child, and
//! short-circuits on failure. Updates are contracting and sound; they are
//! *not* guaranteed to persist in the recomputed expression bounds.

use std::cell::Cell;

use crate::engine::{DomainStore, Event, VarId};
use crate::error::Result;
use crate::views::arith;
use crate::views::BoxView;

/// A view directly on a store variable.
#[derive(Clone, Copy, Debug)]
pub struct VarView(pub VarId);

impl BoxView for VarView {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        Ok(s.min(self.0))
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        Ok(s.max(self.0))
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        Ok(s.set_min(self.0, bound))
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        Ok(s.set_max(self.0, bound))
    }

    fn triggers(&self, _s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        out.push((self.0, event));
    }
}

/// A constant; updates succeed iff they keep the constant feasible.
#[derive(Clone, Copy, Debug)]
pub struct ConstView(pub i64);

impl BoxView for ConstView {
    fn get_min(&self, _s: &DomainStore) -> Result<i64> {
        Ok(self.0)
    }

    fn get_max(&self, _s: &DomainStore) -> Result<i64> {
        Ok(self.0)
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        if bound <= self.0 {
            Ok(true)
        } else {
            s.fail();
            Ok(false)
        }
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        if bound >= self.0 {
            Ok(true)
        } else {
            s.fail();
            Ok(false)
        }
    }

    fn triggers(&self, _s: &DomainStore, _event: Event, _out: &mut Vec<(VarId, Event)>) {}
}

#[derive(Clone, Debug)]
pub struct AddView<X, Y> {
    pub x: X,
    pub y: Y,
}

impl<X: BoxView, Y: BoxView> BoxView for AddView<X, Y> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        arith::add(s, self.x.get_min(s)?, self.y.get_min(s)?)
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        arith::add(s, self.x.get_max(s)?, self.y.get_max(s)?)
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        let b = arith::sub(s, bound, self.y.get_max(s)?)?;
        if !self.x.upd_min(s, b)? {
            return Ok(false);
        }
        let b = arith::sub(s, bound, self.x.get_max(s)?)?;
        self.y.upd_min(s, b)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        let b = arith::sub(s, bound, self.y.get_min(s)?)?;
        if !self.x.upd_max(s, b)? {
            return Ok(false);
        }
        let b = arith::sub(s, bound, self.x.get_min(s)?)?;
        self.y.upd_max(s, b)
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        self.x.triggers(s, event, out);
        self.y.triggers(s, event, out);
    }

    fn triggers_can_move(&self) -> bool {
        self.x.triggers_can_move() || self.y.triggers_can_move()
    }
}

/// `x - y`, with the bound inversions of a negated right child.
#[derive(Clone, Debug)]
pub struct SubView<X, Y> {
    pub x: X,
    pub y: Y,
}

impl<X: BoxView, Y: BoxView> BoxView for SubView<X, Y> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        arith::sub(s, self.x.get_min(s)?, self.y.get_max(s)?)
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        arith::sub(s, self.x.get_max(s)?, self.y.get_min(s)?)
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        let b = arith::add(s, bound, self.y.get_min(s)?)?;
        if !self.x.upd_min(s, b)? {
            return Ok(false);
        }
        let b = arith::sub(s, self.x.get_max(s)?, bound)?;
        self.y.upd_max(s, b)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        let b = arith::add(s, bound, self.y.get_max(s)?)?;
        if !self.x.upd_max(s, b)? {
            return Ok(false);
        }
        let b = arith::sub(s, self.x.get_min(s)?, bound)?;
        self.y.upd_min(s, b)
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        self.x.triggers(s, event, out);
        self.y.triggers(s, mirror(event), out);
    }

    fn triggers_can_move(&self) -> bool {
        self.x.triggers_can_move() || self.y.triggers_can_move()
    }
}

fn mirror(event: Event) -> Event {
    match event {
        Event::MinChange => Event::MaxChange,
        Event::MaxChange => Event::MinChange,
        Event::Ground => Event::Ground,
    }
}

#[derive(Clone, Debug)]
pub struct NegView<X> {
    pub x: X,
}

impl<X: BoxView> BoxView for NegView<X> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        arith::neg(s, self.x.get_max(s)?)
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        arith::neg(s, self.x.get_min(s)?)
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        let b = arith::neg(s, bound)?;
        self.x.upd_max(s, b)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        let b = arith::neg(s, bound)?;
        self.x.upd_min(s, b)
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        self.x.triggers(s, mirror(event), out);
    }

    fn triggers_can_move(&self) -> bool {
        self.x.triggers_can_move()
    }
}

/// `coeff * x` with sign-aware inward rounding on updates.
#[derive(Clone, Debug)]
pub struct LinearView<X> {
    pub coeff: i64,
    pub x: X,
}

impl<X: BoxView> BoxView for LinearView<X> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        if self.coeff >= 0 {
            arith::mul(s, self.coeff, self.x.get_min(s)?)
        } else {
            arith::mul(s, self.coeff, self.x.get_max(s)?)
        }
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        if self.coeff >= 0 {
            arith::mul(s, self.coeff, self.x.get_max(s)?)
        } else {
            arith::mul(s, self.coeff, self.x.get_min(s)?)
        }
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        debug_assert!(self.coeff != 0);
        if self.coeff > 0 {
            let b = arith::div_ceil(s, bound as i128, self.coeff as i128);
            self.x.upd_min(s, arith::fit(b)?)
        } else {
            let b = arith::div_floor(s, bound as i128, self.coeff as i128);
            self.x.upd_max(s, arith::fit(b)?)
        }
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        debug_assert!(self.coeff != 0);
        if self.coeff > 0 {
            let b = arith::div_floor(s, bound as i128, self.coeff as i128);
            self.x.upd_max(s, arith::fit(b)?)
        } else {
            let b = arith::div_ceil(s, bound as i128, self.coeff as i128);
            self.x.upd_min(s, arith::fit(b)?)
        }
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        if self.coeff >= 0 {
            self.x.triggers(s, event, out);
        } else {
            self.x.triggers(s, mirror(event), out);
        }
    }

    fn triggers_can_move(&self) -> bool {
        self.x.triggers_can_move()
    }
}

/// Hull of the x-values supported by `x * factor ∈ target` for some factor
/// in the given interval.
pub enum MulSupport {
    /// The factor interval strictly contains zero: any hull would have a
    /// hole, so a box view must not prune.
    NoPrune,
    /// No value is supported.
    Empty,
    /// Supported values form `[lo..hi]` (None = unbounded on that side).
    Range(Option<i64>, Option<i64>),
}

pub fn mul_support_hull(
    s: &DomainStore,
    factor: (i128, i128),
    target: (i128, i128),
) -> MulSupport {
    let (fl, fh) = factor;
    let (zl, zh) = target;
    if zl > zh {
        return MulSupport::Empty;
    }
    if fl < 0 && fh > 0 {
        return MulSupport::NoPrune;
    }
    if fl == 0 && fh == 0 {
        return if zl <= 0 && 0 <= zh { MulSupport::NoPrune } else { MulSupport::Empty };
    }
    if fh <= 0 {
        // mirror: x * u with u in [fl..fh] equals -(x * u') with u' in
        // [-fh..-fl], so reuse the non-negative case on a negated target
        return mul_support_hull(s, (-fh, -fl), (-zh, -zl));
    }
    // factor is non-negative with fh > 0; the supported x form an interval
    // because max_u(x*u) and min_u(x*u) are both nondecreasing in x
    let lo = if zl <= 0 {
        if fl > 0 {
            Some(arith::div_ceil(s, zl, fl))
        } else {
            None
        }
    } else {
        Some(arith::div_ceil(s, zl, fh))
    };
    let hi = if zh >= 0 {
        if fl > 0 {
            Some(arith::div_floor(s, zh, fl))
        } else {
            None
        }
    } else {
        Some(arith::div_floor(s, zh, fh))
    };
    if let (Some(l), Some(h)) = (lo, hi) {
        if l > h {
            return MulSupport::Empty;
        }
    }
    let clamp = |v: i128| v.clamp(i64::MIN as i128, i64::MAX as i128) as i64;
    MulSupport::Range(lo.map(clamp), hi.map(clamp))
}

/// Exact product bounds of two views: min/max over the four bound products.
pub fn mul_corner_bounds<X: BoxView, Y: BoxView>(
    x: &X,
    y: &Y,
    s: &DomainStore,
) -> Result<(i128, i128)> {
    let (xl, xh) = (x.get_min(s)?, x.get_max(s)?);
    let (yl, yh) = (y.get_min(s)?, y.get_max(s)?);
    let ps = [
        arith::mul_wide(s, xl, yl),
        arith::mul_wide(s, xl, yh),
        arith::mul_wide(s, xh, yl),
        arith::mul_wide(s, xh, yh),
    ];
    Ok((*ps.iter().min().unwrap(), *ps.iter().max().unwrap()))
}

/// Tightens both children of `x * y ∈ target` by inverse interval division.
/// A co-factor interval strictly containing zero yields no pruning on that
/// side (the support set has a hole a box cannot express).
pub fn mul_enforce<X: BoxView, Y: BoxView>(
    x: &X,
    y: &Y,
    s: &mut DomainStore,
    target: (i128, i128),
) -> Result<bool> {
    let yb = (y.get_min(s)? as i128, y.get_max(s)? as i128);
    match mul_support_hull(s, yb, target) {
        MulSupport::Empty => {
            s.fail();
            return Ok(false);
        }
        MulSupport::NoPrune => {}
        MulSupport::Range(lo, hi) => {
            if let Some(l) = lo {
                if !x.upd_min(s, l)? {
                    return Ok(false);
                }
            }
            if let Some(h) = hi {
                if !x.upd_max(s, h)? {
                    return Ok(false);
                }
            }
        }
    }
    let xb = (x.get_min(s)? as i128, x.get_max(s)? as i128);
    match mul_support_hull(s, xb, target) {
        MulSupport::Empty => {
            s.fail();
            Ok(false)
        }
        MulSupport::NoPrune => Ok(true),
        MulSupport::Range(lo, hi) => {
            if let Some(l) = lo {
                if !y.upd_min(s, l)? {
                    return Ok(false);
                }
            }
            if let Some(h) = hi {
                if !y.upd_max(s, h)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

#[derive(Clone, Debug)]
pub struct MulView<X, Y> {
    pub x: X,
    pub y: Y,
}

impl<X: BoxView, Y: BoxView> BoxView for MulView<X, Y> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        arith::fit(mul_corner_bounds(&self.x, &self.y, s)?.0)
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        arith::fit(mul_corner_bounds(&self.x, &self.y, s)?.1)
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        let (_, cur_max) = mul_corner_bounds(&self.x, &self.y, s)?;
        mul_enforce(&self.x, &self.y, s, (bound as i128, cur_max))
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        let (cur_min, _) = mul_corner_bounds(&self.x, &self.y, s)?;
        mul_enforce(&self.x, &self.y, s, (cur_min, bound as i128))
    }

    fn triggers(&self, s: &DomainStore, _event: Event, out: &mut Vec<(VarId, Event)>) {
        // bound direction depends on runtime signs; subscribe to all bounds
        self.x.triggers(s, Event::MinChange, out);
        self.x.triggers(s, Event::MaxChange, out);
        self.y.triggers(s, Event::MinChange, out);
        self.y.triggers(s, Event::MaxChange, out);
    }

    fn triggers_can_move(&self) -> bool {
        self.x.triggers_can_move() || self.y.triggers_can_move()
    }
}

/// `x²` with single-occurrence bounds (minimum 0 when x spans zero).
#[derive(Clone, Debug)]
pub struct SqrView<X> {
    pub x: X,
}

impl<X: BoxView> BoxView for SqrView<X> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        let (xl, xh) = (self.x.get_min(s)?, self.x.get_max(s)?);
        if xl > 0 {
            arith::fit(arith::mul_wide(s, xl, xl))
        } else if xh < 0 {
            arith::fit(arith::mul_wide(s, xh, xh))
        } else {
            Ok(0)
        }
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        let (xl, xh) = (self.x.get_min(s)?, self.x.get_max(s)?);
        let a = arith::mul_wide(s, xl, xl);
        let b = arith::mul_wide(s, xh, xh);
        arith::fit(a.max(b))
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        if bound <= 0 {
            return Ok(true);
        }
        if self.get_max(s)? < bound {
            s.fail();
            return Ok(false);
        }
        let r = arith::isqrt_ceil(s, bound);
        let (xl, xh) = (self.x.get_min(s)?, self.x.get_max(s)?);
        if xl >= 0 {
            self.x.upd_min(s, r)
        } else if xh <= 0 {
            self.x.upd_max(s, -r)
        } else {
            // support is (-inf..-r] ∪ [r..inf): a hole, so no pruning
            Ok(true)
        }
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        if bound < 0 {
            s.fail();
            return Ok(false);
        }
        let r = arith::isqrt(s, bound);
        if !self.x.upd_min(s, -r)? {
            return Ok(false);
        }
        self.x.upd_max(s, r)
    }

    fn triggers(&self, s: &DomainStore, _event: Event, out: &mut Vec<(VarId, Event)>) {
        self.x.triggers(s, Event::MinChange, out);
        self.x.triggers(s, Event::MaxChange, out);
    }

    fn triggers_can_move(&self) -> bool {
        self.x.triggers_can_move()
    }
}

/// `|x|`, following the closed-form three-case bounds.
#[derive(Clone, Debug)]
pub struct AbsView<X> {
    pub x: X,
}

impl<X: BoxView> AbsView<X> {
    /// Applies the requested bound set `[s2l..s2h]` (already clamped to be
    /// non-negative on the low side) to the child via the case analysis on
    /// the child interval.
    fn apply(&self, s: &mut DomainStore, s2l: i64, s2h: i64) -> Result<bool> {
        if s2l > s2h {
            s.fail();
            return Ok(false);
        }
        let (xl, xh) = (self.x.get_min(s)?, self.x.get_max(s)?);
        if xl > 0 {
            if !self.x.upd_min(s, s2l)? {
                return Ok(false);
            }
            self.x.upd_max(s, s2h)
        } else if xh < 0 {
            let lo = arith::neg(s, s2h)?;
            if !self.x.upd_min(s, lo)? {
                return Ok(false);
            }
            let hi = arith::neg(s, s2l)?;
            self.x.upd_max(s, hi)
        } else {
            let lo = arith::neg(s, s2h)?;
            if !self.x.upd_min(s, lo)? {
                return Ok(false);
            }
            self.x.upd_max(s, s2h)
        }
    }
}

impl<X: BoxView> BoxView for AbsView<X> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        let (xl, xh) = (self.x.get_min(s)?, self.x.get_max(s)?);
        if xl > 0 {
            Ok(xl)
        } else if xh < 0 {
            arith::neg(s, xh)
        } else {
            Ok(0)
        }
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        let (xl, xh) = (self.x.get_min(s)?, self.x.get_max(s)?);
        if xl > 0 {
            Ok(xh)
        } else if xh < 0 {
            arith::neg(s, xl)
        } else {
            let nl = arith::neg(s, xl)?;
            Ok(xh.max(nl))
        }
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        // requested lower bounds below 0 clamp to 0 first
        let s2l = bound.max(0);
        let s2h = self.get_max(s)?;
        self.apply(s, s2l, s2h)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        if bound < 0 {
            s.fail();
            return Ok(false);
        }
        let s2l = self.get_min(s)?.max(0);
        self.apply(s, s2l, bound)
    }

    fn triggers(&self, s: &DomainStore, _event: Event, out: &mut Vec<(VarId, Event)>) {
        self.x.triggers(s, Event::MinChange, out);
        self.x.triggers(s, Event::MaxChange, out);
    }

    fn triggers_can_move(&self) -> bool {
        self.x.triggers_can_move()
    }
}

#[derive(Clone, Debug)]
pub struct Min2View<X, Y> {
    pub x: X,
    pub y: Y,
}

impl<X: BoxView, Y: BoxView> BoxView for Min2View<X, Y> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        s.count_op();
        Ok(self.x.get_min(s)?.min(self.y.get_min(s)?))
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        s.count_op();
        Ok(self.x.get_max(s)?.min(self.y.get_max(s)?))
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        if !self.x.upd_min(s, bound)? {
            return Ok(false);
        }
        self.y.upd_min(s, bound)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        // only when one side cannot be the minimum may the other be pruned
        if self.y.get_min(s)? > bound {
            if !self.x.upd_max(s, bound)? {
                return Ok(false);
            }
        }
        if self.x.get_min(s)? > bound {
            return self.y.upd_max(s, bound);
        }
        Ok(true)
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        self.x.triggers(s, event, out);
        self.y.triggers(s, event, out);
    }

    fn triggers_can_move(&self) -> bool {
        self.x.triggers_can_move() || self.y.triggers_can_move()
    }
}

#[derive(Clone, Debug)]
pub struct Max2View<X, Y> {
    pub x: X,
    pub y: Y,
}

impl<X: BoxView, Y: BoxView> BoxView for Max2View<X, Y> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        s.count_op();
        Ok(self.x.get_min(s)?.max(self.y.get_min(s)?))
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        s.count_op();
        Ok(self.x.get_max(s)?.max(self.y.get_max(s)?))
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        if self.y.get_max(s)? < bound {
            if !self.x.upd_min(s, bound)? {
                return Ok(false);
            }
        }
        if self.x.get_max(s)? < bound {
            return self.y.upd_min(s, bound);
        }
        Ok(true)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        if !self.x.upd_max(s, bound)? {
            return Ok(false);
        }
        self.y.upd_max(s, bound)
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        self.x.triggers(s, event, out);
        self.y.triggers(s, event, out);
    }

    fn triggers_can_move(&self) -> bool {
        self.x.triggers_can_move() || self.y.triggers_can_move()
    }
}

/// A variable or a constant: the flattened form of a subexpression.
#[derive(Clone, Copy, Debug)]
pub enum Leaf {
    Var(VarId),
    Const(i64),
}

impl BoxView for Leaf {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        match self {
            Leaf::Var(v) => VarView(*v).get_min(s),
            Leaf::Const(k) => Ok(*k),
        }
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        match self {
            Leaf::Var(v) => VarView(*v).get_max(s),
            Leaf::Const(k) => Ok(*k),
        }
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        match self {
            Leaf::Var(v) => VarView(*v).upd_min(s, bound),
            Leaf::Const(k) => ConstView(*k).upd_min(s, bound),
        }
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        match self {
            Leaf::Var(v) => VarView(*v).upd_max(s, bound),
            Leaf::Const(k) => ConstView(*k).upd_max(s, bound),
        }
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        if let Leaf::Var(v) = self {
            VarView(*v).triggers(s, event, out)
        }
    }
}

/// A flattened linear expression: scaled leaf occurrences in original
/// order (constants included, so failure detection happens at the same
/// step as in the tree it replaces).
///
/// The specialized build uses it to collapse chains of additions,
/// subtractions, negations and scalings into one object. Its update
/// semantics are step-identical to the corresponding tree: an upd_min only
/// touches minimums of positive terms and maximums of negative terms while
/// the cascaded bound formulas read exactly the untouched sides, so the
/// per-term bounds agree with the tree's cascade in any caching mode.
#[derive(Clone, Debug)]
pub struct LinearFormView {
    pub terms: Vec<(i64, Leaf)>,
}

fn scaled_min(s: &DomainStore, c: i64, leaf: Leaf) -> i128 {
    s.count_op();
    let d = match (leaf, c >= 0) {
        (Leaf::Const(k), _) => k,
        (Leaf::Var(v), true) => s.min(v),
        (Leaf::Var(v), false) => s.max(v),
    };
    c as i128 * d as i128
}

fn scaled_max(s: &DomainStore, c: i64, leaf: Leaf) -> i128 {
    s.count_op();
    let d = match (leaf, c >= 0) {
        (Leaf::Const(k), _) => k,
        (Leaf::Var(v), true) => s.max(v),
        (Leaf::Var(v), false) => s.min(v),
    };
    c as i128 * d as i128
}

impl LinearFormView {
    /// Shared update loop: each term receives `bound` minus the opposite
    /// bounds of its siblings, exactly as the cascade through the tree
    /// would compute it. The opposite bounds are the sides an update of
    /// this direction never touches, so recomputing them per term reads
    /// the same values a snapshot would.
    fn update(&self, s: &mut DomainStore, bound: i64, toward_min: bool) -> Result<bool> {
        let mut total: i128 = 0;
        for &(c, l) in &self.terms {
            s.count_op();
            total += if toward_min { scaled_max(s, c, l) } else { scaled_min(s, c, l) };
        }
        for &(c, l) in &self.terms {
            s.count_op();
            let m = if toward_min { scaled_max(s, c, l) } else { scaled_min(s, c, l) };
            let b = bound as i128 - (total - m);
            let ok = match l {
                Leaf::Const(k) => {
                    // the term's value is fixed at c*k; requirement b must
                    // lie on the feasible side or the whole update fails
                    let val = c as i128 * k as i128;
                    if (toward_min && val < b) || (!toward_min && val > b) {
                        s.fail();
                        false
                    } else {
                        true
                    }
                }
                Leaf::Var(v) => {
                    let raise = toward_min == (c > 0);
                    // unit coefficients need no division
                    let b = if c == 1 {
                        b
                    } else if c == -1 {
                        -b
                    } else if raise {
                        arith::div_ceil(s, b, c as i128)
                    } else {
                        arith::div_floor(s, b, c as i128)
                    };
                    if raise {
                        upd_min_wide(&VarView(v), s, b)?
                    } else {
                        upd_max_wide(&VarView(v), s, b)?
                    }
                }
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl BoxView for LinearFormView {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        let mut acc = 0i128;
        for &(c, l) in &self.terms {
            s.count_op();
            acc += scaled_min(s, c, l);
        }
        arith::fit(acc)
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        let mut acc = 0i128;
        for &(c, l) in &self.terms {
            s.count_op();
            acc += scaled_max(s, c, l);
        }
        arith::fit(acc)
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        self.update(s, bound, true)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        self.update(s, bound, false)
    }

    fn triggers(&self, _s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        for &(c, l) in &self.terms {
            if let Leaf::Var(v) = l {
                let e = if c >= 0 { event } else { mirror(event) };
                out.push((v, e));
            }
        }
    }
}

// --- transient bound caching -------------------------------------------------

/// Transient memo of a subexpression's bounds, valid for one evaluation pass.
/// Never trailed: backtracking advances the pass id instead.
#[derive(Clone, Debug, Default)]
pub struct CacheSlot {
    pass: Cell<u64>,
    lo: Cell<i64>,
    hi: Cell<i64>,
}

impl CacheSlot {
    pub fn stale(&self, s: &DomainStore) -> bool {
        self.pass.get() != s.pass()
    }

    pub fn fill(&self, lo: i64, hi: i64, pass: u64) {
        self.lo.set(lo);
        self.hi.set(hi);
        self.pass.set(pass);
    }

    pub fn lo(&self) -> i64 {
        self.lo.get()
    }

    pub fn hi(&self) -> i64 {
        self.hi.get()
    }
}

/// Caches the inner view's bounds for the duration of one evaluation pass.
/// Updates deliberately leave the memo alone: within a pass a stale bound is
/// never narrower than the true one, and that staleness is what makes one
/// update of a deep chain cost a linear number of reads.
#[derive(Clone, Debug)]
pub struct CachedView<V> {
    pub slot: CacheSlot,
    pub inner: V,
}

impl<V: BoxView> CachedView<V> {
    pub fn new(inner: V) -> CachedView<V> {
        CachedView { slot: CacheSlot::default(), inner }
    }
}

impl<V: BoxView> BoxView for CachedView<V> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        if !s.cache_enabled() {
            return self.inner.get_min(s);
        }
        if self.slot.stale(s) {
            self.slot.fill(self.inner.get_min(s)?, self.inner.get_max(s)?, s.pass());
        }
        Ok(self.slot.lo())
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        if !s.cache_enabled() {
            return self.inner.get_max(s);
        }
        if self.slot.stale(s) {
            self.slot.fill(self.inner.get_min(s)?, self.inner.get_max(s)?, s.pass());
        }
        Ok(self.slot.hi())
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        self.inner.upd_min(s, bound)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        self.inner.upd_max(s, bound)
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        self.inner.triggers(s, event, out)
    }

    fn triggers_can_move(&self) -> bool {
        self.inner.triggers_can_move()
    }
}

// --- n-ary sums -------------------------------------------------------------

pub fn sum_get_min<V: BoxView>(terms: &[V], s: &DomainStore) -> Result<i64> {
    let mut acc: i128 = 0;
    for t in terms {
        s.count_op();
        acc += t.get_min(s)? as i128;
    }
    arith::fit(acc)
}

pub fn sum_get_max<V: BoxView>(terms: &[V], s: &DomainStore) -> Result<i64> {
    let mut acc: i128 = 0;
    for t in terms {
        s.count_op();
        acc += t.get_max(s)? as i128;
    }
    arith::fit(acc)
}

/// Applies `bound <= Σ terms` to every term. With caching on, sibling bounds
/// are read once up front (a stale, therefore weaker, sibling bound keeps the
/// update sound); with caching off they are recomputed per term.
pub fn sum_upd_min<V: BoxView>(terms: &[V], s: &mut DomainStore, bound: i64) -> Result<bool> {
    if s.cache_enabled() {
        let mut maxs = Vec::with_capacity(terms.len());
        let mut total: i128 = 0;
        for t in terms.iter() {
            let m = t.get_max(s)?;
            s.count_op();
            total += m as i128;
            maxs.push(m);
        }
        for (t, m) in terms.iter().zip(&maxs) {
            s.count_op();
            let b = bound as i128 - (total - *m as i128);
            if !upd_min_wide(t, s, b)? {
                return Ok(false);
            }
        }
    } else {
        for i in 0..terms.len() {
            let mut rest: i128 = 0;
            for (j, o) in terms.iter().enumerate() {
                if j != i {
                    s.count_op();
                    rest += o.get_max(s)? as i128;
                }
            }
            let b = bound as i128 - rest;
            if !upd_min_wide(&terms[i], s, b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn sum_upd_max<V: BoxView>(terms: &[V], s: &mut DomainStore, bound: i64) -> Result<bool> {
    if s.cache_enabled() {
        let mut mins = Vec::with_capacity(terms.len());
        let mut total: i128 = 0;
        for t in terms.iter() {
            let m = t.get_min(s)?;
            s.count_op();
            total += m as i128;
            mins.push(m);
        }
        for (t, m) in terms.iter().zip(&mins) {
            s.count_op();
            let b = bound as i128 - (total - *m as i128);
            if !upd_max_wide(t, s, b)? {
                return Ok(false);
            }
        }
    } else {
        for i in 0..terms.len() {
            let mut rest: i128 = 0;
            for (j, o) in terms.iter().enumerate() {
                if j != i {
                    s.count_op();
                    rest += o.get_min(s)? as i128;
                }
            }
            let b = bound as i128 - rest;
            if !upd_max_wide(&terms[i], s, b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// upd_min with an exact wide bound: below-range bounds are no-ops,
/// above-range bounds are unsatisfiable.
pub fn upd_min_wide<V: BoxView>(v: &V, s: &mut DomainStore, bound: i128) -> Result<bool> {
    if bound < i64::MIN as i128 {
        return Ok(true);
    }
    if bound > i64::MAX as i128 {
        s.fail();
        return Ok(false);
    }
    v.upd_min(s, bound as i64)
}

pub fn upd_max_wide<V: BoxView>(v: &V, s: &mut DomainStore, bound: i128) -> Result<bool> {
    if bound > i64::MAX as i128 {
        return Ok(true);
    }
    if bound < i64::MIN as i128 {
        s.fail();
        return Ok(false);
    }
    v.upd_max(s, bound as i64)
}

#[derive(Clone, Debug)]
pub struct SumView<V> {
    pub terms: Vec<V>,
}

impl<V: BoxView> BoxView for SumView<V> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        sum_get_min(&self.terms, s)
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        sum_get_max(&self.terms, s)
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        sum_upd_min(&self.terms, s, bound)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        sum_upd_max(&self.terms, s, bound)
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        for t in &self.terms {
            t.triggers(s, event, out);
        }
    }

    fn triggers_can_move(&self) -> bool {
        self.terms.iter().any(BoxView::triggers_can_move)
    }
}

// --- reified comparisons ------------------------------------------------------

/// Enforces `x = y` at bound strength (mutual interval intersection).
fn enforce_eq<X: BoxView, Y: BoxView>(x: &X, y: &Y, s: &mut DomainStore) -> Result<bool> {
    if !x.upd_min(s, y.get_min(s)?)? {
        return Ok(false);
    }
    if !x.upd_max(s, y.get_max(s)?)? {
        return Ok(false);
    }
    if !y.upd_min(s, x.get_min(s)?)? {
        return Ok(false);
    }
    y.upd_max(s, x.get_max(s)?)
}

/// Enforces `x ≠ y` at bound strength: prunes only when one side is ground
/// at a bound of the other.
fn enforce_neq<X: BoxView, Y: BoxView>(x: &X, y: &Y, s: &mut DomainStore) -> Result<bool> {
    if x.get_min(s)? == x.get_max(s)? {
        let v = x.get_min(s)?;
        if y.get_min(s)? == v {
            let b = arith::add(s, v, 1)?;
            if !y.upd_min(s, b)? {
                return Ok(false);
            }
        }
        if y.get_max(s)? == v {
            let b = arith::sub(s, v, 1)?;
            if !y.upd_max(s, b)? {
                return Ok(false);
            }
        }
    }
    if y.get_min(s)? == y.get_max(s)? {
        let v = y.get_min(s)?;
        if x.get_min(s)? == v {
            let b = arith::add(s, v, 1)?;
            if !x.upd_min(s, b)? {
                return Ok(false);
            }
        }
        if x.get_max(s)? == v {
            let b = arith::sub(s, v, 1)?;
            if !x.upd_max(s, b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn reif_entailed_eq<X: BoxView, Y: BoxView>(x: &X, y: &Y, s: &DomainStore) -> Result<bool> {
    let (xl, xh) = (x.get_min(s)?, x.get_max(s)?);
    let (yl, yh) = (y.get_min(s)?, y.get_max(s)?);
    Ok(xl == xh && yl == yh && xl == yl)
}

fn reif_disentailed_eq<X: BoxView, Y: BoxView>(x: &X, y: &Y, s: &DomainStore) -> Result<bool> {
    Ok(x.get_max(s)? < y.get_min(s)? || y.get_max(s)? < x.get_min(s)?)
}

/// Gate for `upd_min` on a 0/1 view: bound <= 0 is a no-op, bound > 1 is
/// infeasible, bound == 1 asks for the relation to be enforced.
fn reif_gate_min(s: &mut DomainStore, bound: i64) -> Option<Result<bool>> {
    if bound <= 0 {
        Some(Ok(true))
    } else if bound > 1 {
        s.fail();
        Some(Ok(false))
    } else {
        None
    }
}

fn reif_gate_max(s: &mut DomainStore, bound: i64) -> Option<Result<bool>> {
    if bound >= 1 {
        Some(Ok(true))
    } else if bound < 0 {
        s.fail();
        Some(Ok(false))
    } else {
        None
    }
}

/// 0/1 view of `x = y`.
#[derive(Clone, Debug)]
pub struct ReifEqView<X, Y> {
    pub x: X,
    pub y: Y,
}

impl<X: BoxView, Y: BoxView> BoxView for ReifEqView<X, Y> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        Ok(reif_entailed_eq(&self.x, &self.y, s)? as i64)
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        Ok(!reif_disentailed_eq(&self.x, &self.y, s)? as i64)
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        if let Some(r) = reif_gate_min(s, bound) {
            return r;
        }
        enforce_eq(&self.x, &self.y, s)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        if let Some(r) = reif_gate_max(s, bound) {
            return r;
        }
        enforce_neq(&self.x, &self.y, s)
    }

    fn triggers(&self, s: &DomainStore, _event: Event, out: &mut Vec<(VarId, Event)>) {
        self.x.triggers(s, Event::MinChange, out);
        self.x.triggers(s, Event::MaxChange, out);
        self.y.triggers(s, Event::MinChange, out);
        self.y.triggers(s, Event::MaxChange, out);
    }

    fn triggers_can_move(&self) -> bool {
        self.x.triggers_can_move() || self.y.triggers_can_move()
    }
}

/// 0/1 view of `x ≠ y`.
#[derive(Clone, Debug)]
pub struct ReifNeqView<X, Y> {
    pub x: X,
    pub y: Y,
}

impl<X: BoxView, Y: BoxView> BoxView for ReifNeqView<X, Y> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        Ok(reif_disentailed_eq(&self.x, &self.y, s)? as i64)
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        Ok(!reif_entailed_eq(&self.x, &self.y, s)? as i64)
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        if let Some(r) = reif_gate_min(s, bound) {
            return r;
        }
        enforce_neq(&self.x, &self.y, s)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        if let Some(r) = reif_gate_max(s, bound) {
            return r;
        }
        enforce_eq(&self.x, &self.y, s)
    }

    fn triggers(&self, s: &DomainStore, _event: Event, out: &mut Vec<(VarId, Event)>) {
        self.x.triggers(s, Event::MinChange, out);
        self.x.triggers(s, Event::MaxChange, out);
        self.y.triggers(s, Event::MinChange, out);
        self.y.triggers(s, Event::MaxChange, out);
    }

    fn triggers_can_move(&self) -> bool {
        self.x.triggers_can_move() || self.y.triggers_can_move()
    }
}

fn enforce_leq<X: BoxView, Y: BoxView>(x: &X, y: &Y, s: &mut DomainStore) -> Result<bool> {
    if !x.upd_max(s, y.get_max(s)?)? {
        return Ok(false);
    }
    y.upd_min(s, x.get_min(s)?)
}

fn enforce_gt<X: BoxView, Y: BoxView>(x: &X, y: &Y, s: &mut DomainStore) -> Result<bool> {
    let b = arith::add(s, y.get_min(s)?, 1)?;
    if !x.upd_min(s, b)? {
        return Ok(false);
    }
    let b = arith::sub(s, x.get_max(s)?, 1)?;
    y.upd_max(s, b)
}

/// 0/1 view of `x ≤ y`.
#[derive(Clone, Debug)]
pub struct ReifLeqView<X, Y> {
    pub x: X,
    pub y: Y,
}

impl<X: BoxView, Y: BoxView> BoxView for ReifLeqView<X, Y> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        Ok((self.x.get_max(s)? <= self.y.get_min(s)?) as i64)
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        Ok((self.x.get_min(s)? <= self.y.get_max(s)?) as i64)
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        if let Some(r) = reif_gate_min(s, bound) {
            return r;
        }
        enforce_leq(&self.x, &self.y, s)
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        if let Some(r) = reif_gate_max(s, bound) {
            return r;
        }
        enforce_gt(&self.x, &self.y, s)
    }

    fn triggers(&self, s: &DomainStore, _event: Event, out: &mut Vec<(VarId, Event)>) {
        self.x.triggers(s, Event::MinChange, out);
        self.x.triggers(s, Event::MaxChange, out);
        self.y.triggers(s, Event::MinChange, out);
        self.y.triggers(s, Event::MaxChange, out);
    }

    fn triggers_can_move(&self) -> bool {
        self.x.triggers_can_move() || self.y.triggers_can_move()
    }
}

/// Conditional expression: the box of the then-branch when the condition is
/// fixed true, of the else-branch when fixed false, and their hull while the
/// condition is open.
#[derive(Clone, Debug)]
pub struct IteView<C, T, F> {
    pub cond: C,
    pub then_: T,
    pub else_: F,
}

impl<C: BoxView, T: BoxView, F: BoxView> IteView<C, T, F> {
    fn cond_state(&self, s: &DomainStore) -> Result<Option<bool>> {
        let (cl, ch) = (self.cond.get_min(s)?, self.cond.get_max(s)?);
        if cl == ch {
            Ok(Some(cl != 0))
        } else {
            Ok(None)
        }
    }
}

impl<C: BoxView, T: BoxView, F: BoxView> BoxView for IteView<C, T, F> {
    fn get_min(&self, s: &DomainStore) -> Result<i64> {
        match self.cond_state(s)? {
            Some(true) => self.then_.get_min(s),
            Some(false) => self.else_.get_min(s),
            None => {
                s.count_op();
                Ok(self.then_.get_min(s)?.min(self.else_.get_min(s)?))
            }
        }
    }

    fn get_max(&self, s: &DomainStore) -> Result<i64> {
        match self.cond_state(s)? {
            Some(true) => self.then_.get_max(s),
            Some(false) => self.else_.get_max(s),
            None => {
                s.count_op();
                Ok(self.then_.get_max(s)?.max(self.else_.get_max(s)?))
            }
        }
    }

    fn upd_min(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        match self.cond_state(s)? {
            Some(true) => self.then_.upd_min(s, bound),
            Some(false) => self.else_.upd_min(s, bound),
            None => {
                // pruning a branch would cut solutions of the other arm of
                // the condition, so only outright infeasibility is reported
                if self.then_.get_max(s)? < bound && self.else_.get_max(s)? < bound {
                    s.fail();
                    Ok(false)
                } else {
                    Ok(true)
                }
            }
        }
    }

    fn upd_max(&self, s: &mut DomainStore, bound: i64) -> Result<bool> {
        match self.cond_state(s)? {
            Some(true) => self.then_.upd_max(s, bound),
            Some(false) => self.else_.upd_max(s, bound),
            None => {
                if self.then_.get_min(s)? > bound && self.else_.get_min(s)? > bound {
                    s.fail();
                    Ok(false)
                } else {
                    Ok(true)
                }
            }
        }
    }

    fn triggers(&self, s: &DomainStore, event: Event, out: &mut Vec<(VarId, Event)>) {
        // The condition must be verified ground on the *store*, not assumed
        // from our own updates, before branch triggers are dropped.
        match self.cond_state(s).unwrap_or(None) {
            Some(true) => self.then_.triggers(s, event, out),
            Some(false) => self.else_.triggers(s, event, out),
            None => {
                self.cond.triggers(s, Event::MinChange, out);
                self.cond.triggers(s, Event::MaxChange, out);
                self.then_.triggers(s, event, out);
                self.else_.triggers(s, event, out);
            }
        }
    }

    fn triggers_can_move(&self) -> bool {
        true
    }
}

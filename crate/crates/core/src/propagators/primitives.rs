//! Equality, disequality-with-constant and ordering propagators.
//!
//! Equality and ordering run their fixpoint on local interval copies of the
//! view bounds and push the final bounds through the views once. Keeping
//! the intermediate bounds local is what makes the propagator act as an
//! idempotent filter at the expression level: a bound like "the product
//! lies in [5..7]" participates in the reasoning even when no underlying
//! variable can represent it.

use crate::engine::{DomainStore, Event, VarId};
use crate::error::Result;
use crate::propagators::{Propagator, Status};
use crate::views::{arith, bound_triggers, BoxView};

fn read<X: BoxView>(x: &X, s: &DomainStore) -> Result<(i64, i64)> {
    Ok((x.get_min(s)?, x.get_max(s)?))
}

fn push<X: BoxView>(x: &X, s: &mut DomainStore, lo: i64, hi: i64) -> Result<bool> {
    Ok(x.upd_min(s, lo)? && x.upd_max(s, hi)?)
}

/// `X = Y` at bound strength: intersect local copies, push once, and
/// re-read to decide the report.
pub struct Eq<X, Y> {
    x: X,
    y: Y,
}

impl<X: BoxView, Y: BoxView> Eq<X, Y> {
    pub fn new(x: X, y: Y) -> Self {
        Eq { x, y }
    }
}

impl<X: BoxView, Y: BoxView> Propagator for Eq<X, Y> {
    fn execute(&mut self, s: &mut DomainStore) -> Result<Status> {
        s.begin_pass();
        let lx = read(&self.x, s)?;
        let ly = read(&self.y, s)?;
        let m = (lx.0.max(ly.0), lx.1.min(ly.1));
        if m.0 > m.1 {
            s.fail();
            return Ok(Status::Failed);
        }
        let u0 = s.counters().domain_updates.get();
        if !push(&self.x, s, m.0, m.1)? || !push(&self.y, s, m.0, m.1)? {
            return Ok(Status::Failed);
        }
        // with zero domain updates the store is exactly as read, so the
        // bounds-agreement condition can be decided without re-reading;
        // any update instead suspends and the queue re-runs on own events
        if s.counters().domain_updates.get() == u0 && lx == m && ly == m {
            Ok(Status::Idempotent)
        } else {
            Ok(Status::Suspend)
        }
    }

    fn subscriptions(&self, s: &DomainStore) -> Vec<(VarId, Event)> {
        let mut out = bound_triggers(&self.x, s);
        out.extend(bound_triggers(&self.y, s));
        out.sort();
        out.dedup();
        out
    }

    fn movable_triggers(&self) -> bool {
        self.x.triggers_can_move() || self.y.triggers_can_move()
    }
}

/// `X ≠ k`: prunes `k` only when it sits on a bound of `X`. The idempotency
/// report re-reads the bound after the update, since the update need not
/// persist when `X` is a composite expression.
pub struct Neq<X> {
    x: X,
    k: i64,
}

impl<X: BoxView> Neq<X> {
    pub fn new(x: X, k: i64) -> Self {
        Neq { x, k }
    }
}

impl<X: BoxView> Propagator for Neq<X> {
    fn execute(&mut self, s: &mut DomainStore) -> Result<Status> {
        s.begin_pass();
        if self.x.get_min(s)? == self.k {
            let b = arith::add(s, self.k, 1)?;
            return if self.x.upd_min(s, b)? {
                s.begin_pass();
                if self.x.get_min(s)? > self.k {
                    Ok(Status::Idempotent)
                } else {
                    Ok(Status::Suspend)
                }
            } else {
                Ok(Status::Failed)
            };
        }
        if self.x.get_max(s)? == self.k {
            let b = arith::sub(s, self.k, 1)?;
            return if self.x.upd_max(s, b)? {
                s.begin_pass();
                if self.x.get_max(s)? < self.k {
                    Ok(Status::Idempotent)
                } else {
                    Ok(Status::Suspend)
                }
            } else {
                Ok(Status::Failed)
            };
        }
        Ok(Status::Suspend)
    }

    fn subscriptions(&self, s: &DomainStore) -> Vec<(VarId, Event)> {
        bound_triggers(&self.x, s)
    }

    fn movable_triggers(&self) -> bool {
        self.x.triggers_can_move()
    }
}

/// `X ≤ Y`; idempotent once entailed (`max(X) ≤ min(Y)` on re-read).
pub struct Leq<X, Y> {
    x: X,
    y: Y,
}

impl<X: BoxView, Y: BoxView> Leq<X, Y> {
    pub fn new(x: X, y: Y) -> Self {
        Leq { x, y }
    }
}

impl<X: BoxView, Y: BoxView> Propagator for Leq<X, Y> {
    fn execute(&mut self, s: &mut DomainStore) -> Result<Status> {
        s.begin_pass();
        let lx = read(&self.x, s)?;
        let ly = read(&self.y, s)?;
        if lx.0 > ly.1 {
            s.fail();
            return Ok(Status::Failed);
        }
        let u0 = s.counters().domain_updates.get();
        if !self.x.upd_max(s, ly.1)? {
            return Ok(Status::Failed);
        }
        if !self.y.upd_min(s, lx.0)? {
            return Ok(Status::Failed);
        }
        // entailment decided on the unchanged reads when nothing moved
        if s.counters().domain_updates.get() == u0 && lx.1 <= ly.0 {
            Ok(Status::Idempotent)
        } else {
            Ok(Status::Suspend)
        }
    }

    fn subscriptions(&self, s: &DomainStore) -> Vec<(VarId, Event)> {
        let mut out = bound_triggers(&self.x, s);
        out.extend(bound_triggers(&self.y, s));
        out.sort();
        out.dedup();
        out
    }

    fn movable_triggers(&self) -> bool {
        self.x.triggers_can_move() || self.y.triggers_can_move()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Store;
    use crate::views::ops::{AddView, VarView};

    #[test]
    fn eq_intersects_and_reports_idempotent_on_agreement() {
        let mut s = Store::new();
        let x = s.new_var(1, 4).unwrap();
        let y = s.new_var(3, 6).unwrap();
        assert!(s.post(Box::new(Eq::new(VarView(x), VarView(y)))).unwrap());
        assert_eq!((s.dom().min(x), s.dom().max(x)), (3, 4));
        assert_eq!((s.dom().min(y), s.dom().max(y)), (3, 4));

        let mut s2 = Store::new();
        let a = s2.new_var(5, 5).unwrap();
        let b = s2.new_var(5, 5).unwrap();
        let mut p = Eq::new(VarView(a), VarView(b));
        let u0 = s2.dom().counters().domain_updates.get();
        assert_eq!(p.execute(s2.dom_mut()).unwrap(), Status::Idempotent);
        assert_eq!(s2.dom().counters().domain_updates.get(), u0);
    }

    #[test]
    fn eq_fails_on_disjoint() {
        let mut s = Store::new();
        let x = s.new_var(1, 2).unwrap();
        let y = s.new_var(5, 6).unwrap();
        let mut p = Eq::new(VarView(x), VarView(y));
        assert_eq!(p.execute(s.dom_mut()).unwrap(), Status::Failed);
    }

    #[test]
    fn neq_on_plain_variable_is_persistent_and_idempotent() {
        let mut s = Store::new();
        let x = s.new_var(4, 7).unwrap();
        let mut p = Neq::new(VarView(x), 4);
        assert_eq!(p.execute(s.dom_mut()).unwrap(), Status::Idempotent);
        assert_eq!(s.dom().min(x), 5);
    }

    #[test]
    fn neq_on_sum_view_sees_the_nonpersistent_update() {
        // y1, y2 in {1,2}: the expression y1+y2 has max 4; pruning 4 via
        // upd_max(3) changes no variable domain, so the report must be
        // Suspend, not Idempotent.
        let mut s = Store::new();
        let y1 = s.new_var(1, 2).unwrap();
        let y2 = s.new_var(1, 2).unwrap();
        let view = AddView { x: VarView(y1), y: VarView(y2) };
        let mut p = Neq::new(view, 4);
        let u0 = s.dom().counters().domain_updates.get();
        assert_eq!(p.execute(s.dom_mut()).unwrap(), Status::Suspend);
        assert_eq!(s.dom().counters().domain_updates.get(), u0, "domains unchanged");
        assert_eq!((s.dom().min(y1), s.dom().max(y1)), (1, 2));
        assert_eq!((s.dom().min(y2), s.dom().max(y2)), (1, 2));
    }

    #[test]
    fn neq_fails_when_ground_at_k() {
        let mut s = Store::new();
        let x = s.new_var(4, 4).unwrap();
        let mut p = Neq::new(VarView(x), 4);
        assert_eq!(p.execute(s.dom_mut()).unwrap(), Status::Failed);
    }

    #[test]
    fn leq_tightens_both_sides() {
        let mut s = Store::new();
        let x = s.new_var(3, 9).unwrap();
        let y = s.new_var(1, 5).unwrap();
        assert!(s.post(Box::new(Leq::new(VarView(x), VarView(y)))).unwrap());
        assert_eq!((s.dom().min(x), s.dom().max(x)), (3, 5));
        assert_eq!((s.dom().min(y), s.dom().max(y)), (3, 5));

        let mut s2 = Store::new();
        let a = s2.new_var(0, 2).unwrap();
        let b = s2.new_var(2, 8).unwrap();
        let mut p = Leq::new(VarView(a), VarView(b));
        let u0 = s2.dom().counters().domain_updates.get();
        assert_eq!(p.execute(s2.dom_mut()).unwrap(), Status::Idempotent);
        assert_eq!(s2.dom().counters().domain_updates.get(), u0);
    }

    #[test]
    fn leq_fails_when_impossible() {
        let mut s = Store::new();
        let x = s.new_var(6, 9).unwrap();
        let y = s.new_var(1, 5).unwrap();
        let mut p = Leq::new(VarView(x), VarView(y));
        assert_eq!(p.execute(s.dom_mut()).unwrap(), Status::Failed);
    }
}

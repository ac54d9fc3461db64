//! The product propagator `X · Y = Z`.

use crate::engine::{DomainStore, Event, VarId};
use crate::error::Result;
use crate::propagators::{Propagator, Status};
use crate::views::ops::{mul_support_hull, upd_max_wide, upd_min_wide, MulSupport};
use crate::views::{bound_triggers, BoxView};

type Iv = (i128, i128);

/// `x · y = z`: z bounds from the interval product of x and y, x and y
/// tightened by sign-case interval division. The fixpoint runs on local
/// interval copies and the result is pushed through the views once.
/// Sound but not bounds-complete (zero-spanning co-factors prune nothing).
pub struct MulEq<X, Y, Z> {
    x: X,
    y: Y,
    z: Z,
}

impl<X: BoxView, Y: BoxView, Z: BoxView> MulEq<X, Y, Z> {
    pub fn new(x: X, y: Y, z: Z) -> Self {
        MulEq { x, y, z }
    }

    fn read_all(&self, s: &DomainStore) -> Result<[Iv; 3]> {
        Ok([
            (self.x.get_min(s)? as i128, self.x.get_max(s)? as i128),
            (self.y.get_min(s)? as i128, self.y.get_max(s)? as i128),
            (self.z.get_min(s)? as i128, self.z.get_max(s)? as i128),
        ])
    }
}

fn corners(a: Iv, b: Iv, s: &DomainStore) -> Iv {
    s.count_op();
    let ps = [a.0 * b.0, a.0 * b.1, a.1 * b.0, a.1 * b.1];
    (*ps.iter().min().unwrap(), *ps.iter().max().unwrap())
}

fn narrow(t: &mut Iv, lo: i128, hi: i128) -> Option<bool> {
    let nl = t.0.max(lo);
    let nh = t.1.min(hi);
    if nl > nh {
        return None;
    }
    let changed = nl != t.0 || nh != t.1;
    *t = (nl, nh);
    Some(changed)
}

/// Narrows `target` of one factor given the other factor's interval.
fn narrow_factor(t: &mut Iv, factor: Iv, target: Iv, s: &DomainStore) -> Option<bool> {
    match mul_support_hull(s, factor, target) {
        MulSupport::Empty => None,
        MulSupport::NoPrune => Some(false),
        MulSupport::Range(lo, hi) => {
            let lo = lo.map(|v| v as i128).unwrap_or(i128::MIN / 4);
            let hi = hi.map(|v| v as i128).unwrap_or(i128::MAX / 4);
            narrow(t, lo, hi)
        }
    }
}

fn local_mul_fixpoint(b: &mut [Iv; 3], s: &DomainStore) -> bool {
    loop {
        let mut changed = false;
        let (plo, phi) = corners(b[0], b[1], s);
        match narrow(&mut b[2], plo, phi) {
            None => return false,
            Some(c) => changed |= c,
        }
        let (x, y, z) = (b[0], b[1], b[2]);
        match narrow_factor(&mut b[0], y, z, s) {
            None => return false,
            Some(c) => changed |= c,
        }
        match narrow_factor(&mut b[1], x, z, s) {
            None => return false,
            Some(c) => changed |= c,
        }
        if !changed {
            return true;
        }
    }
}

impl<X: BoxView, Y: BoxView, Z: BoxView> Propagator for MulEq<X, Y, Z> {
    fn execute(&mut self, s: &mut DomainStore) -> Result<Status> {
        s.begin_pass();
        let before = self.read_all(s)?;
        let mut b = before;
        if !local_mul_fixpoint(&mut b, s) {
            s.fail();
            return Ok(Status::Failed);
        }
        let u0 = s.counters().domain_updates.get();
        let pushed = upd_min_wide(&self.x, s, b[0].0)?
            && upd_max_wide(&self.x, s, b[0].1)?
            && upd_min_wide(&self.y, s, b[1].0)?
            && upd_max_wide(&self.y, s, b[1].1)?
            && upd_min_wide(&self.z, s, b[2].0)?
            && upd_max_wide(&self.z, s, b[2].1)?;
        if !pushed {
            return Ok(Status::Failed);
        }
        if s.counters().domain_updates.get() == u0 && b == before {
            Ok(Status::Idempotent)
        } else {
            Ok(Status::Suspend)
        }
    }

    fn subscriptions(&self, s: &DomainStore) -> Vec<(VarId, Event)> {
        let mut out = bound_triggers(&self.x, s);
        out.extend(bound_triggers(&self.y, s));
        out.extend(bound_triggers(&self.z, s));
        out.sort();
        out.dedup();
        out
    }

    fn movable_triggers(&self) -> bool {
        self.x.triggers_can_move() || self.y.triggers_can_move() || self.z.triggers_can_move()
    }
}

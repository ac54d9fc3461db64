//! The variable store: interval domains, trailing, change events and the
//! instrumentation counters.

use std::cell::Cell;

use crate::approx::Interval;
use crate::error::{Error, Result};

/// Handle of a variable registered in a store.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub(crate) u32);

impl VarId {
    pub fn index(&self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> VarId {
        VarId(i as u32)
    }
}

/// Domain change events propagators can subscribe to.
///
/// A `Ground` notification is always raised together with the bound-change
/// notification that made the domain a singleton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    MinChange,
    MaxChange,
    Ground,
}

impl Event {
    pub(crate) fn idx(self) -> usize {
        match self {
            Event::MinChange => 0,
            Event::MaxChange => 1,
            Event::Ground => 2,
        }
    }
}

/// Execution counters, mirroring the columns of the monitoring tables:
/// propagator executions, fails, domain updates, view-object calls,
/// arithmetic operations, plus solutions and search nodes.
#[derive(Default)]
pub struct Counters {
    pub propagations: Cell<u64>,
    pub fails: Cell<u64>,
    pub domain_updates: Cell<u64>,
    pub view_calls: Cell<u64>,
    pub arith_ops: Cell<u64>,
    pub solutions: Cell<u64>,
    pub nodes: Cell<u64>,
}

impl Counters {
    fn bump(cell: &Cell<u64>) {
        cell.set(cell.get() + 1);
    }
}

/// Variable domains plus the undo trail.
///
/// Bound writes go through [`DomainStore::set_min`] / [`DomainStore::set_max`]
/// which trail the old interval (once per choice point), raise change events
/// and count domain updates. Restoring to a mark reproduces the exact
/// intervals that were current when the mark was taken.
pub struct DomainStore {
    doms: Vec<Interval>,
    names: Vec<String>,
    trail: Vec<(u32, Interval)>,
    saved_at: Vec<u64>,
    stamp: u64,
    failed: bool,
    pending: Vec<(VarId, Event)>,
    pub(crate) counters: Counters,
    cache_enabled: bool,
    uniform_call_counting: bool,
    pass_id: Cell<u64>,
}

impl Default for DomainStore {
    fn default() -> Self {
        DomainStore::new()
    }
}

impl DomainStore {
    pub fn new() -> DomainStore {
        DomainStore {
            doms: Vec::new(),
            names: Vec::new(),
            trail: Vec::new(),
            saved_at: Vec::new(),
            stamp: 1,
            failed: false,
            pending: Vec::new(),
            counters: Counters::default(),
            cache_enabled: true,
            uniform_call_counting: false,
            pass_id: Cell::new(1),
        }
    }

    pub fn new_var(&mut self, lo: i64, hi: i64) -> Result<VarId> {
        self.new_var_named(String::new(), lo, hi)
    }

    pub fn new_var_named(&mut self, name: String, lo: i64, hi: i64) -> Result<VarId> {
        if lo > hi {
            return Err(Error::EmptyVariableDomain { lo, hi });
        }
        let id = VarId(self.doms.len() as u32);
        self.doms.push(Interval::new(lo, hi));
        self.names.push(name);
        self.saved_at.push(0);
        Ok(id)
    }

    pub fn num_vars(&self) -> usize {
        self.doms.len()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.index()]
    }

    pub fn dom(&self, v: VarId) -> Interval {
        self.doms[v.index()]
    }

    pub fn min(&self, v: VarId) -> i64 {
        self.doms[v.index()].lo()
    }

    pub fn max(&self, v: VarId) -> i64 {
        self.doms[v.index()].hi()
    }

    pub fn is_ground(&self, v: VarId) -> bool {
        self.doms[v.index()].is_singleton()
    }

    pub fn failed(&self) -> bool {
        self.failed
    }

    /// Marks the store failed without touching any domain. Used by views
    /// that detect emptiness before performing a write.
    pub fn fail(&mut self) {
        self.failed = true;
    }

    fn save(&mut self, v: VarId) {
        let i = v.index();
        if self.saved_at[i] != self.stamp {
            self.trail.push((v.0, self.doms[i]));
            self.saved_at[i] = self.stamp;
        }
    }

    /// Raises the lower bound of `v` to `bound`. No-op if already satisfied;
    /// returns false (and marks the store failed) if this empties the domain.
    pub fn set_min(&mut self, v: VarId, bound: i64) -> bool {
        let d = self.doms[v.index()];
        if bound <= d.lo() {
            return true;
        }
        self.save(v);
        self.doms[v.index()] = Interval::new(bound, d.hi());
        Counters::bump(&self.counters.domain_updates);
        if bound > d.hi() {
            self.failed = true;
            return false;
        }
        self.pending.push((v, Event::MinChange));
        if bound == d.hi() {
            self.pending.push((v, Event::Ground));
        }
        true
    }

    /// Lowers the upper bound of `v` to `bound`; mirror of [`set_min`].
    pub fn set_max(&mut self, v: VarId, bound: i64) -> bool {
        let d = self.doms[v.index()];
        if bound >= d.hi() {
            return true;
        }
        self.save(v);
        self.doms[v.index()] = Interval::new(d.lo(), bound);
        Counters::bump(&self.counters.domain_updates);
        if bound < d.lo() {
            self.failed = true;
            return false;
        }
        self.pending.push((v, Event::MaxChange));
        if bound == d.lo() {
            self.pending.push((v, Event::Ground));
        }
        true
    }

    /// Opens a new choice point and returns the mark to restore to.
    pub fn mark(&mut self) -> usize {
        self.stamp += 1;
        self.trail.len()
    }

    /// Restores every domain to its state at `mark` and clears the failed
    /// flag. Pending events raised since are dropped. Cached view bounds
    /// become invalid here: domains may widen, so the pass id advances.
    pub fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, d) = self.trail.pop().unwrap();
            self.doms[v as usize] = d;
        }
        self.failed = false;
        self.pending.clear();
        self.stamp += 1;
        self.begin_pass();
    }

    /// Opens a new evaluation pass: cached subexpression bounds from earlier
    /// passes are discarded. Within one pass a cached bound may be stale
    /// after an update, which is sound (stale bounds are never narrower)
    /// and is what keeps a chain update linear instead of quadratic.
    pub fn begin_pass(&self) {
        self.pass_id.set(self.pass_id.get() + 1);
    }

    pub fn pass(&self) -> u64 {
        self.pass_id.get()
    }

    pub fn take_events(&mut self) -> Vec<(VarId, Event)> {
        std::mem::take(&mut self.pending)
    }

    pub fn has_pending_events(&self) -> bool {
        !self.pending.is_empty()
    }

    // --- instrumentation ---------------------------------------------------

    pub fn count_op(&self) {
        Counters::bump(&self.counters.arith_ops);
    }

    pub fn count_call(&self) {
        Counters::bump(&self.counters.view_calls);
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    /// Per-execution bound caching in n-ary views (on by default).
    pub fn cache_enabled(&self) -> bool {
        self.cache_enabled
    }

    pub fn set_cache_enabled(&mut self, on: bool) {
        self.cache_enabled = on;
    }

    /// When set, statically composed views count their method invocations
    /// exactly like dynamically dispatched ones. Used by audits that compare
    /// the two realizations call for call.
    pub fn uniform_call_counting(&self) -> bool {
        self.uniform_call_counting
    }

    pub fn set_uniform_call_counting(&mut self, on: bool) {
        self.uniform_call_counting = on;
    }

    /// Snapshot of all domains, used by tests to assert bit-identical
    /// restoration and by search to report solutions.
    pub fn snapshot(&self) -> Vec<Interval> {
        self.doms.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_creation_and_bounds() {
        let mut s = DomainStore::new();
        let x = s.new_var(0, 9).unwrap();
        assert_eq!((s.min(x), s.max(x)), (0, 9));
        let g = s.new_var(5, 5).unwrap();
        assert!(s.is_ground(g));
        assert!(matches!(s.new_var(3, 1), Err(Error::EmptyVariableDomain { .. })));
    }

    #[test]
    fn set_min_is_contracting_and_detects_wipeout() {
        let mut s = DomainStore::new();
        let x = s.new_var(0, 5).unwrap();
        assert!(s.set_min(x, -3), "weaker bound is a no-op");
        assert_eq!(s.min(x), 0);
        assert!(s.set_min(x, 3));
        assert_eq!(s.min(x), 3);
        assert!(!s.set_min(x, 6));
        assert!(s.failed());
    }

    #[test]
    fn trail_restores_exact_domains() {
        let mut s = DomainStore::new();
        let x = s.new_var(0, 9).unwrap();
        let y = s.new_var(-4, 4).unwrap();
        let before = s.snapshot();
        let m = s.mark();
        s.set_min(x, 2);
        s.set_max(x, 7);
        s.set_max(y, 0);
        let m2 = s.mark();
        s.set_min(y, 0);
        assert!(s.is_ground(y));
        s.undo_to(m2);
        assert_eq!(s.dom(y), Interval::new(-4, 0));
        s.undo_to(m);
        assert_eq!(s.snapshot(), before);
    }

    #[test]
    fn random_mark_undo_stress() {
        let mut rng = crate::models::SeededRng::new(0xfeed);
        let mut s = DomainStore::new();
        for _ in 0..6 {
            s.new_var(-20, 20).unwrap();
        }
        let mut stack: Vec<(usize, Vec<Interval>)> = Vec::new();
        for _ in 0..2000 {
            match rng.next_u32() % 4 {
                0 => {
                    let snap = s.snapshot();
                    stack.push((s.mark(), snap));
                }
                1 | 2 => {
                    let v = VarId((rng.next_u32() % 6) as u32);
                    let d = s.dom(v);
                    if d.is_empty() || d.is_singleton() {
                        continue;
                    }
                    let delta = 1 + (rng.next_u32() as i64 % 3);
                    if rng.next_u32() % 2 == 0 {
                        s.set_min(v, d.lo() + delta);
                    } else {
                        s.set_max(v, d.hi() - delta);
                    }
                    s.take_events();
                }
                _ => {
                    if let Some((m, snap)) = stack.pop() {
                        s.undo_to(m);
                        assert_eq!(s.snapshot(), snap);
                    }
                }
            }
        }
        while let Some((m, snap)) = stack.pop() {
            s.undo_to(m);
            assert_eq!(s.snapshot(), snap);
        }
    }
}

//! The propagation engine: store facade, event routing, fixpoint loop and
//! depth-first search.

mod search;
mod store;

pub use search::{
    branch_and_bound_min, dfs, Brancher, SearchMode, SearchOutcome, SearchStats, ValRule, VarRule,
};
pub use store::{Counters, DomainStore, Event, VarId};

use std::collections::VecDeque;

use crate::error::Result;
use crate::propagators::{Propagator, Status};

/// Handle of a posted propagator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropId(u32);

impl PropId {
    pub fn index(&self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> PropId {
        PropId(i as u32)
    }
}

/// Undo-log entry for subscription changes made by trigger moving.
enum SubChange {
    Added(PropId, VarId, Event),
    Removed(PropId, VarId, Event),
}

/// A mark to restore a [`Store`] to: domains plus subscriptions.
#[derive(Clone, Copy, Debug)]
pub struct StoreMark {
    dom: usize,
    subs: usize,
}

/// Variable store plus posted propagators, their subscriptions and the
/// propagation queue: the per-search solver state.
///
/// The registry keeps both directions of the constraint graph: per variable
/// and event the subscribed propagators, and per propagator its current
/// subscription list.
pub struct Store {
    dom: DomainStore,
    props: Vec<Box<dyn Propagator>>,
    prop_subs: Vec<Vec<(VarId, Event)>>,
    movable: Vec<bool>,
    subs: Vec<[Vec<PropId>; 3]>,
    queue: VecDeque<PropId>,
    in_queue: Vec<bool>,
    sub_trail: Vec<SubChange>,
}

impl Default for Store {
    fn default() -> Self {
        Store::new()
    }
}

impl Store {
    pub fn new() -> Store {
        Store {
            dom: DomainStore::new(),
            props: Vec::new(),
            prop_subs: Vec::new(),
            movable: Vec::new(),
            subs: Vec::new(),
            queue: VecDeque::new(),
            in_queue: Vec::new(),
            sub_trail: Vec::new(),
        }
    }

    pub fn new_var(&mut self, lo: i64, hi: i64) -> Result<VarId> {
        let v = self.dom.new_var(lo, hi)?;
        self.subs.push(Default::default());
        Ok(v)
    }

    pub fn new_var_named(&mut self, name: &str, lo: i64, hi: i64) -> Result<VarId> {
        let v = self.dom.new_var_named(name.to_string(), lo, hi)?;
        self.subs.push(Default::default());
        Ok(v)
    }

    pub fn dom(&self) -> &DomainStore {
        &self.dom
    }

    pub fn dom_mut(&mut self) -> &mut DomainStore {
        &mut self.dom
    }

    pub fn failed(&self) -> bool {
        self.dom.failed()
    }

    pub fn num_props(&self) -> usize {
        self.props.len()
    }

    /// Subscribes the propagator per its trigger map, schedules it once and
    /// runs the queue to fixpoint. Returns false if the store failed.
    pub fn post(&mut self, p: Box<dyn Propagator>) -> Result<bool> {
        let id = PropId(self.props.len() as u32);
        let subs = p.subscriptions(&self.dom);
        self.movable.push(p.movable_triggers());
        self.props.push(p);
        for &(v, e) in &subs {
            self.subs[v.index()][e.idx()].push(id);
        }
        self.prop_subs.push(subs);
        self.in_queue.push(false);
        self.schedule(id);
        self.fixpoint()
    }

    pub fn schedule(&mut self, id: PropId) {
        if !self.in_queue[id.index()] {
            self.in_queue[id.index()] = true;
            self.queue.push_back(id);
        }
    }

    fn clear_queue(&mut self) {
        while let Some(id) = self.queue.pop_front() {
            self.in_queue[id.index()] = false;
        }
    }

    /// Routes pending domain events to subscribed propagators. Events raised
    /// by the propagator that just ran re-queue it only when it reported
    /// `Suspend`; an `Idempotent` propagator is at fixpoint for the domains
    /// it produced, so its own events are suppressed.
    fn route_events(&mut self, active: Option<(PropId, Status)>) {
        let events = self.dom.take_events();
        for (var, ev) in events {
            let lists = &self.subs[var.index()];
            // Ground events also notify their subscribers through the
            // dedicated list; bound lists were filled by trigger maps.
            let push = |q: &mut VecDeque<PropId>, in_q: &mut Vec<bool>, id: PropId| {
                if !in_q[id.index()] {
                    in_q[id.index()] = true;
                    q.push_back(id);
                }
            };
            for &sub in &lists[ev.idx()] {
                if let Some((me, st)) = active {
                    if sub == me && st == Status::Idempotent {
                        continue;
                    }
                }
                push(&mut self.queue, &mut self.in_queue, sub);
            }
        }
    }

    /// Runs queued propagators until the queue drains or the store fails.
    pub fn fixpoint(&mut self) -> Result<bool> {
        if self.dom.failed() {
            self.clear_queue();
            self.dom.take_events();
            return Ok(false);
        }
        self.route_events(None);
        while let Some(id) = self.queue.pop_front() {
            self.in_queue[id.index()] = false;
            let c = &self.dom.counters;
            c.propagations.set(c.propagations.get() + 1);
            let status = self.props[id.index()].execute(&mut self.dom)?;
            if status == Status::Failed || self.dom.failed() {
                self.dom.fail();
                self.dom.take_events();
                self.clear_queue();
                return Ok(false);
            }
            self.route_events(Some((id, status)));
            if self.movable[id.index()] {
                self.refresh_subscriptions(id);
            }
        }
        Ok(true)
    }

    /// Re-derives the propagator's trigger map and applies the difference,
    /// logging every change so backtracking restores dropped triggers.
    fn refresh_subscriptions(&mut self, id: PropId) {
        let new = self.props[id.index()].subscriptions(&self.dom);
        let old = std::mem::take(&mut self.prop_subs[id.index()]);
        for &(v, e) in &old {
            if !new.contains(&(v, e)) {
                let list = &mut self.subs[v.index()][e.idx()];
                if let Some(pos) = list.iter().position(|p| *p == id) {
                    list.swap_remove(pos);
                    self.sub_trail.push(SubChange::Removed(id, v, e));
                }
            }
        }
        for &(v, e) in &new {
            if !old.contains(&(v, e)) {
                self.subs[v.index()][e.idx()].push(id);
                self.sub_trail.push(SubChange::Added(id, v, e));
            }
        }
        self.prop_subs[id.index()] = new;
    }

    pub fn mark(&mut self) -> StoreMark {
        StoreMark { dom: self.dom.mark(), subs: self.sub_trail.len() }
    }

    pub fn undo_to(&mut self, mark: StoreMark) {
        while self.sub_trail.len() > mark.subs {
            match self.sub_trail.pop().unwrap() {
                SubChange::Added(id, v, e) => {
                    let list = &mut self.subs[v.index()][e.idx()];
                    if let Some(pos) = list.iter().position(|p| *p == id) {
                        list.swap_remove(pos);
                    }
                    self.prop_subs[id.index()].retain(|&s| s != (v, e));
                }
                SubChange::Removed(id, v, e) => {
                    self.subs[v.index()][e.idx()].push(id);
                    self.prop_subs[id.index()].push((v, e));
                }
            }
        }
        self.dom.undo_to(mark.dom);
        self.clear_queue();
    }

    /// Current subscriptions of a propagator (sorted), for tests.
    pub fn subscriptions_of(&self, id: PropId) -> Vec<(VarId, Event)> {
        let mut v = self.prop_subs[id.index()].clone();
        v.sort();
        v
    }

    /// Directly executes one propagator once, outside the queue discipline.
    /// Used by audits that need to observe a single execution.
    pub fn execute_once(&mut self, id: PropId) -> Result<Status> {
        let c = &self.dom.counters;
        c.propagations.set(c.propagations.get() + 1);
        let status = self.props[id.index()].execute(&mut self.dom)?;
        self.dom.take_events();
        if status == Status::Failed {
            self.dom.fail();
        }
        Ok(status)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagators::Eq;
    use crate::views::ops::VarView;

    #[test]
    fn post_runs_to_fixpoint() {
        let mut s = Store::new();
        let x = s.new_var(1, 4).unwrap();
        let y = s.new_var(3, 6).unwrap();
        let ok = s.post(Box::new(Eq::new(VarView(x), VarView(y)))).unwrap();
        assert!(ok);
        assert_eq!((s.dom().min(x), s.dom().max(x)), (3, 4));
        assert_eq!((s.dom().min(y), s.dom().max(y)), (3, 4));
        assert!(s.dom().counters().propagations.get() >= 1);
    }

    #[test]
    fn post_on_disjoint_domains_fails_store() {
        let mut s = Store::new();
        let x = s.new_var(1, 2).unwrap();
        let y = s.new_var(5, 6).unwrap();
        let ok = s.post(Box::new(Eq::new(VarView(x), VarView(y)))).unwrap();
        assert!(!ok);
        assert!(s.failed());
    }

    #[test]
    fn fixpoint_on_empty_queue_does_nothing() {
        let mut s = Store::new();
        s.new_var(0, 5).unwrap();
        assert!(s.fixpoint().unwrap());
        assert_eq!(s.dom().counters().propagations.get(), 0);
    }

    #[test]
    fn chained_equalities_propagate_transitively() {
        let mut s = Store::new();
        let a = s.new_var(0, 9).unwrap();
        let b = s.new_var(0, 9).unwrap();
        let c = s.new_var(4, 4).unwrap();
        assert!(s.post(Box::new(Eq::new(VarView(a), VarView(b)))).unwrap());
        assert!(s.post(Box::new(Eq::new(VarView(b), VarView(c)))).unwrap());
        assert!(s.dom().is_ground(a) && s.dom().min(a) == 4);
    }
}

//! Depth-first search with trailing, plus branch-and-bound minimization.

use std::cell::Cell;
use std::rc::Rc;
use std::time::Instant;

use crate::engine::{DomainStore, Event, PropId, Store, VarId};
use crate::error::Result;
use crate::propagators::{Propagator, Status};
use crate::views::{bound_triggers, BoxView};

/// Variable selection rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarRule {
    InputOrder,
    FirstFail,
}

/// Value splitting rule: assign the minimum vs. exclude it, or bisect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValRule {
    MinValue,
    Bisect,
}

/// Branching heuristic over an explicit list of decision variables.
/// Auxiliary variables introduced by decomposition are never branched on.
#[derive(Clone, Debug)]
pub struct Brancher {
    pub vars: Vec<VarId>,
    pub var_rule: VarRule,
    pub val_rule: ValRule,
}

impl Brancher {
    pub fn input_order_min(vars: Vec<VarId>) -> Brancher {
        Brancher { vars, var_rule: VarRule::InputOrder, val_rule: ValRule::MinValue }
    }

    fn pick(&self, dom: &DomainStore) -> Option<VarId> {
        match self.var_rule {
            VarRule::InputOrder => self.vars.iter().copied().find(|&v| !dom.is_ground(v)),
            VarRule::FirstFail => self
                .vars
                .iter()
                .copied()
                .filter(|&v| !dom.is_ground(v))
                .min_by_key(|&v| dom.dom(v).width()),
        }
    }
}

/// The monitoring counters of one run: propagator executions, elapsed
/// milliseconds, fails, domain updates, view-object calls, arithmetic
/// operations, and solutions found.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub propagations: u64,
    pub time_ms: u64,
    pub fails: u64,
    pub domain_updates: u64,
    pub view_calls: u64,
    pub arith_ops: u64,
    pub solutions: u64,
    pub nodes: u64,
}

impl SearchStats {
    pub fn snapshot(dom: &DomainStore, elapsed_ms: u64) -> SearchStats {
        let c = dom.counters();
        SearchStats {
            propagations: c.propagations.get(),
            time_ms: elapsed_ms,
            fails: c.fails.get(),
            domain_updates: c.domain_updates.get(),
            view_calls: c.view_calls.get(),
            arith_ops: c.arith_ops.get(),
            solutions: c.solutions.get(),
            nodes: c.nodes.get(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    FirstSolution,
    AllSolutions,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub stats: SearchStats,
    /// False when the deadline cut the search short.
    pub complete: bool,
    pub best_objective: Option<i64>,
    pub best_solution: Option<Vec<i64>>,
}

enum Walk {
    Exhausted,
    StopRequested,
    TimedOut,
}

struct SearchCtx<'a> {
    brancher: &'a Brancher,
    mode: SearchMode,
    deadline: Option<Instant>,
    pinned: Option<PropId>,
    on_solution: &'a mut dyn FnMut(&DomainStore),
}

fn search_rec(store: &mut Store, ctx: &mut SearchCtx<'_>) -> Result<Walk> {
    let c = store.dom().counters();
    c.nodes.set(c.nodes.get() + 1);
    if let Some(d) = ctx.deadline {
        if Instant::now() >= d {
            return Ok(Walk::TimedOut);
        }
    }
    if let Some(p) = ctx.pinned {
        store.schedule(p);
    }
    if !store.fixpoint()? {
        let c = store.dom().counters();
        c.fails.set(c.fails.get() + 1);
        return Ok(Walk::Exhausted);
    }
    let var = match ctx.brancher.pick(store.dom()) {
        Some(v) => v,
        None => {
            debug_assert!(
                (0..store.dom().num_vars()).all(|i| store.dom().is_ground(VarId(i as u32))),
                "solutions must ground every variable"
            );
            let c = store.dom().counters();
            c.solutions.set(c.solutions.get() + 1);
            (ctx.on_solution)(store.dom());
            return Ok(match ctx.mode {
                SearchMode::FirstSolution => Walk::StopRequested,
                SearchMode::AllSolutions => Walk::Exhausted,
            });
        }
    };
    let d = store.dom().dom(var);
    let (left_hi, right_lo) = match ctx.brancher.val_rule {
        ValRule::MinValue => (d.lo(), d.lo() + 1),
        ValRule::Bisect => {
            let mid = d.lo() + (d.hi() - d.lo()) / 2;
            (mid, mid + 1)
        }
    };

    let m = store.mark();
    store.dom_mut().set_max(var, left_hi);
    match search_rec(store, ctx)? {
        Walk::Exhausted => {}
        stop => {
            store.undo_to(m);
            return Ok(stop);
        }
    }
    store.undo_to(m);

    let m = store.mark();
    store.dom_mut().set_min(var, right_lo);
    let walk = search_rec(store, ctx)?;
    store.undo_to(m);
    Ok(walk)
}

/// Complete depth-first search. Every reported solution has all variables
/// ground and all propagators at fixpoint.
pub fn dfs(
    store: &mut Store,
    brancher: &Brancher,
    mode: SearchMode,
    deadline: Option<Instant>,
    on_solution: &mut dyn FnMut(&DomainStore),
) -> Result<SearchOutcome> {
    let start = Instant::now();
    let mut ctx = SearchCtx { brancher, mode, deadline, pinned: None, on_solution };
    let walk = search_rec(store, &mut ctx)?;
    let stats = SearchStats::snapshot(store.dom(), start.elapsed().as_millis() as u64);
    Ok(SearchOutcome {
        stats,
        complete: !matches!(walk, Walk::TimedOut),
        best_objective: None,
        best_solution: None,
    })
}

/// Cut propagator used by branch-and-bound: keeps the objective at or below
/// the best value found so far, minus one.
struct ObjectiveCut<V> {
    obj: V,
    bound: Rc<Cell<i64>>,
}

impl<V: BoxView> Propagator for ObjectiveCut<V> {
    fn execute(&mut self, s: &mut DomainStore) -> Result<Status> {
        let b = self.bound.get();
        if b == i64::MAX {
            return Ok(Status::Suspend);
        }
        s.begin_pass();
        let u0 = s.counters().domain_updates.get();
        if !self.obj.upd_max(s, b)? {
            return Ok(Status::Failed);
        }
        if s.counters().domain_updates.get() == u0 {
            Ok(Status::Idempotent)
        } else {
            Ok(Status::Suspend)
        }
    }

    fn subscriptions(&self, s: &DomainStore) -> Vec<(VarId, Event)> {
        bound_triggers(&self.obj, s)
    }
}

/// Branch-and-bound minimization of an objective view: on each solution the
/// objective is constrained below the incumbent and the search continues.
/// Returns the last (optimal) solution.
pub fn branch_and_bound_min<V: BoxView + Clone + 'static>(
    store: &mut Store,
    objective: &V,
    brancher: &Brancher,
    deadline: Option<Instant>,
) -> Result<SearchOutcome> {
    let start = Instant::now();
    let bound = Rc::new(Cell::new(i64::MAX));
    let cut = ObjectiveCut { obj: objective.clone(), bound: bound.clone() };
    let cut_id = PropId(store.num_props() as u32);
    if !store.post(Box::new(cut))? {
        let stats = SearchStats::snapshot(store.dom(), start.elapsed().as_millis() as u64);
        return Ok(SearchOutcome {
            stats,
            complete: true,
            best_objective: None,
            best_solution: None,
        });
    }

    let mut best: Option<(i64, Vec<i64>)> = None;
    {
        let obj = objective.clone();
        let bound_ref = bound.clone();
        let best_ref = &mut best;
        let mut on_sol = move |dom: &DomainStore| {
            let v = obj.get_min(dom).unwrap_or(i64::MAX);
            let assignment: Vec<i64> =
                (0..dom.num_vars()).map(|i| dom.min(VarId(i as u32))).collect();
            match best_ref {
                Some((bv, _)) if *bv <= v => {}
                _ => *best_ref = Some((v, assignment)),
            }
            bound_ref.set(v.saturating_sub(1));
        };
        let mut ctx = SearchCtx {
            brancher,
            mode: SearchMode::AllSolutions,
            deadline,
            pinned: Some(cut_id),
            on_solution: &mut on_sol,
        };
        let walk = search_rec(store, &mut ctx)?;
        let stats = SearchStats::snapshot(store.dom(), start.elapsed().as_millis() as u64);
        let complete = !matches!(walk, Walk::TimedOut);
        Ok(SearchOutcome {
            stats,
            complete,
            best_objective: best.as_ref().map(|(v, _)| *v),
            best_solution: best.map(|(_, a)| a),
        })
    }
}

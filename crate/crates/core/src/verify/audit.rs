//! Idempotency-status audit: whenever a propagator reports `Idempotent`,
//! an immediate re-execution must perform zero domain updates. Views make
//! this subtle because updates need not persist, so the audit hammers every
//! propagator kind over randomized stores and expression shapes.

use crate::engine::{Store, VarId};
use crate::error::Result;
use crate::models::SeededRng;
use crate::propagators::{
    linear_eq, DistinctBounds, Eq, Leq, MulEq, Neq, Propagator, Status, SumEq, SumGeq, SumLeq,
};
use crate::views::ops::VarView;
use crate::views::{build_static, ViewNode};
use crate::verify::SuiteReport;

fn random_store(rng: &mut SeededRng, n: usize) -> Result<Store> {
    let mut s = Store::new();
    for i in 0..n {
        let lo = rng.next_in(-6, 6);
        let hi = rng.next_in(lo, 6);
        s.new_var_named(&format!("v{i}"), lo, hi)?;
    }
    Ok(s)
}

fn random_expr(rng: &mut SeededRng, nvars: usize, depth: usize) -> ViewNode {
    if depth == 0 || rng.next_u32() % 4 == 0 {
        return if rng.next_u32() % 5 == 0 {
            ViewNode::constant(rng.next_in(-3, 3))
        } else {
            ViewNode::var(VarId::from_index(rng.next_u32() as usize % nvars))
        };
    }
    let a = random_expr(rng, nvars, depth - 1);
    let b = random_expr(rng, nvars, depth - 1);
    match rng.next_u32() % 12 {
        0 => ViewNode::add(a, b),
        1 => ViewNode::sub(a, b),
        2 => ViewNode::mul(a, b),
        3 => ViewNode::min2(a, b),
        4 => ViewNode::max2(a, b),
        5 => ViewNode::neg(a),
        6 => ViewNode::abs(a),
        7 => ViewNode::sqr(a),
        8 => ViewNode::linear(if rng.next_u32() % 2 == 0 { 2 } else { -3 }, a),
        9 => ViewNode::reif_eq(a, b),
        10 => ViewNode::reif_leq(a, b),
        _ => ViewNode::sum(vec![a, b]),
    }
}

fn random_propagator(
    rng: &mut SeededRng,
    store: &Store,
    nvars: usize,
) -> Result<Box<dyn Propagator>> {
    let dom = store.dom();
    let expr = |rng: &mut SeededRng| random_expr(rng, nvars, 2);
    let vv = |rng: &mut SeededRng| VarView(VarId::from_index(rng.next_u32() as usize % nvars));
    Ok(match rng.next_u32() % 8 {
        0 => Box::new(Eq::new(build_static(&expr(rng), dom)?, build_static(&expr(rng), dom)?)),
        1 => Box::new(Leq::new(build_static(&expr(rng), dom)?, build_static(&expr(rng), dom)?)),
        2 => Box::new(Neq::new(build_static(&expr(rng), dom)?, rng.next_in(-8, 8))),
        3 => {
            let terms = (0..2 + rng.next_u32() % 2)
                .map(|_| build_static(&expr(rng), dom))
                .collect::<Result<Vec<_>>>()?;
            Box::new(SumEq::new(terms, vv(rng)))
        }
        4 => {
            let n = 2 + rng.next_u32() as usize % 2;
            let coeffs: Vec<i64> =
                (0..n).map(|_| if rng.next_u32() % 2 == 0 { 2 } else { -1 }).collect();
            let xs: Vec<VarView> = (0..n).map(|_| vv(rng)).collect();
            Box::new(linear_eq(&coeffs, xs, rng.next_in(-6, 6)))
        }
        5 => Box::new(MulEq::new(vv(rng), vv(rng), vv(rng))),
        6 => {
            let k = 2 + rng.next_u32() as usize % 3;
            let views = (0..k)
                .map(|_| build_static(&expr(rng), dom))
                .collect::<Result<Vec<_>>>()?;
            Box::new(DistinctBounds::new(views))
        }
        _ => {
            let terms = (0..2 + rng.next_u32() % 2)
                .map(|_| build_static(&expr(rng), dom))
                .collect::<Result<Vec<_>>>()?;
            let k = rng.next_in(-8, 8);
            if rng.next_u32() % 2 == 0 {
                Box::new(SumLeq::new(terms, k))
            } else {
                Box::new(SumGeq::new(terms, k))
            }
        }
    })
}

/// Runs `cases` randomized (propagator, store) pairs and confirms every
/// `Idempotent` report with a zero-update re-execution. The non-persistent
/// update witness (an expression pruned at its bound with no variable
/// change) is checked explicitly first.
pub fn idempotency_audit(cases: u64, seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("idempotency-audit");

    // the witness: y1, y2 in {1,2}, X = y1+y2, X != 4 prunes nothing
    // persistently, so Idempotent must not be reported
    {
        let mut s = Store::new();
        let y1 = s.new_var(1, 2).unwrap();
        let y2 = s.new_var(1, 2).unwrap();
        let node = ViewNode::add(ViewNode::var(y1), ViewNode::var(y2));
        let mut p = Neq::new(build_static(&node, s.dom()).unwrap(), 4);
        let u0 = s.dom().counters().domain_updates.get();
        let st = p.execute(s.dom_mut()).unwrap();
        r.check(st == Status::Suspend, || {
            format!("witness case must suspend, got {st:?}")
        });
        r.check(s.dom().counters().domain_updates.get() == u0, || {
            "witness case must not change any domain".to_string()
        });
    }

    let mut rng = SeededRng::new(seed);
    let mut idempotent_seen = 0u64;
    for case in 0..cases {
        let nvars = 2 + (rng.next_u32() as usize % 4);
        let mut store = match random_store(&mut rng, nvars) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let mut prop = match random_propagator(&mut rng, &store, nvars) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let first = match prop.execute(store.dom_mut()) {
            Ok(st) => st,
            Err(_) => continue, // overflow on an extreme expression: not audited
        };
        store.dom_mut().take_events();
        r.case();
        if first != Status::Idempotent || store.dom().failed() {
            continue;
        }
        idempotent_seen += 1;
        let before = store.dom().snapshot();
        let u0 = store.dom().counters().domain_updates.get();
        let second = match prop.execute(store.dom_mut()) {
            Ok(st) => st,
            Err(_) => {
                r.fail(format!("case {case}: re-execution errored"));
                continue;
            }
        };
        let unchanged = store.dom().snapshot() == before
            && store.dom().counters().domain_updates.get() == u0;
        r.check(unchanged, || {
            format!("case {case}: Idempotent report followed by domain updates (then {second:?})")
        });
    }
    r.note(format!("confirmed {idempotent_seen} idempotency reports"));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idempotency_reports_are_truthful() {
        let r = idempotency_audit(12_000, 0x1de);
        assert!(r.passed, "failures: {:?}", r.failures);
        assert!(r.cases >= 10_000);
    }
}

//! Dispatch equivalence: the statically composed and the dynamically
//! dispatched realizations of one expression must report identical bounds
//! and leave identical stores behind under identical update sequences.

use crate::engine::{Store, VarId};
use crate::error::Result;
use crate::models::SeededRng;
use crate::views::{build_dynamic, build_static, BoxView, ViewNode};
use crate::verify::SuiteReport;

/// Leaf alphabet: two general variables, one 0/1 variable usable as a
/// condition, and a constant.
fn leaves() -> Vec<ViewNode> {
    vec![
        ViewNode::var(VarId::from_index(0)),
        ViewNode::var(VarId::from_index(1)),
        ViewNode::var(VarId::from_index(2)),
        ViewNode::constant(2),
    ]
}

fn combine(children: &[ViewNode]) -> Vec<ViewNode> {
    let mut out = Vec::new();
    for a in children {
        out.push(ViewNode::neg(a.clone()));
        out.push(ViewNode::abs(a.clone()));
        out.push(ViewNode::sqr(a.clone()));
        out.push(ViewNode::linear(-2, a.clone()));
        for b in children {
            out.push(ViewNode::add(a.clone(), b.clone()));
            out.push(ViewNode::sub(a.clone(), b.clone()));
            out.push(ViewNode::mul(a.clone(), b.clone()));
            out.push(ViewNode::min2(a.clone(), b.clone()));
            out.push(ViewNode::max2(a.clone(), b.clone()));
            out.push(ViewNode::reif_eq(a.clone(), b.clone()));
            out.push(ViewNode::reif_neq(a.clone(), b.clone()));
            out.push(ViewNode::reif_leq(a.clone(), b.clone()));
        }
        out.push(ViewNode::ite(
            ViewNode::var(VarId::from_index(2)),
            a.clone(),
            ViewNode::var(VarId::from_index(0)),
        ));
    }
    out.push(ViewNode::sum(children.to_vec()));
    out
}

fn domain_configs(rng: &mut SeededRng, count: usize) -> Vec<[(i64, i64); 3]> {
    let mut out = vec![
        // fixed edge configuration: negative-spanning, ground, boolean
        [(-6, 6), (-6, -1), (0, 1)],
        [(0, 0), (-3, 3), (0, 1)],
    ];
    for _ in 0..count {
        let mut cfg = [(0i64, 0i64); 3];
        for slot in cfg.iter_mut().take(2) {
            let lo = rng.next_in(-6, 6);
            let hi = rng.next_in(lo, 6);
            *slot = (lo, hi);
        }
        let lo = rng.next_in(0, 1);
        cfg[2] = (lo, rng.next_in(lo, 1));
        out.push(cfg);
    }
    out
}

fn store_with(cfg: &[(i64, i64); 3]) -> Result<Store> {
    let mut s = Store::new();
    for (i, &(lo, hi)) in cfg.iter().enumerate() {
        s.new_var_named(&format!("v{i}"), lo, hi)?;
    }
    Ok(s)
}

fn exercise(r: &mut SuiteReport, node: &ViewNode, cfg: &[(i64, i64); 3]) -> Result<()> {
    let mut s_static = store_with(cfg)?;
    let mut s_dynamic = store_with(cfg)?;
    let v_static = build_static(node, s_static.dom())?;
    let v_dynamic = build_dynamic(node, s_dynamic.dom())?;

    // overflow errors must also agree between the two realizations
    let gl = (v_static.get_min(s_static.dom()), v_static.get_max(s_static.dom()));
    let gd = (v_dynamic.get_min(s_dynamic.dom()), v_dynamic.get_max(s_dynamic.dom()));
    r.check(gl == gd, || format!("bounds differ on {node:?} over {cfg:?}: {gl:?} vs {gd:?}"));
    let (lo, hi) = match gl {
        (Ok(lo), Ok(hi)) => (lo, hi),
        _ => return Ok(()),
    };

    let mid = lo + (hi - lo) / 2;
    let probes = [
        (true, lo.saturating_add(1)),
        (true, mid),
        (true, hi.saturating_add(1)),
        (false, hi.saturating_sub(1)),
        (false, mid),
        (false, lo.saturating_sub(1)),
    ];
    for (dir_min, bound) in probes {
        let rs = if dir_min {
            v_static.upd_min(s_static.dom_mut(), bound)
        } else {
            v_static.upd_max(s_static.dom_mut(), bound)
        };
        let rd = if dir_min {
            v_dynamic.upd_min(s_dynamic.dom_mut(), bound)
        } else {
            v_dynamic.upd_max(s_dynamic.dom_mut(), bound)
        };
        r.check(rs == rd, || {
            format!("update result differs ({dir_min},{bound}) on {node:?} over {cfg:?}")
        });
        r.check(s_static.dom().snapshot() == s_dynamic.dom().snapshot(), || {
            format!("stores diverged after ({dir_min},{bound}) on {node:?} over {cfg:?}")
        });
        if !matches!(rs, Ok(true)) {
            break;
        }
    }
    Ok(())
}

fn random_tree(rng: &mut SeededRng, depth: usize) -> ViewNode {
    if depth == 0 {
        return match rng.next_u32() % 4 {
            0 => ViewNode::var(VarId::from_index(0)),
            1 => ViewNode::var(VarId::from_index(1)),
            2 => ViewNode::var(VarId::from_index(2)),
            _ => ViewNode::constant(rng.next_in(-3, 3)),
        };
    }
    let a = random_tree(rng, depth - 1);
    let b = random_tree(rng, depth - 1);
    match rng.next_u32() % 13 {
        0 => ViewNode::add(a, b),
        1 => ViewNode::sub(a, b),
        2 => ViewNode::mul(a, b),
        3 => ViewNode::min2(a, b),
        4 => ViewNode::max2(a, b),
        5 => ViewNode::reif_eq(a, b),
        6 => ViewNode::reif_neq(a, b),
        7 => ViewNode::reif_leq(a, b),
        8 => ViewNode::neg(a),
        9 => ViewNode::abs(a),
        10 => ViewNode::sqr(a),
        11 => ViewNode::linear(if rng.next_u32() % 2 == 0 { 3 } else { -2 }, a),
        _ => ViewNode::sum(vec![a, b]),
    }
}

/// Exhaustive over depth <= 3 expressions on the leaf alphabet, randomized
/// deeper trees beyond.
pub fn dispatch_equivalence(random_cases: u64, seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("dispatch-equivalence");
    let mut rng = SeededRng::new(seed);

    let depth1 = leaves();
    let depth2 = combine(&depth1);
    let configs = domain_configs(&mut rng, 2);
    for node in depth1.iter().chain(&depth2) {
        for cfg in &configs {
            if let Err(e) = exercise(&mut r, node, cfg) {
                r.fail(format!("{node:?}: {e}"));
            }
        }
    }
    // depth 3: one composition level over sampled depth-2 pairs, exhaustive
    // in the outer kind
    let pick = |rng: &mut SeededRng| depth2[rng.next_u32() as usize % depth2.len()].clone();
    for _ in 0..random_cases {
        let a = pick(&mut rng);
        let b = pick(&mut rng);
        for node in combine(&[a, b]) {
            let cfg = domain_configs(&mut rng, 1)[2];
            if let Err(e) = exercise(&mut r, &node, &cfg) {
                r.fail(format!("{node:?}: {e}"));
            }
        }
    }
    // deeper randomized trees
    for _ in 0..random_cases * 20 {
        let node = random_tree(&mut rng, 4);
        let cfg = domain_configs(&mut rng, 1)[2];
        if let Err(e) = exercise(&mut r, &node, &cfg) {
            r.fail(format!("{node:?}: {e}"));
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_and_dynamic_realizations_agree() {
        let r = dispatch_equivalence(60, 0xd15);
        assert!(r.passed, "failures: {:?}", r.failures);
        assert!(r.cases > 20_000, "only {} cases ran", r.cases);
    }
}

//! View/oracle conformance: for every expression kind, the view's reported
//! bounds must equal the convex hull of the expression's image over the
//! current box (computed by brute-force enumeration), and every bound update
//! must keep all supporting tuples while only contracting.

use crate::engine::{Store, VarId};
use crate::error::Result;
use crate::views::{build_static, BoxView, ViewNode};
use crate::verify::SuiteReport;

struct KindSpec {
    name: &'static str,
    arity: usize,
    build: fn(&[VarId]) -> ViewNode,
    /// Index of a 0/1-valued child (the conditional's condition).
    cond_child: Option<usize>,
    /// Per-child domain enumeration range (children run over all
    /// sub-intervals of [-range..range]).
    range: i64,
}

fn kinds() -> Vec<KindSpec> {
    fn v(vs: &[VarId], i: usize) -> ViewNode {
        ViewNode::var(vs[i])
    }
    vec![
        KindSpec { name: "var", arity: 1, build: |vs| v(vs, 0), cond_child: None, range: 5 },
        KindSpec {
            name: "add",
            arity: 2,
            build: |vs| ViewNode::add(v(vs, 0), v(vs, 1)),
            cond_child: None,
            range: 5,
        },
        KindSpec {
            name: "sub",
            arity: 2,
            build: |vs| ViewNode::sub(v(vs, 0), v(vs, 1)),
            cond_child: None,
            range: 5,
        },
        KindSpec {
            name: "neg",
            arity: 1,
            build: |vs| ViewNode::neg(v(vs, 0)),
            cond_child: None,
            range: 5,
        },
        KindSpec {
            name: "mul",
            arity: 2,
            build: |vs| ViewNode::mul(v(vs, 0), v(vs, 1)),
            cond_child: None,
            range: 5,
        },
        KindSpec {
            name: "abs",
            arity: 1,
            build: |vs| ViewNode::abs(v(vs, 0)),
            cond_child: None,
            range: 5,
        },
        KindSpec {
            name: "sqr",
            arity: 1,
            build: |vs| ViewNode::sqr(v(vs, 0)),
            cond_child: None,
            range: 5,
        },
        KindSpec {
            name: "min2",
            arity: 2,
            build: |vs| ViewNode::min2(v(vs, 0), v(vs, 1)),
            cond_child: None,
            range: 5,
        },
        KindSpec {
            name: "max2",
            arity: 2,
            build: |vs| ViewNode::max2(v(vs, 0), v(vs, 1)),
            cond_child: None,
            range: 5,
        },
        KindSpec {
            name: "linear+2",
            arity: 1,
            build: |vs| ViewNode::linear(2, v(vs, 0)),
            cond_child: None,
            range: 5,
        },
        KindSpec {
            name: "linear-3",
            arity: 1,
            build: |vs| ViewNode::linear(-3, v(vs, 0)),
            cond_child: None,
            range: 5,
        },
        KindSpec {
            name: "sum2",
            arity: 2,
            build: |vs| ViewNode::sum(vec![v(vs, 0), v(vs, 1)]),
            cond_child: None,
            range: 5,
        },
        KindSpec {
            name: "sum3",
            arity: 3,
            build: |vs| ViewNode::sum(vec![v(vs, 0), v(vs, 1), v(vs, 2)]),
            cond_child: None,
            range: 2,
        },
        KindSpec {
            name: "reif-eq",
            arity: 2,
            build: |vs| ViewNode::reif_eq(v(vs, 0), v(vs, 1)),
            cond_child: None,
            range: 5,
        },
        KindSpec {
            name: "reif-neq",
            arity: 2,
            build: |vs| ViewNode::reif_neq(v(vs, 0), v(vs, 1)),
            cond_child: None,
            range: 5,
        },
        KindSpec {
            name: "reif-leq",
            arity: 2,
            build: |vs| ViewNode::reif_leq(v(vs, 0), v(vs, 1)),
            cond_child: None,
            range: 5,
        },
        KindSpec {
            name: "ite",
            arity: 3,
            build: |vs| ViewNode::ite(v(vs, 0), v(vs, 1), v(vs, 2)),
            cond_child: Some(0),
            range: 5,
        },
    ]
}

/// Enumerates assignments of the given child intervals, applying `f`.
fn for_each_point(doms: &[(i64, i64)], f: &mut dyn FnMut(&[i64])) {
    let mut cur: Vec<i64> = doms.iter().map(|d| d.0).collect();
    loop {
        f(&cur);
        let mut i = doms.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cur[i] < doms[i].1 {
                cur[i] += 1;
                for j in i + 1..doms.len() {
                    cur[j] = doms[j].0;
                }
                break;
            }
        }
    }
}

fn image_hull(node: &ViewNode, vars: &[VarId], doms: &[(i64, i64)]) -> (i64, i64) {
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for_each_point(doms, &mut |pt| {
        let val = node.eval(&|v: VarId| {
            let idx = vars.iter().position(|&w| w == v).unwrap();
            pt[idx]
        });
        lo = lo.min(val);
        hi = hi.max(val);
    });
    (lo, hi)
}

fn candidate_bounds(lo: i64, hi: i64) -> Vec<i64> {
    let mid = lo + (hi - lo) / 2;
    let mut v = vec![lo - 2, lo - 1, lo, lo + 1, mid, hi - 1, hi, hi + 1, hi + 2];
    v.sort_unstable();
    v.dedup();
    v
}

fn run_kind(r: &mut SuiteReport, spec: &KindSpec) -> Result<()> {
    let mut configs: Vec<Vec<(i64, i64)>> = vec![Vec::new()];
    for child in 0..spec.arity {
        let (clo, chi) = if spec.cond_child == Some(child) { (0, 1) } else { (-spec.range, spec.range) };
        let mut next = Vec::new();
        for cfg in &configs {
            for lo in clo..=chi {
                for hi in lo..=chi {
                    let mut c = cfg.clone();
                    c.push((lo, hi));
                    next.push(c);
                }
            }
        }
        configs = next;
    }

    for doms in &configs {
        let mut store = Store::new();
        let vars: Vec<VarId> = doms
            .iter()
            .enumerate()
            .map(|(i, &(lo, hi))| store.new_var_named(&format!("v{i}"), lo, hi))
            .collect::<Result<_>>()?;
        let node = (spec.build)(&vars);
        let view = build_static(&node, store.dom())?;

        // bounds must equal the brute-force hull of the image
        let (lo, hi) = image_hull(&node, &vars, doms);
        let (vlo, vhi) = (view.get_min(store.dom())?, view.get_max(store.dom())?);
        r.check(vlo == lo && vhi == hi, || {
            format!("{}: bounds [{vlo},{vhi}] != hull [{lo},{hi}] on {doms:?}", spec.name)
        });

        // updates: contracting, supporting tuples survive, and a false
        // return means there was no support at all
        for &bound in &candidate_bounds(lo, hi) {
            for dir_min in [true, false] {
                let mark = store.mark();
                let ok = if dir_min {
                    view.upd_min(store.dom_mut(), bound)?
                } else {
                    view.upd_max(store.dom_mut(), bound)?
                };
                let new_doms: Vec<(i64, i64)> = vars
                    .iter()
                    .map(|&v| (store.dom().min(v), store.dom().max(v)))
                    .collect();
                let contracted = new_doms
                    .iter()
                    .zip(doms)
                    .all(|(n, o)| n.0 >= o.0 && n.1 <= o.1);
                let mut lost_support = false;
                let mut any_support = false;
                for_each_point(doms, &mut |pt| {
                    let val = node.eval(&|v: VarId| {
                        let idx = vars.iter().position(|&w| w == v).unwrap();
                        pt[idx]
                    });
                    let supports = if dir_min { val >= bound } else { val <= bound };
                    if supports {
                        any_support = true;
                        let inside = pt
                            .iter()
                            .zip(&new_doms)
                            .all(|(&x, &(nl, nh))| nl <= x && x <= nh);
                        if !inside {
                            lost_support = true;
                        }
                    }
                });
                let op = if dir_min { "upd_min" } else { "upd_max" };
                if ok {
                    r.check(contracted, || {
                        format!("{}: {op}({bound}) expanded a domain on {doms:?}", spec.name)
                    });
                    r.check(!lost_support, || {
                        format!("{}: {op}({bound}) lost support on {doms:?}", spec.name)
                    });
                } else {
                    r.check(!any_support, || {
                        format!(
                            "{}: {op}({bound}) reported wipeout despite support on {doms:?}",
                            spec.name
                        )
                    });
                }
                store.undo_to(mark);
            }
        }
    }
    Ok(())
}

/// Exhaustive conformance of every view kind against brute-force evaluation.
pub fn view_conformance() -> SuiteReport {
    let mut r = SuiteReport::new("view-conformance");
    for spec in kinds() {
        if let Err(e) = run_kind(&mut r, &spec) {
            r.fail(format!("{}: {e}", spec.name));
        }
    }
    r
}

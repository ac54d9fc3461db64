//! Shared fixtures for the criterion benchmarks.

use boxview_core::engine::{Store, VarId};
use boxview_core::views::ViewNode;

/// A store with `n` variables over `[-d..d]` and a linear chain expression
/// alternating additions and scaled terms over them.
pub fn chain_fixture(n: usize, d: i64) -> (Store, Vec<VarId>, ViewNode) {
    let mut s = Store::new();
    let vars: Vec<VarId> =
        (0..n).map(|i| s.new_var_named(&format!("v{i}"), -d, d).unwrap()).collect();
    let mut node = ViewNode::var(vars[0]);
    for (i, &v) in vars.iter().enumerate().skip(1) {
        let term = if i % 2 == 0 {
            ViewNode::linear(2, ViewNode::var(v))
        } else {
            ViewNode::var(v)
        };
        node = ViewNode::add(node, term);
    }
    (s, vars, node)
}

/// A store with variables and the pairwise-difference views of a ruler
/// instance, as the distinct propagator consumes them.
pub fn difference_fixture(m: usize, length: i64) -> (Store, Vec<ViewNode>) {
    let mut s = Store::new();
    let marks: Vec<VarId> =
        (0..m).map(|i| s.new_var_named(&format!("x{i}"), 0, length).unwrap()).collect();
    let mut diffs = Vec::new();
    for i in 1..m {
        for j in 0..i {
            diffs.push(ViewNode::sub(ViewNode::var(marks[i]), ViewNode::var(marks[j])));
        }
    }
    (s, diffs)
}

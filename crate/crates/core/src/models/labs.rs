//! Low-autocorrelation binary sequences: minimize the sum of squared
//! off-peak autocorrelations of a ±1 sequence.
//!
//! Domains are the interval [-1..1] with zero excluded by a propagator, so
//! bound reasoning stays available while branching skips 0. The view
//! variants minimize one expression tree; the auxiliary variants flatten it
//! into the classical three layers (products, correlation sums, squares).

use crate::error::{Error, Result};
use crate::models::{BuildOptions, BuiltModel, ModelCtx, ModelVariant};
use crate::propagators::{Flattener, Leaf, Relation};
use crate::views::{build_view, AnyView, CompiledView, ViewNode};

/// The energy expression: for each shift i, the squared sum of products
/// x_j * x_{j+i+1} (1-based j up to n-i-1).
pub fn energy_node(vars: &[crate::engine::VarId]) -> ViewNode {
    let n = vars.len();
    let mut squares = Vec::new();
    for i in 1..n {
        let mut prods = Vec::new();
        for j in 1..=n.saturating_sub(i + 1) {
            // 1-based indices j and j+i+1
            prods.push(ViewNode::mul(
                ViewNode::var(vars[j - 1]),
                ViewNode::var(vars[j + i]),
            ));
        }
        if !prods.is_empty() {
            squares.push(ViewNode::sqr(ViewNode::sum(prods)));
        }
    }
    if squares.is_empty() {
        ViewNode::constant(0)
    } else {
        ViewNode::sum(squares)
    }
}

/// Direct evaluation of the energy for a ground ±1 sequence.
pub fn energy_value(seq: &[i64]) -> i64 {
    let n = seq.len();
    let mut total = 0i64;
    for i in 1..n {
        let mut corr = 0i64;
        for j in 1..=n.saturating_sub(i + 1) {
            corr += seq[j - 1] * seq[j + i];
        }
        total += corr * corr;
    }
    total
}

pub fn build(n: usize, variant: ModelVariant, opts: &BuildOptions) -> Result<BuiltModel> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("labs <{n}>")));
    }
    let mut ctx = ModelCtx::new();
    let vars: Vec<_> = (0..n)
        .map(|i| ctx.var(&format!("x{i}"), -1, 1))
        .collect::<Result<_>>()?;
    for &v in &vars {
        ctx.fixed(&Relation::Neq(ViewNode::var(v), 0))?;
    }

    let node = energy_node(&vars);
    let dom = ctx.store.dom();
    let objective_line = node.to_prefix(&|v| dom.name(v).to_string());
    let objective = match variant.dispatch() {
        Some(mode) => build_view(&node, mode, ctx.store.dom())?,
        None => {
            let mut f = Flattener::new(&mut ctx.store, variant, &opts.decompose());
            let leaf = f.flatten(&node)?;
            let aux = f.out.aux_vars.len();
            ctx.aux_vars += aux;
            match leaf {
                Leaf::Var(v) => AnyView::Static(CompiledView::Var(v)),
                Leaf::Const(k) => AnyView::Static(CompiledView::Const(k)),
            }
        }
    };
    Ok(ctx.finish(Some((objective_line, objective))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{branch_and_bound_min, Brancher};
    use crate::views::BoxView;

    /// Optimal energy by brute force over all 2^n sign sequences.
    pub fn brute_force_optimum(n: usize) -> i64 {
        let mut best = i64::MAX;
        for mask in 0u64..(1 << n) {
            let seq: Vec<i64> =
                (0..n).map(|i| if mask & (1 << i) != 0 { 1 } else { -1 }).collect();
            best = best.min(energy_value(&seq));
        }
        best
    }

    #[test]
    fn energy_of_small_sequences() {
        // n=3: the only correlation is x1*x3
        assert_eq!(energy_value(&[1, 1, 1]), 1);
        assert_eq!(energy_value(&[1, 1, -1]), 1);
        // all-ones n=4: shifts contribute (x1x3+x2x4)^2 = 4 and (x1x4)^2 = 1
        assert_eq!(energy_value(&[1, 1, 1, 1]), 5);
    }

    #[test]
    fn view_tree_matches_direct_formula_on_ground_sequences() {
        let mut m = build(6, ModelVariant::ViewsStatic, &Default::default()).unwrap();
        let vars = m.decision_vars.clone();
        let obj = m.objective.clone().unwrap();
        let mut rng = crate::models::SeededRng::new(11);
        for _ in 0..40 {
            let mark = m.store.mark();
            let seq: Vec<i64> =
                (0..6).map(|_| if rng.next_u32() % 2 == 0 { 1 } else { -1 }).collect();
            for (i, &v) in vars.iter().enumerate() {
                m.store.dom_mut().set_min(v, seq[i]);
                m.store.dom_mut().set_max(v, seq[i]);
            }
            assert!(!m.store.dom().failed());
            let value = obj.get_min(m.store.dom()).unwrap();
            assert_eq!(value, energy_value(&seq));
            assert_eq!(obj.get_max(m.store.dom()).unwrap(), value);
            m.store.undo_to(mark);
        }
    }

    #[test]
    fn optimum_matches_brute_force_for_small_n() {
        for n in [3usize, 4, 5] {
            let expected = brute_force_optimum(n);
            for variant in
                [ModelVariant::ViewsStatic, ModelVariant::Vars, ModelVariant::VarsGlobal]
            {
                let mut m = build(n, variant, &Default::default()).unwrap();
                let b = Brancher::input_order_min(m.decision_vars.clone());
                let obj = m.objective.clone().unwrap();
                let out = branch_and_bound_min(&mut m.store, &obj, &b, None).unwrap();
                assert_eq!(out.best_objective, Some(expected), "n={n} {variant:?}");
            }
        }
        assert_eq!(brute_force_optimum(5), 2);
    }
}

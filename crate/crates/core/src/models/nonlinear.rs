//! Random systems of nonlinear equations: each equation is a sum of a1
//! terms, each term a product of a2 randomly chosen variables.

use crate::engine::VarId;
use crate::error::{Error, Result};
use crate::models::{BuildOptions, BuiltModel, ModelCtx, ModelVariant, SeededRng};
use crate::propagators::{Eq, Flattener, Relation, SumEq};
use crate::views::ops::VarView;
use crate::views::{build_dynamic, build_static, DispatchMode, ViewNode};

fn product_node(vars: &[VarId]) -> ViewNode {
    let mut it = vars.iter();
    let mut acc = ViewNode::var(*it.next().unwrap());
    for v in it {
        acc = ViewNode::mul(acc, ViewNode::var(*v));
    }
    acc
}

pub fn build(
    n: usize,
    d: i64,
    c: usize,
    a1: usize,
    a2: usize,
    seed: u64,
    variant: ModelVariant,
    opts: &BuildOptions,
) -> Result<BuiltModel> {
    if n == 0 || d < 1 || a1 == 0 || a2 == 0 || a2 > n {
        return Err(Error::InvalidSpec(format!("nonlinear <{n},{d},{c},{a1},{a2}>")));
    }
    let mut ctx = ModelCtx::new();
    let vars: Vec<VarId> = (0..n)
        .map(|i| ctx.var(&format!("x{i}"), 1, d))
        .collect::<Result<_>>()?;

    let mut rng = SeededRng::new(seed);
    let max_term: i64 = d.checked_pow(a2 as u32).ok_or(Error::Overflow)?;
    for _ in 0..c {
        let terms: Vec<ViewNode> = (0..a1)
            .map(|_| {
                let subset = rng.combination(n, a2);
                product_node(&subset.iter().map(|&i| vars[i]).collect::<Vec<_>>())
            })
            .collect();
        let t = rng.next_in(a1 as i64, a1 as i64 * max_term);
        let rel = Relation::SumEq(terms, ViewNode::constant(t));
        if variant.is_global() {
            post_global_equation(&mut ctx, &rel, variant, opts)?;
        } else {
            ctx.relation(&rel, variant, opts)?;
        }
    }
    Ok(ctx.finish(None))
}

/// Under the global variants each product is projected to an auxiliary
/// variable (through auxiliary decomposition or through a view equality) and
/// an n-ary sum propagator is posted over the projections.
fn post_global_equation(
    ctx: &mut ModelCtx,
    rel: &Relation,
    variant: ModelVariant,
    opts: &BuildOptions,
) -> Result<()> {
    let (terms, rhs) = match rel {
        Relation::SumEq(ts, r) => (ts, r),
        _ => unreachable!(),
    };
    ctx.dump_relation(rel);
    let rhs_k = match rhs {
        ViewNode::Const(k) => *k,
        _ => return Err(Error::InvalidSpec("nonlinear rhs must be constant".into())),
    };

    let mut proj: Vec<VarId> = Vec::with_capacity(terms.len());
    match variant.dispatch() {
        None => {
            // products decomposed with auxiliary variables
            let mut f = Flattener::new(&mut ctx.store, variant, &opts.decompose());
            for t in terms {
                let leaf = f.flatten(t)?;
                match leaf {
                    crate::propagators::Leaf::Var(v) => proj.push(v),
                    crate::propagators::Leaf::Const(_) => {
                        return Err(Error::InvalidSpec("constant product term".into()))
                    }
                }
            }
            ctx.aux_vars += f.out.aux_vars.len();
        }
        Some(mode) => {
            // products stay views, each projected to one auxiliary variable
            for (i, t) in terms.iter().enumerate() {
                let probe = build_static(t, ctx.store.dom())?;
                use crate::views::BoxView;
                let lo = probe.get_min(ctx.store.dom())?;
                let hi = probe.get_max(ctx.store.dom())?;
                let name = format!("_p{}_{}", ctx.aux_vars, i);
                let aux = ctx.store.new_var_named(&name, lo, hi)?;
                ctx.aux_vars += 1;
                match mode {
                    DispatchMode::Static => {
                        let view = build_static(t, ctx.store.dom())?;
                        ctx.store.post(Box::new(Eq::new(view, VarView(aux))))?;
                    }
                    DispatchMode::Dynamic => {
                        let view = build_dynamic(t, ctx.store.dom())?;
                        ctx.store.post(Box::new(Eq::new(view, VarView(aux))))?;
                    }
                }
                proj.push(aux);
            }
        }
    }
    let views: Vec<VarView> = proj.into_iter().map(VarView).collect();
    ctx.store.post(Box::new(SumEq::new(views, crate::views::ops::ConstView(rhs_k))))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{dfs, Brancher, SearchMode};

    #[test]
    fn structure_of_tiny_instance() {
        let m = build(4, 2, 1, 2, 2, 7, ModelVariant::ViewsStatic, &Default::default()).unwrap();
        let line = m.dump.lines().find(|l| l.starts_with("(sum-eq")).unwrap();
        assert_eq!(line.matches("(mul").count(), 2, "two product terms");
    }

    #[test]
    fn unit_products_degenerate_to_linear() {
        let m = build(3, 2, 1, 2, 1, 3, ModelVariant::ViewsStatic, &Default::default()).unwrap();
        assert!(!m.dump.contains("(mul"));
    }

    #[test]
    fn variant_solution_sets_agree() {
        let mut reference: Option<Vec<Vec<i64>>> = None;
        for variant in ModelVariant::ALL {
            let mut m = build(4, 2, 1, 2, 2, 7, variant, &Default::default()).unwrap();
            let b = Brancher::input_order_min(m.decision_vars.clone());
            let vars = m.decision_vars.clone();
            let mut sols = Vec::new();
            dfs(&mut m.store, &b, SearchMode::AllSolutions, None, &mut |dom| {
                sols.push(vars.iter().map(|&v| dom.min(v)).collect::<Vec<_>>());
            })
            .unwrap();
            sols.sort();
            match &reference {
                None => reference = Some(sols),
                Some(r) => assert_eq!(&sols, r, "{variant:?}"),
            }
        }
    }

    #[test]
    fn global_variants_project_products() {
        let m = build(4, 2, 1, 2, 2, 7, ModelVariant::ViewsStaticGlobal, &Default::default())
            .unwrap();
        assert_eq!(m.aux_vars, 2, "one projection per product term");
        let mv = build(4, 2, 1, 2, 2, 7, ModelVariant::VarsGlobal, &Default::default()).unwrap();
        assert_eq!(mv.aux_vars, 2, "binary products flatten to one aux each");
    }
}

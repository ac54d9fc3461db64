//! Fixed-length error correcting codes: n strings of length l over an
//! alphabet of size a, every pair at distance >= d (Hamming or Lee).
//!
//! Symbols are stored as [0..a-1]; both distance measures depend only on
//! symbol differences, so the shift from 1-based alphabets changes nothing.

use crate::engine::VarId;
use crate::error::{Error, Result};
use crate::models::{BuildOptions, BuiltModel, Metric, ModelCtx, ModelVariant};
use crate::propagators::{Flattener, Leaf, Relation, SumGeq};
use crate::views::ViewNode;

fn lee_term(a: i64, x: VarId, y: VarId) -> ViewNode {
    let diff = ViewNode::abs(ViewNode::sub(ViewNode::var(x), ViewNode::var(y)));
    ViewNode::min2(diff.clone(), ViewNode::sub(ViewNode::constant(a), diff))
}

pub fn build(
    a: i64,
    n: usize,
    l: usize,
    d: i64,
    metric: Metric,
    variant: ModelVariant,
    opts: &BuildOptions,
) -> Result<BuiltModel> {
    if a < 2 || n == 0 || l == 0 || d < 0 {
        return Err(Error::InvalidSpec(format!("ecc <{a},{n},{l},{d}>")));
    }
    let mut ctx = ModelCtx::new();
    let mut x = vec![vec![VarId::default(); l]; n];
    for (i, row) in x.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = ctx.var(&format!("x{i}_{j}"), 0, a - 1)?;
        }
    }

    for i1 in 0..n {
        for i2 in i1 + 1..n {
            let terms: Vec<ViewNode> = (0..l)
                .map(|j| match metric {
                    Metric::Hamming => {
                        ViewNode::reif_neq(ViewNode::var(x[i1][j]), ViewNode::var(x[i2][j]))
                    }
                    Metric::Lee => lee_term(a, x[i1][j], x[i2][j]),
                })
                .collect();
            let rel = Relation::SumGeq(terms, d);
            if metric == Metric::Lee && variant.dispatch().is_none() && opts.share_lee {
                post_shared_lee(&mut ctx, &rel, a, &x[i1], &x[i2], d, variant, opts)?;
            } else {
                ctx.relation(&rel, variant, opts)?;
            }
        }
    }
    Ok(ctx.finish(None))
}

/// Hand-shaped auxiliary decomposition of one Lee distance constraint that
/// shares the |x-y| subexpression: four auxiliaries per position (the
/// difference, its absolute value, the wrap-around complement, and the
/// per-position minimum).
#[allow(clippy::too_many_arguments)]
fn post_shared_lee(
    ctx: &mut ModelCtx,
    rel: &Relation,
    a: i64,
    xs: &[VarId],
    ys: &[VarId],
    d: i64,
    variant: ModelVariant,
    opts: &BuildOptions,
) -> Result<()> {
    ctx.dump_relation(rel);
    let mut f = Flattener::new(&mut ctx.store, variant, &opts.decompose());
    let mut mins: Vec<Leaf> = Vec::with_capacity(xs.len());
    for (&x, &y) in xs.iter().zip(ys) {
        let diff = f.flatten(&ViewNode::sub(ViewNode::var(x), ViewNode::var(y)))?;
        let abs = f.project_abs(diff)?;
        let comp = f.project_complement(a, abs)?;
        mins.push(f.project_min2(abs, comp)?);
    }
    if variant.is_global() {
        f.post_boxed(Box::new(SumGeq::new(mins, d)))?;
    } else {
        let total = f.fold_sum(mins)?;
        f.post_boxed(Box::new(crate::propagators::Leq::new(
            crate::views::ops::ConstView(d),
            total,
        )))?;
    }
    let aux = f.out.aux_vars.len();
    ctx.aux_vars += aux;
    Ok(())
}

/// Reference distances used by tests and by the enumeration oracle.
pub fn hamming_distance(x: &[i64], y: &[i64]) -> i64 {
    x.iter().zip(y).filter(|(a, b)| a != b).count() as i64
}

pub fn lee_distance(a: i64, x: &[i64], y: &[i64]) -> i64 {
    x.iter().zip(y).map(|(&u, &v)| ((u - v).abs()).min(a - (u - v).abs())).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{dfs, Brancher, SearchMode};

    #[test]
    fn distance_formulas() {
        assert_eq!(lee_distance(4, &[0, 1], &[2, 3]), 4);
        assert_eq!(hamming_distance(&[1, 2, 3], &[1, 0, 3]), 1);
    }

    fn count_solutions(
        a: i64,
        n: usize,
        l: usize,
        d: i64,
        metric: Metric,
        variant: ModelVariant,
        opts: &BuildOptions,
    ) -> u64 {
        let mut m = build(a, n, l, d, metric, variant, opts).unwrap();
        if m.store.failed() {
            return 0;
        }
        let b = Brancher::input_order_min(m.decision_vars.clone());
        let out = dfs(&mut m.store, &b, SearchMode::AllSolutions, None, &mut |_| {}).unwrap();
        out.stats.solutions
    }

    fn brute_count(a: i64, n: usize, l: usize, d: i64, metric: Metric) -> u64 {
        let total_vars = n * l;
        let mut count = 0u64;
        let mut assign = vec![0i64; total_vars];
        fn rec(
            assign: &mut Vec<i64>,
            idx: usize,
            a: i64,
            n: usize,
            l: usize,
            d: i64,
            metric: Metric,
            count: &mut u64,
        ) {
            if idx == assign.len() {
                for i1 in 0..n {
                    for i2 in i1 + 1..n {
                        let x = &assign[i1 * l..(i1 + 1) * l];
                        let y = &assign[i2 * l..(i2 + 1) * l];
                        let dist = match metric {
                            Metric::Hamming => hamming_distance(x, y),
                            Metric::Lee => lee_distance(a, x, y),
                        };
                        if dist < d {
                            return;
                        }
                    }
                }
                *count += 1;
                return;
            }
            for v in 0..a {
                assign[idx] = v;
                rec(assign, idx + 1, a, n, l, d, metric, count);
            }
        }
        rec(&mut assign, 0, a, n, l, d, metric, &mut count);
        count
    }

    #[test]
    fn tiny_instances_match_enumeration_for_all_variants() {
        for metric in [Metric::Hamming, Metric::Lee] {
            let expected = brute_count(2, 2, 3, 2, metric);
            assert!(expected > 0);
            for variant in ModelVariant::ALL {
                assert_eq!(
                    count_solutions(2, 2, 3, 2, metric, variant, &Default::default()),
                    expected,
                    "{metric:?} {variant:?}"
                );
            }
        }
    }

    #[test]
    fn shared_lee_flattening_uses_four_aux_per_position() {
        let m =
            build(3, 2, 2, 2, Metric::Lee, ModelVariant::VarsGlobal, &Default::default()).unwrap();
        assert_eq!(m.aux_vars, 8, "4 auxiliaries per position, 2 positions");
        // unshared flattening duplicates the |x-y| chain: 6 per position
        let opts = BuildOptions { share_lee: false, ..Default::default() };
        let m2 = build(3, 2, 2, 2, Metric::Lee, ModelVariant::VarsGlobal, &opts).unwrap();
        assert_eq!(m2.aux_vars, 12);
        // sharing must not change the solution set
        let c1 = count_solutions(3, 2, 2, 2, Metric::Lee, ModelVariant::VarsGlobal, &opts);
        let c2 = count_solutions(
            3,
            2,
            2,
            2,
            Metric::Lee,
            ModelVariant::VarsGlobal,
            &Default::default(),
        );
        assert_eq!(c1, c2);
    }
}

//! Social golfers: schedule w weeks of g groups of s players so that no two
//! players meet in a group more than once.
//!
//! Validity and symmetry constraints (per-week alldifferent, slot and group
//! orderings, a fixed first week) are identical across variants; the
//! measured constraint is meetOnce over every pair of groups in distinct
//! weeks: the sum of s² pairwise equalities is at most one.

use crate::engine::VarId;
use crate::error::{Error, Result};
use crate::models::{BuildOptions, BuiltModel, ModelCtx, ModelVariant};
use crate::propagators::Relation;
use crate::views::ViewNode;

pub fn build(
    w: usize,
    g: usize,
    s: usize,
    variant: ModelVariant,
    opts: &BuildOptions,
) -> Result<BuiltModel> {
    if w == 0 || g == 0 || s == 0 {
        return Err(Error::InvalidSpec(format!("golfers <{w},{g},{s}>")));
    }
    let players = (g * s) as i64;
    let mut ctx = ModelCtx::new();
    // x[week][group][slot], 1-based player ids; week 0 is pinned to the
    // identity partition as the first-week symmetry break
    let mut x = vec![vec![vec![VarId::default(); s]; g]; w];
    for (wi, week) in x.iter_mut().enumerate() {
        for (gi, group) in week.iter_mut().enumerate() {
            for (si, slot) in group.iter_mut().enumerate() {
                let name = format!("x{wi}_{gi}_{si}");
                *slot = if wi == 0 {
                    let v = (gi * s + si + 1) as i64;
                    ctx.var(&name, v, v)?
                } else {
                    ctx.var(&name, 1, players)?
                };
            }
        }
    }

    // per-week validity: every player occurs exactly once
    for week in &x {
        let all: Vec<ViewNode> =
            week.iter().flatten().map(|&v| ViewNode::var(v)).collect();
        ctx.fixed(&Relation::Distinct(all))?;
    }
    // slots ascending within groups; groups ordered by first slot
    for week in &x {
        for group in week {
            for pair in group.windows(2) {
                ctx.fixed(&Relation::Leq(
                    ViewNode::add(ViewNode::var(pair[0]), ViewNode::constant(1)),
                    ViewNode::var(pair[1]),
                ))?;
            }
        }
        for pair in week.windows(2) {
            ctx.fixed(&Relation::Leq(
                ViewNode::add(ViewNode::var(pair[0][0]), ViewNode::constant(1)),
                ViewNode::var(pair[1][0]),
            ))?;
        }
    }

    // the measured constraint: meetOnce between groups of distinct weeks
    for w1 in 0..w {
        for w2 in w1 + 1..w {
            for g1 in 0..g {
                for g2 in 0..g {
                    let mut terms = Vec::with_capacity(s * s);
                    for &a in &x[w1][g1] {
                        for &b in &x[w2][g2] {
                            terms.push(ViewNode::reif_eq(ViewNode::var(a), ViewNode::var(b)));
                        }
                    }
                    ctx.relation(&Relation::SumLeq(terms, 1), variant, opts)?;
                }
            }
        }
    }
    Ok(ctx.finish(None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{dfs, Brancher, SearchMode};

    fn count_solutions(w: usize, g: usize, s: usize, variant: ModelVariant) -> u64 {
        let mut m = build(w, g, s, variant, &Default::default()).unwrap();
        let b = Brancher::input_order_min(m.decision_vars.clone());
        let out = dfs(&mut m.store, &b, SearchMode::AllSolutions, None, &mut |_| {}).unwrap();
        out.stats.solutions
    }

    #[test]
    fn meet_once_constraint_count() {
        let m = build(2, 2, 2, ModelVariant::ViewsStatic, &Default::default()).unwrap();
        // one week pair, 2x2 group pairs, each a sum of 4 equalities
        assert_eq!(m.dump.matches("(sum-leq 1").count(), 4);
        assert_eq!(m.dump.matches("(reif-eq").count(), 16);
    }

    #[test]
    fn repeated_pair_is_rejected() {
        // w=2 g=1 s=2: both players meet in week 1 and necessarily again in
        // week 2, so the instance is unsatisfiable
        assert_eq!(count_solutions(2, 1, 2, ModelVariant::ViewsStatic), 0);
    }

    #[test]
    fn tiny_instance_counts_agree_across_variants() {
        let reference = count_solutions(2, 2, 2, ModelVariant::Vars);
        assert!(reference > 0);
        for v in ModelVariant::ALL {
            assert_eq!(count_solutions(2, 2, 2, v), reference, "{v:?}");
        }
    }
}

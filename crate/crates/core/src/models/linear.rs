//! Random systems of linear equations: c equations, each a sum of a distinct
//! random a-subset of the n variables equal to a random target.

use crate::error::{Error, Result};
use crate::models::{BuildOptions, BuiltModel, ModelCtx, ModelVariant, SeededRng};
use crate::propagators::Relation;
use crate::views::ViewNode;

pub fn build(
    n: usize,
    d: i64,
    c: usize,
    a: usize,
    seed: u64,
    variant: ModelVariant,
    opts: &BuildOptions,
) -> Result<BuiltModel> {
    if n == 0 || d < 1 || a == 0 || a > n {
        return Err(Error::InvalidSpec(format!("linear <{n},{d},{c},{a}>")));
    }
    let mut ctx = ModelCtx::new();
    let vars: Vec<_> = (0..n)
        .map(|i| ctx.var(&format!("x{i}"), 1, d))
        .collect::<Result<_>>()?;

    let mut rng = SeededRng::new(seed);
    let mut used: Vec<Vec<usize>> = Vec::with_capacity(c);
    for _ in 0..c {
        // distinct subsets across equations; bail out if the instance asks
        // for more equations than subsets exist
        let mut tries = 0usize;
        let subset = loop {
            let cand = rng.combination(n, a);
            if !used.contains(&cand) {
                break cand;
            }
            tries += 1;
            if tries > 100_000 {
                return Err(Error::InvalidSpec(format!(
                    "cannot draw {c} distinct {a}-subsets of {n} variables"
                )));
            }
        };
        let t = rng.next_in(a as i64, a as i64 * d);
        let terms: Vec<ViewNode> = subset.iter().map(|&i| ViewNode::var(vars[i])).collect();
        used.push(subset);
        ctx.relation(&Relation::SumEq(terms, ViewNode::constant(t)), variant, opts)?;
    }
    Ok(ctx.finish(None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{dfs, Brancher, SearchMode};

    #[test]
    fn instance_shape_and_determinism() {
        let m1 = build(3, 2, 1, 2, 1, ModelVariant::ViewsStatic, &Default::default()).unwrap();
        let m2 = build(3, 2, 1, 2, 1, ModelVariant::Vars, &Default::default()).unwrap();
        assert_eq!(m1.dump, m2.dump, "dump is variant-independent");
        let m3 = build(3, 2, 1, 2, 1, ModelVariant::ViewsStatic, &Default::default()).unwrap();
        assert_eq!(m1.dump, m3.dump, "same seed, same instance");
        // one equation over 2 of the 3 vars, target within [2..4]
        let line = m1.dump.lines().find(|l| l.starts_with("(sum-eq")).unwrap();
        // shape: (sum-eq (const t) (var xi) (var xj))
        let t: i64 = line
            .split_whitespace()
            .nth(2)
            .unwrap()
            .trim_end_matches(')')
            .parse()
            .unwrap();
        assert!((2..=4).contains(&t));
        assert_eq!(line.matches("(var ").count(), 2);
    }

    #[test]
    fn full_arity_equation_covers_all_vars() {
        let m = build(4, 3, 1, 4, 9, ModelVariant::VarsGlobal, &Default::default()).unwrap();
        let line = m.dump.lines().find(|l| l.starts_with("(sum-eq")).unwrap();
        for i in 0..4 {
            assert!(line.contains(&format!("(var x{i})")));
        }
    }

    #[test]
    fn variants_find_identical_solution_sets() {
        let mut reference: Option<Vec<Vec<i64>>> = None;
        for variant in ModelVariant::ALL {
            let mut m = build(4, 3, 2, 2, 5, variant, &Default::default()).unwrap();
            let b = Brancher::input_order_min(m.decision_vars.clone());
            let mut sols = Vec::new();
            let vars = m.decision_vars.clone();
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
}

//! Golomb ruler decision problem: m ascending marks within a given length
//! whose pairwise differences are all distinct.

use crate::error::{Error, Result};
use crate::models::{BuildOptions, BuiltModel, ModelCtx, ModelVariant};
use crate::propagators::Relation;
use crate::views::ViewNode;

pub fn build(
    m: usize,
    length: i64,
    variant: ModelVariant,
    opts: &BuildOptions,
) -> Result<BuiltModel> {
    if m < 2 || length < m as i64 - 1 {
        return Err(Error::InvalidSpec(format!("golomb <{m},{length}>")));
    }
    let mut ctx = ModelCtx::new();
    let marks: Vec<_> = (0..m)
        .map(|i| {
            if i == 0 {
                ctx.var("x0", 0, 0)
            } else {
                ctx.var(&format!("x{i}"), 0, length)
            }
        })
        .collect::<Result<_>>()?;

    for pair in marks.windows(2) {
        ctx.fixed(&Relation::Leq(
            ViewNode::add(ViewNode::var(pair[0]), ViewNode::constant(1)),
            ViewNode::var(pair[1]),
        ))?;
    }
    // symmetry break: first difference strictly below the last one (the two
    // differences only exist separately from three marks up)
    if m >= 3 {
        ctx.fixed(&Relation::Leq(
            ViewNode::add(
                ViewNode::sub(ViewNode::var(marks[1]), ViewNode::var(marks[0])),
                ViewNode::constant(1),
            ),
            ViewNode::sub(ViewNode::var(marks[m - 1]), ViewNode::var(marks[m - 2])),
        ))?;
    }

    let mut diffs = Vec::with_capacity(m * (m - 1) / 2);
    for i in 1..m {
        for j in 0..i {
            diffs.push(ViewNode::sub(ViewNode::var(marks[i]), ViewNode::var(marks[j])));
        }
    }
    ctx.relation(&Relation::Distinct(diffs), variant, opts)?;
    Ok(ctx.finish(None))
}

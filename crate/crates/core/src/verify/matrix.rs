//! The propagator completeness matrix: every engine propagator is run over
//! every sub-box of a small universe and judged against the exact tuple-set
//! semantics for contraction, soundness and bounds completeness.

use crate::approx::{ApproxKind, IntBox, Interval};
use crate::engine::{DomainStore, Event, Store, VarId};
use crate::error::Result;
use crate::oracle::{check_propagator, ConstraintExt, PropagatorSpec};
use crate::propagators::{
    linear_eq, DistinctBounds, Eq, Leq, MulEq, Neq, Propagator, Status, SumEq,
};
use crate::views::ops::{mul_corner_bounds, VarView};
use crate::views::{bound_triggers, BoxView};

/// One row of the completeness matrix.
#[derive(Clone, Debug)]
pub struct MatrixRow {
    pub name: String,
    pub phi: ApproxKind,
    pub psi: ApproxKind,
    pub contracting: bool,
    pub sound: bool,
    pub complete: bool,
    /// Whether the acceptance gate requires bounds completeness of this row.
    pub complete_required: bool,
    pub counterexample: Option<String>,
    pub cases: u64,
}

impl MatrixRow {
    pub fn passed(&self) -> bool {
        self.contracting && self.sound && (self.complete || !self.complete_required)
    }
}

/// Runs an engine propagator to its fixpoint on a store seeded with the box.
fn run_on_box(mk: &dyn Fn(&[VarId]) -> Box<dyn Propagator>, b: &IntBox) -> Result<IntBox> {
    let mut store = Store::new();
    let vars: Vec<VarId> = b
        .dims()
        .iter()
        .map(|d| store.new_var(d.lo(), d.hi()))
        .collect::<Result<_>>()?;
    if !store.post(mk(&vars))? {
        return Ok(IntBox::new(vec![Interval::EMPTY; b.arity()]));
    }
    Ok(IntBox::new(vars.iter().map(|&v| store.dom().dom(v)).collect()))
}

fn row(
    name: &str,
    universe: IntBox,
    c: ConstraintExt,
    complete_required: bool,
    mk: Box<dyn Fn(&[VarId]) -> Box<dyn Propagator>>,
) -> Result<MatrixRow> {
    let mut apply = |b: &IntBox| run_on_box(mk.as_ref(), b);
    let mut spec = PropagatorSpec::OnBoxes(&mut apply);
    let report = check_propagator(&mut spec, &c, ApproxKind::Beta, ApproxKind::Beta, &universe)?;
    Ok(MatrixRow {
        name: name.to_string(),
        phi: ApproxKind::Beta,
        psi: ApproxKind::Beta,
        contracting: report.contracting,
        sound: report.sound,
        complete: report.complete,
        complete_required,
        counterexample: report.counterexample.map(|(tag, b)| format!("{tag} on {b:?}")),
        cases: report.cases,
    })
}

/// A deliberately broken product propagator used to prove the checker can
/// catch unsound filtering: it tightens the product by one more than the
/// interval arithmetic allows.
pub struct FaultyMulEq {
    x: VarId,
    y: VarId,
    z: VarId,
}

impl Propagator for FaultyMulEq {
    fn execute(&mut self, s: &mut DomainStore) -> Result<Status> {
        let (x, y, z) = (VarView(self.x), VarView(self.y), VarView(self.z));
        let (pmin, pmax) = mul_corner_bounds(&x, &y, s)?;
        let lo = (pmin + 1).clamp(i64::MIN as i128, i64::MAX as i128) as i64;
        let hi = (pmax - 1).clamp(i64::MIN as i128, i64::MAX as i128) as i64;
        if !z.upd_min(s, lo)? || !z.upd_max(s, hi)? {
            return Ok(Status::Failed);
        }
        Ok(Status::Suspend)
    }

    fn subscriptions(&self, s: &DomainStore) -> Vec<(VarId, Event)> {
        let mut out = bound_triggers(&VarView(self.x), s);
        out.extend(bound_triggers(&VarView(self.y), s));
        out.extend(bound_triggers(&VarView(self.z), s));
        out
    }
}

/// Builds the full matrix. With `include_fault`, a known-bad product
/// propagator is appended; its row must come back unsound, which exercises
/// the counterexample machinery end to end.
pub fn propagator_matrix(include_fault: bool) -> Result<Vec<MatrixRow>> {
    let mut rows = Vec::new();

    rows.push(row(
        "eq",
        IntBox::uniform(2, 0, 4),
        ConstraintExt::new(2, |t| t[0] == t[1]),
        true,
        Box::new(|vs| Box::new(Eq::new(VarView(vs[0]), VarView(vs[1])))),
    )?);
    rows.push(row(
        "leq",
        IntBox::uniform(2, 0, 4),
        ConstraintExt::new(2, |t| t[0] <= t[1]),
        true,
        Box::new(|vs| Box::new(Leq::new(VarView(vs[0]), VarView(vs[1])))),
    )?);
    rows.push(row(
        "neq(k=2)",
        IntBox::uniform(1, 0, 4),
        ConstraintExt::new(1, |t| t[0] != 2),
        true,
        Box::new(|vs| Box::new(Neq::new(VarView(vs[0]), 2))),
    )?);
    rows.push(row(
        "sum_eq/2",
        IntBox::uniform(3, 0, 4),
        ConstraintExt::new(3, |t| t[0] + t[1] == t[2]),
        true,
        Box::new(|vs| {
            Box::new(SumEq::new(vec![VarView(vs[0]), VarView(vs[1])], VarView(vs[2])))
        }),
    )?);
    rows.push(row(
        "sum_eq/3",
        IntBox::uniform(4, 0, 3),
        ConstraintExt::new(4, |t| t[0] + t[1] + t[2] == t[3]),
        true,
        Box::new(|vs| {
            Box::new(SumEq::new(
                vec![VarView(vs[0]), VarView(vs[1]), VarView(vs[2])],
                VarView(vs[3]),
            ))
        }),
    )?);
    rows.push(row(
        "linear_eq(2,3,-1)",
        IntBox::uniform(3, 0, 4),
        ConstraintExt::new(3, |t| 2 * t[0] + 3 * t[1] - t[2] == 0),
        true,
        Box::new(|vs| {
            Box::new(linear_eq(
                &[2, 3, -1],
                vec![VarView(vs[0]), VarView(vs[1]), VarView(vs[2])],
                0,
            ))
        }),
    )?);
    rows.push(row(
        "distinct/3",
        IntBox::uniform(3, 0, 4),
        ConstraintExt::new(3, |t| t[0] != t[1] && t[0] != t[2] && t[1] != t[2]),
        true,
        Box::new(|vs| {
            Box::new(DistinctBounds::new(vec![VarView(vs[0]), VarView(vs[1]), VarView(vs[2])]))
        }),
    )?);
    rows.push(row(
        "distinct/4",
        IntBox::uniform(4, 0, 3),
        ConstraintExt::new(4, |t| {
            for i in 0..4 {
                for j in i + 1..4 {
                    if t[i] == t[j] {
                        return false;
                    }
                }
            }
            true
        }),
        true,
        Box::new(|vs| {
            Box::new(DistinctBounds::new(vec![
                VarView(vs[0]),
                VarView(vs[1]),
                VarView(vs[2]),
                VarView(vs[3]),
            ]))
        }),
    )?);
    rows.push(row(
        "mul_eq (signed)",
        IntBox::uniform(3, -2, 2),
        ConstraintExt::new(3, |t| t[0] * t[1] == t[2]),
        false,
        Box::new(|vs| Box::new(MulEq::new(VarView(vs[0]), VarView(vs[1]), VarView(vs[2])))),
    )?);
    rows.push(row(
        "mul_eq (non-negative)",
        IntBox::uniform(3, 0, 4),
        ConstraintExt::new(3, |t| t[0] * t[1] == t[2]),
        false,
        Box::new(|vs| Box::new(MulEq::new(VarView(vs[0]), VarView(vs[1]), VarView(vs[2])))),
    )?);

    if include_fault {
        rows.push(row(
            "mul_eq-faulty (fixture)",
            IntBox::uniform(3, 0, 3),
            ConstraintExt::new(3, |t| t[0] * t[1] == t[2]),
            false,
            Box::new(|vs| Box::new(FaultyMulEq { x: vs[0], y: vs[1], z: vs[2] })),
        )?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_propagators_pass_their_rows() {
        let rows = propagator_matrix(false).unwrap();
        for r in &rows {
            assert!(r.contracting, "{} not contracting: {:?}", r.name, r.counterexample);
            assert!(r.sound, "{} not sound: {:?}", r.name, r.counterexample);
            if r.complete_required {
                assert!(r.complete, "{} not complete: {:?}", r.name, r.counterexample);
            }
        }
    }

    #[test]
    fn faulty_fixture_is_caught_as_unsound() {
        let rows = propagator_matrix(true).unwrap();
        let fault = rows.iter().find(|r| r.name.contains("faulty")).unwrap();
        assert!(!fault.sound, "the checker must flag the faulty inverse");
        assert!(fault.counterexample.is_some());
    }
}

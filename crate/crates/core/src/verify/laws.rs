//! The approximation algebra: idempotency, monotonicity, intersection
//! closure (with a non-distributivity witness) and the containment chain
//! identity ⊆ delta ⊆ beta.

use crate::approx::{self, ApproxKind, IntBox, TupleSet};
use crate::models::SeededRng;
use crate::verify::SuiteReport;

const KINDS: [ApproxKind; 3] = [ApproxKind::Identity, ApproxKind::Delta, ApproxKind::Beta];

fn check_set(r: &mut SuiteReport, s: &TupleSet) {
    for kind in KINDS {
        let a = match approx::approx(s, kind) {
            Ok(a) => a,
            Err(e) => {
                r.fail(format!("approx({s:?}, {kind:?}) errored: {e}"));
                return;
            }
        };
        // idempotency
        let aa = approx::approx(&a, kind).unwrap();
        r.check(aa == a, || format!("{kind:?} not idempotent on {s:?}"));
        // the approximation result is a Phi-domain
        r.check(approx::is_phi_domain(&a, kind).unwrap(), || {
            format!("approx({s:?}, {kind:?}) is not a {kind:?}-domain")
        });
    }
    // containment chain: s ⊆ s^delta ⊆ s^beta
    let d = approx::delta_approx(s).unwrap();
    let b = approx::approx(s, ApproxKind::Beta).unwrap();
    r.check(s.subset_of(&d), || format!("s ⊄ delta for {s:?}"));
    r.check(d.subset_of(&b), || format!("delta ⊄ beta for {s:?}"));
}

fn check_pair(r: &mut SuiteReport, s1: &TupleSet, s2: &TupleSet) {
    for kind in KINDS {
        let a1 = approx::approx(s1, kind).unwrap();
        let a2 = approx::approx(s2, kind).unwrap();
        // monotonicity on nested pairs
        if s1.subset_of(s2) {
            r.check(a1.subset_of(&a2), || format!("{kind:?} not monotone on {s1:?} ⊆ {s2:?}"));
        }
        // closure under intersection: a1 ∩ a2 is itself a Phi-domain
        let inter = a1.intersect(&a2).unwrap();
        r.check(approx::is_phi_domain(&inter, kind).unwrap(), || {
            format!("{kind:?} intersection not closed on {s1:?}, {s2:?}")
        });
    }
}

fn subsets_of(universe: &[Vec<i64>], arity: usize) -> Vec<TupleSet> {
    let n = universe.len();
    assert!(n <= 16);
    (0..(1u32 << n))
        .map(|mask| {
            let picked = universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << *i) != 0)
                .map(|(_, t)| t.clone());
            TupleSet::from_tuples(arity, picked).unwrap()
        })
        .collect()
}

fn random_subset(all: &[Vec<i64>], arity: usize, rng: &mut SeededRng, keep_mod: u32) -> TupleSet {
    let picked = all.iter().filter(|_| rng.next_u32() % keep_mod == 0).cloned();
    TupleSet::from_tuples(arity, picked).unwrap()
}

/// Runs the law suite. `bound` scales the randomized tier (number of sampled
/// sets per arity); the exhaustive tiers are fixed.
pub fn approximation_laws(bound: u64, seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("approximation-laws");

    // Tier 1: full powersets where feasible.
    let tiers: [(usize, i64); 3] = [(1, 4), (2, 2), (3, 1)];
    for (arity, hi) in tiers {
        let grid: Vec<Vec<i64>> = IntBox::uniform(arity, 0, hi)
            .to_tuple_set()
            .unwrap()
            .iter()
            .cloned()
            .collect();
        let sets = subsets_of(&grid, arity);
        for s in &sets {
            check_set(&mut r, s);
        }
        // nested pairs: enumerate subset-of-subset via masks would be 3^n;
        // sample pairs deterministically instead
        let mut rng = SeededRng::new(seed ^ arity as u64);
        for _ in 0..200 {
            let i = rng.next_u32() as usize % sets.len();
            let j = rng.next_u32() as usize % sets.len();
            check_pair(&mut r, &sets[i], &sets[j]);
            // force a nested pair as well
            let small = sets[i].intersect(&sets[j]).unwrap();
            check_pair(&mut r, &small, &sets[i]);
        }
    }

    // Tier 2: arity 3 over [0..4], all sets of cardinality <= 2 plus the
    // singletons' unions; cardinality 3 sampled.
    let grid: Vec<Vec<i64>> = IntBox::uniform(3, 0, 4)
        .to_tuple_set()
        .unwrap()
        .iter()
        .cloned()
        .collect();
    for i in 0..grid.len() {
        let s1 = TupleSet::from_tuples(3, [grid[i].clone()]).unwrap();
        check_set(&mut r, &s1);
        for j in i..grid.len() {
            let s2 = TupleSet::from_tuples(3, [grid[i].clone(), grid[j].clone()]).unwrap();
            check_set(&mut r, &s2);
        }
    }

    // Tier 3: randomized sets over [0..4]^3, nested pairs included.
    let mut rng = SeededRng::new(seed);
    for _ in 0..bound {
        let s2 = random_subset(&grid, 3, &mut rng, 3);
        let s1 = random_subset(&grid, 3, &mut rng, 2).intersect(&s2).unwrap();
        check_set(&mut r, &s1);
        check_set(&mut r, &s2);
        check_pair(&mut r, &s1, &s2);
    }

    // Non-distributivity witness: approximating does not distribute over
    // intersection.
    let s1 = TupleSet::from_tuples(2, [vec![0, 0], vec![1, 1]]).unwrap();
    let s2 = TupleSet::from_tuples(2, [vec![0, 1], vec![1, 0]]).unwrap();
    let lhs = approx::approx(&s1, ApproxKind::Beta)
        .unwrap()
        .intersect(&approx::approx(&s2, ApproxKind::Beta).unwrap())
        .unwrap();
    let rhs = approx::approx(&s1.intersect(&s2).unwrap(), ApproxKind::Beta).unwrap();
    r.check(lhs != rhs, || "expected non-distributivity witness".to_string());
    r.note(format!(
        "non-distributivity witness: beta({s1:?}) ∩ beta({s2:?}) has {} tuples, beta(s1 ∩ s2) has {}",
        lhs.len(),
        rhs.len()
    ));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laws_hold() {
        let r = approximation_laws(150, 0xbeef);
        assert!(r.passed, "failures: {:?}", r.failures);
        assert!(r.cases > 10_000);
    }
}

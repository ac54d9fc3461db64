//! Reproduction of the completeness-class hierarchy on the constraint
//! 2x + 3y = z: each labelled edge of the taxonomy exhibits a value pruned
//! by the stronger class and kept by the weaker one, including the two
//! directions witnessing that range and bounds(D) are incomparable, and the
//! real-relaxation edge below bounds(Z).

use crate::approx::{self, ApproxKind, IntBox, TupleSet};
use crate::oracle::{phi_psi_bound, rho_box_linear, ConstraintExt};
use crate::verify::SuiteReport;

fn cartesian(xs: &[i64], ys: &[i64], zs: &[i64]) -> TupleSet {
    let mut s = TupleSet::empty(3);
    for &x in xs {
        for &y in ys {
            for &z in zs {
                s.insert(vec![x, y, z]).unwrap();
            }
        }
    }
    s
}

struct Edge {
    name: &'static str,
    stronger: (ApproxKind, ApproxKind),
    /// None means the real relaxation of the linear equation.
    weaker: Option<(ApproxKind, ApproxKind)>,
    xs: &'static [i64],
    ys: &'static [i64],
    zs: &'static [i64],
    dim: usize,
    crossed: i64,
}

const D: ApproxKind = ApproxKind::Delta;
const B: ApproxKind = ApproxKind::Beta;

const EDGES: [Edge; 7] = [
    Edge {
        name: "domain -> bounds(D)",
        stronger: (D, D),
        weaker: Some((D, B)),
        xs: &[0, 1],
        ys: &[0],
        zs: &[0, 1, 2],
        dim: 2,
        crossed: 1,
    },
    Edge {
        name: "domain -> range",
        stronger: (D, D),
        weaker: Some((B, D)),
        xs: &[0, 1],
        ys: &[0, 1],
        zs: &[0, 3],
        dim: 0,
        crossed: 1,
    },
    Edge {
        name: "bounds(D) -> bounds(Z)",
        stronger: (D, B),
        weaker: Some((B, B)),
        xs: &[0, 1],
        ys: &[0, 1],
        zs: &[0, 3],
        dim: 0,
        crossed: 1,
    },
    Edge {
        name: "range -> bounds(Z)",
        stronger: (B, D),
        weaker: Some((B, B)),
        xs: &[0],
        ys: &[0, 1],
        zs: &[0, 2, 3],
        dim: 2,
        crossed: 2,
    },
    Edge {
        name: "bounds(Z) -> bounds(R)",
        stronger: (B, B),
        weaker: None,
        xs: &[0, 1],
        ys: &[0, 1],
        zs: &[1, 2, 3],
        dim: 2,
        crossed: 1,
    },
    Edge {
        name: "range -> bounds(D) (incomparability)",
        stronger: (B, D),
        weaker: Some((D, B)),
        xs: &[0],
        ys: &[0, 1],
        zs: &[0, 1, 3],
        dim: 2,
        crossed: 1,
    },
    Edge {
        name: "bounds(D) -> range (incomparability)",
        stronger: (D, B),
        weaker: Some((B, D)),
        xs: &[0, 1],
        ys: &[0, 1],
        zs: &[0, 3],
        dim: 0,
        crossed: 1,
    },
];

fn proj_contains(bound: &TupleSet, dim: usize, v: i64) -> bool {
    bound.proj(dim).contains(&v)
}

pub fn taxonomy_reproduction() -> SuiteReport {
    let mut r = SuiteReport::new("taxonomy-reproduction");
    let c = ConstraintExt::new(3, |t| 2 * t[0] + 3 * t[1] == t[2]);

    for e in &EDGES {
        let s = cartesian(e.xs, e.ys, e.zs);
        let strong = phi_psi_bound(&c, &s, e.stronger.0, e.stronger.1).unwrap();
        let pruned = !proj_contains(&strong, e.dim, e.crossed);
        r.check(pruned, || {
            format!("{}: stronger class failed to prune value {}", e.name, e.crossed)
        });
        let kept = match e.weaker {
            Some((phi, psi)) => {
                let weak = phi_psi_bound(&c, &s, phi, psi).unwrap();
                proj_contains(&weak, e.dim, e.crossed)
            }
            None => {
                // real relaxation over the box hull of s, e.g. <0.5, 0, 1>
                // supports z = 1
                let hull = approx::beta_approx(&s);
                let relaxed = rho_box_linear(&[2, 3, -1], 0, &hull).unwrap();
                relaxed.dim(e.dim).contains(e.crossed)
            }
        };
        r.check(kept, || {
            format!("{}: weaker class unexpectedly pruned value {}", e.name, e.crossed)
        });
        if pruned && kept {
            r.note(format!(
                "{}: value {} in dim {} pruned by the stronger class only",
                e.name, e.crossed, e.dim
            ));
        }
    }

    // the real-relaxation check in the other direction: the integer bounds
    // oracle does prune z = 1 on the unit box while the relaxation keeps it
    let unit = IntBox::new(vec![
        crate::approx::Interval::new(0, 1),
        crate::approx::Interval::new(0, 1),
        crate::approx::Interval::new(1, 3),
    ]);
    let s = unit.to_tuple_set().unwrap();
    let bb = phi_psi_bound(&c, &s, B, B).unwrap();
    r.check(!proj_contains(&bb, 2, 1), || "bounds(Z) should prune z=1".to_string());
    let relaxed = rho_box_linear(&[2, 3, -1], 0, &unit).unwrap();
    r.check(relaxed.dim(2).contains(1), || "bounds(R) should keep z=1".to_string());
    r
}

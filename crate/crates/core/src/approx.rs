//! Tuple sets, intervals, boxes and the domain approximation operators.
//!
//! This module is the value-level substrate shared by the whole crate: the
//! engine stores one [`Interval`] per variable, and the oracle manipulates
//! explicit [`TupleSet`]s to compute ground-truth propagation results.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Hard cap on the number of tuples any approximation is allowed to
/// materialize. Only oracle code paths materialize tuple sets; the cap guards
/// against accidental blow-up when a caller hands over a large box.
pub const MAX_MATERIALIZED_TUPLES: u128 = 1_000_000;

/// A closed integer interval `[lo..hi]`.
///
/// The canonical empty interval is `[1..0]`; constructors normalize any
/// `lo > hi` pair to it so that equality and hashing treat all empty
/// intervals as the same value.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: i64,
    hi: i64,
}

impl Interval {
    pub const EMPTY: Interval = Interval { lo: 1, hi: 0 };

    pub fn new(lo: i64, hi: i64) -> Interval {
        if lo > hi {
            Interval::EMPTY
        } else {
            Interval { lo, hi }
        }
    }

    pub fn singleton(v: i64) -> Interval {
        Interval { lo: v, hi: v }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    /// Number of integers in the interval; 0 when empty.
    pub fn width(&self) -> u128 {
        if self.is_empty() {
            0
        } else {
            (self.hi as i128 - self.lo as i128 + 1) as u128
        }
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        if self.is_empty() {
            *other
        } else if other.is_empty() {
            *self
        } else {
            Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
        }
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        self.is_empty() || (other.lo <= self.lo && self.hi <= other.hi)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "[]")
        } else {
            write!(f, "[{}..{}]", self.lo, self.hi)
        }
    }
}

/// The convex hull of a set of integers: `[min..max]`. Empty input yields
/// the empty interval.
pub fn conv<I: IntoIterator<Item = i64>>(values: I) -> Interval {
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    let mut seen = false;
    for v in values {
        seen = true;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if seen {
        Interval::new(lo, hi)
    } else {
        Interval::EMPTY
    }
}

/// An n-dimensional box: one interval per dimension.
///
/// A box is empty as soon as any dimension is empty. Boxes are closed under
/// dimension-wise intersection.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntBox {
    dims: Vec<Interval>,
}

impl IntBox {
    pub fn new(dims: Vec<Interval>) -> IntBox {
        IntBox { dims }
    }

    /// A box of `arity` copies of `[lo..hi]`.
    pub fn uniform(arity: usize, lo: i64, hi: i64) -> IntBox {
        IntBox { dims: vec![Interval::new(lo, hi); arity] }
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self, i: usize) -> Interval {
        self.dims[i]
    }

    pub fn dims(&self) -> &[Interval] {
        &self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.dims.iter().any(Interval::is_empty)
    }

    /// Number of integer tuples in the box.
    pub fn volume(&self) -> u128 {
        if self.dims.is_empty() {
            return 1;
        }
        self.dims.iter().map(Interval::width).product()
    }

    pub fn contains(&self, tuple: &[i64]) -> bool {
        tuple.len() == self.dims.len()
            && tuple.iter().zip(&self.dims).all(|(v, d)| d.contains(*v))
    }

    pub fn intersect(&self, other: &IntBox) -> Result<IntBox> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), found: other.arity() });
        }
        Ok(IntBox::new(
            self.dims.iter().zip(&other.dims).map(|(a, b)| a.intersect(b)).collect(),
        ))
    }

    pub fn subset_of(&self, other: &IntBox) -> bool {
        self.is_empty()
            || (self.arity() == other.arity()
                && self.dims.iter().zip(&other.dims).all(|(a, b)| a.subset_of(b)))
    }

    /// Materializes the box as an explicit tuple set, subject to the size cap.
    pub fn to_tuple_set(&self) -> Result<TupleSet> {
        if self.is_empty() {
            return Ok(TupleSet::empty(self.arity()));
        }
        let vol = self.volume();
        if vol > MAX_MATERIALIZED_TUPLES {
            return Err(Error::UniverseTooLarge(vol));
        }
        let mut tuples = BTreeSet::new();
        let mut cur: Vec<i64> = self.dims.iter().map(|d| d.lo()).collect();
        loop {
            tuples.insert(cur.clone());
            let mut i = self.dims.len();
            loop {
                if i == 0 {
                    return Ok(TupleSet { arity: self.arity(), tuples });
                }
                i -= 1;
                if cur[i] < self.dims[i].hi() {
                    cur[i] += 1;
                    for d in i + 1..self.dims.len() {
                        cur[d] = self.dims[d].lo();
                    }
                    break;
                }
            }
        }
    }

    /// Iterates the integer tuples of the box without materializing them.
    pub fn for_each_tuple<F: FnMut(&[i64])>(&self, mut f: F) {
        if self.is_empty() {
            return;
        }
        let mut cur: Vec<i64> = self.dims.iter().map(|d| d.lo()).collect();
        loop {
            f(&cur);
            let mut i = self.dims.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if cur[i] < self.dims[i].hi() {
                    cur[i] += 1;
                    for d in i + 1..self.dims.len() {
                        cur[d] = self.dims[d].lo();
                    }
                    break;
                }
            }
        }
    }
}

impl fmt::Debug for IntBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "(empty box/{})", self.arity());
        }
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "{d:?}")?;
        }
        Ok(())
    }
}

/// A finite set of integer n-tuples with set semantics.
#[derive(Clone, PartialEq, Eq)]
pub struct TupleSet {
    arity: usize,
    tuples: BTreeSet<Vec<i64>>,
}

impl TupleSet {
    pub fn empty(arity: usize) -> TupleSet {
        TupleSet { arity, tuples: BTreeSet::new() }
    }

    pub fn from_tuples<I>(arity: usize, iter: I) -> Result<TupleSet>
    where
        I: IntoIterator<Item = Vec<i64>>,
    {
        let mut tuples = BTreeSet::new();
        for t in iter {
            if t.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: t.len() });
            }
            tuples.insert(t);
        }
        Ok(TupleSet { arity, tuples })
    }

    /// Convenience constructor for unary sets.
    pub fn unary<I: IntoIterator<Item = i64>>(values: I) -> TupleSet {
        TupleSet {
            arity: 1,
            tuples: values.into_iter().map(|v| vec![v]).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[i64]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn insert(&mut self, tuple: Vec<i64>) -> Result<()> {
        if tuple.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: tuple.len() });
        }
        self.tuples.insert(tuple);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.tuples.iter()
    }

    /// Projection to the i-th component.
    pub fn proj(&self, i: usize) -> BTreeSet<i64> {
        self.tuples.iter().map(|t| t[i]).collect()
    }

    pub fn subset_of(&self, other: &TupleSet) -> bool {
        self.tuples.is_subset(&other.tuples)
    }

    pub fn intersect(&self, other: &TupleSet) -> Result<TupleSet> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: other.arity });
        }
        Ok(TupleSet {
            arity: self.arity,
            tuples: self.tuples.intersection(&other.tuples).cloned().collect(),
        })
    }

    pub fn filter<F: FnMut(&[i64]) -> bool>(&self, mut pred: F) -> TupleSet {
        TupleSet {
            arity: self.arity,
            tuples: self.tuples.iter().filter(|t| pred(t)).cloned().collect(),
        }
    }
}

impl fmt::Debug for TupleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.tuples.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t:?}")?;
        }
        write!(f, "}}")
    }
}

/// The approximation operators the oracle understands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ApproxKind {
    /// Leaves the set untouched.
    Identity,
    /// Smallest Cartesian product containing the set.
    Delta,
    /// Smallest box containing the set (per-dimension convex hull).
    Beta,
    /// Real relaxation of a linear equation; accepted only by
    /// `oracle::rho_box_linear`.
    RhoLinear,
}

/// The Cartesian approximation: `proj_1(S) x ... x proj_n(S)` materialized
/// as an explicit tuple set.
pub fn delta_approx(s: &TupleSet) -> Result<TupleSet> {
    if s.is_empty() {
        return Ok(TupleSet::empty(s.arity()));
    }
    let projs: Vec<Vec<i64>> = (0..s.arity()).map(|i| s.proj(i).into_iter().collect()).collect();
    let size: u128 = projs.iter().map(|p| p.len() as u128).product();
    if size > MAX_MATERIALIZED_TUPLES {
        return Err(Error::UniverseTooLarge(size));
    }
    let mut tuples = BTreeSet::new();
    let mut idx = vec![0usize; projs.len()];
    loop {
        tuples.insert(idx.iter().zip(&projs).map(|(&i, p)| p[i]).collect());
        let mut d = projs.len();
        loop {
            if d == 0 {
                return Ok(TupleSet { arity: s.arity(), tuples });
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < projs[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// The box approximation: dimension-wise convex hull of the projections.
pub fn beta_approx(s: &TupleSet) -> IntBox {
    IntBox::new((0..s.arity()).map(|i| conv(s.proj(i))).collect())
}

/// Applies the chosen approximation, materializing the result as a tuple set.
pub fn approx(s: &TupleSet, kind: ApproxKind) -> Result<TupleSet> {
    match kind {
        ApproxKind::Identity => Ok(s.clone()),
        ApproxKind::Delta => delta_approx(s),
        ApproxKind::Beta => beta_approx(s).to_tuple_set(),
        ApproxKind::RhoLinear => Err(Error::UnsupportedKind(kind)),
    }
}

/// True iff `s` is a fixpoint of the approximation, i.e. `approx(s) == s`.
pub fn is_phi_domain(s: &TupleSet, kind: ApproxKind) -> Result<bool> {
    Ok(&approx(s, kind)? == s)
}

/// Dimension-wise intersection of two boxes of equal arity.
pub fn intersect_box(a: &IntBox, b: &IntBox) -> Result<IntBox> {
    a.intersect(b)
}

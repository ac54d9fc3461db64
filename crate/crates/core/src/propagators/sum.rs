//! N-ary sum propagators: `Σ terms = K`, `Σ terms ≤ k`, `Σ terms ≥ k`.
//!
//! Each propagator reads its view bounds into local interval copies, runs
//! the bound fixpoint on those copies, and pushes the final bounds through
//! the views once. The local fixpoint is what makes the filter idempotent
//! at the expression level: intermediate bounds participate even when the
//! underlying variables cannot represent them.

use crate::engine::{DomainStore, Event, VarId};
use crate::error::Result;
use crate::propagators::{Propagator, Status};
use crate::views::ops::{sum_get_max, sum_get_min, upd_max_wide, upd_min_wide, LinearView};
use crate::views::{bound_triggers, BoxView};

type Iv = (i128, i128);

fn read<V: BoxView>(v: &V, s: &DomainStore) -> Result<Iv> {
    Ok((v.get_min(s)? as i128, v.get_max(s)? as i128))
}

fn push<V: BoxView>(v: &V, s: &mut DomainStore, t: Iv) -> Result<bool> {
    Ok(upd_min_wide(v, s, t.0)? && upd_max_wide(v, s, t.1)?)
}

/// Narrows `t` to `[lo..hi] ∩ t`; None on wipeout.
fn narrow(t: &mut Iv, lo: i128, hi: i128) -> Option<bool> {
    let nl = t.0.max(lo);
    let nh = t.1.min(hi);
    if nl > nh {
        return None;
    }
    let changed = nl != t.0 || nh != t.1;
    *t = (nl, nh);
    Some(changed)
}

/// Bound fixpoint of `Σ terms = k` on local copies; false on wipeout.
fn local_sum_eq(terms: &mut [Iv], k: &mut Iv, s: &DomainStore) -> bool {
    loop {
        let mut changed = false;
        let slo: i128 = terms.iter().map(|t| t.0).sum();
        let shi: i128 = terms.iter().map(|t| t.1).sum();
        s.count_op();
        match narrow(k, slo, shi) {
            None => return false,
            Some(c) => changed |= c,
        }
        for t in terms.iter_mut() {
            s.count_op();
            let rest_lo = slo - t.0;
            let rest_hi = shi - t.1;
            match narrow(t, k.0 - rest_hi, k.1 - rest_lo) {
                None => return false,
                Some(c) => changed |= c,
            }
        }
        if !changed {
            return true;
        }
    }
}

/// `Σ terms = K`.
pub struct SumEq<V, K> {
    terms: Vec<V>,
    k: K,
}

impl<V: BoxView, K: BoxView> SumEq<V, K> {
    pub fn new(terms: Vec<V>, k: K) -> Self {
        assert!(!terms.is_empty());
        SumEq { terms, k }
    }

    fn read_all(&self, s: &DomainStore) -> Result<(Vec<Iv>, Iv)> {
        let mut lt = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            lt.push(read(t, s)?);
        }
        Ok((lt, read(&self.k, s)?))
    }
}

impl<V: BoxView, K: BoxView> Propagator for SumEq<V, K> {
    fn execute(&mut self, s: &mut DomainStore) -> Result<Status> {
        s.begin_pass();
        let (before, bk) = self.read_all(s)?;
        let mut lt = before.clone();
        let mut lk = bk;
        if !local_sum_eq(&mut lt, &mut lk, s) {
            s.fail();
            return Ok(Status::Failed);
        }
        let u0 = s.counters().domain_updates.get();
        for (t, &b) in self.terms.iter().zip(&lt) {
            if !push(t, s, b)? {
                return Ok(Status::Failed);
            }
        }
        if !push(&self.k, s, lk)? {
            return Ok(Status::Failed);
        }
        // no domain update and a no-op fixpoint: re-execution repeats both
        if s.counters().domain_updates.get() == u0 && lt == before && lk == bk {
            Ok(Status::Idempotent)
        } else {
            Ok(Status::Suspend)
        }
    }

    fn subscriptions(&self, s: &DomainStore) -> Vec<(VarId, Event)> {
        let mut out = Vec::new();
        for t in &self.terms {
            out.extend(bound_triggers(t, s));
        }
        out.extend(bound_triggers(&self.k, s));
        out.sort();
        out.dedup();
        out
    }

    fn movable_triggers(&self) -> bool {
        self.terms.iter().any(BoxView::triggers_can_move) || self.k.triggers_can_move()
    }
}

/// `linear_eq`: `Σ coeffs[i]·xs[i] = k`.
pub fn linear_eq<V: BoxView>(coeffs: &[i64], xs: Vec<V>, k: i64) -> LinearEq<V> {
    LinearEq::new(coeffs, xs, k)
}

/// Value-space footprint above which the exact reachability stage of
/// [`LinearEq`] is skipped and only interval reasoning runs.
const LINEAR_EXACT_SPAN: i128 = 4096;

/// `Σ coeffs[i]·xs[i] = k` over views.
///
/// Interval reasoning on scaled terms (the composition of a sum with
/// coefficient views) is bounds(R)-complete but can miss integer-infeasible
/// bound values when several non-unit coefficients interact. A second stage
/// therefore computes the exact set of reachable sums (prefix/suffix
/// bitsets over the value range) and tightens each bound to its smallest
/// supported value, giving bounds(Z) completeness whenever the term ranges
/// are hole-free (plain variables). The stage is skipped for unit
/// coefficients, where interval reasoning is already complete, and above a
/// fixed footprint cap.
pub struct LinearEq<V> {
    terms: Vec<LinearView<V>>,
    k: i64,
}

impl<V: BoxView> LinearEq<V> {
    pub fn new(coeffs: &[i64], xs: Vec<V>, k: i64) -> Self {
        assert_eq!(coeffs.len(), xs.len());
        assert!(coeffs.iter().all(|&c| c != 0), "coefficients must be non-zero");
        let terms = coeffs
            .iter()
            .zip(xs)
            .map(|(&c, x)| LinearView { coeff: c, x })
            .collect();
        LinearEq { terms, k }
    }

    fn read_vars(&self, s: &DomainStore) -> Result<Vec<Iv>> {
        self.terms.iter().map(|t| read(&t.x, s)).collect()
    }

    fn scaled(&self, i: usize, lv: &[Iv]) -> Iv {
        let c = self.terms[i].coeff as i128;
        if c >= 0 {
            (c * lv[i].0, c * lv[i].1)
        } else {
            (c * lv[i].1, c * lv[i].0)
        }
    }

    /// Interval fixpoint on local variable copies; false on wipeout.
    fn local_fixpoint(&self, lv: &mut [Iv], s: &DomainStore) -> bool {
        loop {
            let mut changed = false;
            let mut slo = 0i128;
            let mut shi = 0i128;
            for i in 0..lv.len() {
                let t = self.scaled(i, lv);
                s.count_op();
                slo += t.0;
                shi += t.1;
            }
            let k = self.k as i128;
            if k < slo || k > shi {
                return false;
            }
            for i in 0..lv.len() {
                let c = self.terms[i].coeff as i128;
                let t = self.scaled(i, lv);
                // target range for the scaled term
                let tlo = k - (shi - t.1);
                let thi = k - (slo - t.0);
                s.count_op();
                let (xlo, xhi) = if c > 0 {
                    (div_ceil(tlo, c), div_floor(thi, c))
                } else {
                    (div_ceil(thi, c), div_floor(tlo, c))
                };
                match narrow(&mut lv[i], xlo, xhi) {
                    None => return false,
                    Some(ch) => changed |= ch,
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Achievable values of term i as a bitset with its own base offset.
    fn term_set(&self, i: usize, lo: i64, hi: i64) -> (i128, Vec<bool>) {
        let a = self.terms[i].coeff as i128;
        let (tlo, thi) = if a >= 0 {
            (a * lo as i128, a * hi as i128)
        } else {
            (a * hi as i128, a * lo as i128)
        };
        let width = (thi - tlo + 1) as usize;
        let mut bits = vec![false; width];
        for v in lo..=hi {
            bits[(a * v as i128 - tlo) as usize] = true;
        }
        (tlo, bits)
    }

    /// Exact per-variable support bounds via reachable-sum sets on the
    /// local copies; false when no assignment reaches k.
    fn exact_refine(&self, lv: &mut [Iv], s: &DomainStore) -> bool {
        let n = self.terms.len();
        if self.terms.iter().all(|t| t.coeff.abs() == 1) {
            return true;
        }
        let span: i128 = lv
            .iter()
            .zip(&self.terms)
            .map(|(&(lo, hi), t)| t.coeff.unsigned_abs() as i128 * (hi - lo) + 1)
            .sum();
        if span > LINEAR_EXACT_SPAN {
            return true;
        }

        let sets: Vec<(i128, Vec<bool>)> = (0..n)
            .map(|i| self.term_set(i, lv[i].0 as i64, lv[i].1 as i64))
            .collect();
        let unit = (0i128, vec![true]);
        let mut prefix: Vec<(i128, Vec<bool>)> = Vec::with_capacity(n + 1);
        prefix.push(unit.clone());
        for set in &sets {
            let last = prefix.last().unwrap();
            prefix.push(convolve(last, set));
        }
        let mut suffix: Vec<(i128, Vec<bool>)> = vec![unit; n + 1];
        for i in (0..n).rev() {
            suffix[i] = convolve(&sets[i], &suffix[i + 1]);
        }

        for i in 0..n {
            let others = convolve(&prefix[i], &suffix[i + 1]);
            let a = self.terms[i].coeff as i128;
            let (lo, hi) = (lv[i].0 as i64, lv[i].1 as i64);
            let feasible = |v: i64| {
                let need = self.k as i128 - a * v as i128;
                let idx = need - others.0;
                idx >= 0 && (idx as usize) < others.1.len() && others.1[idx as usize]
            };
            s.count_op();
            let new_lo = (lo..=hi).find(|&v| feasible(v));
            let new_hi = (lo..=hi).rev().find(|&v| feasible(v));
            match (new_lo, new_hi) {
                (Some(nl), Some(nh)) => {
                    lv[i] = (nl as i128, nh as i128);
                }
                _ => return false,
            }
        }
        true
    }
}

/// Sum-set convolution of two offset bitsets.
fn convolve(a: &(i128, Vec<bool>), b: &(i128, Vec<bool>)) -> (i128, Vec<bool>) {
    let base = a.0 + b.0;
    let mut out = vec![false; a.1.len() + b.1.len() - 1];
    for (i, &ab) in a.1.iter().enumerate() {
        if !ab {
            continue;
        }
        for (j, &bb) in b.1.iter().enumerate() {
            if bb {
                out[i + j] = true;
            }
        }
    }
    (base, out)
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

impl<V: BoxView> Propagator for LinearEq<V> {
    fn execute(&mut self, s: &mut DomainStore) -> Result<Status> {
        s.begin_pass();
        let before = self.read_vars(s)?;
        let mut lv = before.clone();
        if !self.local_fixpoint(&mut lv, s) || !self.exact_refine(&mut lv, s) {
            s.fail();
            return Ok(Status::Failed);
        }
        let u0 = s.counters().domain_updates.get();
        for (t, &b) in self.terms.iter().zip(&lv) {
            if !push(&t.x, s, b)? {
                return Ok(Status::Failed);
            }
        }
        if s.counters().domain_updates.get() == u0 && lv == before {
            Ok(Status::Idempotent)
        } else {
            Ok(Status::Suspend)
        }
    }

    fn subscriptions(&self, s: &DomainStore) -> Vec<(VarId, Event)> {
        let mut out = Vec::new();
        for t in &self.terms {
            out.extend(bound_triggers(t, s));
        }
        out.sort();
        out.dedup();
        out
    }

    fn movable_triggers(&self) -> bool {
        self.terms.iter().any(|t| t.x.triggers_can_move())
    }
}

/// `Σ terms ≤ k`.
pub struct SumLeq<V> {
    terms: Vec<V>,
    k: i64,
}

impl<V: BoxView> SumLeq<V> {
    pub fn new(terms: Vec<V>, k: i64) -> Self {
        assert!(!terms.is_empty());
        SumLeq { terms, k }
    }
}

impl<V: BoxView> Propagator for SumLeq<V> {
    fn execute(&mut self, s: &mut DomainStore) -> Result<Status> {
        s.begin_pass();
        let mut lt = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            lt.push(read(t, s)?);
        }
        let slo: i128 = lt.iter().map(|t| t.0).sum();
        if slo > self.k as i128 {
            s.fail();
            return Ok(Status::Failed);
        }
        for (t, b) in self.terms.iter().zip(&mut lt) {
            s.count_op();
            let cap = self.k as i128 - (slo - b.0);
            if cap < b.1 && !upd_max_wide(t, s, cap)? {
                return Ok(Status::Failed);
            }
        }
        s.begin_pass();
        if sum_get_max(&self.terms, s)? as i128 <= self.k as i128 {
            Ok(Status::Idempotent)
        } else {
            Ok(Status::Suspend)
        }
    }


    fn subscriptions(&self, s: &DomainStore) -> Vec<(VarId, Event)> {
        let mut out = Vec::new();
        for t in &self.terms {
            out.extend(bound_triggers(t, s));
        }
        out.sort();
        out.dedup();
        out
    }

    fn movable_triggers(&self) -> bool {
        self.terms.iter().any(BoxView::triggers_can_move)
    }
}

/// `Σ terms ≥ k`.
pub struct SumGeq<V> {
    terms: Vec<V>,
    k: i64,
}

impl<V: BoxView> SumGeq<V> {
    pub fn new(terms: Vec<V>, k: i64) -> Self {
        assert!(!terms.is_empty());
        SumGeq { terms, k }
    }
}

impl<V: BoxView> Propagator for SumGeq<V> {
    fn execute(&mut self, s: &mut DomainStore) -> Result<Status> {
        s.begin_pass();
        let mut lt = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            lt.push(read(t, s)?);
        }
        let shi: i128 = lt.iter().map(|t| t.1).sum();
        if shi < self.k as i128 {
            s.fail();
            return Ok(Status::Failed);
        }
        for (t, b) in self.terms.iter().zip(&mut lt) {
            s.count_op();
            let need = self.k as i128 - (shi - b.1);
            if need > b.0 && !upd_min_wide(t, s, need)? {
                return Ok(Status::Failed);
            }
        }
        s.begin_pass();
        if sum_get_min(&self.terms, s)? as i128 >= self.k as i128 {
            Ok(Status::Idempotent)
        } else {
            Ok(Status::Suspend)
        }
    }

    fn subscriptions(&self, s: &DomainStore) -> Vec<(VarId, Event)> {
        let mut out = Vec::new();
        for t in &self.terms {
            out.extend(bound_triggers(t, s));
        }
        out.sort();
        out.dedup();
        out
    }

    fn movable_triggers(&self) -> bool {
        self.terms.iter().any(BoxView::triggers_can_move)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Store;
    use crate::views::ops::{ConstView, VarView};

    #[test]
    fn sum_eq_tightens_terms_and_total() {
        let mut s = Store::new();
        let x = s.new_var(1, 3).unwrap();
        let y = s.new_var(2, 5).unwrap();
        let z = s.new_var(0, 4).unwrap();
        assert!(s
            .post(Box::new(SumEq::new(vec![VarView(x), VarView(y)], VarView(z))))
            .unwrap());
        assert_eq!((s.dom().min(z), s.dom().max(z)), (3, 4));
        assert_eq!((s.dom().min(x), s.dom().max(x)), (1, 2));
        assert_eq!((s.dom().min(y), s.dom().max(y)), (2, 3));
    }

    #[test]
    fn sum_eq_ground_is_idempotent() {
        let mut s = Store::new();
        let x = s.new_var(2, 2).unwrap();
        let y = s.new_var(3, 3).unwrap();
        let mut p = SumEq::new(vec![VarView(x), VarView(y)], ConstView(5));
        assert_eq!(p.execute(s.dom_mut()).unwrap(), Status::Idempotent);
    }

    #[test]
    fn sum_eq_fails_when_min_exceeds_k() {
        let mut s = Store::new();
        let x = s.new_var(3, 5).unwrap();
        let y = s.new_var(3, 5).unwrap();
        let mut p = SumEq::new(vec![VarView(x), VarView(y)], ConstView(4));
        assert_eq!(p.execute(s.dom_mut()).unwrap(), Status::Failed);
    }

    #[test]
    fn linear_eq_taxonomy_hull_stays() {
        // 2x + 3y = z with x,y in [0..1]: sums are {0,2,3,5}, hull [0..5]
        let mut s = Store::new();
        let x = s.new_var(0, 1).unwrap();
        let y = s.new_var(0, 1).unwrap();
        let z = s.new_var(0, 5).unwrap();
        let p = linear_eq(&[2, 3, -1], vec![VarView(x), VarView(y), VarView(z)], 0);
        assert!(s.post(Box::new(p)).unwrap());
        assert_eq!((s.dom().min(z), s.dom().max(z)), (0, 5));
    }

    #[test]
    fn linear_eq_detects_infeasible_unit() {
        // 2x + 3y = 1 with x,y in [0..1] has no integer solution
        let mut s = Store::new();
        let x = s.new_var(0, 1).unwrap();
        let y = s.new_var(0, 1).unwrap();
        let z = s.new_var(1, 1).unwrap();
        let p = linear_eq(&[2, 3, -1], vec![VarView(x), VarView(y), VarView(z)], 0);
        assert!(!s.post(Box::new(p)).unwrap());
        assert!(s.failed());
    }

    #[test]
    fn single_unit_term_fixes_to_k() {
        let mut s = Store::new();
        let x = s.new_var(-10, 10).unwrap();
        let p = linear_eq(&[1], vec![VarView(x)], 7);
        assert!(s.post(Box::new(p)).unwrap());
        assert!(s.dom().is_ground(x) && s.dom().min(x) == 7);
    }

    #[test]
    fn linear_eq_exact_stage_prunes_parity_gaps() {
        // 2x + 3y = z over x,y in [0..1], z in [0..4]: reachable sums are
        // {0,2,3}, so z = 4 must go
        let mut s = Store::new();
        let x = s.new_var(0, 1).unwrap();
        let y = s.new_var(0, 1).unwrap();
        let z = s.new_var(0, 4).unwrap();
        let p = linear_eq(&[2, 3, -1], vec![VarView(x), VarView(y), VarView(z)], 0);
        assert!(s.post(Box::new(p)).unwrap());
        assert_eq!((s.dom().min(z), s.dom().max(z)), (0, 3));
    }

    #[test]
    fn sum_leq_and_geq() {
        let mut s = Store::new();
        let x = s.new_var(0, 9).unwrap();
        let y = s.new_var(4, 9).unwrap();
        assert!(s.post(Box::new(SumLeq::new(vec![VarView(x), VarView(y)], 10))).unwrap());
        assert_eq!(s.dom().max(x), 6);
        assert_eq!(s.dom().max(y), 9);

        let mut s = Store::new();
        let x = s.new_var(0, 3).unwrap();
        let y = s.new_var(0, 3).unwrap();
        assert!(s.post(Box::new(SumGeq::new(vec![VarView(x), VarView(y)], 5))).unwrap());
        assert_eq!(s.dom().min(x), 2);
        assert_eq!(s.dom().min(y), 2);
    }
}

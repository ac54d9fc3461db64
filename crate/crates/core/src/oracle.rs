//! Ground-truth semantics over explicit tuple sets.
//!
//! Everything here trades speed for trust: view functions are evaluated
//! pointwise, propagation is computed by filtering materialized tuple sets,
//! and completeness classes are decided by comparing an implementation's
//! fixpoint against the `(con(c) ∩ S^Φ)^Ψ` bound. The engine's fast
//! propagators are validated against this module, never the other way
//! around.

use std::rc::Rc;

use crate::approx::{self, ApproxKind, IntBox, Interval, TupleSet};
use crate::error::{Error, Result};

/// A total function from in-tuples to out-tuples, used as the `f` in a view.
#[derive(Clone)]
pub struct FuncSpec {
    in_arity: usize,
    out_arity: usize,
    eval: Rc<dyn Fn(&[i64]) -> Vec<i64>>,
}

impl FuncSpec {
    pub fn new<F>(in_arity: usize, out_arity: usize, eval: F) -> FuncSpec
    where
        F: Fn(&[i64]) -> Vec<i64> + 'static,
    {
        FuncSpec { in_arity, out_arity, eval: Rc::new(eval) }
    }

    /// A function with a single output component.
    pub fn scalar<F>(in_arity: usize, eval: F) -> FuncSpec
    where
        F: Fn(&[i64]) -> i64 + 'static,
    {
        FuncSpec::new(in_arity, 1, move |t| vec![eval(t)])
    }

    /// The projection `p_i(x) = x_i` over `n`-tuples (0-based index).
    pub fn projection(n: usize, i: usize) -> FuncSpec {
        assert!(i < n);
        FuncSpec::new(n, 1, move |t| vec![t[i]])
    }

    /// Functional composition `self ∘ g` (apply `g` first).
    pub fn compose(&self, g: &FuncSpec) -> FuncSpec {
        assert_eq!(g.out_arity, self.in_arity);
        let f = self.eval.clone();
        let ge = g.eval.clone();
        FuncSpec::new(g.in_arity, self.out_arity, move |t| f(&ge(t)))
    }

    /// Cartesian product of functions: `(f × g)(x) = <f(x), g(x)>`.
    pub fn cross(&self, g: &FuncSpec) -> FuncSpec {
        assert_eq!(self.in_arity, g.in_arity);
        let f = self.eval.clone();
        let ge = g.eval.clone();
        FuncSpec::new(self.in_arity, self.out_arity + g.out_arity, move |t| {
            let mut out = f(t);
            out.extend(ge(t));
            out
        })
    }

    pub fn in_arity(&self) -> usize {
        self.in_arity
    }

    pub fn out_arity(&self) -> usize {
        self.out_arity
    }

    pub fn eval(&self, t: &[i64]) -> Vec<i64> {
        debug_assert_eq!(t.len(), self.in_arity);
        (self.eval)(t)
    }
}

/// A constraint given by a membership predicate, optionally backed by an
/// explicit extension within some universe.
#[derive(Clone)]
pub struct ConstraintExt {
    arity: usize,
    pred: Rc<dyn Fn(&[i64]) -> bool>,
    ext: Option<TupleSet>,
}

impl ConstraintExt {
    pub fn new<F>(arity: usize, pred: F) -> ConstraintExt
    where
        F: Fn(&[i64]) -> bool + 'static,
    {
        ConstraintExt { arity, pred: Rc::new(pred), ext: None }
    }

    /// Attaches the explicit extension of the constraint within `universe`,
    /// checking that it agrees with the predicate on every tuple.
    pub fn with_extension(mut self, universe: &IntBox) -> Result<ConstraintExt> {
        if universe.arity() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: universe.arity() });
        }
        let all = universe.to_tuple_set()?;
        let ext = all.filter(|t| (self.pred)(t));
        self.ext = Some(ext);
        Ok(self)
    }

    /// The constraint `c ∘ f`: membership of `x` decided by `f(x) ∈ con(c)`.
    pub fn compose(&self, f: &FuncSpec) -> ConstraintExt {
        assert_eq!(f.out_arity(), self.arity);
        let pred = self.pred.clone();
        let fe = f.clone();
        ConstraintExt::new(f.in_arity(), move |t| pred(&fe.eval(t)))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn holds(&self, t: &[i64]) -> bool {
        (self.pred)(t)
    }

    pub fn extension(&self) -> Option<&TupleSet> {
        self.ext.as_ref()
    }

    /// `con(c) ∩ s`.
    pub fn filter(&self, s: &TupleSet) -> TupleSet {
        s.filter(|t| (self.pred)(t))
    }
}

/// The image function `φ⁺`: pointwise application of `f` to a tuple set.
pub fn image(f: &FuncSpec, s: &TupleSet) -> Result<TupleSet> {
    if s.arity() != f.in_arity() {
        return Err(Error::ArityMismatch { expected: f.in_arity(), found: s.arity() });
    }
    TupleSet::from_tuples(f.out_arity(), s.iter().map(|t| f.eval(t)))
}

/// The object function `φ⁻` restricted to a finite universe:
/// `{ x ∈ universe : f(x) ∈ s }`.
pub fn preimage(f: &FuncSpec, s: &TupleSet, universe: &IntBox) -> Result<TupleSet> {
    if s.arity() != f.out_arity() {
        return Err(Error::ArityMismatch { expected: f.out_arity(), found: s.arity() });
    }
    if universe.arity() != f.in_arity() {
        return Err(Error::ArityMismatch { expected: f.in_arity(), found: universe.arity() });
    }
    let all = universe.to_tuple_set()?;
    Ok(all.filter(|t| s.contains(&f.eval(t))))
}

/// The contracting object function `φ̂_f(S₂, S₁) = φ_f⁻(S₂) ∩ S₁`.
///
/// The preimage is computed over the box hull of `s1`, which is enough
/// because the result is intersected with `s1` anyway.
pub fn contracting_object(f: &FuncSpec, s2: &TupleSet, s1: &TupleSet) -> Result<TupleSet> {
    if s1.arity() != f.in_arity() {
        return Err(Error::ArityMismatch { expected: f.in_arity(), found: s1.arity() });
    }
    let hull = approx::beta_approx(s1);
    let pre = preimage(f, s2, &hull)?;
    pre.intersect(s1)
}

/// The strongest propagation for `c`: `con(c) ∩ s`, which is idempotent and
/// identity-identity complete.
pub fn exact_fixpoint(c: &ConstraintExt, s: &TupleSet) -> Result<TupleSet> {
    if s.arity() != c.arity() {
        return Err(Error::ArityMismatch { expected: c.arity(), found: s.arity() });
    }
    Ok(c.filter(s))
}

/// The completeness upper bound `(con(c) ∩ S^Φ)^Ψ` that the fixpoint of any
/// ΦΨ-complete propagator for `c` must stay inside.
pub fn phi_psi_bound(
    c: &ConstraintExt,
    s: &TupleSet,
    phi: ApproxKind,
    psi: ApproxKind,
) -> Result<TupleSet> {
    if matches!(phi, ApproxKind::RhoLinear) {
        return Err(Error::UnsupportedKind(phi));
    }
    if matches!(psi, ApproxKind::RhoLinear) {
        return Err(Error::UnsupportedKind(psi));
    }
    let widened = approx::approx(s, phi)?;
    let filtered = c.filter(&widened);
    approx::approx(&filtered, psi)
}

/// The view-based propagator of a composed constraint:
/// `π̌_{c∘f}(S) = φ̂_f(π_c*(φ_f⁺(S)), S)`.
pub fn view_propagate(c: &ConstraintExt, f: &FuncSpec, s: &TupleSet) -> Result<TupleSet> {
    let img = image(f, s)?;
    let fixed = exact_fixpoint(c, &img)?;
    contracting_object(f, &fixed, s)
}

fn box_of(s: &TupleSet) -> IntBox {
    approx::beta_approx(s)
}

/// One application of the bounds operator `T ↦ (con(c) ∩ T^β)^β`.
fn beta_beta_step(c: &ConstraintExt, t: &IntBox) -> Result<IntBox> {
    let tuples = t.to_tuple_set()?;
    Ok(box_of(&c.filter(&tuples)))
}

/// A single simultaneous pass of the per-dimension projection rules: each
/// dimension is tightened against the hull of the constraint restricted to
/// the *original* bounds of the other dimensions. This models a
/// non-idempotent bounds propagator that gets to run only once.
fn beta_beta_single_pass(c: &ConstraintExt, t: &IntBox) -> Result<IntBox> {
    let mut out = Vec::with_capacity(t.arity());
    for d in 0..t.arity() {
        // Replace dimension d by the hull of the projected constraint,
        // reading all other dimensions from the original box.
        let mut probe = t.dims().to_vec();
        probe[d] = hull_dim_given_others(c, t, d)?;
        out.push(probe[d].intersect(&t.dim(d)));
    }
    Ok(IntBox::new(out))
}

/// Hull of `{ v : ∃x ∈ t with x_d free, x_d = v, c(x) }` where the free
/// range for dimension d is the d-projection of `con(c)` within a widened
/// probe box.
fn hull_dim_given_others(c: &ConstraintExt, t: &IntBox, d: usize) -> Result<Interval> {
    // The candidate values for dimension d come from the constraint itself;
    // widen the probe generously around the current box so the projection
    // cannot be clipped by accident. Widening by the largest dimension span
    // is enough for the bounds arithmetic used in tests and benchmarks.
    let span: i64 = t
        .dims()
        .iter()
        .map(|i| if i.is_empty() { 0 } else { i.hi().saturating_sub(i.lo()).saturating_add(1) })
        .max()
        .unwrap_or(1);
    let cur = t.dim(d);
    let pad = span.saturating_mul(8).max(64);
    let probe_dim = Interval::new(cur.lo().saturating_sub(pad), cur.hi().saturating_add(pad));
    let mut dims = t.dims().to_vec();
    dims[d] = probe_dim;
    let probe = IntBox::new(dims);
    let tuples = probe.to_tuple_set()?;
    let filtered = c.filter(&tuples);
    Ok(approx::conv(filtered.iter().map(|t| t[d])))
}

/// Reference box view-based propagation:
/// `π□_{c∘f}(S) = β̂_f(π_c^{ββ*}(β_f⁺(S)), S) ∩ S`.
///
/// With `inner_idempotent` the inner propagator for `c` is iterated to its
/// fixpoint; without it, the inner propagator performs a single simultaneous
/// pass of its projection rules, which can lose pruning that the view
/// functions then round away.
pub fn box_view_propagate_ref(
    c: &ConstraintExt,
    f: &FuncSpec,
    s: &TupleSet,
    inner_idempotent: bool,
) -> Result<TupleSet> {
    if s.arity() != f.in_arity() {
        return Err(Error::ArityMismatch { expected: f.in_arity(), found: s.arity() });
    }
    // β_f⁺(S) = (φ⁺(S^β))^β
    let s_box = box_of(s);
    let img = image(f, &s_box.to_tuple_set()?)?;
    let mut t = box_of(&img);

    if inner_idempotent {
        loop {
            let next = beta_beta_step(c, &t)?;
            if next == t {
                break;
            }
            t = next;
            if t.is_empty() {
                break;
            }
        }
    } else {
        t = beta_beta_single_pass(c, &t)?;
    }

    if t.is_empty() {
        return Ok(TupleSet::empty(s.arity()));
    }

    // β̂_f(T, S) = (φ⁻(T^β) ∩ S^β)^β, then intersect with S itself.
    let pre = preimage(f, &t.to_tuple_set()?, &s_box)?;
    let hat = box_of(&pre);
    let result = s.filter(|tuple| hat.contains(tuple));
    Ok(result)
}

/// The tightest integer box containing all real solutions of
/// `Σ coeffs[i]·x_i = rhs` inside the real hull of `b`.
///
/// Each dimension is tightened independently: solve for `x_i` using the
/// extreme values of the other dimensions and round the resulting real
/// interval inward. All arithmetic is exact (integer ceil/floor division),
/// so no pruning decision rests on floating point.
pub fn rho_box_linear(coeffs: &[i64], rhs: i64, b: &IntBox) -> Result<IntBox> {
    if coeffs.len() != b.arity() {
        return Err(Error::ArityMismatch { expected: b.arity(), found: coeffs.len() });
    }
    if b.is_empty() {
        return Ok(b.clone());
    }
    let mut out = Vec::with_capacity(b.arity());
    for i in 0..b.arity() {
        let a_i = coeffs[i];
        if a_i == 0 {
            out.push(b.dim(i));
            continue;
        }
        // rest = rhs - Σ_{j≠i} a_j x_j over the real box: an exact integer
        // interval because all bounds and coefficients are integers.
        let mut rest_lo: i128 = rhs as i128;
        let mut rest_hi: i128 = rhs as i128;
        for j in 0..b.arity() {
            if j == i {
                continue;
            }
            let a = coeffs[j] as i128;
            let lo = b.dim(j).lo() as i128;
            let hi = b.dim(j).hi() as i128;
            let (t_lo, t_hi) = if a >= 0 { (a * lo, a * hi) } else { (a * hi, a * lo) };
            rest_lo -= t_hi;
            rest_hi -= t_lo;
        }
        // x_i ∈ [rest_lo .. rest_hi] / a_i, rounded inward.
        let a = a_i as i128;
        let (num_lo, num_hi) = if a > 0 { (rest_lo, rest_hi) } else { (rest_hi, rest_lo) };
        let lo = div_ceil(num_lo, a);
        let hi = div_floor(num_hi, a);
        let clamped = Interval::new(
            clamp_i64(lo).max(b.dim(i).lo()),
            clamp_i64(hi).min(b.dim(i).hi()),
        );
        out.push(clamped);
    }
    Ok(IntBox::new(out))
}

fn clamp_i64(v: i128) -> i64 {
    v.clamp(i64::MIN as i128, i64::MAX as i128) as i64
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

/// The propagator under validation: either a pure tuple-set transformer or a
/// box transformer (the shape engine propagators naturally expose).
pub enum PropagatorSpec<'a> {
    OnSets(&'a mut dyn FnMut(&TupleSet) -> Result<TupleSet>),
    OnBoxes(&'a mut dyn FnMut(&IntBox) -> Result<IntBox>),
}

/// Outcome of validating one propagator against one constraint at one
/// completeness class.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub contracting: bool,
    pub sound: bool,
    pub complete: bool,
    /// Some input on which a check failed, with a short tag saying which.
    pub counterexample: Option<(String, IntBox)>,
    pub cases: u64,
}

impl CheckReport {
    pub fn all_pass(&self) -> bool {
        self.contracting && self.sound && self.complete
    }
}

/// Exhaustively validates a propagator over every Φ-domain inside `universe`:
/// contraction, soundness, and the ΦΨ completeness bound on its fixpoint.
///
/// Box propagators are checked over all sub-boxes of the universe (the
/// β-domains); set propagators with Φ = δ are checked over all Cartesian
/// sub-products, which is only feasible for small universes.
pub fn check_propagator(
    p: &mut PropagatorSpec<'_>,
    c: &ConstraintExt,
    phi: ApproxKind,
    psi: ApproxKind,
    universe: &IntBox,
) -> Result<CheckReport> {
    if universe.arity() != c.arity() {
        return Err(Error::ArityMismatch { expected: c.arity(), found: universe.arity() });
    }
    if universe.volume() > approx::MAX_MATERIALIZED_TUPLES {
        return Err(Error::UniverseTooLarge(universe.volume()));
    }
    let mut report = CheckReport {
        contracting: true,
        sound: true,
        complete: true,
        counterexample: None,
        cases: 0,
    };

    match p {
        PropagatorSpec::OnBoxes(apply) => {
            for_each_subbox(universe, &mut |b: &IntBox| {
                if !(report.contracting && report.sound && report.complete) {
                    return;
                }
                report.cases += 1;
                let result = match apply(b) {
                    Ok(r) => r,
                    Err(_) => return,
                };
                check_box_case(c, phi, psi, b, &result, &mut report);
            });
        }
        PropagatorSpec::OnSets(apply) => {
            let domains = enumerate_phi_domains(universe, phi)?;
            for s in &domains {
                if !(report.contracting && report.sound && report.complete) {
                    break;
                }
                report.cases += 1;
                let result = apply(s)?;
                check_set_case(c, phi, psi, s, &result, &mut report)?;
            }
        }
    }
    Ok(report)
}

fn check_box_case(
    c: &ConstraintExt,
    phi: ApproxKind,
    psi: ApproxKind,
    input: &IntBox,
    result: &IntBox,
    report: &mut CheckReport,
) {
    // contracting: result ⊆ input
    if !result.subset_of(input) {
        report.contracting = false;
        report.counterexample = Some(("contracting".into(), input.clone()));
        return;
    }
    // sound: every tuple of con(c) within the input survives
    let mut sound = true;
    input.for_each_tuple(|t| {
        if sound && c.holds(t) && !result.contains(t) {
            sound = false;
        }
    });
    if !sound {
        report.sound = false;
        report.counterexample = Some(("sound".into(), input.clone()));
        return;
    }
    // complete: the fixpoint stays within (con(c) ∩ input^Φ)^Ψ. For box
    // inputs the Φ-approximation of the input is the input itself when
    // Φ is β (or coarser); membership is then checked tuple-wise.
    let input_set = match input.to_tuple_set() {
        Ok(s) => s,
        Err(_) => return,
    };
    let bound = match phi_psi_bound(c, &input_set, phi, psi) {
        Ok(b) => b,
        Err(_) => return,
    };
    let mut complete = true;
    result.for_each_tuple(|t| {
        if complete && !bound.contains(t) {
            complete = false;
        }
    });
    if !complete {
        report.complete = false;
        report.counterexample = Some(("complete".into(), input.clone()));
    }
}

fn check_set_case(
    c: &ConstraintExt,
    phi: ApproxKind,
    psi: ApproxKind,
    input: &TupleSet,
    result: &TupleSet,
    report: &mut CheckReport,
) -> Result<()> {
    let hull = approx::beta_approx(input);
    if !result.subset_of(input) {
        report.contracting = false;
        report.counterexample = Some(("contracting".into(), hull));
        return Ok(());
    }
    let kept = c.filter(input);
    if !kept.subset_of(result) {
        report.sound = false;
        report.counterexample = Some(("sound".into(), hull));
        return Ok(());
    }
    let bound = phi_psi_bound(c, input, phi, psi)?;
    if !result.subset_of(&bound) {
        report.complete = false;
        report.counterexample = Some(("complete".into(), hull));
    }
    Ok(())
}

/// Calls `f` with every non-empty sub-box of `universe`.
pub fn for_each_subbox(universe: &IntBox, f: &mut dyn FnMut(&IntBox)) {
    let n = universe.arity();
    let mut dims: Vec<Interval> = Vec::with_capacity(n);
    fn rec(universe: &IntBox, d: usize, dims: &mut Vec<Interval>, f: &mut dyn FnMut(&IntBox)) {
        if d == universe.arity() {
            f(&IntBox::new(dims.clone()));
            return;
        }
        let u = universe.dim(d);
        for lo in u.lo()..=u.hi() {
            for hi in lo..=u.hi() {
                dims.push(Interval::new(lo, hi));
                rec(universe, d + 1, dims, f);
                dims.pop();
            }
        }
    }
    rec(universe, 0, &mut dims, f);
    let _ = n;
}

/// Enumerates the Φ-domains inside `universe`. For the identity this is the
/// full powerset (only feasible for tiny universes); for δ it is every
/// Cartesian product of per-dimension subsets; for β every sub-box.
pub fn enumerate_phi_domains(universe: &IntBox, phi: ApproxKind) -> Result<Vec<TupleSet>> {
    match phi {
        ApproxKind::Beta => {
            let mut out = Vec::new();
            let mut err = None;
            for_each_subbox(universe, &mut |b| {
                if err.is_some() {
                    return;
                }
                match b.to_tuple_set() {
                    Ok(s) => out.push(s),
                    Err(e) => err = Some(e),
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok(out),
            }
        }
        ApproxKind::Delta => {
            let mut per_dim: Vec<Vec<Vec<i64>>> = Vec::new();
            for d in 0..universe.arity() {
                let vals: Vec<i64> = universe.dim(d).iter().collect();
                if vals.len() > 16 {
                    return Err(Error::UniverseTooLarge(1u128 << vals.len()));
                }
                let mut subsets = Vec::new();
                for mask in 1u32..(1u32 << vals.len()) {
                    let sub: Vec<i64> = vals
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, v)| *v)
                        .collect();
                    subsets.push(sub);
                }
                per_dim.push(subsets);
            }
            let mut out = Vec::new();
            let mut idx = vec![0usize; per_dim.len()];
            'outer: loop {
                let mut s = TupleSet::empty(universe.arity());
                let chosen: Vec<&Vec<i64>> = idx.iter().zip(&per_dim).map(|(&i, p)| &p[i]).collect();
                let mut cur = vec![0usize; chosen.len()];
                loop {
                    s.insert(cur.iter().zip(&chosen).map(|(&i, vals)| vals[i]).collect())?;
                    let mut d = chosen.len();
                    loop {
                        if d == 0 {
                            out.push(s);
                            let mut k = per_dim.len();
                            loop {
                                if k == 0 {
                                    return Ok(out);
                                }
                                k -= 1;
                                idx[k] += 1;
                                if idx[k] < per_dim[k].len() {
                                    continue 'outer;
                                }
                                idx[k] = 0;
                            }
                        }
                        d -= 1;
                        cur[d] += 1;
                        if cur[d] < chosen[d].len() {
                            break;
                        }
                        cur[d] = 0;
                    }
                }
            }
        }
        ApproxKind::Identity => {
            let all = universe.to_tuple_set()?;
            let tuples: Vec<Vec<i64>> = all.iter().cloned().collect();
            if tuples.len() > 20 {
                return Err(Error::UniverseTooLarge(1u128 << tuples.len()));
            }
            let mut out = Vec::new();
            for mask in 0u32..(1u32 << tuples.len()) {
                let sub = tuples
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, t)| t.clone());
                out.push(TupleSet::from_tuples(universe.arity(), sub)?);
            }
            Ok(out)
        }
        ApproxKind::RhoLinear => Err(Error::UnsupportedKind(phi)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(arity: usize, tuples: &[&[i64]]) -> TupleSet {
        TupleSet::from_tuples(arity, tuples.iter().map(|t| t.to_vec())).unwrap()
    }

    fn add1() -> FuncSpec {
        FuncSpec::scalar(1, |t| t[0] + 1)
    }

    fn sum2() -> FuncSpec {
        FuncSpec::scalar(2, |t| t[0] + t[1])
    }

    #[test]
    fn image_of_unary_and_binary_functions() {
        let s = TupleSet::unary([1, 2, 3]);
        assert_eq!(image(&add1(), &s).unwrap(), TupleSet::unary([2, 3, 4]));

        let grid = IntBox::uniform(2, 1, 3).to_tuple_set().unwrap();
        assert_eq!(image(&sum2(), &grid).unwrap(), TupleSet::unary([2, 3, 4, 5, 6]));

        let empty = TupleSet::empty(1);
        assert!(image(&add1(), &empty).unwrap().is_empty());
    }

    #[test]
    fn preimage_within_universe() {
        let u = IntBox::uniform(1, 0, 10);
        let s = TupleSet::unary([2, 3, 4]);
        assert_eq!(preimage(&add1(), &s, &u).unwrap(), TupleSet::unary([1, 2, 3]));

        let sq = FuncSpec::scalar(1, |t| t[0] * t[0]);
        let u = IntBox::uniform(1, -5, 5);
        assert_eq!(preimage(&sq, &TupleSet::unary([4]), &u).unwrap(), TupleSet::unary([-2, 2]));

        assert!(preimage(&add1(), &TupleSet::empty(1), &u).unwrap().is_empty());
    }

    #[test]
    fn contracting_object_examples() {
        let grid = IntBox::uniform(2, 1, 3).to_tuple_set().unwrap();
        // sums of pairs from {1,2,3}² all lie in [2..6], so nothing is removed
        let wide = TupleSet::unary([2, 3, 4, 5, 6]);
        assert_eq!(contracting_object(&sum2(), &wide, &grid).unwrap(), grid);

        // pinning the sum to 2 leaves only <1,1>
        let two = TupleSet::unary([2]);
        assert_eq!(contracting_object(&sum2(), &two, &grid).unwrap(), ts(2, &[&[1, 1]]));

        assert!(contracting_object(&sum2(), &TupleSet::empty(1), &grid).unwrap().is_empty());
    }

    #[test]
    fn exact_fixpoint_is_constraint_intersection() {
        let eq = ConstraintExt::new(2, |t| t[0] == t[1]);
        let s = ts(2, &[&[3, 3], &[9, 6]]);
        assert_eq!(exact_fixpoint(&eq, &s).unwrap(), ts(2, &[&[3, 3]]));

        let inside = ts(2, &[&[1, 1], &[4, 4]]);
        assert_eq!(exact_fixpoint(&eq, &inside).unwrap(), inside);

        let disjoint = ts(2, &[&[1, 2], &[2, 3]]);
        assert!(exact_fixpoint(&eq, &disjoint).unwrap().is_empty());
    }

    #[test]
    fn view_propagate_composes_sum_with_equality() {
        // d = [x1 + x2 = x3] decomposed as c = [y1 = y2] and g = (x1+x2) × p3
        let c = ConstraintExt::new(2, |t| t[0] == t[1]);
        let g = sum2_with_p3();
        let s = ts(3, &[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(view_propagate(&c, &g, &s).unwrap(), ts(3, &[&[1, 2, 3]]));

        // soundness: if s only contains solutions nothing is removed
        let sols = ts(3, &[&[1, 2, 3], &[2, 2, 4]]);
        assert_eq!(view_propagate(&c, &g, &sols).unwrap(), sols);

        let none = ts(3, &[&[1, 1, 3], &[0, 0, 5]]);
        assert!(view_propagate(&c, &g, &none).unwrap().is_empty());
    }

    fn sum2_with_p3() -> FuncSpec {
        let f = FuncSpec::scalar(3, |t| t[0] + t[1]);
        let p3 = FuncSpec::projection(3, 2);
        f.cross(&p3)
    }

    #[test]
    fn view_propagate_agrees_with_direct_fixpoint_on_small_instances() {
        // exhaustive over tuple subsets of a small grid for a catalog of f/c
        let c_eq = ConstraintExt::new(2, |t| t[0] == t[1]);
        let funcs = [sum2_with_p3(), prod_with_p3()];
        let grid = IntBox::uniform(3, 0, 2);
        let all: Vec<Vec<i64>> = grid.to_tuple_set().unwrap().iter().cloned().collect();
        let mut rng = crate::models::SeededRng::new(42);
        for f in &funcs {
            let composed = c_eq.compose(f);
            for _ in 0..200 {
                let mut s = TupleSet::empty(3);
                for t in &all {
                    if rng.next_u32() % 3 == 0 {
                        s.insert(t.clone()).unwrap();
                    }
                }
                let via_view = view_propagate(&c_eq, f, &s).unwrap();
                let direct = exact_fixpoint(&composed, &s).unwrap();
                assert_eq!(via_view, direct);
            }
        }
    }

    fn prod_with_p3() -> FuncSpec {
        let f = FuncSpec::scalar(3, |t| t[0] * t[1]);
        let p3 = FuncSpec::projection(3, 2);
        f.cross(&p3)
    }

    #[test]
    fn box_view_reference_idempotent_vs_single_pass() {
        // c∘f = [2·x1·x2 = x3] with c = [2·y1 = y2], f = (x1·x2) × p3
        let c = ConstraintExt::new(2, |t| 2 * t[0] == t[1]);
        let f = prod_with_p3();
        let d = IntBox::new(vec![
            Interval::new(2, 3),
            Interval::new(2, 3),
            Interval::new(9, 15),
        ]);
        let s = d.to_tuple_set().unwrap();

        let strong = box_view_propagate_ref(&c, &f, &s, true).unwrap();
        assert_eq!(
            approx::beta_approx(&strong),
            IntBox::new(vec![Interval::new(2, 3), Interval::new(2, 3), Interval::new(10, 14)])
        );

        let weak = box_view_propagate_ref(&c, &f, &s, false).unwrap();
        assert_eq!(weak, s, "single-pass inner propagator must not prune here");

        // a singleton solution passes through untouched
        let sol = ts(3, &[&[2, 3, 12]]);
        assert_eq!(box_view_propagate_ref(&c, &f, &sol, true).unwrap(), sol);
    }

    #[test]
    fn rho_linear_keeps_real_supported_bounds() {
        // 2x + 3y - z = 0 over [0..1]×[0..1]×[1..3]: <0.5, 0, 1> is a real
        // solution, so z = 1 survives the real relaxation.
        let b = IntBox::new(vec![
            Interval::new(0, 1),
            Interval::new(0, 1),
            Interval::new(1, 3),
        ]);
        let r = rho_box_linear(&[2, 3, -1], 0, &b).unwrap();
        assert_eq!(r.dim(2), Interval::new(1, 3));

        // the integer bounds oracle prunes z = 1 on the same box
        let c = ConstraintExt::new(3, |t| 2 * t[0] + 3 * t[1] == t[2]);
        let s = b.to_tuple_set().unwrap();
        let bound = phi_psi_bound(&c, &s, ApproxKind::Beta, ApproxKind::Beta).unwrap();
        let zs: std::collections::BTreeSet<i64> = bound.proj(2);
        assert!(!zs.contains(&1) && zs.contains(&2) && zs.contains(&3));

        // a single integer solution is left alone
        let point = IntBox::new(vec![
            Interval::singleton(1),
            Interval::singleton(0),
            Interval::singleton(2),
        ]);
        assert_eq!(rho_box_linear(&[2, 3, -1], 0, &point).unwrap(), point);
    }

    #[test]
    fn check_propagator_flags_identity_and_empty() {
        let c = ConstraintExt::new(2, |t| t[0] == t[1]);
        let u = IntBox::uniform(2, 0, 2);

        let mut identity = |s: &TupleSet| Ok(s.clone());
        let mut spec = PropagatorSpec::OnSets(&mut identity);
        let report =
            check_propagator(&mut spec, &c, ApproxKind::Delta, ApproxKind::Delta, &u).unwrap();
        assert!(report.contracting && report.sound);
        assert!(!report.complete, "the identity performs no filtering");
        assert!(report.counterexample.is_some());

        let mut nuke = |s: &TupleSet| Ok(TupleSet::empty(s.arity()));
        let mut spec = PropagatorSpec::OnSets(&mut nuke);
        let report =
            check_propagator(&mut spec, &c, ApproxKind::Delta, ApproxKind::Delta, &u).unwrap();
        assert!(!report.sound);
    }

    #[test]
    fn round_trip_through_image_and_contracting_object() {
        // φ̂_f(φ⁺_f(s), s) = s for every s: exhaustive on small grids
        let funcs = [add1(), FuncSpec::scalar(1, |t| t[0] * t[0]), sum2()];
        for f in &funcs {
            let grid = IntBox::uniform(f.in_arity(), 0, 3);
            let all: Vec<Vec<i64>> = grid.to_tuple_set().unwrap().iter().cloned().collect();
            // all subsets for unary (16 values -> too many; cap by arity)
            let mut rng = crate::models::SeededRng::new(7);
            for _ in 0..300 {
                let mut s = TupleSet::empty(f.in_arity());
                for t in &all {
                    if rng.next_u32() % 2 == 0 {
                        s.insert(t.clone()).unwrap();
                    }
                }
                let img = image(f, &s).unwrap();
                assert_eq!(contracting_object(f, &img, &s).unwrap(), s);
            }
        }
    }
}

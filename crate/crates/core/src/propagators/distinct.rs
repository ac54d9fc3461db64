//! Bounds-consistent alldifferent over views, via Hall-interval reasoning on
//! sorted bounds (union-find style capacity trees, O(n log n) per pass).

use crate::engine::{DomainStore, Event, VarId};
use crate::error::Result;
use crate::propagators::{Propagator, Status};
use crate::views::{bound_triggers, BoxView};

fn pathmax(a: &[isize], mut x: isize) -> isize {
    while a[x as usize] > x {
        x = a[x as usize];
    }
    x
}

fn pathmin(a: &[isize], mut x: isize) -> isize {
    while a[x as usize] < x {
        x = a[x as usize];
    }
    x
}

fn pathset(a: &mut [isize], x: isize, y: isize, z: isize) {
    let mut p = x;
    while p != y {
        let o = a[p as usize];
        a[p as usize] = z;
        p = o;
    }
}

fn insertion_sort_by_key(order: &mut [usize], key: &[i64]) {
    for i in 1..order.len() {
        let v = order[i];
        let mut j = i;
        while j > 0 && key[order[j - 1]] > key[v] {
            order[j] = order[j - 1];
            j -= 1;
        }
        order[j] = v;
    }
}

struct SortedBounds {
    bounds: Vec<i64>,
    minrank: Vec<usize>,
    maxrank: Vec<usize>,
    nb: usize,
}

fn sortit(
    mins: &[i64],
    maxs: &[i64],
    minsorted: &mut [usize],
    maxsorted: &mut [usize],
) -> SortedBounds {
    insertion_sort_by_key(minsorted, mins);
    insertion_sort_by_key(maxsorted, maxs);
    let n = mins.len();
    let mut bounds = vec![0i64; 2 * n + 2];
    let mut minrank = vec![0usize; n];
    let mut maxrank = vec![0usize; n];

    let mut min = mins[minsorted[0]];
    let mut max = maxs[maxsorted[0]] + 1;
    let mut last = min - 2;
    bounds[0] = last;
    let (mut i, mut j, mut nb) = (0usize, 0usize, 0usize);
    loop {
        if i < n && min <= max {
            if min != last {
                nb += 1;
                last = min;
                bounds[nb] = last;
            }
            minrank[minsorted[i]] = nb;
            i += 1;
            if i < n {
                min = mins[minsorted[i]];
            }
        } else {
            if max != last {
                nb += 1;
                last = max;
                bounds[nb] = last;
            }
            maxrank[maxsorted[j]] = nb;
            j += 1;
            if j == n {
                break;
            }
            max = maxs[maxsorted[j]] + 1;
        }
    }
    bounds[nb + 1] = bounds[nb] + 2;
    bounds.truncate(nb + 2);
    SortedBounds { bounds, minrank, maxrank, nb }
}

fn filter_lower(sb: &SortedBounds, maxsorted: &[usize], mins: &mut [i64]) -> Option<bool> {
    let nb = sb.nb;
    let bounds = &sb.bounds;
    let mut t = vec![0isize; nb + 2];
    let mut h = vec![0isize; nb + 2];
    let mut d = vec![0i64; nb + 2];
    for i in 1..=nb + 1 {
        t[i] = i as isize - 1;
        h[i] = i as isize - 1;
        d[i] = bounds[i] - bounds[i - 1];
    }
    let mut changed = false;
    for &vi in maxsorted {
        let x = sb.minrank[vi] as isize;
        let y = sb.maxrank[vi] as isize;
        let mut z = pathmax(&t, x + 1);
        let j = t[z as usize];
        d[z as usize] -= 1;
        if d[z as usize] == 0 {
            t[z as usize] = z + 1;
            z = pathmax(&t, t[z as usize]);
            t[z as usize] = j;
        }
        pathset(&mut t, x + 1, z, z);
        if d[z as usize] < bounds[z as usize] - bounds[y as usize] {
            return None;
        }
        if h[x as usize] > x {
            let w = pathmax(&h, h[x as usize]);
            mins[vi] = bounds[w as usize];
            changed = true;
            pathset(&mut h, x, w, w);
        }
        if d[z as usize] == bounds[z as usize] - bounds[y as usize] {
            let hy = h[y as usize];
            pathset(&mut h, hy, j - 1, y);
            h[y as usize] = j - 1;
        }
    }
    Some(changed)
}

fn filter_upper(sb: &SortedBounds, minsorted: &[usize], maxs: &mut [i64]) -> Option<bool> {
    let nb = sb.nb;
    let bounds = &sb.bounds;
    let mut t = vec![0isize; nb + 2];
    let mut h = vec![0isize; nb + 2];
    let mut d = vec![0i64; nb + 2];
    for i in 0..=nb {
        t[i] = i as isize + 1;
        h[i] = i as isize + 1;
        d[i] = bounds[i + 1] - bounds[i];
    }
    let mut changed = false;
    for &vi in minsorted.iter().rev() {
        let x = sb.maxrank[vi] as isize;
        let y = sb.minrank[vi] as isize;
        let mut z = pathmin(&t, x - 1);
        let j = t[z as usize];
        d[z as usize] -= 1;
        if d[z as usize] == 0 {
            t[z as usize] = z - 1;
            z = pathmin(&t, t[z as usize]);
            t[z as usize] = j;
        }
        pathset(&mut t, x - 1, z, z);
        if d[z as usize] < bounds[y as usize] - bounds[z as usize] {
            return None;
        }
        if h[x as usize] < x {
            let w = pathmin(&h, h[x as usize]);
            maxs[vi] = bounds[w as usize] - 1;
            changed = true;
            pathset(&mut h, x, w, w);
        }
        if d[z as usize] == bounds[y as usize] - bounds[z as usize] {
            let hy = h[y as usize];
            pathset(&mut h, hy, j + 1, y);
            h[y as usize] = j + 1;
        }
    }
    Some(changed)
}

/// One bounds-consistency round on a local copy of the intervals. Returns
/// None when a Hall interval is over-subscribed (no solution).
pub(crate) fn alldiff_bounds_round(
    mins: &mut [i64],
    maxs: &mut [i64],
    minsorted: &mut [usize],
    maxsorted: &mut [usize],
) -> Option<bool> {
    let sb = sortit(mins, maxs, minsorted, maxsorted);
    let low = filter_lower(&sb, maxsorted, mins)?;
    let up = filter_upper(&sb, minsorted, maxs)?;
    Some(low || up)
}

/// Bounds-complete alldifferent. The sort orders persist across executions,
/// so re-sorting the nearly-sorted arrays of a later execution is cheap;
/// the orders are only a hint and need no trailing.
pub struct DistinctBounds<V> {
    views: Vec<V>,
    minsorted: Vec<usize>,
    maxsorted: Vec<usize>,
}

impl<V: BoxView> DistinctBounds<V> {
    pub fn new(views: Vec<V>) -> Self {
        assert!(!views.is_empty());
        let n = views.len();
        DistinctBounds {
            views,
            minsorted: (0..n).collect(),
            maxsorted: (0..n).collect(),
        }
    }
}

impl<V: BoxView> Propagator for DistinctBounds<V> {
    fn execute(&mut self, s: &mut DomainStore) -> Result<Status> {
        let n = self.views.len();
        s.begin_pass();
        let mut mins = vec![0i64; n];
        let mut maxs = vec![0i64; n];
        for (i, v) in self.views.iter().enumerate() {
            mins[i] = v.get_min(s)?;
            maxs[i] = v.get_max(s)?;
        }
        let before = (mins.clone(), maxs.clone());
        // the filtering runs on local copies to its own fixpoint
        loop {
            match alldiff_bounds_round(&mut mins, &mut maxs, &mut self.minsorted, &mut self.maxsorted)
            {
                None => {
                    s.fail();
                    return Ok(Status::Failed);
                }
                Some(true) => continue,
                Some(false) => break,
            }
        }
        let u0 = s.counters().domain_updates.get();
        for (i, v) in self.views.iter().enumerate() {
            if mins[i] > before.0[i] && !v.upd_min(s, mins[i])? {
                return Ok(Status::Failed);
            }
            if maxs[i] < before.1[i] && !v.upd_max(s, maxs[i])? {
                return Ok(Status::Failed);
            }
        }
        if s.counters().domain_updates.get() == u0 && mins == before.0 && maxs == before.1 {
            Ok(Status::Idempotent)
        } else {
            Ok(Status::Suspend)
        }
    }

    fn subscriptions(&self, s: &DomainStore) -> Vec<(VarId, Event)> {
        let mut out = Vec::new();
        for v in &self.views {
            out.extend(bound_triggers(v, s));
        }
        out.sort();
        out.dedup();
        out
    }

    fn movable_triggers(&self) -> bool {
        self.views.iter().any(BoxView::triggers_can_move)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Store;
    use crate::models::SeededRng;
    use crate::views::ops::VarView;

    /// Reference bounds filtering by explicit Hall-interval fixpoint.
    fn naive_bounds(mut mins: Vec<i64>, mut maxs: Vec<i64>) -> Option<(Vec<i64>, Vec<i64>)> {
        let n = mins.len();
        loop {
            let mut changed = false;
            for i in 0..n {
                if mins[i] > maxs[i] {
                    return None;
                }
            }
            let los: Vec<i64> = mins.clone();
            let his: Vec<i64> = maxs.clone();
            for &a in &los {
                for &b in &his {
                    if a > b {
                        continue;
                    }
                    let size = (b - a + 1) as usize;
                    let inside: Vec<usize> =
                        (0..n).filter(|&i| a <= mins[i] && maxs[i] <= b).collect();
                    if inside.len() > size {
                        return None;
                    }
                    if inside.len() == size {
                        for i in 0..n {
                            if inside.contains(&i) {
                                continue;
                            }
                            if a <= mins[i] && mins[i] <= b {
                                mins[i] = b + 1;
                                changed = true;
                            }
                            if a <= maxs[i] && maxs[i] <= b {
                                maxs[i] = a - 1;
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                return Some((mins, maxs));
            }
        }
    }

    fn run_round_to_fixpoint(mins: &[i64], maxs: &[i64]) -> Option<(Vec<i64>, Vec<i64>)> {
        let n = mins.len();
        let mut m = mins.to_vec();
        let mut x = maxs.to_vec();
        let mut mo: Vec<usize> = (0..n).collect();
        let mut xo: Vec<usize> = (0..n).collect();
        loop {
            let changed = alldiff_bounds_round(&mut m, &mut x, &mut mo, &mut xo)?;
            if !changed {
                return Some((m, x));
            }
        }
    }

    #[test]
    fn saturated_pair_forces_third_out() {
        let (m, x) = run_round_to_fixpoint(&[1, 1, 1], &[2, 2, 3]).unwrap();
        assert_eq!((m[2], x[2]), (3, 3));
        assert_eq!((m[0], x[0]), (1, 2));
    }

    #[test]
    fn oversubscribed_hall_interval_fails() {
        assert!(run_round_to_fixpoint(&[1, 1, 1], &[2, 2, 2]).is_none());
    }

    #[test]
    fn matches_naive_reference_on_random_instances() {
        let mut rng = SeededRng::new(0xa11d1ff);
        for _case in 0..4000 {
            let n = 1 + (rng.next_u32() % 7) as usize;
            let mut mins = Vec::with_capacity(n);
            let mut maxs = Vec::with_capacity(n);
            for _ in 0..n {
                let lo = (rng.next_u32() % 10) as i64;
                let w = (rng.next_u32() % 5) as i64;
                mins.push(lo);
                maxs.push(lo + w);
            }
            let fast = run_round_to_fixpoint(&mins, &maxs);
            let slow = naive_bounds(mins.clone(), maxs.clone());
            match (fast, slow) {
                (None, None) => {}
                (Some((fm, fx)), Some((sm, sx))) => {
                    assert_eq!(fm, sm, "mins differ on {mins:?} {maxs:?}");
                    assert_eq!(fx, sx, "maxs differ on {mins:?} {maxs:?}");
                }
                (f, s) => panic!(
                    "feasibility disagrees on {mins:?} {maxs:?}: fast={:?} slow={:?}",
                    f.is_some(),
                    s.is_some()
                ),
            }
        }
    }

    #[test]
    fn propagates_through_the_store() {
        let mut s = Store::new();
        let x1 = s.new_var(1, 2).unwrap();
        let x2 = s.new_var(1, 2).unwrap();
        let x3 = s.new_var(1, 3).unwrap();
        let p = DistinctBounds::new(vec![VarView(x1), VarView(x2), VarView(x3)]);
        assert!(s.post(Box::new(p)).unwrap());
        assert_eq!((s.dom().min(x3), s.dom().max(x3)), (3, 3));
    }

    #[test]
    fn ground_distinct_is_idempotent_and_overlap_fails() {
        let mut s = Store::new();
        let a = s.new_var(1, 1).unwrap();
        let b = s.new_var(2, 2).unwrap();
        let mut p = DistinctBounds::new(vec![VarView(a), VarView(b)]);
        assert_eq!(p.execute(s.dom_mut()).unwrap(), Status::Idempotent);

        let mut s = Store::new();
        let a = s.new_var(1, 2).unwrap();
        let b = s.new_var(1, 2).unwrap();
        let c = s.new_var(1, 2).unwrap();
        let mut p = DistinctBounds::new(vec![VarView(a), VarView(b), VarView(c)]);
        assert_eq!(p.execute(s.dom_mut()).unwrap(), Status::Failed);
    }
}

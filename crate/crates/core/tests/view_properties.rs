//! Cross-cutting view properties: non-persistent updates, monotone reads,
//! and the call-counting difference between the two dispatch modes.

use boxview_core::engine::Store;
use boxview_core::models::SeededRng;
use boxview_core::views::ops::{AddView, VarView};
use boxview_core::views::{build_dynamic, build_static, BoxView, ViewNode};
use boxview_core::VarId;

#[test]
fn composite_updates_need_not_persist() {
    // y1, y2 in {1,2}: requesting max <= 3 on y1+y2 changes no variable
    // domain, so the recomputed expression max is still 4. Contraction and
    // soundness hold; persistence does not.
    let mut s = Store::new();
    let y1 = s.new_var(1, 2).unwrap();
    let y2 = s.new_var(1, 2).unwrap();
    let view = AddView { x: VarView(y1), y: VarView(y2) };
    assert!(view.upd_max(s.dom_mut(), 3).unwrap());
    assert_eq!(view.get_max(s.dom()).unwrap(), 4, "update did not persist");
    assert_eq!(s.dom().dom(y1), boxview_core::Interval::new(1, 2));
    assert_eq!(s.dom().dom(y2), boxview_core::Interval::new(1, 2));
}

fn random_tree(rng: &mut SeededRng, nvars: usize, depth: usize) -> ViewNode {
    if depth == 0 {
        return if rng.next_u32() % 4 == 0 {
            ViewNode::constant(rng.next_in(-2, 2))
        } else {
            ViewNode::var(VarId::from_index(rng.next_u32() as usize % nvars))
        };
    }
    let a = random_tree(rng, nvars, depth - 1);
    let b = random_tree(rng, nvars, depth - 1);
    match rng.next_u32() % 10 {
        0 => ViewNode::add(a, b),
        1 => ViewNode::sub(a, b),
        2 => ViewNode::mul(a, b),
        3 => ViewNode::min2(a, b),
        4 => ViewNode::max2(a, b),
        5 => ViewNode::neg(a),
        6 => ViewNode::abs(a),
        7 => ViewNode::sqr(a),
        8 => ViewNode::reif_leq(a, b),
        _ => ViewNode::sum(vec![a, b]),
    }
}

#[test]
fn updates_never_widen_any_view() {
    // any update sequence leaves every view over the same store with a
    // min that has not decreased and a max that has not increased
    let mut rng = SeededRng::new(0x5eed);
    for _ in 0..300 {
        let mut s = Store::new();
        let nvars = 3;
        for i in 0..nvars {
            let lo = rng.next_in(-5, 5);
            s.new_var_named(&format!("v{i}"), lo, rng.next_in(lo, 5)).unwrap();
        }
        let observers: Vec<_> = (0..4)
            .map(|_| build_static(&random_tree(&mut rng, nvars, 2), s.dom()).unwrap())
            .collect();
        let actor = build_static(&random_tree(&mut rng, nvars, 2), s.dom()).unwrap();
        let before: Vec<_> = observers
            .iter()
            .map(|o| (o.get_min(s.dom()), o.get_max(s.dom())))
            .collect();
        let (alo, ahi) = match (actor.get_min(s.dom()), actor.get_max(s.dom())) {
            (Ok(l), Ok(h)) => (l, h),
            _ => continue,
        };
        let bound = rng.next_in(alo.saturating_sub(1), ahi.saturating_add(1));
        let ok = if rng.next_u32() % 2 == 0 {
            actor.upd_min(s.dom_mut(), bound)
        } else {
            actor.upd_max(s.dom_mut(), bound)
        };
        if !matches!(ok, Ok(true)) {
            continue;
        }
        for (o, b) in observers.iter().zip(before) {
            if let ((Ok(ol), Ok(oh)), (Ok(bl), Ok(bh))) =
                ((o.get_min(s.dom()), o.get_max(s.dom())), b)
            {
                assert!(ol >= bl, "observed min decreased");
                assert!(oh <= bh, "observed max increased");
            }
        }
    }
}

#[test]
fn dynamic_views_count_calls_static_views_do_not() {
    let mut s = Store::new();
    let x = s.new_var(1, 3).unwrap();
    let y = s.new_var(2, 5).unwrap();
    let node = ViewNode::add(ViewNode::var(x), ViewNode::mul(ViewNode::var(y), ViewNode::constant(2)));

    let stat = build_static(&node, s.dom()).unwrap();
    let before = s.dom().counters().view_calls.get();
    let _ = stat.get_min(s.dom()).unwrap();
    let _ = stat.upd_max(s.dom_mut(), 12).unwrap();
    assert_eq!(s.dom().counters().view_calls.get(), before, "static dispatch counts no calls");

    let dynv = build_dynamic(&node, s.dom()).unwrap();
    let before = s.dom().counters().view_calls.get();
    let _ = dynv.get_min(s.dom()).unwrap();
    assert!(s.dom().counters().view_calls.get() > before, "dynamic dispatch counts calls");

    // the build-level audit mode counts both realizations uniformly
    s.dom_mut().set_uniform_call_counting(true);
    let audited = build_static(&node, s.dom()).unwrap();
    let before = s.dom().counters().view_calls.get();
    s.dom().begin_pass();
    let _ = audited.get_min(s.dom()).unwrap();
    assert!(s.dom().counters().view_calls.get() > before);
}

#[test]
fn trigger_maps_expand_to_variable_events() {
    use boxview_core::views::trigger_map;
    use boxview_core::Event;
    let mut s = Store::new();
    let x = s.new_var(0, 5).unwrap();
    let y = s.new_var(0, 5).unwrap();

    let add = build_static(&ViewNode::add(ViewNode::var(x), ViewNode::var(y)), s.dom()).unwrap();
    let mut both = trigger_map(&add, s.dom(), Event::MinChange);
    both.extend(trigger_map(&add, s.dom(), Event::MaxChange));
    both.sort();
    both.dedup();
    assert_eq!(
        both,
        vec![
            (x, Event::MinChange),
            (x, Event::MaxChange),
            (y, Event::MinChange),
            (y, Event::MaxChange),
        ]
    );

    let neg = build_static(&ViewNode::neg(ViewNode::var(x)), s.dom()).unwrap();
    assert_eq!(trigger_map(&neg, s.dom(), Event::MinChange), vec![(x, Event::MaxChange)]);

    let k = build_static(&ViewNode::constant(7), s.dom()).unwrap();
    assert!(trigger_map(&k, s.dom(), Event::MinChange).is_empty());
}

#[test]
fn ite_trigger_map_checks_groundness_before_dropping_a_branch() {
    use boxview_core::views::trigger_map;
    use boxview_core::Event;
    let mut s = Store::new();
    let c = s.new_var(0, 1).unwrap();
    let t = s.new_var(1, 2).unwrap();
    let f = s.new_var(5, 6).unwrap();
    let ite = build_static(
        &ViewNode::ite(ViewNode::var(c), ViewNode::var(t), ViewNode::var(f)),
        s.dom(),
    )
    .unwrap();

    let open = trigger_map(&ite, s.dom(), Event::MinChange);
    assert!(open.contains(&(t, Event::MinChange)) && open.contains(&(f, Event::MinChange)));
    assert!(open.contains(&(c, Event::MinChange)) && open.contains(&(c, Event::MaxChange)));

    // while the condition is open the hull covers both branches
    assert_eq!(ite.get_min(s.dom()).unwrap(), 1);
    assert_eq!(ite.get_max(s.dom()).unwrap(), 6);

    // ground the condition: only then may the dead branch be dropped;
    // direct reads after a mutation need a fresh evaluation pass
    s.dom_mut().set_max(c, 0);
    s.dom().begin_pass();
    let closed = trigger_map(&ite, s.dom(), Event::MinChange);
    assert!(closed.contains(&(f, Event::MinChange)));
    assert!(!closed.iter().any(|(v, _)| *v == t), "then-branch trigger dropped");
    assert!(!closed.iter().any(|(v, _)| *v == c), "ground condition has no events left");
    assert_eq!(ite.get_min(s.dom()).unwrap(), 5);
}

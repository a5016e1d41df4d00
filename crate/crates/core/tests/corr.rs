use std::time::Instant;

use scalelab::automata::{builtin, full_sym_level, level_quotient, odometer, SelfSimilarGroup};
use scalelab::corr::{
    build_labelling, check_compatible, extract_selfreplicating, horosphere_transitivity_check, relabel_to_standard,
    scale_apply, weak_criterion, ScaleElement, ScaleGroupData,
};
use scalelab::gfa::{build_coset_tree, make_gfa, profile_residue, FSeqElement, FiniteGroup, GfaElement, TidyProfile};
use scalelab::trees::{EdgeLabelling, TreeAction, UnrootedVertex, Window};

fn data(g: SelfSimilarGroup, r: i64, d: i64) -> ScaleGroupData {
    ScaleGroupData::new(g, r, d).unwrap()
}

fn v(q: usize, s: &str) -> UnrootedVertex {
    UnrootedVertex::parse(q, s).unwrap()
}

/// Little-endian increment of the digits below the anchor, carried independently of the automaton.
fn increment_below(q: usize, anchor: i64, w: &UnrootedVertex) -> UnrootedVertex {
    let mut digits: Vec<u8> = (anchor + 1..=w.level()).map(|i| w.digit_at(i)).collect();
    for d in digits.iter_mut() {
        *d += 1;
        if (*d as usize) < q {
            break;
        }
        *d = 0;
    }
    UnrootedVertex::new(q, w.level(), digits).unwrap()
}

#[test]
fn scale_apply_examples() {
    let e = data(odometer(3).unwrap(), 2, 3);
    let window = e.window();
    for w in window.vertices() {
        if w.level() < window.bottom {
            assert_eq!(scale_apply(&e, &ScaleElement::translation(1), &w).unwrap(), w.x0_translate(1));
        }
        assert_eq!(scale_apply(&e, &ScaleElement::identity(), &w).unwrap(), w);
        let a = e.parse_element("a").unwrap();
        assert_eq!(scale_apply(&e, &a, &w).unwrap(), increment_below(3, -2, &w));
    }
    // on the spine the carry-free increment introduces a single digit 1 just below the anchor
    let a = e.parse_element("a").unwrap();
    assert_eq!(scale_apply(&e, &a, &UnrootedVertex::spine(3, 2)).unwrap(), v(3, "2:1000"));
    // translate first, then the elliptic part
    let g = e.parse_element("a * t^1").unwrap();
    assert_eq!(g.k, 1);
    assert_eq!(scale_apply(&e, &g, &v(3, "0:12")).unwrap(), v(3, "1:112"));
    assert!(e.parse_element("t a").is_err());
    assert!(scale_apply(&e, &ScaleElement::translation(-1), &UnrootedVertex::spine(3, -2)).is_err());
    assert!(scale_apply(&e, &ScaleElement::translation(1), &UnrootedVertex::spine(3, 3)).is_err());
    assert!(scale_apply(&e, &ScaleElement::translation(3), &UnrootedVertex::spine(3, 0)).is_err());
}

#[test]
fn scale_elements_shift_busemann_by_translation() {
    let e = data(builtin("grigorchuk").unwrap(), 2, 3);
    let window = e.window();
    for text in ["a", "b c", "a * t^1", "d a * t^-1", "t^2"] {
        let g = e.parse_element(text).unwrap();
        for w in window.vertices() {
            if let Ok(img) = scale_apply(&e, &g, &w) {
                assert_eq!(img.busemann() - w.busemann(), g.k, "{text} on {w}");
                assert_eq!(e.action(&g).act_inverse(&img).unwrap(), w);
            }
        }
    }
}

fn round_trip(name: &str) {
    let g = builtin(name).unwrap();
    let e = data(g.clone(), 1, 4);
    let elems = e.generators();
    let actions: Vec<_> = elems.iter().map(|x| e.action(x)).collect();
    let gens: Vec<&dyn TreeAction> = actions.iter().map(|a| a as &dyn TreeAction).collect();
    let v0 = UnrootedVertex::spine(g.q(), 0);
    for d in 1..=4usize {
        let ex = extract_selfreplicating(&gens, &v0, d, &e.window()).unwrap();
        let lq = level_quotient(&g, d).unwrap();
        assert_eq!(ex.group.order().unwrap(), lq.group.order().unwrap(), "{name} d={d}");
        assert_eq!(ex.group.fingerprint().unwrap(), lq.group.fingerprint().unwrap(), "{name} d={d}");
        for p in &lq.generator_images {
            assert!(ex.group.contains(p).unwrap(), "{name} d={d}");
        }
        assert!(lq.group.contains_group(&ex.group).unwrap());
        assert_eq!(ex.index().unwrap(), g.q());
    }
}

#[test]
fn round_trip_odometers() {
    round_trip("odometer(2)");
    round_trip("odometer(3)");
}

#[test]
fn round_trip_grigorchuk() {
    round_trip("grigorchuk");
}

#[test]
fn round_trip_gupta_sidki() {
    let t = Instant::now();
    round_trip("gupta_sidki_3");
    assert!(t.elapsed().as_secs() < 30);
}

#[test]
fn extraction_needs_transitivity() {
    let e = data(odometer(2).unwrap(), 2, 2);
    let x0 = e.action(&ScaleElement::translation(1));
    let id = e.action(&ScaleElement::identity());
    let v0 = UnrootedVertex::spine(2, 0);
    assert!(extract_selfreplicating(&[&x0], &v0, 1, &e.window()).is_err());
    assert!(extract_selfreplicating(&[&id], &v0, 1, &e.window()).is_err());
}

#[test]
fn horosphere_transitivity() {
    let full = data(full_sym_level(2).unwrap(), 2, 2);
    let acts: Vec<_> = full.generators().iter().map(|x| full.action(x)).collect();
    let gens: Vec<&dyn TreeAction> = acts.iter().map(|a| a as &dyn TreeAction).collect();
    for n in -2..=2 {
        assert!(horosphere_transitivity_check(&gens, n, &full.window()).unwrap());
    }
    let odo = data(odometer(3).unwrap(), 1, 2);
    let acts: Vec<_> = odo.generators().iter().map(|x| odo.action(x)).collect();
    let gens: Vec<&dyn TreeAction> = acts.iter().map(|a| a as &dyn TreeAction).collect();
    assert!(horosphere_transitivity_check(&gens, 1, &odo.window()).unwrap());
    let x0 = odo.action(&ScaleElement::translation(1));
    assert!(!horosphere_transitivity_check(&[&x0], 1, &odo.window()).unwrap());
    assert!(horosphere_transitivity_check(&gens, 5, &odo.window()).is_err());
}

fn odometer_transversal(e: &ScaleGroupData) -> Vec<ScaleElement> {
    // a^{i q^R} adds i at the first position below ṽ₀
    let q = e.q();
    (0..q)
        .map(|i| {
            let word = vec!["a"; i * q.pow(e.r as u32)].join(" ");
            e.parse_element(&format!("{word} * t^1")).unwrap()
        })
        .collect()
}

#[test]
fn digit_preserving_transversal_gives_standard_labelling() {
    let e = data(full_sym_level(3).unwrap(), 2, 2);
    let xs: Vec<ScaleElement> = (0..3)
        .map(|i| e.parse_element(&format!("{} * t^1", vec!["s1_2"; i].join(" "))).unwrap())
        .collect();
    let acts: Vec<_> = xs.iter().map(|x| e.action(x)).collect();
    let t: Vec<&dyn TreeAction> = acts.iter().map(|a| a as &dyn TreeAction).collect();
    let v0 = UnrootedVertex::spine(3, 0);
    assert!(weak_criterion(&t, &v0).unwrap());
    let l = build_labelling(&t, &v0, &e.window()).unwrap();
    assert_eq!(l.labels, EdgeLabelling::standard(&e.window()));
    assert_eq!(l.spine.len() as i64, e.window().bottom - e.window().top + 1);
}

#[test]
fn transversal_must_hit_distinct_children() {
    let e = data(odometer(2).unwrap(), 1, 2);
    let x0 = e.action(&ScaleElement::translation(1));
    let v0 = UnrootedVertex::spine(2, 0);
    assert!(!weak_criterion(&[&x0, &x0], &v0).unwrap());
    assert!(build_labelling(&[&x0, &x0], &v0, &e.window()).is_err());
    assert!(build_labelling(&[&x0], &v0, &e.window()).is_err());
}

#[test]
fn constructed_labelling_is_compatible() {
    let e = data(odometer(3).unwrap(), 2, 2);
    let xs = odometer_transversal(&e);
    let acts: Vec<_> = xs.iter().map(|x| e.action(x)).collect();
    let t: Vec<&dyn TreeAction> = acts.iter().map(|a| a as &dyn TreeAction).collect();
    let v0 = UnrootedVertex::spine(3, 0);
    let l = build_labelling(&t, &v0, &e.window()).unwrap();
    assert!(l.failing_witness(&t).unwrap().is_none());
    let gacts: Vec<_> = e.generators().iter().map(|x| e.action(x)).collect();
    let gens: Vec<&dyn TreeAction> = gacts.iter().map(|a| a as &dyn TreeAction).collect();
    let report = check_compatible(&l.labels, &e.window(), &gens, 200, 7).unwrap();
    assert!(report.ok(), "{report}");
    assert!(!report.witnesses.is_empty());
}

#[test]
fn standard_labelling_compatible_with_full_group() {
    let e = data(full_sym_level(2).unwrap(), 2, 2);
    let acts: Vec<_> = e.generators().iter().map(|x| e.action(x)).collect();
    let gens: Vec<&dyn TreeAction> = acts.iter().map(|a| a as &dyn TreeAction).collect();
    let report = check_compatible(&EdgeLabelling::standard(&e.window()), &e.window(), &gens, 400, 1).unwrap();
    assert!(report.ok(), "{report}");
}

#[test]
fn permuted_subtree_labels_fail_for_odometer() {
    let e = data(odometer(3).unwrap(), 1, 2);
    let window = e.window();
    let acts: Vec<_> = e.generators().iter().map(|x| e.action(x)).collect();
    let gens: Vec<&dyn TreeAction> = acts.iter().map(|a| a as &dyn TreeAction).collect();
    let standard = EdgeLabelling::standard(&window);
    assert!(check_compatible(&standard, &window, &gens, 10_000, 0).unwrap().ok());
    // a transposition of two child labels below 0:1 cannot be matched by a cyclic stabilizer
    let mut bad = standard.clone();
    bad.set(v(3, "0:1"), vec![0, 2, 1, 3]);
    let report = check_compatible(&bad, &window, &gens, 10_000, 0).unwrap();
    assert!(!report.ok());
    assert!(report.counterexample.is_some());
}

#[test]
fn relabelling_to_standard() {
    let window = Window::new(2, 1, 2);
    let standard = EdgeLabelling::standard(&window);
    let phi = relabel_to_standard(&standard, &window).unwrap();
    assert!(phi.iter().all(|(a, b)| a == b));
    assert_eq!(phi.len() as u128, window.vertex_count());
    // swapping the labels at the root moves the 0-path onto the other child
    let mut moved = standard.clone();
    moved.set(window.root(), vec![1, 0, 2]);
    let phi = relabel_to_standard(&moved, &window).unwrap();
    assert_eq!(phi[&v(2, "0:1")], UnrootedVertex::spine(2, 0));
    assert_eq!(phi[&v(2, "2:100")], UnrootedVertex::spine(2, 2));
    assert_eq!(phi[&v(2, "2:11")], v(2, "2:111"));
    assert_eq!(phi[&UnrootedVertex::spine(2, 1)], v(2, "1:10"));
    let mut broken = standard;
    broken.set(window.root(), vec![0, 0, 2]);
    assert!(relabel_to_standard(&broken, &window).is_err());
}

fn gfa_setup(d: i64) -> scalelab::gfa::CosetTree {
    let f = FiniteGroup::sym3();
    let ctx = make_gfa(f.clone(), f.trivial()).unwrap();
    let pf = TidyProfile::band(&ctx, f.generate(&[1]), 1).unwrap();
    build_coset_tree(&ctx, &pf, Window::new(6, 1, d)).unwrap()
}

#[test]
fn gfa_coset_representatives_give_standard_labelling() {
    let tree = gfa_setup(2);
    let xs: Vec<GfaElement> = tree.transversal().iter().map(|g| GfaElement::new(g.clone(), 1)).collect();
    let acts: Vec<_> = xs.iter().map(|x| tree.action(x)).collect();
    let t: Vec<&dyn TreeAction> = acts.iter().map(|a| a as &dyn TreeAction).collect();
    let v0 = UnrootedVertex::spine(6, 0);
    let l = build_labelling(&t, &v0, &tree.window).unwrap();
    assert_eq!(l.labels, EdgeLabelling::standard(&tree.window));
}

#[test]
fn gfa_extraction_matches_profile_residue() {
    // moving ṽ₀ to its siblings passes through horosphere 2
    let tree = gfa_setup(3);
    let alpha = GfaElement::alpha(1);
    let s = GfaElement::new(FSeqElement::single(0, 3), 0);
    let t = GfaElement::new(FSeqElement::single(0, 1), 0);
    let acts = [tree.action(&alpha), tree.action(&s), tree.action(&t)];
    let gens: Vec<&dyn TreeAction> = acts.iter().map(|a| a as &dyn TreeAction).collect();
    for d in 1..=2usize {
        let ex = extract_selfreplicating(&gens, &UnrootedVertex::spine(6, 0), d, &tree.window).unwrap();
        let res = profile_residue(&tree.profile, d).unwrap();
        assert_eq!(ex.group.fingerprint().unwrap(), res.report.fingerprint, "d={d}");
        assert_eq!(ex.index().unwrap(), 6);
    }
    let report = check_compatible(&EdgeLabelling::standard(&tree.window), &tree.window, &gens, 60, 3).unwrap();
    assert!(report.ok(), "{report}");
}

#[test]
fn searched_transversal_builds_a_compatible_labelling() {
    for name in ["odometer(2)", "grigorchuk", "gupta_sidki_3"] {
        let e = data(builtin(name).unwrap(), 1, 3);
        let xs = e.transversal().unwrap();
        let acts: Vec<_> = xs.iter().map(|x| e.action(x)).collect();
        let t: Vec<&dyn TreeAction> = acts.iter().map(|a| a as &dyn TreeAction).collect();
        let v0 = UnrootedVertex::spine(e.q(), 0);
        assert!(weak_criterion(&t, &v0).unwrap(), "{name}");
        let l = build_labelling(&t, &v0, &e.window()).unwrap();
        assert_eq!(l.failing_witness(&t).unwrap(), None, "{name}");
        let gens: Vec<_> = e.generators().iter().map(|g| e.action(g)).collect();
        let g: Vec<&dyn TreeAction> = gens.iter().map(|a| a as &dyn TreeAction).collect();
        let report = check_compatible(&l.labels, &e.window(), &g, 30, 5).unwrap();
        assert!(report.ok(), "{name}: {report}");
    }
}

#[test]
fn round_trip_report() {
    let r = scalelab::corr::correspondence_round_trip(&builtin("grigorchuk").unwrap(), 1, 3).unwrap();
    assert!(r.ok());
    let orders: Vec<&str> = r.levels.iter().map(|l| l.order.as_str()).collect();
    assert_eq!(orders, ["2", "8", "128"]);
    assert!(r.levels.iter().all(|l| l.index == 2));
}

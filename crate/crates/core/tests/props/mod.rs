//! Property suites shared by the `properties` and `acceptance` targets. Each suite runs a
//! fixed number of cases per property from a deterministic seed and returns the case count.

#![allow(dead_code)]

use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use scalelab::automata::{builtin, SelfSimilarGroup};
use scalelab::corr::{scale_apply, ScaleElement, ScaleGroupData};
use scalelab::gfa::{build_coset_tree, make_gfa, CosetTree, FSeqElement, FiniteGroup, GfaElement, TidyProfile};
use scalelab::padic::{horosphere_label, AffineElement, PAdicWindow};
use scalelab::perm::{PermGroup, Permutation};
use scalelab::portraits::PortraitElement;
use scalelab::trees::{subtree_iso, subtree_iso_inv, EdgeLabelling, TreeAction, UnrootedVertex, Window};

pub const CASES: u32 = 24;

pub type Suite = fn(u32) -> Result<u32, String>;

pub fn suites() -> Vec<(&'static str, Suite)> {
    vec![
        ("perm", perm_suite),
        ("portraits+automata sections", section_suite),
        ("trees+corr horospheres", horosphere_suite),
        ("gfa+padic action laws", action_suite),
    ]
}

fn check<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<u32, String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())?;
    Ok(cases)
}

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|images| Permutation::from_images(images).unwrap())
}

fn perms(max: usize, k: usize) -> impl Strategy<Value = Vec<Permutation>> {
    (1..=max).prop_flat_map(move |n| proptest::collection::vec(perm(n), k))
}

fn err(e: scalelab::Error) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

pub fn perm_suite(cases: u32) -> Result<u32, String> {
    let mut total = check(cases, perms(9, 3), |p| {
        let (g, h, k) = (&p[0], &p[1], &p[2]);
        let lhs = g.compose(h).map_err(err)?.compose(k).map_err(err)?;
        let rhs = g.compose(&h.compose(k).map_err(err)?).map_err(err)?;
        prop_assert_eq!(lhs, rhs);
        prop_assert!(g.compose(&g.inverse()).map_err(err)?.is_identity());
        prop_assert!(g.pow(g.order() as i64).is_identity());
        prop_assert_eq!(g.pow(-1), g.inverse());
        Ok(())
    })?;
    total += check(cases, (perms(7, 2), 0usize..7), |(p, x)| {
        let n = p[0].degree();
        let g = PermGroup::new(n, p).map_err(err)?;
        let x = x % n;
        let order = g.order().map_err(err)?;
        let stab = g.stabilizer(x).order().map_err(err)?;
        prop_assert_eq!(order, stab * g.orbit(x).len());
        let mut seen: Vec<usize> = g.orbits().concat();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
        Ok(())
    })?;
    total += check(cases, perms(8, 3), |p| {
        let n = p[0].degree();
        let (c, p) = (p[2].clone(), p[..2].to_vec());
        let g = PermGroup::new(n, p.clone()).map_err(err)?;
        let conj = PermGroup::new(n, p.iter().map(|x| x.conjugate_by(&c)).collect()).map_err(err)?;
        prop_assert_eq!(g.fingerprint().map_err(err)?, conj.fingerprint().map_err(err)?);
        if g.is_transitive() {
            for system in g.minimal_blocks().map_err(err)? {
                prop_assert!(g.generators().iter().all(|x| system.is_preserved_by(x)));
                let covered: usize = system.blocks.iter().map(Vec::len).sum();
                prop_assert_eq!(covered, n);
            }
        }
        Ok(())
    })?;
    Ok(total)
}

fn automaton_groups() -> &'static [SelfSimilarGroup] {
    static GROUPS: OnceLock<Vec<SelfSimilarGroup>> = OnceLock::new();
    GROUPS.get_or_init(|| {
        ["grigorchuk", "gupta_sidki_3", "odometer(3)", "full_sym_level(3)"]
            .iter()
            .map(|n| builtin(n).unwrap())
            .collect()
    })
}

fn word(g: &SelfSimilarGroup) -> impl Strategy<Value = scalelab::automata::GroupWord> {
    let words = g.generator_words();
    proptest::collection::vec((0..words.len(), any::<bool>()), 0..8).prop_map(move |letters| {
        letters
            .into_iter()
            .fold(scalelab::automata::GroupWord::identity(), |acc, (i, inv)| {
                let w = if inv { words[i].inverse() } else { words[i].clone() };
                acc.times(&w)
            })
    })
}

fn group_word_strings() -> impl Strategy<Value = (usize, scalelab::automata::GroupWord, scalelab::automata::GroupWord, Vec<u8>, Vec<u8>)> {
    (0..automaton_groups().len()).prop_flat_map(|i| {
        let g = &automaton_groups()[i];
        let q = g.q() as u8;
        (
            Just(i),
            word(g),
            word(g),
            proptest::collection::vec(0..q, 0..4),
            proptest::collection::vec(0..q, 0..4),
        )
    })
}

fn portrait(q: usize) -> impl Strategy<Value = PortraitElement> {
    let verts = Window::new(q, 2, 2).vertices();
    let n = verts.len();
    (-2i64..=2, proptest::collection::vec((0..n, perm(q)), 0..5)).prop_map(move |(k, entries)| {
        let map = entries.into_iter().map(|(i, p)| (verts[i].clone(), p)).collect();
        PortraitElement::new(q, k, map).unwrap()
    })
}

pub fn section_suite(cases: u32) -> Result<u32, String> {
    let mut total = check(cases, group_word_strings(), |(i, w, _, u, s)| {
        let g = &automaton_groups()[i];
        let (image, section) = g.section_word(&w, &u);
        let whole = g.evaluate(&w, &[u.clone(), s.clone()].concat());
        prop_assert_eq!(whole, [image, g.evaluate(&section, &s)].concat());
        Ok(())
    })?;
    total += check(cases, group_word_strings(), |(i, w1, w2, u, s)| {
        let g = &automaton_groups()[i];
        let x = [u, s].concat();
        prop_assert_eq!(g.evaluate(&w1.times(&w2), &x), g.evaluate(&w1, &g.evaluate(&w2, &x)));
        prop_assert_eq!(g.evaluate(&w1.inverse(), &g.evaluate(&w1, &x)), x);
        Ok(())
    })?;
    total += check(cases, (portrait(3), portrait(3)), |(a, b)| {
        let ab = a.compose(&b).map_err(err)?;
        for x in Window::new(3, 1, 1).vertices() {
            prop_assert_eq!(ab.apply(&x), a.apply(&b.apply(&x)));
            prop_assert_eq!(a.invert().apply(&a.apply(&x)), x.clone());
            prop_assert_eq!(a.apply(&x).busemann(), x.busemann() + a.translation_power());
        }
        Ok(())
    })?;
    // elliptic elements supported on or below the horosphere of v0 fix v0
    let low: Vec<UnrootedVertex> = Window::new(2, -2, 4).vertices();
    let n = low.len();
    let low_portrait = proptest::collection::vec((0..n, perm(2)), 0..6).prop_map(move |entries| {
        let map = entries.into_iter().map(|(i, p)| (low[i].clone(), p)).collect();
        PortraitElement::new(2, 0, map).unwrap()
    });
    total += check(cases, low_portrait, |h| {
        let v0 = UnrootedVertex::spine(2, 2);
        prop_assert_eq!(h.apply(&v0), v0.clone());
        let sec = h.section(&v0).map_err(err)?;
        for x in Window::new(2, -2, 5).vertices().into_iter().filter(|x| x.is_below(&v0)) {
            let st = subtree_iso(&v0, &x).map_err(err)?;
            prop_assert_eq!(h.apply(&x), subtree_iso_inv(&v0, &sec.apply(st.digits())));
        }
        Ok(())
    })?;
    Ok(total)
}

fn vertex() -> impl Strategy<Value = UnrootedVertex> {
    (2usize..=5, -4i64..=4, proptest::collection::vec(0u8..5, 0..6)).prop_map(|(q, level, digits)| {
        let digits = digits.into_iter().map(|d| d % q as u8).collect();
        UnrootedVertex::new(q, level, digits).unwrap()
    })
}

fn scale_data() -> &'static ScaleGroupData {
    static DATA: OnceLock<ScaleGroupData> = OnceLock::new();
    DATA.get_or_init(|| ScaleGroupData::new(builtin("grigorchuk").unwrap(), 2, 3).unwrap())
}

pub fn horosphere_suite(cases: u32) -> Result<u32, String> {
    let mut total = check(cases, (vertex(), -3i64..=3), |(v, k)| {
        let b = v.busemann();
        prop_assert_eq!(v.parent().busemann(), b - 1);
        for (j, c) in v.children().iter().enumerate() {
            prop_assert_eq!(c.busemann(), b + 1);
            prop_assert_eq!(&c.parent(), &v);
            prop_assert_eq!(c.last_digit(), j);
        }
        let t = v.x0_translate(k);
        prop_assert_eq!(t.busemann(), b + k);
        prop_assert_eq!(t.x0_translate(-k), v.clone());
        prop_assert_eq!(v.ancestor_at(b - 2).busemann(), b - 2);
        prop_assert!(v.is_below(&v.ancestor_at(b - 2)));
        Ok(())
    })?;
    let data = scale_data();
    let verts = data.window().vertices();
    total += check(cases, (word(&data.group), -1i64..=1, 0..verts.len(), 0..verts.len()), |(w, k, i, j)| {
        let g = ScaleElement { k, word: w };
        let (u, v) = (&verts[i], &verts[j]);
        if let (Ok(gu), Ok(gv)) = (scale_apply(data, &g, u), scale_apply(data, &g, v)) {
            prop_assert_eq!(gu.busemann(), u.busemann() + k);
            prop_assert_eq!(gu.busemann() - gv.busemann(), u.busemann() - v.busemann());
            prop_assert_eq!(u.is_below(v), gu.is_below(&gv));
        }
        Ok(())
    })?;
    total += check(cases, (2usize..=4, 0i64..=2, 0i64..=2), |(q, r, d)| {
        let window = Window::new(q, r, d);
        let path = EdgeLabelling::standard(&window).check_conditions(&window).map_err(err)?;
        prop_assert!(path.iter().all(UnrootedVertex::is_spine));
        prop_assert_eq!(path.len() as i64, d + r + 1);
        Ok(())
    })?;
    Ok(total)
}

fn band_tree() -> &'static CosetTree {
    static TREE: OnceLock<CosetTree> = OnceLock::new();
    TREE.get_or_init(|| {
        let f = FiniteGroup::sym3();
        let ctx = make_gfa(f.clone(), f.trivial()).unwrap();
        let pf = TidyProfile::band(&ctx, f.generate(&[1]), 1).unwrap();
        build_coset_tree(&ctx, &pf, Window::new(6, 2, 2)).unwrap()
    })
}

fn fseq() -> impl Strategy<Value = FSeqElement> {
    proptest::collection::vec((-2i64..=2, 0usize..6), 0..4).prop_map(FSeqElement::from_entries)
}

fn padic(max_den_power: u32) -> impl Strategy<Value = PAdicWindow> {
    (-60i64..60, 0..=max_den_power).prop_map(|(n, e)| PAdicWindow::from_rational(5, n, 5i64.pow(e), 14).unwrap())
}

fn affine() -> impl Strategy<Value = AffineElement> {
    (padic(1), prop_oneof![Just(1i64), Just(2), Just(3), Just(4), Just(7)], -1i32..=1).prop_map(|(b, u, e)| {
        let (num, den) = if e >= 0 { (u * 5i64.pow(e as u32), 1) } else { (u, 5) };
        AffineElement::new(b, PAdicWindow::from_rational(5, num, den, 14).unwrap()).unwrap()
    })
}

pub fn action_suite(cases: u32) -> Result<u32, String> {
    let tree = band_tree();
    let f = tree.profile.f.clone();
    let verts: Vec<UnrootedVertex> = tree.window.vertices().into_iter().filter(|v| v.level() >= -1).collect();
    let mut total = check(cases, (fseq(), fseq(), 0..verts.len()), |(h1, h2, i)| {
        let v = &verts[i];
        let prod = h1.mul(&f, &h2);
        prop_assert_eq!(tree.act_unbounded(&prod, v), tree.act_unbounded(&h1, &tree.act_unbounded(&h2, v)));
        let lhs = tree.act_alpha(1, &tree.act_unbounded(&h1, v));
        prop_assert_eq!(lhs, tree.act_unbounded(&h1.shift(1), &tree.act_alpha(1, v)));
        prop_assert_eq!(tree.act_unbounded(&h1, v).busemann(), v.busemann());
        Ok(())
    })?;
    total += check(cases, (fseq(), -1i64..=1, fseq(), -1i64..=1, 0..verts.len()), |(h1, k1, h2, k2, i)| {
        let (x, y) = (GfaElement::new(h1, k1), GfaElement::new(h2, k2));
        let v = &verts[i];
        prop_assert_eq!(tree.apply(&x.compose(tree, &y), v), tree.apply(&x, &tree.apply(&y, v)));
        prop_assert_eq!(tree.apply(&x.inverse(tree), &tree.apply(&x, v)), v.clone());
        Ok(())
    })?;
    let window = Window::new(5, 2, 2);
    let pverts = window.vertices();
    total += check(cases, (affine(), affine(), 0..pverts.len()), |(x, y, i)| {
        let u = &pverts[i];
        let xy = x.compose(&y).map_err(err)?;
        prop_assert_eq!(xy.act(u).map_err(err)?, x.act(&y.act(u).map_err(err)?).map_err(err)?);
        prop_assert_eq!(x.act_inverse(&x.act(u).map_err(err)?).map_err(err)?, u.clone());
        prop_assert_eq!(x.act(u).map_err(err)?.busemann(), u.busemann() + x.shift());
        Ok(())
    })?;
    total += check(cases, (prop_oneof![Just(3u64), Just(5), Just(7)], 1u64..100, -4i64..=4, 0u64..7), |(p, b, n, j)| {
        let b = b % p;
        if b == 0 {
            return Ok(());
        }
        let j = j % p;
        let l = horosphere_label(p as u32, b, n, j).map_err(err)?;
        // b^n · l ≡ j (mod p)
        let bn = if n >= 0 { b.pow(n as u32) % p } else { (0..p).find(|x| (x * b.pow((-n) as u32)) % p == 1).unwrap() };
        prop_assert_eq!((bn * l) % p, j);
        Ok(())
    })?;
    Ok(total)
}

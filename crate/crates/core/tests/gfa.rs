use std::sync::Arc;

use scalelab::gfa::{
    build_coset_tree, kernel_c, make_gfa, profile_residue, profile_tidiness, FSeqElement, FiniteGroup, GfaElement,
    SubgroupSet, TidyProfile,
};
use scalelab::perm::{parse_cycles, PermGroup, Permutation, Subgroup};
use scalelab::trees::{UnrootedVertex, Window};

fn sym3() -> FiniteGroup {
    FiniteGroup::sym3()
}

fn alt3(f: &FiniteGroup) -> SubgroupSet {
    f.generate(&[1])
}

fn sigma(f: &FiniteGroup) -> SubgroupSet {
    f.generate(&[3])
}

#[test]
fn sym3_presentation() {
    let f = sym3();
    let (s, t) = (3, 1);
    assert_eq!(f.mul(s, s), 0);
    assert_eq!(f.mul(t, f.mul(t, t)), 0);
    assert_eq!(f.mul(s, f.mul(t, s)), f.inv(t));
    // σ^i τ^j ↦ 3i + j
    assert_eq!(f.mul(s, t), 4);
    assert_eq!(f.mul(s, 2), 5);
    assert_eq!(f.element_name(4), "st");
}

#[test]
fn cayley_file_roundtrip() {
    let text = "order 4\n0 1 2 3\n1 2 3 0\n2 3 0 1\n3 0 1 2\n";
    let g = FiniteGroup::parse_cayley("c4", text).unwrap();
    let c = FiniteGroup::cyclic(4).unwrap();
    for a in 0..4 {
        for b in 0..4 {
            assert_eq!(g.mul(a, b), c.mul(a, b));
        }
    }
    assert!(FiniteGroup::parse_cayley("bad", "order 2\n0 1\n1 1\n").is_err());
    assert!(FiniteGroup::parse_cayley("bad", "order 3\n0 1 2\n").is_err());
}

#[test]
fn make_gfa_q() {
    let f = sym3();
    assert_eq!(make_gfa(f.clone(), f.trivial()).unwrap().q(), 6);
    let c4 = FiniteGroup::cyclic(4).unwrap();
    assert_eq!(make_gfa(c4.clone(), c4.trivial()).unwrap().q(), 4);
    let a3 = alt3(&f);
    let ctx = make_gfa(f.clone(), a3).unwrap();
    assert_eq!(ctx.q(), 2);
    assert_eq!(ctx.transversal(), &[0, 3]);
    assert!(make_gfa(f.clone(), f.whole()).is_err());
}

#[test]
fn kernels() {
    let f = sym3();
    assert_eq!(kernel_c(&f, &f.trivial()), f.trivial());
    assert_eq!(kernel_c(&f, &alt3(&f)), alt3(&f));
    assert_eq!(kernel_c(&f, &sigma(&f)), f.trivial());
}

#[test]
fn tidiness() {
    let f = sym3();
    let ctx = make_gfa(f.clone(), f.trivial()).unwrap();
    let r = profile_tidiness(&TidyProfile::v0(&ctx)).unwrap();
    assert!(r.tidy && r.alpha_invariant_decrease);
    assert_eq!(r.index_of_shift, 6);
    for rr in 1..=3 {
        let r = profile_tidiness(&TidyProfile::band(&ctx, alt3(&f), rr).unwrap()).unwrap();
        assert!(r.tidy);
        assert_eq!(r.index_of_shift, 6);
        assert!(r.v_plus.iter().all(|(_, s)| s == "{1}"));
    }
    let bad = TidyProfile::new(Arc::new(f.clone()), f.trivial(), -1, vec![f.whole(), f.trivial()]).unwrap();
    let r = profile_tidiness(&bad).unwrap();
    assert!(!r.alpha_invariant_decrease);
    assert!(!r.tidy);
}

fn v1_tree(depth: i64) -> scalelab::gfa::CosetTree {
    let f = sym3();
    let ctx = make_gfa(f.clone(), f.trivial()).unwrap();
    let pf = TidyProfile::band(&ctx, alt3(&f), 1).unwrap();
    build_coset_tree(&ctx, &pf, Window::new(6, 2, depth)).unwrap()
}

#[test]
fn transversal_matches_enumeration_table() {
    let tree = v1_tree(3);
    let names: Vec<String> = tree
        .transversal()
        .iter()
        .map(|g| g.display(&tree.profile.f).to_string())
        .collect();
    assert_eq!(names, ["1", "t[-1]", "t^2[-1]", "s[0]", "t[-1]*s[0]", "t^2[-1]*s[0]"]);
}

#[test]
fn coset_tree_shapes() {
    let f = sym3();
    let ctx = make_gfa(f.clone(), f.trivial()).unwrap();
    let t = build_coset_tree(&ctx, &TidyProfile::v0(&ctx), Window::from_range(6, -1, 2)).unwrap();
    assert_eq!(t.nodes().unwrap().len(), 1 + 6 + 36 + 216);
    for n in t.nodes().unwrap() {
        assert_eq!(t.expand(&n.representative, n.vertex.level()), n.vertex);
    }
    let ctx2 = make_gfa(f.clone(), alt3(&f)).unwrap();
    let t2 = build_coset_tree(&ctx2, &TidyProfile::v0(&ctx2), Window::from_range(2, -1, 1)).unwrap();
    assert_eq!(t2.nodes().unwrap().len(), 7);
    assert_eq!(t2.edges().unwrap().len(), 6);
    let t3 = build_coset_tree(&ctx, &TidyProfile::v0(&ctx), Window::from_range(6, 0, 0)).unwrap();
    assert_eq!(t3.nodes().unwrap().len(), 1);
    assert!(t3.edges().unwrap().is_empty());
}

#[test]
fn action_examples() {
    let f = sym3();
    let ctx = make_gfa(f.clone(), f.trivial()).unwrap();
    let t = build_coset_tree(&ctx, &TidyProfile::v0(&ctx), Window::new(6, 2, 3)).unwrap();
    for v in t.window.vertices() {
        assert_eq!(t.act(&FSeqElement::identity(), &v).unwrap(), v);
    }
    assert_eq!(t.act_alpha(1, &UnrootedVertex::spine(6, 1)), UnrootedVertex::spine(6, 2));
    // σ_[0] on the spine vertex at level 1: the level-1 digit becomes the index of σ·A
    let w = t.act(&FSeqElement::single(0, 3), &UnrootedVertex::spine(6, 1)).unwrap();
    assert_eq!(w, UnrootedVertex::new(6, 1, vec![3]).unwrap());
    let ctx2 = make_gfa(f.clone(), alt3(&f)).unwrap();
    let t2 = build_coset_tree(&ctx2, &TidyProfile::v0(&ctx2), Window::new(2, 2, 3)).unwrap();
    let w = t2.act(&FSeqElement::single(0, 3), &UnrootedVertex::spine(2, 1)).unwrap();
    assert_eq!(w, UnrootedVertex::new(2, 1, vec![1]).unwrap());
}

#[test]
fn action_laws() {
    let tree = v1_tree(3);
    let f = tree.profile.f.clone();
    let hs = [
        FSeqElement::from_entries([(-1, 4), (0, 1), (2, 5)]),
        FSeqElement::from_entries([(-2, 1), (1, 3)]),
        FSeqElement::from_entries([(0, 2), (1, 4), (3, 3)]),
    ];
    let verts = tree.window.vertices();
    for h1 in &hs {
        for h2 in &hs {
            let prod = h1.mul(&f, h2);
            for v in verts.iter().filter(|v| v.level() >= -1).take(400) {
                assert_eq!(tree.act_unbounded(&prod, v), tree.act_unbounded(h1, &tree.act_unbounded(h2, v)));
            }
        }
        for v in verts.iter().take(300) {
            // α∘h = α(h)∘α, and α acts as the shift of strings
            let lhs = tree.act_alpha(1, &tree.act_unbounded(h1, v));
            let rhs = tree.act_unbounded(&h1.shift(1), &tree.act_alpha(1, v));
            assert_eq!(lhs, rhs);
            assert_eq!(tree.act_alpha(1, v), v.x0_translate(1));
            assert_eq!(tree.act_alpha(-1, v), v.x0_translate(-1));
        }
    }
    let x = GfaElement::new(hs[0].clone(), 1);
    let y = GfaElement::new(hs[1].clone(), -2);
    let xy = x.compose(&tree, &y);
    for v in verts.iter().take(300) {
        assert_eq!(tree.apply(&xy, v), tree.apply(&x, &tree.apply(&y, v)));
        assert_eq!(tree.apply(&x.inverse(&tree), &tree.apply(&x, v)), *v);
    }
}

#[test]
fn local_permutation_closed_forms() {
    let tree = v1_tree(4);
    let flip = parse_cycles("(0 3)(1 4)(2 5)", 6).unwrap();
    let rot = parse_cycles("(0 1 2)(3 4 5)", 6).unwrap();
    for j in -2..=2i64 {
        for a in 0..2i64 {
            for k in 0..3i64 {
                let elem = (3 * a + k) as usize;
                let h = FSeqElement::single(j, elem);
                for (v, p) in tree.local_permutations(&h, j).unwrap() {
                    assert_eq!(p, flip.pow(a), "j={j} f={elem} v={v}");
                }
                if j + 1 < tree.window.bottom {
                    for (v, p) in tree.local_permutations(&h, j + 1).unwrap() {
                        let sign = if v.last_digit() < 3 { 1 } else { -1 };
                        assert_eq!(p, rot.pow(sign * k), "j={j} f={elem} v={v}");
                    }
                }
                for other in tree.window.top..tree.window.bottom {
                    if other != j && other != j + 1 {
                        for (_, p) in tree.local_permutations(&h, other).unwrap() {
                            assert!(p.is_identity());
                        }
                    }
                }
            }
        }
    }
}

fn fp(g: &PermGroup) -> scalelab::perm::GroupFingerprint {
    g.fingerprint().unwrap()
}

#[test]
fn residue_example_generators() {
    let f = sym3();
    let ctx = make_gfa(f.clone(), f.trivial()).unwrap();
    let pf = TidyProfile::band(&ctx, alt3(&f), 1).unwrap();
    let r = profile_residue(&pf, 1).unwrap();
    let gens: Vec<String> = r.report.generators();
    assert_eq!(gens, ["(0 1 2)(3 4 5)", "(0 3)(1 4)(2 5)"]);
    assert!(r.report.fingerprint.abelian);
    assert_eq!(r.order(), 6u32.into());
}

/// Oracle: the finite group `∏ P_m` over a coordinate window as a permutation group on
/// disjoint copies of `F`, acting on left cosets of `∏ P_{m-d}` by generic coset enumeration.
fn brute_force_residue(pf: &TidyProfile, d: usize) -> (u64, u64) {
    let f = &pf.f;
    let n = f.order();
    let coords: Vec<i64> = (pf.lo..pf.hi() + d as i64).collect();
    let deg = n * coords.len();
    let lift = |slot: usize, g: usize| {
        let mut images: Vec<usize> = (0..deg).collect();
        for x in 0..n {
            images[slot * n + x] = slot * n + f.mul(g, x);
        }
        Permutation::from_images(images).unwrap()
    };
    let mut top = Vec::new();
    let mut sub = Vec::new();
    for (slot, &m) in coords.iter().enumerate() {
        top.extend(pf.at(m).generators(f).into_iter().map(|g| lift(slot, g)));
        sub.extend(pf.at(m - d as i64).generators(f).into_iter().map(|g| lift(slot, g)));
    }
    let group = PermGroup::new(deg, top).unwrap();
    let action = group.coset_action(&Subgroup::Generated(sub)).unwrap();
    (action.group.order_u64().unwrap().unwrap(), action.group.degree() as u64)
}

#[test]
fn residue_tables_agree_with_oracle() {
    let f = sym3();
    let ctx = make_gfa(f.clone(), f.trivial()).unwrap();
    let c4 = FiniteGroup::cyclic(4).unwrap();
    let ctx4 = make_gfa(c4.clone(), c4.trivial()).unwrap();
    for (r, d) in [(1usize, 1usize), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2)] {
        for pf in [
            TidyProfile::band(&ctx, alt3(&f), r).unwrap(),
            TidyProfile::band(&ctx, sigma(&f), r).unwrap(),
            TidyProfile::band(&ctx4, c4.generate(&[2]), r).unwrap(),
        ] {
            let res = profile_residue(&pf, d).unwrap();
            let (order, cosets) = brute_force_residue(&pf, d);
            assert_eq!(res.order(), order.into(), "r={r} d={d}");
            assert_eq!(res.coset_count, cosets as u128);
            assert!(res.self_consistent());
        }
    }
}

#[test]
fn residue_factor_lists() {
    let f = sym3();
    let ctx = make_gfa(f.clone(), f.trivial()).unwrap();
    let c3 = fp(&PermGroup::cyclic(3));
    let c2 = fp(&PermGroup::cyclic(2));
    let s3 = fp(&PermGroup::symmetric(3));
    let c4 = fp(&PermGroup::cyclic(4));
    let sort = |mut v: Vec<scalelab::perm::GroupFingerprint>| {
        v.sort_by_key(|x| format!("{x:?}"));
        v
    };
    for (r, d) in [(1usize, 2usize), (1, 3), (2, 3), (2, 4)] {
        let v = profile_residue(&TidyProfile::band(&ctx, alt3(&f), r).unwrap(), d).unwrap();
        let mut want = vec![c3.clone(); r];
        want.extend(vec![s3.clone(); d - r]);
        want.extend(vec![c2.clone(); r]);
        assert_eq!(sort(v.report.factors.clone().unwrap()), sort(want));
        assert_eq!(v.order(), 6u64.pow(d as u32).into());
        let w = profile_residue(&TidyProfile::band(&ctx, sigma(&f), r).unwrap(), d).unwrap();
        let mut want = vec![c2.clone(); r];
        want.extend(vec![s3.clone(); d]);
        assert_eq!(sort(w.report.factors.clone().unwrap()), sort(want));
        assert_eq!(w.order(), (2u64.pow(r as u32) * 6u64.pow(d as u32)).into());
        let g4 = FiniteGroup::cyclic(4).unwrap();
        let ctx4 = make_gfa(g4.clone(), g4.trivial()).unwrap();
        let p = profile_residue(&TidyProfile::band(&ctx4, g4.generate(&[2]), r).unwrap(), d).unwrap();
        let mut want = vec![c2.clone(); 2 * r];
        want.extend(vec![c4.clone(); d - r]);
        assert_eq!(sort(p.report.factors.clone().unwrap()), sort(want));
        assert_eq!(p.order(), 4u64.pow(d as u32).into());
    }
}

#[test]
fn residue_via_tree_matches_coset_space() {
    let f = sym3();
    let ctx = make_gfa(f.clone(), f.trivial()).unwrap();
    for (b, r) in [(alt3(&f), 1usize), (alt3(&f), 2), (sigma(&f), 1)] {
        let pf = TidyProfile::band(&ctx, b, r).unwrap();
        for d in 1..=2usize {
            let tree = build_coset_tree(&ctx, &pf, Window::new(6, 0, d as i64)).unwrap();
            let leaves = tree.window.vertices_at(d as i64);
            let index = |v: &UnrootedVertex| leaves.iter().position(|x| x == v).unwrap();
            let gens: Vec<Permutation> = tree
                .stabilizer_generators(pf.lo, pf.hi() + d as i64)
                .iter()
                .map(|h| {
                    Permutation::from_images(leaves.iter().map(|v| index(&tree.act(h, v).unwrap())).collect()).unwrap()
                })
                .collect();
            let g = PermGroup::new(leaves.len(), gens).unwrap();
            let res = profile_residue(&pf, d).unwrap();
            assert_eq!(fp(&g), res.report.fingerprint, "r={r} d={d}");
        }
    }
}

use std::collections::{BTreeSet, HashSet, VecDeque};

use scalelab::perm::{compose, parse_cycles, Permutation, PermGroup, Subgroup};

fn p(text: &str, n: usize) -> Permutation {
    parse_cycles(text, n).unwrap()
}

fn bfs_order(g: &PermGroup) -> usize {
    let id = Permutation::identity(g.degree());
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for s in g.generators() {
            let y = s.compose(&x).unwrap();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.len()
}

/// All block systems by brute force: for each pair {0, b}, the finest invariant partition joining them.
fn brute_force_blocks(g: &PermGroup) -> BTreeSet<Vec<Vec<usize>>> {
    let n = g.degree();
    let mut out = BTreeSet::new();
    for b in 1..n {
        let mut part: Vec<usize> = (0..n).collect();
        let find = |part: &Vec<usize>, mut x: usize| {
            while part[x] != x {
                x = part[x];
            }
            x
        };
        let mut pairs = vec![(0, b)];
        while let Some((x, y)) = pairs.pop() {
            let (rx, ry) = (find(&part, x), find(&part, y));
            if rx == ry {
                continue;
            }
            part[rx.max(ry)] = rx.min(ry);
            for s in g.generators() {
                pairs.push((s.image(x), s.image(y)));
            }
        }
        let mut classes: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for x in 0..n {
            classes.entry(find(&part, x)).or_default().push(x);
        }
        if classes.len() > 1 {
            out.insert(classes.into_values().collect());
        }
    }
    out
}

#[test]
fn parse_examples() {
    assert_eq!(p("(0 3)(1 4)(2 5)", 6).images(), vec![3, 4, 5, 0, 1, 2]);
    assert!(p("", 4).is_identity());
    assert_eq!(p("(0 1 2)(3 4 5)", 6).images(), vec![1, 2, 0, 4, 5, 3]);
    assert!(parse_cycles("(0 1)(1 2)", 3).is_err());
    assert!(parse_cycles("(0 0)", 3).is_err());
    assert!(parse_cycles("(0 3)", 3).is_err());
    assert!(parse_cycles("(0 1", 3).is_err());
    assert_eq!(p("(0 3)(1 4)(2 5)", 6).to_string(), "(0 3)(1 4)(2 5)");
}

#[test]
fn compose_examples() {
    let g = p("(0 3)(1 4)(2 5)", 6);
    let h = p("(0 1 2)(3 4 5)", 6);
    let gh = compose(&g, &h).unwrap();
    assert_eq!(gh.images(), vec![4, 5, 3, 1, 2, 0]);
    assert_eq!(gh, compose(&h, &g).unwrap());
    assert_eq!(compose(&Permutation::identity(6), &h).unwrap(), h);
    assert!(compose(&p("(0 1)", 2), &p("(0 1)", 2)).unwrap().is_identity());
    assert!(compose(&p("(0 1)", 2), &h).is_err());
}

#[test]
fn json_roundtrip() {
    let g = p("(0 3)(1 4)(2 5)", 6);
    let s = serde_json::to_string(&g).unwrap();
    assert_eq!(s, r#"{"degree":6,"images":[3,4,5,0,1,2]}"#);
    let back: Permutation = serde_json::from_str(&s).unwrap();
    assert_eq!(back, g);
    assert!(serde_json::from_str::<Permutation>(r#"{"degree":2,"images":[0,0]}"#).is_err());
}

#[test]
fn orders() {
    let g = PermGroup::new(6, vec![p("(0 3)(1 4)(2 5)", 6), p("(0 1 2)(3 4 5)", 6)]).unwrap();
    assert_eq!(g.order_u64().unwrap(), Some(6));
    assert_eq!(bfs_order(&g), 6);
    assert_eq!(PermGroup::new(5, vec![]).unwrap().order_u64().unwrap(), Some(1));
    assert_eq!(PermGroup::new(4, vec![p("(0 1 2 3)", 4)]).unwrap().order_u64().unwrap(), Some(4));
    let m = PermGroup::new(
        12,
        vec![p("(0 1 2 3 4 5 6 7 8 9 10)", 12), p("(2 6 10 7)(3 9 4 5)", 12), p("(0 11)(1 10)(2 5)(3 7)(4 8)(6 9)", 12)],
    )
    .unwrap();
    assert_eq!(m.order_u64().unwrap(), Some(95040));
    assert_eq!(PermGroup::symmetric(10).order_u64().unwrap(), Some(3628800));
}

#[test]
fn orbits_and_transitivity() {
    let g = PermGroup::new(3, vec![p("(0 1)", 3)]).unwrap();
    assert_eq!(g.orbits(), vec![vec![0, 1], vec![2]]);
    assert!(!g.is_transitive());
    assert!(PermGroup::new(6, vec![p("(0 1 2 3 4 5)", 6)]).unwrap().is_transitive());
    let r = PermGroup::new(6, vec![p("(0 3)(1 4)(2 5)", 6), p("(0 1 2)(3 4 5)", 6)]).unwrap();
    assert!(r.is_transitive());
}

#[test]
fn blocks_match_brute_force() {
    let r = PermGroup::new(6, vec![p("(0 3)(1 4)(2 5)", 6), p("(0 1 2)(3 4 5)", 6)]).unwrap();
    let systems = r.minimal_blocks().unwrap();
    assert!(!r.is_primitive().unwrap());
    let expected: Vec<Vec<usize>> = vec![vec![0, 3], vec![1, 4], vec![2, 5]];
    assert!(systems.iter().any(|s| s.blocks == expected));
    let brute = brute_force_blocks(&r);
    for s in &systems {
        assert!(brute.contains(&s.blocks));
        for g in r.generators() {
            assert!(s.is_preserved_by(g));
        }
    }
    assert!(PermGroup::symmetric(3).is_primitive().unwrap());
    let c4 = PermGroup::new(4, vec![p("(0 1 2 3)", 4)]).unwrap();
    let s = c4.minimal_blocks().unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].blocks, vec![vec![0, 2], vec![1, 3]]);
    assert!(PermGroup::new(3, vec![p("(0 1)", 3)]).unwrap().minimal_blocks().is_err());
}

#[test]
fn coset_actions() {
    let c4 = PermGroup::new(4, vec![p("(0 1 2 3)", 4)]).unwrap();
    let reg = c4.coset_action(&Subgroup::Generated(vec![])).unwrap();
    assert_eq!(reg.group.degree(), 4);
    assert_eq!(reg.group.order_u64().unwrap(), Some(4));
    assert!(reg.group.is_transitive());
    let whole = c4.coset_action(&Subgroup::Generated(c4.generators().to_vec())).unwrap();
    assert_eq!(whole.group.degree(), 1);
    let s3 = PermGroup::symmetric(3);
    let nat = s3.coset_action(&Subgroup::PointStabilizer(0)).unwrap();
    assert_eq!(nat.group.degree(), 3);
    // the coset g·Stab(0) corresponds to the point g.0
    let rel: Vec<usize> = nat.representatives.iter().map(|g| g.image(0)).collect();
    for (g, c) in s3.generators().iter().zip(nat.group.generators()) {
        for x in 0..3 {
            assert_eq!(rel[c.image(x)], g.image(rel[x]));
        }
    }
    let bad = Subgroup::Generated(vec![p("(0 1)", 4)]);
    assert!(c4.coset_action(&bad).is_err());
}

#[test]
fn fingerprints() {
    let r = PermGroup::new(6, vec![p("(0 3)(1 4)(2 5)", 6), p("(0 1 2)(3 4 5)", 6)]).unwrap();
    let f = r.fingerprint().unwrap();
    assert!(f.abelian);
    assert_eq!(f.order, 6u32.into());
    let h = f.element_order_histogram.unwrap();
    assert_eq!(h.get(&6), Some(&2));
    assert!(!PermGroup::symmetric(3).is_abelian());
    let t = PermGroup::trivial(4).fingerprint().unwrap();
    assert_eq!(t.order, 1u32.into());
    assert!(t.abelian);
    assert_eq!(PermGroup::symmetric(4).derived_length().unwrap(), Some(3));
}

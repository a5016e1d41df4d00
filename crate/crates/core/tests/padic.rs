use num_bigint::BigInt;
use scalelab::corr::check_compatible;
use scalelab::padic::{
    affine_act, compatible_labelling, horosphere_label, label_edges, odometer_extract, AffineElement, PAdicVertex,
    PAdicWindow,
};
use scalelab::trees::{EdgeLabelling, TreeAction, UnrootedVertex, Window};
use scalelab::Error;

fn v(p: usize, s: &str) -> UnrootedVertex {
    UnrootedVertex::parse(p, s).unwrap()
}

fn int(p: u32, x: u64) -> PAdicWindow {
    PAdicWindow::exact_integer(p, x).unwrap()
}

/// The integer whose base-`p` digits are those of the coset representative, for `y ∈ Z`.
fn coset_value(p: i64, u: &UnrootedVertex) -> i64 {
    (u.lowest_position()..=u.level()).fold(0, |acc, i| acc + u.digit_at(i) as i64 * p.pow(i as u32))
}

#[test]
fn digits_and_precision() {
    let x = PAdicWindow::from_rational(5, 1, 2, 6).unwrap();
    assert_eq!(x.precision(), Some(6));
    // 2 · 3 = 6 ≡ 1 (mod 5): the last digit of 1/2 is 3
    assert_eq!(x.digit(0).unwrap(), 3);
    assert!(matches!(x.digit(6), Err(Error::Precision(_))));
    let two = int(5, 2);
    let one = x.mul(&two).unwrap();
    assert_eq!(one, PAdicWindow::from_bigint(5, &BigInt::from(1), 6).unwrap());
    let minus_one = int(5, 1).neg(4);
    assert_eq!((0..4).map(|i| minus_one.digit(i).unwrap()).collect::<Vec<_>>(), vec![4; 4]);
    assert!(matches!(int(5, 1).add(&minus_one).unwrap().valuation(), Err(Error::Precision(_))));
    let third = PAdicWindow::from_rational(3, 2, 9, 2).unwrap();
    assert_eq!(third.valuation().unwrap(), Some(-2));
}

#[test]
fn literal_and_json_round_trip() {
    for text in ["3 4 0 . 2@5", "…1 0 2@3", "1 0@2", "0@7"] {
        let x: PAdicWindow = text.parse().unwrap();
        let again: PAdicWindow = x.to_string().parse().unwrap();
        assert_eq!(x, again, "{text}");
        let json = serde_json::to_string(&x).unwrap();
        let back: PAdicWindow = serde_json::from_str(&json).unwrap();
        assert_eq!(x, back);
    }
    let x: PAdicWindow = serde_json::from_str(r#"{"p":5,"floor":-1,"digits":[2,0,4,3],"exact":true}"#).unwrap();
    assert_eq!(x, "3 4 0 . 2@5".parse().unwrap());
    assert!(serde_json::from_str::<PAdicWindow>(r#"{"p":5,"floor":0,"digits":[7]}"#).is_err());
    assert!("1 2@6".parse::<PAdicWindow>().is_err());
}

#[test]
fn vertices_match_the_string_model() {
    let u = v(5, "1:23");
    let pv = PAdicVertex::from_unrooted(&u).unwrap();
    assert_eq!(pv.to_unrooted(), u);
    // 2·5^0 + 3·5^1 = 17, coset 17 + 25 Z_5
    assert_eq!(pv, PAdicVertex::new(&int(5, 17 + 25 * 4), 1).unwrap());
    let approx = PAdicWindow::from_bigint(5, &BigInt::from(17), 2).unwrap();
    assert_eq!(PAdicVertex::new(&approx, 1).unwrap(), pv);
    assert!(matches!(PAdicVertex::new(&approx, 2), Err(Error::Precision(_))));
}

#[test]
fn affine_action_examples() {
    for p in [2u32, 3, 5, 7] {
        let q = p as usize;
        let window = Window::new(q, 2, 2);
        let id = AffineElement::integers(p, 0, 1).unwrap();
        for u in window.vertices() {
            assert_eq!(id.act(&u).unwrap(), u);
        }
        // (0, p) on pZ_p = ṽ_0 gives p²Z_p = ṽ_1
        let hyperbolic = AffineElement::integers(p, 0, p as u64).unwrap();
        assert_eq!(hyperbolic.act(&UnrootedVertex::spine(q, 0)).unwrap(), UnrootedVertex::spine(q, 1));
        for u in window.vertices() {
            assert_eq!(hyperbolic.act(&u).unwrap(), u.x0_translate(1));
        }
    }
    let one = AffineElement::integers(5, 1, 1).unwrap();
    assert_eq!(one.act(&UnrootedVertex::spine(5, 0)).unwrap(), v(5, "0:1"));
    let pv = PAdicVertex::from_unrooted(&UnrootedVertex::spine(5, 0)).unwrap();
    let image = affine_act(&int(5, 1), &int(5, 1), &pv).unwrap();
    assert_eq!(image.to_unrooted(), v(5, "0:1"));
    // integer translations agree with ordinary addition mod p^{n+1}
    for b in 0..30u64 {
        let x = AffineElement::integers(5, b, 1).unwrap();
        for u in Window::new(5, 0, 2).vertices() {
            let w = x.act(&u).unwrap();
            let expected = (coset_value(5, &u) + b as i64) % 5i64.pow((u.level() + 1) as u32);
            assert_eq!(coset_value(5, &w), expected, "{b} + {u}");
        }
    }
}

#[test]
fn affine_action_is_a_group_action() {
    let p = 5u32;
    let half = PAdicWindow::from_rational(p, 1, 2, 12).unwrap();
    let elems = vec![
        AffineElement::integers(p, 3, 2).unwrap(),
        AffineElement::integers(p, 1, 10).unwrap(),
        AffineElement::new(PAdicWindow::from_rational(p, 7, 5, 12).unwrap(), half.clone()).unwrap(),
        AffineElement::new(half, PAdicWindow::from_rational(p, 3, 25, 12).unwrap()).unwrap(),
    ];
    let window = Window::new(5, 2, 2);
    for x in &elems {
        for y in &elems {
            let xy = x.compose(y).unwrap();
            for u in window.vertices() {
                let lhs = x.act(&y.act(&u).unwrap()).unwrap();
                assert_eq!(xy.act(&u).unwrap(), lhs, "{x} {y} {u}");
            }
        }
        for u in window.vertices() {
            assert_eq!(x.act_inverse(&x.act(&u).unwrap()).unwrap(), u);
            assert_eq!(x.act(&x.act_inverse(&u).unwrap()).unwrap(), u);
        }
    }
}

#[test]
fn truncated_coefficients_fail_explicitly() {
    let coarse = PAdicWindow::from_rational(5, 1, 3, 2).unwrap();
    let x = AffineElement::new(int(5, 0), coarse).unwrap();
    assert!(x.act(&v(5, "0:1")).is_ok());
    // a vertex with significant digits at positions 3..=3 needs a only modulo 5
    assert!(x.act(&v(5, "3:1")).is_ok());
    assert!(matches!(x.act(&v(5, "3:1001")), Err(Error::Precision(_))));
    let zero = PAdicWindow::from_bigint(5, &BigInt::from(0), 3).unwrap();
    assert!(matches!(AffineElement::new(int(5, 1), zero), Err(Error::Precision(_))));
}

#[test]
fn horosphere_rule_examples() {
    // 2^{-1} ≡ 3 and 3 · 3 ≡ 4 (mod 5)
    assert_eq!(horosphere_label(5, 2, 1, 3).unwrap(), 4);
    assert_eq!(horosphere_label(5, 1, 7, 3).unwrap(), 3);
    assert_eq!(horosphere_label(5, 2, 4, 0).unwrap(), 0);
    assert!(matches!(horosphere_label(5, 10, 1, 1), Err(Error::NotUnit(_))));
}

#[test]
fn labels_follow_the_horosphere_rule_along_the_spine_and_on_horosphere_zero() {
    let window = Window::new(5, 2, 3);
    for b in 1..5u64 {
        let labels = label_edges(&int(5, b), &window).unwrap();
        let path = labels.check_conditions(&window).unwrap();
        assert!(path.iter().all(|u| u.is_spine()));
        for n in window.top + 1..=window.bottom {
            let u = UnrootedVertex::spine(5, n - 1);
            for j in 0..5usize {
                let expected = horosphere_label(5, b, n, j as u64).unwrap() as usize;
                assert_eq!(labels.label(&u, &u.child(j)), Some(expected), "b={b} {u} j={j}");
            }
        }
        // below Z_p the mover to i + pZ_p is (i, bp), which fixes the representative i
        for u in window.vertices_at(0).into_iter().filter(|u| u.lowest_position() >= 0) {
            for j in 0..5usize {
                let expected = horosphere_label(5, b, 1, j as u64).unwrap() as usize;
                assert_eq!(labels.label(&u, &u.child(j)), Some(expected), "b={b} {u} j={j}");
            }
        }
        // elsewhere the representative shifts the labels by a constant
        for (u, l) in &labels.labels {
            let n = u.level() + 1;
            for j in 0..5usize {
                let step = horosphere_label(5, b, n, j as u64).unwrap() as usize;
                assert_eq!((l[j] + 5 - l[0]) % 5, step, "b={b} {u} j={j}");
            }
        }
    }
    assert_eq!(label_edges(&int(5, 2), &window).unwrap().label(&v(5, "0:"), &v(5, "1:3")), Some(4));
}

#[test]
fn unit_one_gives_the_standard_labelling() {
    let window = Window::new(3, 2, 3);
    let labels = label_edges(&int(3, 1), &window).unwrap();
    let standard = EdgeLabelling::standard(&window);
    for (u, l) in &labels.labels {
        assert_eq!(Some(&l[..]), standard.get(u), "{u}");
    }
}

#[test]
fn distinct_units_differ_on_horosphere_one() {
    let window = Window::new(5, 1, 2);
    let all: Vec<EdgeLabelling> = (1..5).map(|b| label_edges(&int(5, b), &window).unwrap()).collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let differs = window
                .vertices_at(0)
                .iter()
                .any(|u| all[i].get(u) != all[j].get(u));
            assert!(differs, "b = {} and {}", i + 1, j + 1);
        }
    }
}

#[test]
fn non_units_are_rejected() {
    let window = Window::new(5, 1, 2);
    assert!(matches!(label_edges(&int(5, 10), &window), Err(Error::NotUnit(_))));
}

#[test]
fn labellings_are_compatible_with_the_affine_group() {
    let window = Window::new(5, 1, 3);
    for b in 1..5u64 {
        let built = compatible_labelling(&int(5, b), &window).unwrap();
        assert_eq!(built.failing_witness(&as_dyn(&scalelab::padic::labelling_transversal(&int(5, b)).unwrap())).unwrap(), None);
        let gens = [AffineElement::integers(5, 1, 1).unwrap(), AffineElement::integers(5, 0, 5 * b).unwrap()];
        let report = check_compatible(&built.labels, &window, &as_dyn(&gens), 40, 7).unwrap();
        assert!(report.ok(), "b = {b}: {report}");
    }
}

#[test]
fn labelling_for_one_unit_is_not_compatible_with_another() {
    let window = Window::new(5, 1, 3);
    let labels = label_edges(&int(5, 2), &window).unwrap();
    let gens = [AffineElement::integers(5, 1, 1).unwrap(), AffineElement::integers(5, 0, 5).unwrap()];
    let report = check_compatible(&labels, &window, &as_dyn(&gens), 40, 7).unwrap();
    assert!(!report.ok());
}

fn as_dyn(xs: &[AffineElement]) -> Vec<&dyn TreeAction> {
    xs.iter().map(|x| x as &dyn TreeAction).collect()
}

#[test]
fn odometer_correspondence() {
    for (p, d, order) in [(2u32, 3usize, 8u32), (3, 2, 9), (5, 2, 25), (2, 0, 1)] {
        let r = odometer_extract(p, d).unwrap();
        assert!(r.passed(), "p={p} d={d}");
        assert_eq!(r.order, order.into());
    }
}

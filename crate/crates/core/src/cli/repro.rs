//! The bundled reproduction table: every worked value the library is expected to
//! reproduce, one row per check, plus the bundled scenario files.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{parse_scenario, run_scenario};
use crate::automata::{full_sym_level, grigorchuk};
use crate::corr::{build_labelling, ScaleElement, ScaleGroupData};
use crate::gfa::{build_coset_tree, kernel_c, make_gfa, profile_residue, profile_tidiness, FSeqElement, FiniteGroup, GfaElement, TidyProfile};
use crate::padic::AffineElement;
use crate::perm::{parse_cycles, GroupFingerprint, PermGroup};
use crate::residue::{residue, uniqueness_criterion};
use crate::trees::{standard_label, EdgeLabelling, TreeAction, UnrootedVertex, Window};
use crate::Result;

/// One line of the reproduction table.
#[derive(Clone, Debug, Serialize)]
pub struct ReproRow {
    pub module: String,
    pub check: String,
    pub ok: bool,
    pub detail: String,
}

type Check = fn() -> Result<(bool, String)>;
type Job = (String, String, Box<dyn Fn() -> Result<(bool, String)> + Send + Sync>);

/// Bundled scenarios: file name and contents.
pub const SCENARIOS: &[(&str, &str)] = &[
    ("sym3_band_residue.scn", include_str!("../../scenarios/sym3_band_residue.scn")),
    ("residue_tables.scn", include_str!("../../scenarios/residue_tables.scn")),
    ("builtin_groups.scn", include_str!("../../scenarios/builtin_groups.scn")),
    ("padic_labellings.scn", include_str!("../../scenarios/padic_labellings.scn")),
    ("coset_tree.scn", include_str!("../../scenarios/coset_tree.scn")),
    ("root_swap.scn", include_str!("../../scenarios/root_swap.scn")),
];

/// Scenarios whose reports are expected to contain a failing task.
const EXPECTED_FAILURES: &[&str] = &["root_swap.scn"];

const ROOT_SWAP_AUT: &str = include_str!("../../scenarios/root_swap.aut");

fn checks() -> Vec<(&'static str, &'static str, Check)> {
    vec![
        ("perm", "flip-cycle-images", flip_cycle_images),
        ("perm", "rotation-cycle-images", rotation_cycle_images),
        ("perm", "flip-rotation-group-abelian-order-6", flip_rotation_group),
        ("trees", "x0-shifts-spine", x0_shifts_spine),
        ("trees", "parent-edge-labelled-q", parent_edge_label),
        ("automata", "grigorchuk-b-section-at-0", grigorchuk_b_section),
        ("residue", "universal-group-residue-is-sym-q", universal_residue),
        ("residue", "regular-sym3-not-unique", regular_sym3_not_unique),
        ("corr", "x0-has-trivial-local-maps", x0_in_group),
        ("corr", "coset-representatives-give-standard-labelling", coset_transversal_standard),
        ("gfa", "q-sym3-is-6", q_sym3),
        ("gfa", "q-c4-is-4", q_c4),
        ("gfa", "sym3-kernel-trivial", sym3_kernel_trivial),
        ("gfa", "v0-profile-tidy", v0_tidy),
        ("gfa", "band-profiles-tidy", band_tidy),
        ("gfa", "sigma-local-permutation-flip", local_flip),
        ("gfa", "tau-local-permutation-rotation", local_rotation),
        ("gfa", "alt3-band-residue-factors", alt3_band_factors),
        ("gfa", "sigma-band-residue-factors", sigma_band_factors),
        ("gfa", "c4-band-residue-factors", c4_band_factors),
        ("padic", "hyperbolic-element-shifts-spine", hyperbolic_shift),
    ]
}

/// Runs every row whose module is in `only` (all rows when `only` is empty).
pub fn repro_all(only: &[String], parallel: bool) -> Vec<ReproRow> {
    let selected = |m: &str| only.is_empty() || only.iter().any(|o| o == m);
    let mut jobs: Vec<Job> = Vec::new();
    for (module, check, f) in checks() {
        if selected(module) {
            jobs.push((module.into(), check.into(), Box::new(f)));
        }
    }
    if selected("scenario") {
        for &(name, text) in SCENARIOS {
            jobs.push(("scenario".into(), name.into(), Box::new(move || bundled_scenario(name, text))));
        }
    }
    let run = |(module, check, f): &Job| {
        let (ok, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        ReproRow {
            module: module.clone(),
            check: check.clone(),
            ok,
            detail,
        }
    };
    if parallel {
        jobs.par_iter().map(run).collect()
    } else {
        jobs.iter().map(run).collect()
    }
}

fn bundled_scenario(name: &str, text: &str) -> Result<(bool, String)> {
    let dir = std::env::temp_dir().join(format!("scalelab-repro-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| crate::Error::Io(e.to_string()))?;
    std::fs::write(dir.join("root_swap.aut"), ROOT_SWAP_AUT).map_err(|e| crate::Error::Io(e.to_string()))?;
    let sc = parse_scenario(text, Path::new(&dir))?;
    let reports = run_scenario(&sc, false);
    let failed: Vec<String> = reports.iter().filter(|r| !r.ok).map(|r| format!("line {}", r.line)).collect();
    if EXPECTED_FAILURES.contains(&name) {
        let counterexample = reports
            .iter()
            .any(|r| !r.ok && r.task == "check-sr" && !r.result["counterexample"].is_null());
        Ok((counterexample, format!("{} tasks, expected failure at {}", reports.len(), failed.join(", "))))
    } else {
        let detail = if failed.is_empty() {
            format!("{} tasks ok", reports.len())
        } else {
            format!("failing: {}", failed.join(", "))
        };
        Ok((failed.is_empty(), detail))
    }
}

fn flip_cycle_images() -> Result<(bool, String)> {
    let p = parse_cycles("(0 3)(1 4)(2 5)", 6)?;
    Ok((p.images() == [3, 4, 5, 0, 1, 2], format!("{:?}", p.images())))
}

fn rotation_cycle_images() -> Result<(bool, String)> {
    let p = parse_cycles("(0 1 2)(3 4 5)", 6)?;
    Ok((p.images() == [1, 2, 0, 4, 5, 3], format!("{:?}", p.images())))
}

fn flip_rotation_group() -> Result<(bool, String)> {
    let g = PermGroup::new(6, vec![parse_cycles("(0 3)(1 4)(2 5)", 6)?, parse_cycles("(0 1 2)(3 4 5)", 6)?])?;
    let order = g.order()?;
    Ok((g.is_abelian() && order == 6u32.into(), format!("order {order}, abelian {}", g.is_abelian())))
}

fn x0_shifts_spine() -> Result<(bool, String)> {
    let ok = (2..=4).all(|q| (-3..=3).all(|n| UnrootedVertex::spine(q, n).x0_translate(1) == UnrootedVertex::spine(q, n + 1)));
    Ok((ok, "q = 2..4, n = -3..3".into()))
}

fn parent_edge_label() -> Result<(bool, String)> {
    let v = UnrootedVertex::parse(3, "1:2")?;
    let l = standard_label(&v, &v.parent())?;
    let window = Window::new(3, 1, 2);
    let labels = EdgeLabelling::standard(&window);
    let all = window
        .vertices()
        .iter()
        .filter(|u| u.level() < window.bottom)
        .all(|u| labels.label(u, &u.parent()) == Some(3));
    Ok((l == 3 && all, format!("label {l}")))
}

fn grigorchuk_b_section() -> Result<(bool, String)> {
    let g = grigorchuk()?;
    let (image, section) = g.section_word(&g.parse_word("b")?, &[0]);
    let ok = image == [0] && section == g.parse_word("a")?;
    Ok((ok, format!("image {image:?}")))
}

fn universal_residue() -> Result<(bool, String)> {
    let mut out = Vec::new();
    let mut ok = true;
    for q in 2..=4 {
        let r = residue(&full_sym_level(q)?, 1)?;
        ok &= r.group.same_group(&PermGroup::symmetric(q))?;
        out.push(format!("q={q}: order {}", r.fingerprint.order));
    }
    Ok((ok, out.join(", ")))
}

fn regular_sym3_not_unique() -> Result<(bool, String)> {
    let f = FiniteGroup::sym3();
    let ctx = make_gfa(f.clone(), f.trivial())?;
    let level1 = profile_residue(&TidyProfile::v0(&ctx), 1)?.report.group;
    let r = uniqueness_criterion(&level1)?;
    let blocks = r.witness_blocks.as_ref().map(|b| b.block_size());
    Ok((!r.unique_up_to_conjugacy && blocks.is_some(), format!("block size {blocks:?}")))
}

fn x0_in_group() -> Result<(bool, String)> {
    let data = ScaleGroupData::new(grigorchuk()?, 2, 3)?;
    let x0 = data.action(&ScaleElement::translation(1));
    let window = data.window();
    let ok = window
        .vertices()
        .iter()
        .filter(|w| w.level() < window.bottom)
        .map(|w| x0.act(w).map(|img| img == w.x0_translate(1)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|b| b);
    Ok((ok, format!("window {}..{}", window.top, window.bottom)))
}

fn coset_transversal_standard() -> Result<(bool, String)> {
    let f = FiniteGroup::sym3();
    let ctx = make_gfa(f.clone(), f.trivial())?;
    let pf = TidyProfile::band(&ctx, f.generate(&[1]), 1)?;
    let window = Window::new(6, 1, 2);
    let tree = build_coset_tree(&ctx, &pf, window)?;
    let xs: Vec<GfaElement> = tree.transversal().iter().map(|g| GfaElement::new(g.clone(), 1)).collect();
    let acts: Vec<_> = xs.iter().map(|x| tree.action(x)).collect();
    let t: Vec<&dyn TreeAction> = acts.iter().map(|a| a as &dyn TreeAction).collect();
    let built = build_labelling(&t, &UnrootedVertex::spine(6, 0), &window)?;
    Ok((built.labels == EdgeLabelling::standard(&window), format!("{} vertices", built.labels.labels.len())))
}

fn q_sym3() -> Result<(bool, String)> {
    let f = FiniteGroup::sym3();
    let q = make_gfa(f.clone(), f.trivial())?.q();
    Ok((q == 6, format!("q = {q}")))
}

fn q_c4() -> Result<(bool, String)> {
    let f = FiniteGroup::cyclic(4)?;
    let q = make_gfa(f.clone(), f.trivial())?.q();
    Ok((q == 4, format!("q = {q}")))
}

fn sym3_kernel_trivial() -> Result<(bool, String)> {
    let f = FiniteGroup::sym3();
    let k = kernel_c(&f, &f.trivial());
    Ok((k.len() == 1, format!("|kernel| = {}", k.len())))
}

fn v0_tidy() -> Result<(bool, String)> {
    let f = FiniteGroup::sym3();
    let ctx = make_gfa(f.clone(), f.trivial())?;
    let r = profile_tidiness(&TidyProfile::v0(&ctx))?;
    Ok((r.tidy && r.index_of_shift == 6, format!("tidy {}, index {}", r.tidy, r.index_of_shift)))
}

fn band_tidy() -> Result<(bool, String)> {
    let f = FiniteGroup::sym3();
    let ctx = make_gfa(f.clone(), f.trivial())?;
    let mut ok = true;
    for r in 1..=3 {
        let t = profile_tidiness(&TidyProfile::band(&ctx, f.generate(&[1]), r)?)?;
        ok &= t.tidy && t.index_of_shift == 6;
    }
    Ok((ok, "r = 1..3".into()))
}

fn band_tree() -> Result<crate::gfa::CosetTree> {
    let f = FiniteGroup::sym3();
    let ctx = make_gfa(f.clone(), f.trivial())?;
    let pf = TidyProfile::band(&ctx, f.generate(&[1]), 1)?;
    build_coset_tree(&ctx, &pf, Window::new(6, 2, 3))
}

fn local_flip() -> Result<(bool, String)> {
    let tree = band_tree()?;
    let flip = parse_cycles("(0 3)(1 4)(2 5)", 6)?;
    let sigma = FiniteGroup::sym3().element_by_name("s").expect("named element");
    let mut count = 0;
    let mut ok = true;
    for j in tree.window.top..tree.window.bottom {
        for (_, p) in tree.local_permutations(&FSeqElement::single(j, sigma), j)? {
            ok &= p == flip;
            count += 1;
        }
    }
    Ok((ok, format!("{count} vertices")))
}

fn local_rotation() -> Result<(bool, String)> {
    let tree = band_tree()?;
    let rot = parse_cycles("(0 1 2)(3 4 5)", 6)?;
    let tau = FiniteGroup::sym3().element_by_name("t").expect("named element");
    let mut count = 0;
    let mut ok = true;
    for j in tree.window.top..tree.window.bottom - 1 {
        for (v, p) in tree.local_permutations(&FSeqElement::single(j, tau), j + 1)? {
            let expected = if v.last_digit() < 3 { rot.clone() } else { rot.inverse() };
            ok &= p == expected;
            count += 1;
        }
    }
    Ok((ok, format!("{count} vertices")))
}

fn sorted(mut v: Vec<GroupFingerprint>) -> Vec<GroupFingerprint> {
    v.sort_by_key(|x| format!("{x:?}"));
    v
}

fn factor_rows(
    f: &FiniteGroup,
    band: &[usize],
    expected: impl Fn(usize, usize) -> (Vec<(PermGroup, usize)>, u64),
) -> Result<(bool, String)> {
    let ctx = make_gfa(f.clone(), f.trivial())?;
    let mut ok = true;
    let mut out = Vec::new();
    for (r, d) in [(1usize, 2usize), (1, 3), (2, 3), (2, 4)] {
        let res = profile_residue(&TidyProfile::band(&ctx, f.generate(band), r)?, d)?;
        let (factors, order) = expected(r, d);
        let mut want = Vec::new();
        for (g, n) in factors {
            want.extend(std::iter::repeat_n(g.fingerprint()?, n));
        }
        let got = res.report.factors.clone().unwrap_or_default();
        ok &= sorted(got) == sorted(want) && res.order() == order.into();
        out.push(format!("(r={r},d={d}) order {}", res.order()));
    }
    Ok((ok, out.join(", ")))
}

fn alt3_band_factors() -> Result<(bool, String)> {
    factor_rows(&FiniteGroup::sym3(), &[1], |r, d| {
        (
            vec![(PermGroup::cyclic(3), r), (PermGroup::symmetric(3), d - r), (PermGroup::cyclic(2), r)],
            6u64.pow(d as u32),
        )
    })
}

fn sigma_band_factors() -> Result<(bool, String)> {
    factor_rows(&FiniteGroup::sym3(), &[3], |r, d| {
        (
            vec![(PermGroup::cyclic(2), r), (PermGroup::symmetric(3), d)],
            2u64.pow(r as u32) * 6u64.pow(d as u32),
        )
    })
}

fn c4_band_factors() -> Result<(bool, String)> {
    factor_rows(&FiniteGroup::cyclic(4)?, &[2], |r, d| {
        (vec![(PermGroup::cyclic(2), 2 * r), (PermGroup::cyclic(4), d - r)], 4u64.pow(d as u32))
    })
}

fn hyperbolic_shift() -> Result<(bool, String)> {
    let mut ok = true;
    for p in [2u32, 3, 5, 7] {
        let x = AffineElement::integers(p, 0, p as u64)?;
        ok &= x.act(&UnrootedVertex::spine(p as usize, 0))? == UnrootedVertex::spine(p as usize, 1);
    }
    Ok((ok, "p = 2, 3, 5, 7".into()))
}

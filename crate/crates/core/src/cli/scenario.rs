//! Line-based scenario files: a group declaration, an optional window and a list of tasks,
//! each producing one JSON object.
//!
//! ```text
//! gfa F=sym3 A=1 tidy=V r=1
//! window -1..2
//! residue d=1 expect-order=6 expect-abelian=true expect-group="(0 3)(1 4)(2 5); (0 1 2)(3 4 5)"
//! tree window=-1..1 dot=out.dot
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::dot::{write_dot, LabelledWindowTree};
use crate::automata::{builtin, check_self_replicating, level_quotient, parse_automaton, SelfSimilarGroup};
use crate::corr::{
    build_labelling, check_compatible, correspondence_round_trip, CompatibilityReport, CompatibleLabelling,
    ScaleGroupData,
};
use crate::gfa::{build_coset_tree, make_gfa, profile_residue, profile_tidiness, FSeqElement, FiniteGroup, Gfa, GfaElement, SubgroupSet, TidyProfile};
use crate::limits;
use crate::padic::{compatible_labelling, labelling_transversal, odometer_extract, AffineElement, PAdicWindow};
use crate::perm::{PermGroup, Permutation};
use crate::residue::{coset_equivalence_check, coset_equivalence_for, index_check, uniqueness_criterion, ResidueReport};
use crate::trees::{EdgeLabelling, TreeAction, UnrootedVertex, Window};
use crate::{Error, Result};

/// Where a scenario's group comes from.
#[derive(Clone, Debug)]
pub enum GroupSource {
    Automaton(SelfSimilarGroup),
    Gfa { ctx: Gfa, profile: TidyProfile, spec: String },
    Padic { b: PAdicWindow },
}

impl GroupSource {
    pub fn q(&self) -> usize {
        match self {
            GroupSource::Automaton(g) => g.q(),
            GroupSource::Gfa { ctx, .. } => ctx.q(),
            GroupSource::Padic { b } => b.p() as usize,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GroupSource::Automaton(g) => g.name.clone(),
            GroupSource::Gfa { spec, .. } => spec.clone(),
            GroupSource::Padic { b } => format!("padic p={} b={b}", b.p()),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            GroupSource::Automaton(_) => "automaton",
            GroupSource::Gfa { .. } => "gfa",
            GroupSource::Padic { .. } => "padic",
        }
    }
}

/// A task with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum TaskKind {
    Residue {
        levels: Vec<usize>,
        expect_order: Option<BigUint>,
        expect_abelian: Option<bool>,
        expect_group: Option<Vec<String>>,
    },
    CheckSelfReplicating { depth: usize, expect_pass: Option<bool> },
    Index,
    CosetEquivalence { levels: Vec<usize>, vertex: Option<Vec<u8>> },
    Primitivity { expect_unique: Option<bool> },
    Labelling { trials: usize, seed: u64 },
    RoundTrip { max_d: usize },
    Tidiness,
    Odometer { levels: Vec<usize> },
    Tree { dot: Option<PathBuf> },
}

impl TaskKind {
    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::Residue { .. } => "residue",
            TaskKind::CheckSelfReplicating { .. } => "check-sr",
            TaskKind::Index => "index",
            TaskKind::CosetEquivalence { .. } => "coset-equivalence",
            TaskKind::Primitivity { .. } => "primitivity",
            TaskKind::Labelling { .. } => "labelling",
            TaskKind::RoundTrip { .. } => "roundtrip",
            TaskKind::Tidiness => "tidiness",
            TaskKind::Odometer { .. } => "odometer",
            TaskKind::Tree { .. } => "tree",
        }
    }

    fn applies_to(&self, source: &GroupSource) -> bool {
        match self {
            TaskKind::CheckSelfReplicating { .. } | TaskKind::RoundTrip { .. } => {
                matches!(source, GroupSource::Automaton(_))
            }
            TaskKind::Tidiness => matches!(source, GroupSource::Gfa { .. }),
            TaskKind::Odometer { .. } => matches!(source, GroupSource::Padic { .. }),
            _ => true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Task {
    pub line: usize,
    /// Index into [`Scenario::groups`].
    pub group: usize,
    /// `(top, bottom)` in effect for this task, if any was given.
    pub window: Option<(i64, i64)>,
    pub kind: TaskKind,
}

#[derive(Clone, Debug, Default)]
pub struct Scenario {
    pub groups: Vec<GroupSource>,
    pub tasks: Vec<Task>,
}

/// The result of one task as emitted on the report stream.
#[derive(Clone, Debug, Serialize)]
pub struct TaskReport {
    pub line: usize,
    pub task: String,
    pub group: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub result: Value,
}

impl TaskReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

struct Args {
    line: usize,
    map: BTreeMap<String, String>,
    positional: Vec<String>,
}

impl Args {
    fn parse(line: usize, tokens: &[String]) -> Result<Args> {
        let mut map = BTreeMap::new();
        let mut positional = Vec::new();
        for t in tokens {
            match t.split_once('=') {
                Some((k, v)) => {
                    if map.insert(k.to_string(), v.to_string()).is_some() {
                        return Err(Error::parse(line, format!("repeated key {k:?}")));
                    }
                }
                None => positional.push(t.clone()),
            }
        }
        Ok(Args { line, map, positional })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn take_parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::parse(self.line, format!("bad value {v:?} for {key}"))),
        }
    }

    fn take_bool(&mut self, key: &str) -> Result<Option<bool>> {
        self.take_parsed(key)
    }

    fn take_levels(&mut self, key: &str, default: &str) -> Result<Vec<usize>> {
        let text = self.take(key).unwrap_or_else(|| default.to_string());
        let (lo, hi) = parse_range(self.line, &text)?;
        if lo < 0 || hi < lo {
            return Err(Error::parse(self.line, format!("bad level range {text:?}")));
        }
        Ok((lo as usize..=hi as usize).collect())
    }

    fn finish(self) -> Result<()> {
        if let Some(k) = self.map.keys().next() {
            return Err(Error::parse(self.line, format!("unknown key {k:?}")));
        }
        if let Some(p) = self.positional.first() {
            return Err(Error::parse(self.line, format!("unexpected argument {p:?}")));
        }
        Ok(())
    }
}

/// `a..b` or a single integer `a`, inclusive.
fn parse_range(line: usize, text: &str) -> Result<(i64, i64)> {
    let bad = || Error::parse(line, format!("bad range {text:?}"));
    match text.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        }
        None => {
            let a = text.trim().parse().map_err(|_| bad())?;
            Ok((a, a))
        }
    }
}

fn subgroup_from_names(f: &FiniteGroup, line: usize, text: &str) -> Result<SubgroupSet> {
    if text == "1" || text == "trivial" {
        return Ok(f.trivial());
    }
    let gens = text
        .split(',')
        .map(|n| {
            f.element_by_name(n.trim())
                .ok_or_else(|| Error::parse(line, format!("no element named {n:?} in {}", f.name())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(f.generate(&gens))
}

/// The band subgroups used by the bundled examples: `V` is `Alt(3)` in `Sym(3)` and the
/// index-2 subgroup of an even cyclic group; `W` is `⟨σ⟩` in `Sym(3)`.
fn default_band(f: &FiniteGroup, kind: &str) -> Option<SubgroupSet> {
    match (f.name(), kind) {
        ("sym3", "V") => f.element_by_name("t").map(|t| f.generate(&[t])),
        ("sym3", "W") => f.element_by_name("s").map(|s| f.generate(&[s])),
        (name, "V") if name.starts_with('c') && f.order().is_multiple_of(2) => Some(f.generate(&[2 % f.order()])),
        _ => None,
    }
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

fn parse_gfa(mut a: Args, base: &Path) -> Result<GroupSource> {
    let line = a.line;
    let fname = a.take("F").ok_or_else(|| Error::parse(line, "gfa needs F=<group>"))?;
    let f = match FiniteGroup::builtin(&fname) {
        Ok(f) => f,
        Err(_) => {
            let path = resolve(base, &fname);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::parse(line, format!("{}: {e}", path.display())))?;
            FiniteGroup::parse_cayley(&fname, &text)?
        }
    };
    let a_text = a.take("A").unwrap_or_else(|| "1".into());
    let sub_a = subgroup_from_names(&f, line, &a_text)?;
    let ctx = make_gfa(f.clone(), sub_a).map_err(|e| Error::parse(line, e.to_string()))?;
    let tidy = a.take("tidy").unwrap_or_else(|| "V0".into());
    let r: usize = a.take_parsed("r")?.unwrap_or(1);
    let band = a.take("B");
    let profile = match (tidy.as_str(), band) {
        ("V0", None) => TidyProfile::v0(&ctx),
        (_, Some(b)) => TidyProfile::band(&ctx, subgroup_from_names(&f, line, &b)?, r)?,
        (kind, None) => {
            let b = default_band(&f, kind)
                .ok_or_else(|| Error::parse(line, format!("no default tidy={kind} for {}; give B=<generators>", f.name())))?;
            TidyProfile::band(&ctx, b, r)?
        }
    };
    let spec = format!("gfa F={fname} A={a_text} tidy={tidy} r={r}");
    a.finish()?;
    Ok(GroupSource::Gfa { ctx, profile, spec })
}

fn parse_task(kind: &str, mut a: Args) -> Result<TaskKind> {
    let line = a.line;
    let task = match kind {
        "residue" | "residues" => {
            let levels = a.take_levels("d", "1")?;
            let expect_order = a
                .take("expect-order")
                .map(|s| s.parse::<BigUint>().map_err(|_| Error::parse(line, format!("bad order {s:?}"))))
                .transpose()?;
            let expect_abelian = a.take_bool("expect-abelian")?;
            let expect_group = a
                .take("expect-group")
                .map(|s| {
                    s.split(';').map(|c| c.trim().to_string()).collect::<Vec<_>>()
                });
            TaskKind::Residue {
                levels,
                expect_order,
                expect_abelian,
                expect_group,
            }
        }
        "check-sr" => TaskKind::CheckSelfReplicating {
            depth: a.take_parsed("depth")?.unwrap_or(3),
            expect_pass: match a.take("expect").as_deref() {
                None => None,
                Some("pass") => Some(true),
                Some("fail") => Some(false),
                Some(other) => return Err(Error::parse(line, format!("expect must be pass or fail, got {other:?}"))),
            },
        },
        "index" => TaskKind::Index,
        "coset-equivalence" => TaskKind::CosetEquivalence {
            levels: a.take_levels("d", "2")?,
            vertex: a
                .take("w")
                .map(|w| {
                    w.chars()
                        .map(|c| c.to_digit(36).map(|d| d as u8).ok_or_else(|| Error::parse(line, format!("bad digit {c:?}"))))
                        .collect::<Result<Vec<_>>>()
                })
                .transpose()?,
        },
        "primitivity" => TaskKind::Primitivity {
            expect_unique: a.take_bool("expect-unique")?,
        },
        "labelling" => TaskKind::Labelling {
            trials: a.take_parsed("trials")?.unwrap_or(40),
            seed: a.take_parsed("seed")?.unwrap_or(1),
        },
        "roundtrip" => TaskKind::RoundTrip {
            max_d: a.take_parsed("d")?.unwrap_or(3),
        },
        "tidiness" => TaskKind::Tidiness,
        "odometer" => TaskKind::Odometer {
            levels: a.take_levels("d", "1..3")?,
        },
        "tree" => TaskKind::Tree {
            dot: a.take("dot").map(PathBuf::from),
        },
        other => return Err(Error::parse(line, format!("unknown task {other:?}"))),
    };
    a.finish()?;
    Ok(task)
}

/// Parses scenario text; relative file names resolve against `base`.
pub fn parse_scenario(text: &str, base: &Path) -> Result<Scenario> {
    let mut sc = Scenario::default();
    let mut window: Option<(i64, i64)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens = shlex::split(content).ok_or_else(|| Error::parse(line, "unbalanced quotes"))?;
        let (kw, rest) = tokens.split_first().expect("nonempty line");
        let mut args = Args::parse(line, rest)?;
        match kw.as_str() {
            "group" => {
                let source = if let Some(name) = args.take("builtin") {
                    GroupSource::Automaton(builtin(&name).map_err(|e| Error::parse(line, e.to_string()))?)
                } else if let Some(file) = args.take("automaton") {
                    let path = resolve(base, &file);
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Error::parse(line, format!("{}: {e}", path.display())))?;
                    let name = path.file_stem().map_or(file.clone(), |s| s.to_string_lossy().into_owned());
                    GroupSource::Automaton(parse_automaton(&name, &text)?)
                } else {
                    return Err(Error::parse(line, "group needs builtin=<name> or automaton=<file>"));
                };
                args.finish()?;
                sc.groups.push(source);
            }
            "gfa" => sc.groups.push(parse_gfa(args, base)?),
            "padic" => {
                let p: u32 = args
                    .take_parsed("p")?
                    .ok_or_else(|| Error::parse(line, "padic needs p=<prime>"))?;
                let b_text = args.take("b").unwrap_or_else(|| "1".into());
                let b = if b_text.contains('@') {
                    b_text.parse::<PAdicWindow>()?
                } else {
                    let n: u64 = b_text
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad unit {b_text:?}")))?;
                    PAdicWindow::exact_integer(p, n).map_err(|e| Error::parse(line, e.to_string()))?
                };
                args.finish()?;
                sc.groups.push(GroupSource::Padic { b });
            }
            "window" => {
                let r: Option<i64> = args.take_parsed("R")?;
                let d: Option<i64> = args.take_parsed("D")?;
                window = Some(match (r, d, args.positional.pop()) {
                    (Some(r), Some(d), None) => (-r, d),
                    (None, None, Some(range)) => parse_range(line, &range)?,
                    _ => return Err(Error::parse(line, "window needs R=<r> D=<d> or a range top..bottom")),
                });
                args.finish()?;
            }
            kind => {
                let task_window = args.take("window").map(|w| parse_range(line, &w)).transpose()?;
                let kind = parse_task(kind, args)?;
                let group = sc
                    .groups
                    .len()
                    .checked_sub(1)
                    .ok_or_else(|| Error::parse(line, format!("task {} before any group declaration", kind.name())))?;
                if !kind.applies_to(&sc.groups[group]) {
                    return Err(Error::parse(
                        line,
                        format!("task {} does not apply to {} groups", kind.name(), sc.groups[group].kind()),
                    ));
                }
                sc.tasks.push(Task {
                    line,
                    group,
                    window: task_window.or(window),
                    kind,
                });
            }
        }
    }
    Ok(sc)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text, path.parent().unwrap_or(Path::new(".")))
}

/// Runs every task in declaration order; with `parallel`, tasks run concurrently but the
/// reports keep declaration order.
pub fn run_scenario(sc: &Scenario, parallel: bool) -> Vec<TaskReport> {
    let run = |t: &Task| run_task(sc, t);
    if parallel {
        sc.tasks.par_iter().map(run).collect()
    } else {
        sc.tasks.iter().map(run).collect()
    }
}

fn run_task(sc: &Scenario, t: &Task) -> TaskReport {
    let source = &sc.groups[t.group];
    let (ok, result, error) = match execute(source, t) {
        Ok((ok, result)) => (ok, result, None),
        Err(e) => (false, Value::Null, Some(e.to_string())),
    };
    TaskReport {
        line: t.line,
        task: t.kind.name().to_string(),
        group: source.describe(),
        ok,
        error,
        result,
    }
}

fn task_window(source: &GroupSource, t: &Task) -> Window {
    let n = limits::default_window();
    let (top, bottom) = t.window.unwrap_or((-n, n));
    Window::from_range(source.q(), top, bottom)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn level_one(source: &GroupSource) -> Result<PermGroup> {
    Ok(match source {
        GroupSource::Automaton(g) => level_quotient(g, 1)?.group,
        GroupSource::Gfa { profile, .. } => profile_residue(profile, 1)?.report.group,
        GroupSource::Padic { b } => odometer_extract(b.p(), 1)?.extracted,
    })
}

fn residue_value(r: &ResidueReport, checks: &TaskKind) -> Result<(bool, Value)> {
    let mut v = to_value(r);
    let mut ok = true;
    if let TaskKind::Residue {
        expect_order,
        expect_abelian,
        expect_group,
        ..
    } = checks
    {
        if let Some(o) = expect_order {
            ok &= &r.fingerprint.order == o;
        }
        if let Some(a) = expect_abelian {
            ok &= r.fingerprint.abelian == *a;
        }
        if let Some(gens) = expect_group {
            let resized = gens
                .iter()
                .map(|g| Permutation::parse_cycles(g, r.group.degree()))
                .collect::<Result<Vec<_>>>()?;
            let expected = PermGroup::new(r.group.degree(), resized)?;
            let same = expected.same_group(&r.group)?;
            v["matches_expected_group"] = json!(same);
            ok &= same;
        }
    }
    Ok((ok, v))
}

fn compatibility_value(labelling: &CompatibleLabelling, report: &CompatibilityReport, failing: Option<UnrootedVertex>) -> Value {
    json!({
        "window": [labelling.window.top, labelling.window.bottom],
        "labelled_vertices": labelling.labels.labels.len(),
        "witnesses": labelling.witnesses.len(),
        "failing_witness": failing.map(|v| v.to_string()),
        "standard": labelling.labels == EdgeLabelling::standard(&labelling.window),
        "trials": report.trials,
        "passed": report.passed,
        "counterexample": report.counterexample.as_ref().map(|c| json!({
            "u1": c.u1.to_string(), "u2": c.u2.to_string(), "reason": c.reason,
        })),
    })
}

fn as_dyn<T: TreeAction>(xs: &[T]) -> Vec<&dyn TreeAction> {
    xs.iter().map(|x| x as &dyn TreeAction).collect()
}

fn gfa_generators(tree: &crate::gfa::CosetTree) -> Vec<GfaElement> {
    let f = &tree.profile.f;
    std::iter::once(GfaElement::alpha(1))
        .chain(
            f.whole()
                .generators(f)
                .into_iter()
                .map(|x| GfaElement::new(FSeqElement::single(0, x), 0)),
        )
        .collect()
}

fn labelling(source: &GroupSource, window: &Window, trials: usize, seed: u64) -> Result<(bool, Value)> {
    let (built, report, failing) = match source {
        GroupSource::Automaton(g) => {
            let data = ScaleGroupData::new(g.clone(), -window.top, window.bottom)?;
            let xs = data.transversal()?;
            let acts: Vec<_> = xs.iter().map(|x| data.action(x)).collect();
            let t = as_dyn(&acts);
            let built = build_labelling(&t, &UnrootedVertex::spine(data.q(), 0), &data.window())?;
            let failing = built.failing_witness(&t)?;
            let gens: Vec<_> = data.generators().iter().map(|x| data.action(x)).collect();
            let report = check_compatible(&built.labels, &data.window(), &as_dyn(&gens), trials, seed)?;
            (built, report, failing)
        }
        GroupSource::Gfa { ctx, profile, .. } => {
            let tree = build_coset_tree(ctx, profile, *window)?;
            let xs: Vec<GfaElement> = tree.transversal().iter().map(|g| GfaElement::new(g.clone(), 1)).collect();
            let acts: Vec<_> = xs.iter().map(|x| tree.action(x)).collect();
            let t = as_dyn(&acts);
            let built = build_labelling(&t, &UnrootedVertex::spine(tree.q(), 0), window)?;
            let failing = built.failing_witness(&t)?;
            let gens = gfa_generators(&tree);
            let gen_acts: Vec<_> = gens.iter().map(|x| tree.action(x)).collect();
            let report = check_compatible(&built.labels, window, &as_dyn(&gen_acts), trials, seed)?;
            (built, report, failing)
        }
        GroupSource::Padic { b } => {
            let built = compatible_labelling(b, window)?;
            let xs = labelling_transversal(b)?;
            let failing = built.failing_witness(&as_dyn(&xs))?;
            let bp = b.mul(&PAdicWindow::exact_integer(b.p(), b.p() as u64)?)?;
            let gens = [
                AffineElement::integers(b.p(), 1, 1)?,
                AffineElement::new(PAdicWindow::exact_integer(b.p(), 0)?, bp)?,
            ];
            let report = check_compatible(&built.labels, window, &as_dyn(&gens), trials, seed)?;
            (built, report, failing)
        }
    };
    let ok = failing.is_none() && report.ok();
    Ok((ok, compatibility_value(&built, &report, failing)))
}

fn execute(source: &GroupSource, t: &Task) -> Result<(bool, Value)> {
    match &t.kind {
        TaskKind::Residue { levels, .. } => {
            let mut ok = true;
            let mut out = Vec::new();
            for &d in levels {
                let (level_ok, mut v) = match source {
                    GroupSource::Automaton(g) => residue_value(&crate::residue::residue(g, d)?, &t.kind)?,
                    GroupSource::Gfa { profile, .. } => {
                        let r = profile_residue(profile, d)?;
                        let (ok, mut v) = residue_value(&r.report, &t.kind)?;
                        v["coset_count"] = json!(r.coset_count.to_string());
                        v["core_index"] = json!(r.core_index.to_string());
                        v["self_consistent"] = json!(r.self_consistent());
                        v["coordinatewise_normal"] = json!(r.coordinatewise_normal());
                        v["factors"] = to_value(&r.factors);
                        (ok && r.self_consistent(), v)
                    }
                    GroupSource::Padic { b } => {
                        let o = odometer_extract(b.p(), d)?;
                        residue_value(&ResidueReport::new(d, o.extracted, None)?, &t.kind)?
                    }
                };
                v["ok"] = json!(level_ok);
                ok &= level_ok;
                out.push(v);
            }
            Ok((ok, json!({ "levels": out })))
        }
        TaskKind::CheckSelfReplicating { depth, expect_pass } => {
            let GroupSource::Automaton(g) = source else { unreachable!("checked at parse time") };
            let r = check_self_replicating(g, *depth)?;
            let ok = r.passed() == expect_pass.unwrap_or(true);
            let mut v = to_value(&r);
            v["passed"] = json!(r.passed());
            Ok((ok, v))
        }
        TaskKind::Index => match source {
            GroupSource::Automaton(g) => {
                let r = index_check(g)?;
                Ok((r.ok, to_value(&r)))
            }
            _ => {
                let g = level_one(source)?;
                let index = g.orbit(0).len();
                Ok((index == source.q(), json!({ "q": source.q(), "index": index })))
            }
        },
        TaskKind::CosetEquivalence { levels, vertex } => {
            let mut ok = true;
            let mut out = Vec::new();
            for &d in levels {
                let r = match source {
                    GroupSource::Automaton(g) => {
                        let w = vertex.clone().unwrap_or_else(|| vec![0; d]);
                        coset_equivalence_check(g, d, &w)?
                    }
                    GroupSource::Gfa { profile, .. } => coset_equivalence_for(&profile_residue(profile, d)?.report.group, 0)?,
                    GroupSource::Padic { b } => coset_equivalence_for(&odometer_extract(b.p(), d)?.extracted, 0)?,
                };
                ok &= r.equivalent;
                out.push(json!({ "d": d, "equivalent": r.equivalent, "relabelling": r.relabelling }));
            }
            Ok((ok, json!({ "levels": out })))
        }
        TaskKind::Primitivity { expect_unique } => {
            let r = uniqueness_criterion(&level_one(source)?)?;
            let ok = expect_unique.is_none_or(|e| e == r.unique_up_to_conjugacy);
            Ok((ok, to_value(&r)))
        }
        TaskKind::Labelling { trials, seed } => labelling(source, &task_window(source, t), *trials, *seed),
        TaskKind::RoundTrip { max_d } => {
            let GroupSource::Automaton(g) = source else { unreachable!("checked at parse time") };
            let r = correspondence_round_trip(g, -task_window(source, t).top.min(-1), *max_d)?;
            Ok((r.ok(), to_value(&r)))
        }
        TaskKind::Tidiness => {
            let GroupSource::Gfa { profile, .. } = source else { unreachable!("checked at parse time") };
            let r = profile_tidiness(profile)?;
            Ok((r.tidy && r.alpha_invariant_decrease, to_value(&r)))
        }
        TaskKind::Odometer { levels } => {
            let GroupSource::Padic { b } = source else { unreachable!("checked at parse time") };
            let mut ok = true;
            let mut out = Vec::new();
            for &d in levels {
                let r = odometer_extract(b.p(), d)?;
                ok &= r.passed();
                out.push(json!({
                    "d": d, "order": r.order.to_string(), "identical": r.identical,
                    "regular": r.regular, "cyclic": r.cyclic,
                }));
            }
            Ok((ok, json!({ "levels": out })))
        }
        TaskKind::Tree { dot } => {
            let window = task_window(source, t);
            let tree = window_tree(source, &window)?;
            if let Some(path) = dot {
                write_dot(&tree, path)?;
            }
            let edges = if window.is_empty() { 0 } else { window.vertex_count() - window.count_at(window.top) };
            Ok((
                true,
                json!({
                    "window": [window.top, window.bottom],
                    "nodes": window.vertex_count().to_string(),
                    "edges": edges.to_string(),
                    "dot": dot.as_ref().map(|p| p.display().to_string()),
                }),
            ))
        }
    }
}

/// The labelled window drawn by the `tree` task.
pub fn window_tree(source: &GroupSource, window: &Window) -> Result<LabelledWindowTree> {
    limits::check_points("window vertices", window.vertex_count())?;
    Ok(match source {
        GroupSource::Automaton(_) => LabelledWindowTree::standard(*window),
        GroupSource::Gfa { ctx, profile, .. } => LabelledWindowTree::from_coset_tree(&build_coset_tree(ctx, profile, *window)?)?,
        GroupSource::Padic { b } => {
            if window.top <= -1 && window.bottom >= -1 {
                LabelledWindowTree::from_compatible(&compatible_labelling(b, window)?)
            } else {
                LabelledWindowTree::standard(*window)
            }
        }
    })
}

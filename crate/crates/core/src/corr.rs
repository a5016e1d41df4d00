//! The correspondence between scale groups on `T_{q+1}` and self-replicating groups on
//! `T_{q,q}`, realized on finite windows: scale-group elements built from self-replicating
//! data, extraction of `P|_v`, compatible labellings and horosphere transitivity.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automata::{check_self_replicating, level_quotient, GroupWord, SelfSimilarGroup};
use crate::limits;
use crate::perm::{PermGroup, Permutation};
use crate::portraits::{index_string, string_index, RootedPortrait};
use crate::trees::{subtree_iso, subtree_iso_inv, EdgeLabelling, TreeAction, UnrootedVertex, Window};
use crate::{Error, Result};

/// A self-replicating group viewed as a scale group on the window `[-R, D]`, with elliptic
/// elements anchored at `ṽ_{-R}`.
#[derive(Clone, Debug)]
pub struct ScaleGroupData {
    pub group: SelfSimilarGroup,
    pub r: i64,
    pub d: i64,
}

/// The element `h ∘ x̃₀^k`: translate by `k`, then apply the word `h` below `ṽ_{-R}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ScaleElement {
    pub k: i64,
    pub word: GroupWord,
}

impl ScaleElement {
    pub fn identity() -> Self {
        ScaleElement::default()
    }

    pub fn translation(k: i64) -> Self {
        ScaleElement {
            k,
            word: GroupWord::identity(),
        }
    }

    pub fn elliptic(word: GroupWord) -> Self {
        ScaleElement { k: 0, word }
    }
}

impl ScaleGroupData {
    /// Requires `R, D ≥ 1` and self-replication at depth `R + D`.
    pub fn new(group: SelfSimilarGroup, r: i64, d: i64) -> Result<Self> {
        let data = Self::new_unchecked(group, r, d)?;
        let report = check_self_replicating(&data.group, (r + d) as usize)?;
        if !report.passed() {
            return Err(Error::Invalid(format!(
                "{} is not self-replicating at depth {}",
                data.group,
                r + d
            )));
        }
        Ok(data)
    }

    /// Skips the self-replication check.
    pub fn new_unchecked(group: SelfSimilarGroup, r: i64, d: i64) -> Result<Self> {
        if r < 1 || d < 1 {
            return Err(Error::Invalid(format!("window radius {r} and depth {d} must be at least 1")));
        }
        Ok(ScaleGroupData { group, r, d })
    }

    pub fn q(&self) -> usize {
        self.group.q()
    }

    pub fn window(&self) -> Window {
        Window::new(self.q(), self.r, self.d)
    }

    /// The anchor `ṽ_{-R}`.
    pub fn anchor(&self) -> UnrootedVertex {
        UnrootedVertex::spine(self.q(), -self.r)
    }

    /// `x̃₀` followed by the group's generators as elliptic elements.
    pub fn generators(&self) -> Vec<ScaleElement> {
        std::iter::once(ScaleElement::translation(1))
            .chain(self.group.generator_words().into_iter().map(ScaleElement::elliptic))
            .collect()
    }

    pub fn action(&self, g: &ScaleElement) -> ScaleAction<'_> {
        ScaleAction {
            data: self,
            k: g.k,
            word: g.word.clone(),
            inverse_word: g.word.inverse(),
        }
    }

    /// Parses `h * t^k` where `h` is a word over the states and `t` stands for `x̃₀`.
    pub fn parse_element(&self, text: &str) -> Result<ScaleElement> {
        let tokens: Vec<&str> = text
            .split(|c: char| c.is_whitespace() || c == '*')
            .filter(|t| !t.is_empty())
            .collect();
        let mut k = 0;
        let mut word_tokens = Vec::new();
        for (i, tok) in tokens.iter().enumerate() {
            let power = if *tok == "t" {
                Some(1)
            } else {
                tok.strip_prefix("t^").map(|e| {
                    e.parse::<i64>()
                        .map_err(|_| Error::Invalid(format!("bad translation exponent in {tok:?}")))
                })
                .transpose()?
            };
            match power {
                Some(p) if i + 1 == tokens.len() => k = p,
                Some(_) => {
                    return Err(Error::Invalid(format!(
                        "translation must be the rightmost factor in {text:?}"
                    )))
                }
                None => word_tokens.push(*tok),
            }
        }
        Ok(ScaleElement {
            k,
            word: self.group.parse_word(&word_tokens.join(" "))?,
        })
    }
}

impl ScaleGroupData {
    /// `x_i = h_i ∘ x̃₀` with `h_i` a shortest word moving `ṽ₁` to the child `i` of `ṽ₀`:
    /// elements carrying `ṽ₀` onto its children, as needed by [`build_labelling`].
    pub fn transversal(&self) -> Result<Vec<ScaleElement>> {
        let q = self.q();
        let len = (self.r + 1) as usize;
        limits::check_points("transversal search", (q as u128).saturating_pow(len as u32))?;
        let letters: Vec<GroupWord> = self
            .group
            .generator_words()
            .into_iter()
            .flat_map(|w| [w.inverse(), w])
            .collect();
        let start = vec![0u8; len];
        let mut words = HashMap::from([(start.clone(), GroupWord::identity())]);
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            for l in &letters {
                let t = self.group.evaluate(l, &s);
                if !words.contains_key(&t) {
                    let w = l.times(&words[&s]);
                    words.insert(t.clone(), w);
                    queue.push_back(t);
                }
            }
        }
        (0..q)
            .map(|i| {
                let mut target = vec![0u8; len];
                target[len - 1] = i as u8;
                let word = words.remove(&target).ok_or_else(|| {
                    Error::Intransitive(format!("no element moves ṽ_1 to the child {i} of ṽ_0"))
                })?;
                Ok(ScaleElement { k: 1, word })
            })
            .collect()
    }
}

/// A scale element acting on the whole subtree below the anchor.
#[derive(Clone, Debug)]
pub struct ScaleAction<'a> {
    data: &'a ScaleGroupData,
    k: i64,
    word: GroupWord,
    inverse_word: GroupWord,
}

impl ScaleAction<'_> {
    fn elliptic(&self, w: &GroupWord, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        let anchor = self.data.anchor();
        if w.is_empty() {
            return Ok(v.clone());
        }
        let s = subtree_iso(&anchor, v).map_err(|_| Error::WindowExceeded(format!("{v} is above the anchor {anchor}")))?;
        Ok(subtree_iso_inv(&anchor, &self.data.group.evaluate(w, s.digits())))
    }
}

impl TreeAction for ScaleAction<'_> {
    fn q(&self) -> usize {
        self.data.q()
    }

    fn act(&self, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        self.elliptic(&self.word, &v.x0_translate(self.k))
    }

    fn act_inverse(&self, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        Ok(self.elliptic(&self.inverse_word, v)?.x0_translate(-self.k))
    }
}

/// `g.v` for `v` and its image in the window `[-R, D]`.
pub fn scale_apply(data: &ScaleGroupData, g: &ScaleElement, v: &UnrootedVertex) -> Result<UnrootedVertex> {
    if g.k.abs() > data.r {
        return Err(Error::WindowExceeded(format!("translation {} exceeds the radius {}", g.k, data.r)));
    }
    let window = data.window();
    window.check(v)?;
    let w = data.action(g).act(v)?;
    window.check(&w)?;
    Ok(w)
}

/// A generator or its inverse, as an index into a generator list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Step {
    gen: usize,
    inverse: bool,
}

fn apply_step(gens: &[&dyn TreeAction], s: Step, v: &UnrootedVertex) -> Result<UnrootedVertex> {
    if s.inverse {
        gens[s.gen].act_inverse(v)
    } else {
        gens[s.gen].act(v)
    }
}

/// Treats leaving the domain of an action as "not in the region"; other errors propagate.
fn try_step(gens: &[&dyn TreeAction], s: Step, v: &UnrootedVertex) -> Result<Option<UnrootedVertex>> {
    match apply_step(gens, s, v) {
        Ok(w) => Ok(Some(w)),
        Err(Error::WindowExceeded(_) | Error::NotBelow { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn steps(n: usize) -> Vec<Step> {
    (0..n)
        .flat_map(|gen| [Step { gen, inverse: false }, Step { gen, inverse: true }])
        .collect()
}

fn format_word(word: &[Step]) -> String {
    if word.is_empty() {
        return "1".to_string();
    }
    word.iter()
        .rev()
        .map(|s| if s.inverse { format!("g{}^-1", s.gen) } else { format!("g{}", s.gen) })
        .collect::<Vec<_>>()
        .join(" ")
}

/// The orbit of `base` among window vertices of bounded level, with the transport maps on the
/// depth-`depth` leaves of `T_base` and Schreier generators of the stabilizer of `base`.
struct LeafOrbit {
    q: usize,
    depth: usize,
    vertices: Vec<UnrootedVertex>,
    index: HashMap<UnrootedVertex, usize>,
    /// `addr[w][i]`: address below `w` of the image of leaf `i` of `T_base` under the transport.
    addr: Vec<Vec<u32>>,
    inv_addr: Vec<Vec<u32>>,
    parent: Vec<Option<(usize, Step)>>,
    schreier: Vec<Permutation>,
}

/// Highest level explored when working at `depth` below a vertex: `search_depth` horospheres
/// beyond `bottom - depth` (orbits of `G(F, A)` need two to move a vertex along its
/// horosphere). The actions are exact on the whole tree, so transports may pass below the
/// window; labels are only read inside it.
fn region_limit(window: &Window, depth: usize) -> i64 {
    window.bottom - depth as i64 + limits::search_depth() as i64
}

impl LeafOrbit {
    fn build(gens: &[&dyn TreeAction], base: &UnrootedVertex, depth: usize, window: &Window) -> Result<LeafOrbit> {
        let q = window.q;
        let n = (q as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
        limits::check_points("subtree leaves", n)?;
        let region_size: u128 = (window.top..=region_limit(window, depth))
            .map(|l| (q as u128).saturating_pow((l - window.top) as u32))
            .sum();
        limits::check_points("orbit region", region_size.saturating_mul(n))?;
        let n = n as usize;
        let limit = region_limit(window, depth);
        let in_region = |w: &UnrootedVertex| w.level() >= window.top && w.lowest_position() > window.top && w.level() <= limit;
        if !in_region(base) {
            return Err(Error::WindowExceeded(format!("{base} at depth {depth}")));
        }
        let leaf_strings: Vec<Vec<u8>> = (0..n).map(|a| index_string(q, depth, a)).collect();
        let mut out = LeafOrbit {
            q,
            depth,
            vertices: vec![base.clone()],
            index: HashMap::from([(base.clone(), 0)]),
            addr: vec![(0..n as u32).collect()],
            inv_addr: vec![(0..n as u32).collect()],
            parent: vec![None],
            schreier: Vec::new(),
        };
        let mut seen_gens = HashSet::new();
        let all_steps = steps(gens.len());
        let mut queue = VecDeque::from([0usize]);
        while let Some(ui) = queue.pop_front() {
            let u = out.vertices[ui].clone();
            for &s in &all_steps {
                let Some(w) = try_step(gens, s, &u)? else { continue };
                if !in_region(&w) {
                    continue;
                }
                // the step on the leaves of T_u, as addresses below w
                let mut map = vec![0u32; n];
                for (a, ls) in leaf_strings.iter().enumerate() {
                    let img = apply_step(gens, s, &subtree_iso_inv(&u, ls))?;
                    let rel = subtree_iso(&w, &img)
                        .map_err(|_| Error::Invalid(format!("generator does not map T_{u} onto T_{w}")))?;
                    map[a] = string_index(q, rel.digits()) as u32;
                }
                let moved: Vec<u32> = out.addr[ui].iter().map(|&a| map[a as usize]).collect();
                match out.index.get(&w) {
                    None => {
                        let wi = out.vertices.len();
                        let mut inv = vec![0u32; n];
                        for (i, &a) in moved.iter().enumerate() {
                            inv[a as usize] = i as u32;
                        }
                        out.vertices.push(w.clone());
                        out.index.insert(w, wi);
                        out.addr.push(moved);
                        out.inv_addr.push(inv);
                        out.parent.push(Some((ui, s)));
                        queue.push_back(wi);
                    }
                    Some(&wi) => {
                        let images = moved
                            .iter()
                            .map(|&a| out.inv_addr[wi][a as usize] as usize)
                            .collect();
                        let p = Permutation::from_images(images)?;
                        if !p.is_identity() && seen_gens.insert(p.clone()) {
                            out.schreier.push(p);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn leaves(&self) -> usize {
        self.q.pow(self.depth as u32)
    }

    fn stabilizer(&self) -> Result<PermGroup> {
        PermGroup::new(self.leaves(), self.schreier.clone())
    }

    /// The word transporting the base to vertex `wi` (rightmost step first).
    fn transport(&self, mut wi: usize) -> Vec<Step> {
        let mut word = Vec::new();
        while let Some((p, s)) = self.parent[wi] {
            word.push(s);
            wi = p;
        }
        word
    }

    fn covers_level(&self, window: &Window, level: i64) -> bool {
        let count = self.vertices.iter().filter(|v| v.level() == level).count() as u128;
        count == window.count_at(level)
    }
}

/// The self-replicating group `P|_v` read off on the depth-`depth` levels below `v`.
#[derive(Clone, Debug)]
pub struct Extracted {
    pub vertex: UnrootedVertex,
    pub depth: usize,
    pub q: usize,
    /// Sections at `v` of Schreier generators of the stabilizer, as level permutations.
    pub generators: Vec<Permutation>,
    pub group: PermGroup,
    /// Size of the orbit of `v` explored in the window.
    pub orbit_size: usize,
}

impl Extracted {
    pub fn portraits(&self) -> Result<Vec<RootedPortrait>> {
        self.generators
            .iter()
            .map(|p| RootedPortrait::from_level_permutation(self.q, self.depth, p))
            .collect()
    }

    /// The image on level `d ≤ depth`.
    pub fn level_group(&self, d: usize) -> Result<PermGroup> {
        if d > self.depth {
            return Err(Error::Invalid(format!("level {d} below the extraction depth {}", self.depth)));
        }
        let stride = self.q.pow((self.depth - d) as u32);
        self.group.induced(self.q.pow(d as u32), |x| x / stride)
    }

    /// Orbit size of the child `0` on level 1; equals `q` for a scale group.
    pub fn index(&self) -> Result<usize> {
        if self.depth == 0 {
            return Ok(1);
        }
        Ok(self.level_group(1)?.orbit(0).len())
    }
}

/// Generators of `P|_v` at depth `depth` from Schreier generators of the stabilizer of `v`,
/// computed on the orbit of `v` among window vertices.
pub fn extract_selfreplicating(
    gens: &[&dyn TreeAction],
    v: &UnrootedVertex,
    depth: usize,
    window: &Window,
) -> Result<Extracted> {
    let orbit = LeafOrbit::build(gens, v, depth, window)?;
    if !orbit.covers_level(window, v.level()) {
        return Err(Error::Intransitive(format!(
            "the generators do not reach every window vertex on horosphere {}",
            v.level()
        )));
    }
    Ok(Extracted {
        vertex: v.clone(),
        depth,
        q: window.q,
        group: orbit.stabilizer()?,
        generators: orbit.schreier.clone(),
        orbit_size: orbit.vertices.len(),
    })
}

/// One level of a correspondence round trip.
#[derive(Clone, Debug, Serialize)]
pub struct RoundTripLevel {
    pub d: usize,
    pub order: String,
    pub fingerprints_equal: bool,
    /// Each generator image of the original group lies in the extracted group and conversely.
    pub generators_agree: bool,
    pub index: usize,
}

impl RoundTripLevel {
    pub fn ok(&self) -> bool {
        self.fingerprints_equal && self.generators_agree
    }
}

/// A self-replicating group sent to its scale group and back, compared level by level.
#[derive(Clone, Debug, Serialize)]
pub struct RoundTripReport {
    pub group: String,
    pub levels: Vec<RoundTripLevel>,
}

impl RoundTripReport {
    pub fn ok(&self) -> bool {
        self.levels.iter().all(RoundTripLevel::ok)
    }
}

/// Builds the scale group of `group` on the window `[-r, max_d]`, extracts `P|_{ṽ₀}` for
/// `d = 1..=max_d` and compares it with the level quotients of `group`.
pub fn correspondence_round_trip(group: &SelfSimilarGroup, r: i64, max_d: usize) -> Result<RoundTripReport> {
    let data = ScaleGroupData::new(group.clone(), r, max_d as i64)?;
    let elems = data.generators();
    let actions: Vec<ScaleAction<'_>> = elems.iter().map(|x| data.action(x)).collect();
    let gens: Vec<&dyn TreeAction> = actions.iter().map(|a| a as &dyn TreeAction).collect();
    let v0 = UnrootedVertex::spine(data.q(), 0);
    let mut levels = Vec::new();
    for d in 1..=max_d {
        let ex = extract_selfreplicating(&gens, &v0, d, &data.window())?;
        let lq = level_quotient(group, d)?;
        let mut generators_agree = lq.group.contains_group(&ex.group)?;
        for p in &lq.generator_images {
            generators_agree &= ex.group.contains(p)?;
        }
        levels.push(RoundTripLevel {
            d,
            order: ex.group.order()?.to_string(),
            fingerprints_equal: ex.group.fingerprint()? == lq.group.fingerprint()?,
            generators_agree,
            index: ex.index()?,
        });
    }
    Ok(RoundTripReport {
        group: group.name.clone(),
        levels,
    })
}

/// Whether the group generated by `gens` is transitive on the window slice of horosphere `n`.
pub fn horosphere_transitivity_check(gens: &[&dyn TreeAction], n: i64, window: &Window) -> Result<bool> {
    if n < window.top || n > window.bottom {
        return Err(Error::WindowExceeded(format!("horosphere {n} outside [{}, {}]", window.top, window.bottom)));
    }
    let start = UnrootedVertex::spine(window.q, n);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let all_steps = steps(gens.len());
    while let Some(u) = queue.pop_front() {
        for &s in &all_steps {
            if let Some(w) = try_step(gens, s, &u)? {
                if window.contains(&w) && seen.insert(w.clone()) {
                    queue.push_back(w);
                }
            }
        }
    }
    let reached = seen.iter().filter(|v| v.level() == n).count() as u128;
    Ok(reached == window.count_at(n))
}

/// Whether elements mapping `v0` onto its distinct children exist among `transversal`:
/// the weak criterion for a scale group.
pub fn weak_criterion(transversal: &[&dyn TreeAction], v0: &UnrootedVertex) -> Result<bool> {
    let mut children = HashSet::new();
    for x in transversal {
        let w = x.act(v0)?;
        if w.level() != v0.level() + 1 || w.parent() != *v0 || !children.insert(w) {
            return Ok(false);
        }
    }
    Ok(children.len() == v0.q())
}

/// `x_0^n.u = x_{i_1} ⋯ x_{i_d}.v_0`, a label-preserving mover from `v_0` to `u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub x0_power: u32,
    pub word: Vec<u8>,
}

/// A window labelling built from a transversal, with the movers used to build it.
#[derive(Clone, Debug)]
pub struct CompatibleLabelling {
    pub window: Window,
    pub v0: UnrootedVertex,
    pub labels: EdgeLabelling,
    /// The 0-labelled path from the window root to the bottom.
    pub spine: Vec<UnrootedVertex>,
    pub witnesses: BTreeMap<UnrootedVertex, Witness>,
}

struct LabelBuilder<'a> {
    transversal: &'a [&'a dyn TreeAction],
    v0: UnrootedVertex,
    child_label: HashMap<UnrootedVertex, usize>,
    address: HashMap<UnrootedVertex, Vec<u8>>,
}

impl LabelBuilder<'_> {
    /// `X_p⁻¹.c` lands on child `i` of `v_0`; the edge `(p, c)` is labelled `i`.
    fn label(&mut self, p: &UnrootedVertex, c: &UnrootedVertex) -> Result<usize> {
        let word = self.address(p)?;
        let mut cur = c.clone();
        for &i in &word {
            cur = self.transversal[i as usize].act_inverse(&cur)?;
        }
        self.child_label
            .get(&cur)
            .copied()
            .ok_or_else(|| Error::InvalidTransversal(format!("the mover to {p} does not map T_v0 onto T_{p}")))
    }

    /// The word `i_1 … i_d` with `x_{i_1} ⋯ x_{i_d}.v_0 = u`, for `u` below `v_0`.
    fn address(&mut self, u: &UnrootedVertex) -> Result<Vec<u8>> {
        if let Some(a) = self.address.get(u) {
            return Ok(a.clone());
        }
        let mut pending = vec![u.clone()];
        let mut top = u.parent();
        while !self.address.contains_key(&top) {
            pending.push(top.clone());
            top = top.parent();
        }
        while let Some(w) = pending.pop() {
            let p = w.parent();
            let i = self.label(&p, &w)?;
            let mut a = self.address[&p].clone();
            a.push(i as u8);
            self.address.insert(w, a);
        }
        Ok(self.address[u].clone())
    }
}

fn x0_power_into(x0: &dyn TreeAction, v0: &UnrootedVertex, w: &UnrootedVertex, cap: u32) -> Result<(u32, UnrootedVertex)> {
    let mut cur = w.clone();
    for n in 0..=cap {
        if cur.is_below(v0) {
            return Ok((n, cur));
        }
        cur = x0.act(&cur)?;
    }
    Err(Error::WindowExceeded(format!("x0 does not move {w} below {v0} within {cap} steps")))
}

fn act_n(x: &dyn TreeAction, v: &UnrootedVertex, n: u32) -> Result<UnrootedVertex> {
    (0..n).try_fold(v.clone(), |cur, _| x.act(&cur))
}

/// Labels every window edge: below `v_0` by unwinding words `x_{i_1} ⋯ x_{i_d}`, elsewhere by
/// pulling back along powers of `x_0`.
pub fn build_labelling(
    transversal: &[&dyn TreeAction],
    v0: &UnrootedVertex,
    window: &Window,
) -> Result<CompatibleLabelling> {
    let q = window.q;
    if transversal.len() != q || v0.q() != q {
        return Err(Error::InvalidTransversal(format!(
            "{} elements for q = {q}",
            transversal.len()
        )));
    }
    let mut child_label = HashMap::new();
    for (i, x) in transversal.iter().enumerate() {
        let w = x.act(v0)?;
        if w.level() != v0.level() + 1 || w.parent() != *v0 {
            return Err(Error::InvalidTransversal(format!("x{i} maps {v0} to {w}, not to a child")));
        }
        if child_label.insert(w.clone(), i).is_some() {
            return Err(Error::InvalidTransversal(format!("two elements map {v0} to {w}")));
        }
    }
    limits::check_points("window vertices", window.vertex_count())?;
    let mut b = LabelBuilder {
        transversal,
        v0: v0.clone(),
        child_label,
        address: HashMap::from([(v0.clone(), Vec::new())]),
    };
    let x0 = transversal[0];
    let cap = (4 * (window.bottom - window.top + 1) + (v0.level() - window.top).abs() + 16) as u32;
    let mut labels = EdgeLabelling::new(q);
    let mut witnesses = BTreeMap::new();
    for w in window.vertices() {
        let (n, moved) = x0_power_into(x0, &b.v0, &w, cap)?;
        if w.level() < window.bottom {
            let mut row = Vec::with_capacity(q + 1);
            for c in w.children() {
                let c_moved = act_n(x0, &c, n)?;
                row.push(b.label(&moved, &c_moved)?);
            }
            row.push(q);
            labels.set(w.clone(), row);
        }
        witnesses.insert(
            w,
            Witness {
                x0_power: n,
                word: b.address(&moved)?,
            },
        );
    }
    let spine = labels.check_conditions(window)?;
    for pair in spine.windows(2) {
        if x0.act(&pair[0])? != pair[1] {
            return Err(Error::Labelling {
                condition: 2,
                detail: format!("the 0-path from {} does not follow x0", pair[0]),
            });
        }
    }
    let out = CompatibleLabelling {
        window: *window,
        v0: v0.clone(),
        labels,
        spine,
        witnesses,
    };
    if let Some(u) = out.failing_witness(transversal)? {
        return Err(Error::Labelling {
            condition: 3,
            detail: format!("stored mover from {v0} to {u} does not preserve labels"),
        });
    }
    Ok(out)
}

/// The label word of each depth-`t` leaf below `u`: `out[ℓ]` is the standard address of the
/// leaf reached from `u` by following labels `ℓ`.
fn label_leaves(labels: &EdgeLabelling, u: &UnrootedVertex, t: usize) -> Result<Vec<u32>> {
    let q = labels.q;
    let n = q.pow(t as u32);
    let mut out = Vec::with_capacity(n);
    for l in 0..n {
        let mut cur = u.clone();
        for d in index_string(q, t, l) {
            cur = labels.child_with_label(&cur, d as usize).ok_or_else(|| Error::Labelling {
                condition: 1,
                detail: format!("no labels stored at {cur}"),
            })?;
        }
        out.push(string_index(q, subtree_iso(u, &cur)?.digits()) as u32);
    }
    Ok(out)
}

impl CompatibleLabelling {
    /// Checks every stored mover `x_0^{-n} x_{i_1} ⋯ x_{i_d}` against the labels on the
    /// truncated subtrees; returns the first vertex whose mover fails.
    pub fn failing_witness(&self, transversal: &[&dyn TreeAction]) -> Result<Option<UnrootedVertex>> {
        let x0 = transversal[0];
        for (u, w) in &self.witnesses {
            let top = u.level().max(self.v0.level());
            if top >= self.window.bottom || !self.window.contains(&self.v0) {
                continue;
            }
            let t = (self.window.bottom - top) as usize;
            let from = label_leaves(&self.labels, &self.v0, t)?;
            let to = label_leaves(&self.labels, u, t)?;
            for (l, &a) in from.iter().enumerate() {
                let mut cur = subtree_iso_inv(&self.v0, &index_string(self.labels.q, t, a as usize));
                for &i in w.word.iter().rev() {
                    cur = transversal[i as usize].act(&cur)?;
                }
                for _ in 0..w.x0_power {
                    cur = x0.act_inverse(&cur)?;
                }
                let expected = subtree_iso_inv(u, &index_string(self.labels.q, t, to[l] as usize));
                if cur != expected {
                    return Ok(Some(u.clone()));
                }
            }
        }
        Ok(None)
    }
}

/// The map reading each vertex's label word from the window root, which sends the labelling
/// to the standard one; the root is sent to `ṽ_top`.
pub fn relabel_to_standard(
    labels: &EdgeLabelling,
    window: &Window,
) -> Result<BTreeMap<UnrootedVertex, UnrootedVertex>> {
    labels.check_conditions(window)?;
    let root = window.root();
    let mut out = BTreeMap::from([(root.clone(), root.clone())]);
    for level in window.top..window.bottom {
        for v in window.vertices_at(level) {
            let image = out[&v].clone();
            let row = labels.get(&v).ok_or_else(|| Error::Labelling {
                condition: 1,
                detail: format!("no labels stored at {v}"),
            })?;
            for j in 0..window.q {
                out.insert(v.child(j), image.child(row[j]));
            }
        }
    }
    Ok(out)
}

/// A pair of vertices with no label-preserving element found.
#[derive(Clone, Debug, Serialize)]
pub struct CompatibilityFailure {
    pub u1: String,
    pub u2: String,
    pub reason: String,
}

/// A label-preserving element `x = t₂ z t₁⁻¹` with transports `t_i` from a base vertex and
/// `z` fixing the base.
#[derive(Clone, Debug, Serialize)]
pub struct PairWitness {
    pub u1: String,
    pub u2: String,
    pub depth: usize,
    pub transport_u1: String,
    pub transport_u2: String,
    pub correction: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompatibilityReport {
    pub trials: usize,
    pub passed: usize,
    pub counterexample: Option<CompatibilityFailure>,
    /// Witnesses for the first few passing pairs.
    pub witnesses: Vec<PairWitness>,
}

impl CompatibilityReport {
    pub fn ok(&self) -> bool {
        self.counterexample.is_none() && self.passed == self.trials
    }
}

impl fmt::Display for CompatibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} pairs", self.passed, self.trials)?;
        if let Some(c) = &self.counterexample {
            write!(f, ", counterexample {} -> {}: {}", c.u1, c.u2, c.reason)?;
        }
        Ok(())
    }
}

const WITNESS_SAMPLE: usize = 8;

/// For sampled window pairs `(u₁, u₂)`, looks for an element mapping `u₁` to `u₂` that carries
/// the labels of the truncated `T_{u₁}` onto those of `T_{u₂}`. Candidates are `t₂ z t₁⁻¹` with
/// transports `t_i` from the window root and `z` in the window stabilizer of the root, which is
/// decided by a membership test.
pub fn check_compatible(
    labels: &EdgeLabelling,
    window: &Window,
    gens: &[&dyn TreeAction],
    trials: usize,
    seed: u64,
) -> Result<CompatibilityReport> {
    let candidates: Vec<UnrootedVertex> = (window.top..window.bottom)
        .flat_map(|l| window.vertices_at(l))
        .collect();
    let pairs: Vec<(usize, usize)> = if candidates.len() * candidates.len() <= trials {
        (0..candidates.len())
            .flat_map(|a| (0..candidates.len()).map(move |b| (a, b)))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..trials)
            .map(|_| (rng.gen_range(0..candidates.len()), rng.gen_range(0..candidates.len())))
            .collect()
    };
    let mut orbits: HashMap<usize, (LeafOrbit, PermGroup)> = HashMap::new();
    let mut report = CompatibilityReport {
        trials: pairs.len(),
        passed: 0,
        counterexample: None,
        witnesses: Vec::new(),
    };
    let root = window.root();
    for (a, b) in pairs {
        let (u1, u2) = (&candidates[a], &candidates[b]);
        let t = (window.bottom - u1.level().max(u2.level())) as usize;
        if let std::collections::hash_map::Entry::Vacant(e) = orbits.entry(t) {
            let orbit = LeafOrbit::build(gens, &root, t, window)?;
            let stab = orbit.stabilizer()?;
            e.insert((orbit, stab));
        }
        let (orbit, stab) = &orbits[&t];
        let fail = |reason: String| CompatibilityFailure {
            u1: u1.to_string(),
            u2: u2.to_string(),
            reason,
        };
        let (Some(&i1), Some(&i2)) = (orbit.index.get(u1), orbit.index.get(u2)) else {
            report.counterexample.get_or_insert(fail("no element of the window orbit maps one to the other".into()));
            continue;
        };
        let l1 = label_leaves(labels, u1, t)?;
        let l2 = label_leaves(labels, u2, t)?;
        let mut l1_inv = vec![0u32; l1.len()];
        for (l, &addr) in l1.iter().enumerate() {
            l1_inv[addr as usize] = l as u32;
        }
        // z(i) for base leaves i: x must send t₁(i) to the u₂-leaf with the same label word
        let images = orbit.addr[i1]
            .iter()
            .map(|&addr| orbit.inv_addr[i2][l2[l1_inv[addr as usize] as usize] as usize] as usize)
            .collect();
        let z = Permutation::from_images(images)?;
        if stab.contains(&z)? {
            report.passed += 1;
            if report.witnesses.len() < WITNESS_SAMPLE {
                report.witnesses.push(PairWitness {
                    u1: u1.to_string(),
                    u2: u2.to_string(),
                    depth: t,
                    transport_u1: format_word(&orbit.transport(i1)),
                    transport_u2: format_word(&orbit.transport(i2)),
                    correction: z.to_string(),
                });
            }
        } else {
            report
                .counterexample
                .get_or_insert(fail(format!("required correction {z} is not in the stabilizer at depth {t}")));
        }
    }
    Ok(report)
}

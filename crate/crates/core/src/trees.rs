//! Vertex addressing for the rooted tree `T_{q,q}` and the string model of the
//! regular tree `T_{q+1}`: horospheres, Busemann levels, the standard labelling
//! and the translation `x̃₀`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::{Error, Result};

const DIGIT_CHARS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

pub(crate) fn digit_char(d: u8) -> char {
    DIGIT_CHARS[d as usize] as char
}

pub(crate) fn parse_digit(c: char) -> Option<u8> {
    c.to_digit(36).map(|d| d as u8)
}

/// A vertex of the rooted tree `T_{q,q}`: a finite string over `{0..q-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedVertex {
    q: usize,
    digits: Vec<u8>,
}

impl RootedVertex {
    pub fn new(q: usize, digits: Vec<u8>) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d as usize >= q) {
            return Err(Error::Invalid(format!("digit {d} not below q = {q}")));
        }
        Ok(RootedVertex { q, digits })
    }

    pub fn root(q: usize) -> Self {
        RootedVertex { q, digits: Vec::new() }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn parse(q: usize, text: &str) -> Result<Self> {
        let digits = text
            .chars()
            .map(|c| parse_digit(c).ok_or_else(|| Error::Invalid(format!("bad digit {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        RootedVertex::new(q, digits)
    }
}

impl fmt::Display for RootedVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            write!(f, "{}", digit_char(d))?;
        }
        Ok(())
    }
}

impl fmt::Debug for RootedVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// A vertex of `T_{q+1}` in the string model: the string `(w_i)_{i≤n}` with
/// `w_i = 0` for all but finitely many `i`, stored as its level `n` and the
/// significant suffix (empty, or starting with a nonzero digit).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UnrootedVertex {
    q: u32,
    level: i64,
    digits: Vec<u8>,
}

impl Ord for UnrootedVertex {
    /// Orders by level, then lexicographically on the zero-padded strings.
    fn cmp(&self, other: &Self) -> Ordering {
        self.q
            .cmp(&other.q)
            .then(self.level.cmp(&other.level))
            .then(self.digits.len().cmp(&other.digits.len()))
            .then(self.digits.cmp(&other.digits))
    }
}

impl PartialOrd for UnrootedVertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl UnrootedVertex {
    /// Builds a vertex from a level and a digit suffix, stripping leading zeros.
    pub fn new(q: usize, level: i64, digits: Vec<u8>) -> Result<Self> {
        if q < 2 {
            return Err(Error::Invalid(format!("q = {q} must be at least 2")));
        }
        if let Some(&d) = digits.iter().find(|&&d| d as usize >= q) {
            return Err(Error::Invalid(format!("digit {d} not below q = {q}")));
        }
        Ok(Self::from_parts(q, level, digits))
    }

    pub(crate) fn from_parts(q: usize, level: i64, mut digits: Vec<u8>) -> Self {
        let lead = digits.iter().take_while(|&&d| d == 0).count();
        if lead > 0 {
            digits.drain(..lead);
        }
        UnrootedVertex {
            q: q as u32,
            level,
            digits,
        }
    }

    /// The spine vertex `ṽ_n` (all digits zero).
    pub fn spine(q: usize, n: i64) -> Self {
        UnrootedVertex {
            q: q as u32,
            level: n,
            digits: Vec::new(),
        }
    }

    pub fn q(&self) -> usize {
        self.q as usize
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    /// Significant digits `w_{n-len+1} … w_n`.
    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn is_spine(&self) -> bool {
        self.digits.is_empty()
    }

    /// Busemann value relative to `ṽ₀`: the horosphere index.
    pub fn busemann(&self) -> i64 {
        self.level
    }

    /// The digit `w_i` for `i ≤ level`.
    pub fn digit_at(&self, i: i64) -> u8 {
        assert!(i <= self.level, "position {i} above level {}", self.level);
        let from_end = (self.level - i) as usize;
        if from_end < self.digits.len() {
            self.digits[self.digits.len() - 1 - from_end]
        } else {
            0
        }
    }

    /// Position of the lowest-indexed significant digit (`level + 1` on the spine).
    pub fn lowest_position(&self) -> i64 {
        self.level - self.digits.len() as i64 + 1
    }

    pub fn parent(&self) -> UnrootedVertex {
        let mut digits = self.digits.clone();
        digits.pop();
        Self::from_parts(self.q(), self.level - 1, digits)
    }

    /// The child reached by appending digit `j`.
    ///
    /// # Panics
    /// If `j >= q`.
    pub fn child(&self, j: usize) -> UnrootedVertex {
        assert!(j < self.q(), "child digit {j} not below q = {}", self.q);
        let mut digits = self.digits.clone();
        if !(digits.is_empty() && j == 0) {
            digits.push(j as u8);
        }
        UnrootedVertex {
            q: self.q,
            level: self.level + 1,
            digits,
        }
    }

    pub fn children(&self) -> Vec<UnrootedVertex> {
        (0..self.q()).map(|j| self.child(j)).collect()
    }

    /// The last digit `w_n`, i.e. the child index of this vertex under its parent.
    pub fn last_digit(&self) -> usize {
        self.digit_at(self.level) as usize
    }

    /// The ancestor on horosphere `m ≤ level`.
    pub fn ancestor_at(&self, m: i64) -> UnrootedVertex {
        assert!(m <= self.level);
        let drop = (self.level - m) as usize;
        let keep = self.digits.len().saturating_sub(drop);
        Self::from_parts(self.q(), m, self.digits[..keep].to_vec())
    }

    /// Whether this vertex lies in the subtree `T_v` (including `v` itself).
    pub fn is_below(&self, v: &UnrootedVertex) -> bool {
        self.q == v.q && self.level >= v.level && &self.ancestor_at(v.level) == v
    }

    /// The string model shift by `k`: `(n, digits) ↦ (n+k, digits)`.
    pub fn x0_translate(&self, k: i64) -> UnrootedVertex {
        UnrootedVertex {
            q: self.q,
            level: self.level + k,
            digits: self.digits.clone(),
        }
    }

    /// Digits `w_{m+1} … w_n` strictly below horosphere `m`.
    pub fn digits_below(&self, m: i64) -> Vec<u8> {
        ((m + 1)..=self.level).map(|i| self.digit_at(i)).collect()
    }

    pub fn parse(q: usize, text: &str) -> Result<Self> {
        let (lvl, ds) = text
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Invalid(format!("expected n:digits, got {text:?}")))?;
        let level = lvl
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad level {lvl:?}")))?;
        let digits = ds
            .trim()
            .chars()
            .map(|c| parse_digit(c).ok_or_else(|| Error::Invalid(format!("bad digit {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        UnrootedVertex::new(q, level, digits)
    }
}

impl fmt::Display for UnrootedVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.level)?;
        for &d in &self.digits {
            write!(f, "{}", digit_char(d))?;
        }
        Ok(())
    }
}

impl fmt::Debug for UnrootedVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `φ_v(w)`: the digits of `w` strictly below `v`, as a vertex of `T_{q,q}`.
pub fn subtree_iso(v: &UnrootedVertex, w: &UnrootedVertex) -> Result<RootedVertex> {
    if !w.is_below(v) {
        return Err(Error::NotBelow {
            v: v.to_string(),
            w: w.to_string(),
        });
    }
    Ok(RootedVertex {
        q: v.q(),
        digits: w.digits_below(v.level()),
    })
}

/// `φ_v⁻¹(s)`: the vertex below `v` reached by appending the string `s`.
pub fn subtree_iso_inv(v: &UnrootedVertex, s: &[u8]) -> UnrootedVertex {
    let mut digits = v.digits().to_vec();
    if digits.is_empty() {
        let lead = s.iter().take_while(|&&d| d == 0).count();
        digits.extend_from_slice(&s[lead..]);
    } else {
        digits.extend_from_slice(s);
    }
    UnrootedVertex {
        q: v.q,
        level: v.level + s.len() as i64,
        digits,
    }
}

/// The standard label: `q` on the parent edge, `j` on the edge to child `j`.
pub fn standard_label(v: &UnrootedVertex, neighbour: &UnrootedVertex) -> Result<usize> {
    if neighbour == &v.parent() {
        return Ok(v.q());
    }
    if neighbour.level() == v.level() + 1 && &neighbour.parent() == v {
        return Ok(neighbour.last_digit());
    }
    Err(Error::NotNeighbour(format!("{neighbour} is not adjacent to {v}")))
}

/// A finite window of `T_{q+1}`: the subtree below `ṽ_top` truncated at horosphere `bottom`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub q: usize,
    pub top: i64,
    pub bottom: i64,
}

impl Window {
    /// The window `[-r, d]` below `ṽ_{-r}`.
    pub fn new(q: usize, r: i64, d: i64) -> Self {
        Window { q, top: -r, bottom: d }
    }

    pub fn from_range(q: usize, top: i64, bottom: i64) -> Self {
        Window { q, top, bottom }
    }

    pub fn is_empty(&self) -> bool {
        self.bottom < self.top
    }

    pub fn root(&self) -> UnrootedVertex {
        UnrootedVertex::spine(self.q, self.top)
    }

    pub fn contains(&self, v: &UnrootedVertex) -> bool {
        v.q() == self.q
            && v.level() >= self.top
            && v.level() <= self.bottom
            && v.lowest_position() > self.top
    }

    pub fn check(&self, v: &UnrootedVertex) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::WindowExceeded(v.to_string()))
        }
    }

    /// Number of window vertices on horosphere `level`.
    pub fn count_at(&self, level: i64) -> u128 {
        if level < self.top || level > self.bottom {
            return 0;
        }
        (self.q as u128).saturating_pow((level - self.top) as u32)
    }

    pub fn vertex_count(&self) -> u128 {
        (self.top..=self.bottom).map(|l| self.count_at(l)).sum()
    }

    /// Window vertices on horosphere `level` in lexicographic order.
    pub fn vertices_at(&self, level: i64) -> Vec<UnrootedVertex> {
        if level < self.top || level > self.bottom {
            return Vec::new();
        }
        let len = (level - self.top) as usize;
        let count = self.count_at(level) as usize;
        let mut out = Vec::with_capacity(count);
        let mut digits = vec![0u8; len];
        for _ in 0..count {
            out.push(UnrootedVertex::from_parts(self.q, level, digits.clone()));
            for i in (0..len).rev() {
                digits[i] += 1;
                if (digits[i] as usize) < self.q {
                    break;
                }
                digits[i] = 0;
            }
        }
        out
    }

    /// All window vertices, level by level.
    pub fn vertices(&self) -> Vec<UnrootedVertex> {
        (self.top..=self.bottom).flat_map(|l| self.vertices_at(l)).collect()
    }
}

/// An assignment of labels `{0..q}` to the out-edges of window vertices.
///
/// Entry `j < q` of a vertex's label vector is the label of the edge to child `j`;
/// entry `q` is the label of the parent edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLabelling {
    pub q: usize,
    pub labels: BTreeMap<UnrootedVertex, Vec<usize>>,
}

impl EdgeLabelling {
    pub fn new(q: usize) -> Self {
        EdgeLabelling {
            q,
            labels: BTreeMap::new(),
        }
    }

    /// The standard labelling on every window vertex with children in the window.
    pub fn standard(window: &Window) -> Self {
        let mut l = EdgeLabelling::new(window.q);
        for level in window.top..window.bottom {
            for v in window.vertices_at(level) {
                l.labels.insert(v, (0..=window.q).collect());
            }
        }
        l
    }

    pub fn set(&mut self, v: UnrootedVertex, labels: Vec<usize>) {
        self.labels.insert(v, labels);
    }

    pub fn get(&self, v: &UnrootedVertex) -> Option<&[usize]> {
        self.labels.get(v).map(Vec::as_slice)
    }

    /// Label of the edge from `v` to `neighbour`.
    pub fn label(&self, v: &UnrootedVertex, neighbour: &UnrootedVertex) -> Option<usize> {
        let labels = self.labels.get(v)?;
        if neighbour == &v.parent() {
            return Some(labels[self.q]);
        }
        if neighbour.level() == v.level() + 1 && &neighbour.parent() == v {
            return Some(labels[neighbour.last_digit()]);
        }
        None
    }

    /// The child of `v` whose edge carries label `l`.
    pub fn child_with_label(&self, v: &UnrootedVertex, l: usize) -> Option<UnrootedVertex> {
        let labels = self.labels.get(v)?;
        labels[..self.q]
            .iter()
            .position(|&x| x == l)
            .map(|j| v.child(j))
    }

    /// Checks parent edges labelled `q`, labels bijective at every stored vertex,
    /// and returns the 0-labelled path from the window root to the bottom.
    pub fn check_conditions(&self, window: &Window) -> Result<Vec<UnrootedVertex>> {
        for (v, labels) in &self.labels {
            if labels.len() != self.q + 1 {
                return Err(Error::Labelling {
                    condition: 1,
                    detail: format!("{v} has {} labels", labels.len()),
                });
            }
            if labels[self.q] != self.q {
                return Err(Error::Labelling {
                    condition: 1,
                    detail: format!("parent edge of {v} labelled {}", labels[self.q]),
                });
            }
            let mut seen = vec![false; self.q + 1];
            for &l in labels {
                if l > self.q || seen[l] {
                    return Err(Error::Labelling {
                        condition: 1,
                        detail: format!("labels at {v} are not a bijection onto 0..={}", self.q),
                    });
                }
                seen[l] = true;
            }
        }
        let mut path = vec![window.root()];
        for _ in window.top..window.bottom {
            let v = path.last().expect("nonempty");
            match self.child_with_label(v, 0) {
                Some(c) => path.push(c),
                None => {
                    return Err(Error::Labelling {
                        condition: 2,
                        detail: format!("no 0-labelled child stored at {v}"),
                    })
                }
            }
        }
        Ok(path)
    }
}

/// An isometry of `T_{q+1}` that can be evaluated on vertices.
pub trait TreeAction: Send + Sync {
    fn q(&self) -> usize;
    fn act(&self, v: &UnrootedVertex) -> Result<UnrootedVertex>;
    fn act_inverse(&self, v: &UnrootedVertex) -> Result<UnrootedVertex>;
}

/// The pure translation `x̃₀^k`.
#[derive(Clone, Copy, Debug)]
pub struct Translation {
    pub q: usize,
    pub k: i64,
}

impl TreeAction for Translation {
    fn q(&self) -> usize {
        self.q
    }

    fn act(&self, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        Ok(v.x0_translate(self.k))
    }

    fn act_inverse(&self, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        Ok(v.x0_translate(-self.k))
    }
}

/// A product of actions and their inverses, applied right to left.
pub struct WordAction<'a> {
    q: usize,
    letters: Vec<(&'a dyn TreeAction, bool)>,
}

impl<'a> WordAction<'a> {
    pub fn new(q: usize) -> Self {
        WordAction {
            q,
            letters: Vec::new(),
        }
    }

    /// Appends a factor on the right (it acts first).
    pub fn then(mut self, a: &'a dyn TreeAction, inverse: bool) -> Self {
        self.letters.push((a, inverse));
        self
    }

    pub fn from_letters(q: usize, letters: Vec<(&'a dyn TreeAction, bool)>) -> Self {
        WordAction { q, letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl TreeAction for WordAction<'_> {
    fn q(&self) -> usize {
        self.q
    }

    fn act(&self, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        let mut cur = v.clone();
        for (a, inv) in self.letters.iter().rev() {
            cur = if *inv { a.act_inverse(&cur)? } else { a.act(&cur)? };
        }
        Ok(cur)
    }

    fn act_inverse(&self, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        let mut cur = v.clone();
        for (a, inv) in &self.letters {
            cur = if *inv { a.act(&cur)? } else { a.act_inverse(&cur)? };
        }
        Ok(cur)
    }
}

//! End-fixing isometries of `T_{q+1}` as a translation power together with a
//! finitely supported portrait of local permutations, `x = h·x̃₀^k`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::perm::Permutation;
use crate::trees::{subtree_iso, TreeAction, UnrootedVertex, Window};
use crate::{Error, Result};

/// The element `h·x̃₀^k`: first translate by `k`, then apply the elliptic part `h`
/// whose local permutation at `w` is `portrait[w]` (identity where absent).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PortraitRepr", into = "PortraitRepr")]
pub struct PortraitElement {
    q: usize,
    translation: i64,
    portrait: BTreeMap<UnrootedVertex, Permutation>,
}

#[derive(Serialize, Deserialize)]
struct PortraitRepr {
    q: usize,
    k: i64,
    portrait: Vec<PortraitEntry>,
}

#[derive(Serialize, Deserialize)]
struct PortraitEntry {
    vertex: String,
    perm: String,
}

impl TryFrom<PortraitRepr> for PortraitElement {
    type Error = Error;

    fn try_from(r: PortraitRepr) -> Result<Self> {
        let mut map = BTreeMap::new();
        for e in r.portrait {
            let v = UnrootedVertex::parse(r.q, &e.vertex)?;
            let p = Permutation::parse_cycles(&e.perm, r.q)?;
            if map.insert(v.clone(), p).is_some() {
                return Err(Error::Invalid(format!("vertex {v} listed twice")));
            }
        }
        PortraitElement::new(r.q, r.k, map)
    }
}

impl From<PortraitElement> for PortraitRepr {
    fn from(p: PortraitElement) -> Self {
        PortraitRepr {
            q: p.q,
            k: p.translation,
            portrait: p
                .portrait
                .iter()
                .map(|(v, perm)| PortraitEntry {
                    vertex: v.to_string(),
                    perm: perm.to_string(),
                })
                .collect(),
        }
    }
}

impl PortraitElement {
    /// Builds an element from a finite assignment of local permutations.
    pub fn new(q: usize, translation: i64, portrait: BTreeMap<UnrootedVertex, Permutation>) -> Result<Self> {
        for (v, p) in &portrait {
            if v.q() != q || p.degree() != q {
                return Err(Error::Invalid(format!("entry at {v} does not have q = {q}")));
            }
        }
        let portrait = portrait.into_iter().filter(|(_, p)| !p.is_identity()).collect();
        Ok(PortraitElement {
            q,
            translation,
            portrait,
        })
    }

    pub fn identity(q: usize) -> Self {
        PortraitElement {
            q,
            translation: 0,
            portrait: BTreeMap::new(),
        }
    }

    pub fn translation(q: usize, k: i64) -> Self {
        PortraitElement {
            q,
            translation: k,
            portrait: BTreeMap::new(),
        }
    }

    /// An elliptic element with a single local permutation at `v`.
    pub fn single(v: UnrootedVertex, p: Permutation) -> Result<Self> {
        let q = v.q();
        PortraitElement::new(q, 0, BTreeMap::from([(v, p)]))
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn translation_power(&self) -> i64 {
        self.translation
    }

    pub fn portrait(&self) -> &BTreeMap<UnrootedVertex, Permutation> {
        &self.portrait
    }

    pub fn is_elliptic(&self) -> bool {
        self.translation == 0
    }

    fn local(&self, w: &UnrootedVertex) -> Option<&Permutation> {
        self.portrait.get(w)
    }

    /// Applies the elliptic part: `(h.w)_i = π_{w|_{i-1}}(w_i)`.
    fn apply_elliptic(&self, w: &UnrootedVertex) -> UnrootedVertex {
        if self.portrait.is_empty() {
            return w.clone();
        }
        let n = w.level();
        let mut changes: BTreeMap<i64, u8> = BTreeMap::new();
        for (u, p) in &self.portrait {
            if u.level() < n && w.is_below(u) {
                let i = u.level() + 1;
                let d = p.image(w.digit_at(i) as usize) as u8;
                changes.insert(i, d);
            }
        }
        if changes.is_empty() {
            return w.clone();
        }
        let lo = changes
            .keys()
            .next()
            .copied()
            .expect("nonempty")
            .min(w.lowest_position());
        let digits = (lo..=n)
            .map(|i| changes.get(&i).copied().unwrap_or_else(|| w.digit_at(i)))
            .collect();
        UnrootedVertex::from_parts(self.q, n, digits)
    }

    /// Applies the inverse of the elliptic part.
    fn apply_elliptic_inverse(&self, w: &UnrootedVertex) -> UnrootedVertex {
        if self.portrait.is_empty() {
            return w.clone();
        }
        // recover the preimage digit by digit from the top: x_i = π_{x|_{i-1}}⁻¹(w_i)
        let n = w.level();
        let lo = self
            .portrait
            .keys()
            .map(|u| u.level() + 1)
            .min()
            .expect("nonempty")
            .min(w.lowest_position());
        let mut pre = UnrootedVertex::spine(self.q, lo - 1);
        for i in lo..=n {
            let d = w.digit_at(i) as usize;
            let x = match self.local(&pre) {
                Some(p) => p.inverse().image(d),
                None => d,
            };
            pre = pre.child(x);
        }
        pre
    }

    /// The image of `v`: translate by `k`, then apply the portrait.
    pub fn apply(&self, v: &UnrootedVertex) -> UnrootedVertex {
        self.apply_elliptic(&v.x0_translate(self.translation))
    }

    /// The preimage of `v`.
    pub fn apply_inverse(&self, v: &UnrootedVertex) -> UnrootedVertex {
        self.apply_elliptic_inverse(v).x0_translate(-self.translation)
    }

    /// Applies the element, failing if the argument or the image leaves the window.
    pub fn apply_within(&self, window: &Window, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        window.check(v)?;
        let w = self.apply(v);
        window.check(&w)?;
        Ok(w)
    }

    /// The local permutation at `w`, read off the action on the children of `w`.
    pub fn local_permutation(&self, w: &UnrootedVertex) -> Permutation {
        let image = self.apply(w);
        let images = (0..self.q)
            .map(|j| {
                let c = self.apply(&w.child(j));
                debug_assert_eq!(c.parent(), image);
                c.last_digit()
            })
            .collect();
        Permutation::from_images(images).expect("isometries permute children")
    }

    /// The elliptic portrait conjugated by `x̃₀^k`: entries move from `u` to `x̃₀^k.u`.
    fn shifted_portrait(&self, k: i64) -> BTreeMap<UnrootedVertex, Permutation> {
        self.portrait
            .iter()
            .map(|(u, p)| (u.x0_translate(k), p.clone()))
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PortraitElement) -> Result<PortraitElement> {
        if self.q != other.q {
            return Err(Error::DegreeMismatch(self.q, other.q));
        }
        // self∘other = πg ∘ (x̃₀^{kg} πh x̃₀^{-kg}) ∘ x̃₀^{kg+kh}
        let h_shift = PortraitElement {
            q: self.q,
            translation: 0,
            portrait: other.shifted_portrait(self.translation),
        };
        let g_ell = PortraitElement {
            q: self.q,
            translation: 0,
            portrait: self.portrait.clone(),
        };
        let mut candidates: BTreeSet<UnrootedVertex> = h_shift.portrait.keys().cloned().collect();
        for u in g_ell.portrait.keys() {
            candidates.insert(h_shift.apply_elliptic_inverse(u));
        }
        let id = Permutation::identity(self.q);
        let mut portrait = BTreeMap::new();
        for w in candidates {
            let hw = h_shift.apply_elliptic(&w);
            let ph = h_shift.local(&w).unwrap_or(&id);
            let pg = g_ell.local(&hw).unwrap_or(&id);
            let p = pg.then_after(ph);
            if !p.is_identity() {
                portrait.insert(w, p);
            }
        }
        Ok(PortraitElement {
            q: self.q,
            translation: self.translation + other.translation,
            portrait,
        })
    }

    pub fn invert(&self) -> PortraitElement {
        // (h x̃₀^k)⁻¹ = (x̃₀^{-k} h⁻¹ x̃₀^k) x̃₀^{-k}, and (h⁻¹)_{h.w} = (h_w)⁻¹
        let ell = PortraitElement {
            q: self.q,
            translation: 0,
            portrait: self.portrait.clone(),
        };
        let portrait = self
            .portrait
            .iter()
            .map(|(w, p)| (ell.apply_elliptic(w).x0_translate(-self.translation), p.inverse()))
            .collect();
        PortraitElement {
            q: self.q,
            translation: -self.translation,
            portrait,
        }
    }

    /// Splits `g = h ∘ x̃₀^k` into the translation power and the elliptic part.
    pub fn decompose(&self) -> (i64, PortraitElement) {
        (
            self.translation,
            PortraitElement {
                q: self.q,
                translation: 0,
                portrait: self.portrait.clone(),
            },
        )
    }

    /// The section at a fixed vertex `v`, as a portrait on `T_{q,q}`.
    pub fn section(&self, v: &UnrootedVertex) -> Result<RootedPortrait> {
        if self.translation != 0 || self.apply(v) != *v {
            return Err(Error::NotFixed(v.to_string()));
        }
        let mut perms = BTreeMap::new();
        for (u, p) in &self.portrait {
            if u.is_below(v) {
                perms.insert(subtree_iso(v, u)?.digits().to_vec(), p.clone());
            }
        }
        Ok(RootedPortrait { q: self.q, perms })
    }
}

impl TreeAction for PortraitElement {
    fn q(&self) -> usize {
        self.q
    }

    fn act(&self, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        Ok(self.apply(v))
    }

    fn act_inverse(&self, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        Ok(self.apply_inverse(v))
    }
}

/// A rooted-tree automorphism given by local permutations at finitely many vertices of `T_{q,q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedPortrait {
    pub q: usize,
    pub perms: BTreeMap<Vec<u8>, Permutation>,
}

impl RootedPortrait {
    pub fn identity(q: usize) -> Self {
        RootedPortrait {
            q,
            perms: BTreeMap::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.perms.values().all(Permutation::is_identity)
    }

    /// `(g.s)_i = π_{s_1…s_{i-1}}(s_i)`.
    pub fn apply(&self, s: &[u8]) -> Vec<u8> {
        (0..s.len())
            .map(|i| match self.perms.get(&s[..i]) {
                Some(p) => p.image(s[i] as usize) as u8,
                None => s[i],
            })
            .collect()
    }

    /// The induced permutation of the `q^depth` strings of length `depth`, in lexicographic order.
    pub fn level_permutation(&self, depth: usize) -> Permutation {
        let n = self.q.pow(depth as u32);
        let images = (0..n)
            .map(|x| string_index(self.q, &self.apply(&index_string(self.q, depth, x))))
            .collect();
        Permutation::from_images(images).expect("automorphisms permute levels")
    }

    /// Reads the portrait of a level permutation that preserves the tree structure.
    pub fn from_level_permutation(q: usize, depth: usize, p: &Permutation) -> Result<Self> {
        let mut perms = BTreeMap::new();
        for len in 0..depth {
            let stride = q.pow((depth - len - 1) as u32);
            for x in 0..q.pow(len as u32) {
                let prefix = index_string(q, len, x);
                let mut images = Vec::with_capacity(q);
                for j in 0..q {
                    let leaf = (x * q + j) * stride;
                    let img = index_string(q, depth, p.image(leaf));
                    images.push(img[len] as usize);
                }
                let perm = Permutation::from_images(images)
                    .map_err(|_| Error::Invalid("level permutation does not preserve the tree".into()))?;
                if !perm.is_identity() {
                    perms.insert(prefix, perm);
                }
            }
        }
        let out = RootedPortrait { q, perms };
        if out.level_permutation(depth) != *p {
            return Err(Error::Invalid("level permutation does not preserve the tree".into()));
        }
        Ok(out)
    }
}

/// Lexicographic index of a string (first digit most significant).
pub fn string_index(q: usize, s: &[u8]) -> usize {
    s.iter().fold(0, |acc, &d| acc * q + d as usize)
}

/// The string of length `len` with lexicographic index `x`.
pub fn index_string(q: usize, len: usize, mut x: usize) -> Vec<u8> {
    let mut s = vec![0u8; len];
    for i in (0..len).rev() {
        s[i] = (x % q) as u8;
        x /= q;
    }
    s
}

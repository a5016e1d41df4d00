use std::collections::BTreeMap;

use serde::Serialize;

use super::finite::SubgroupSet;
use super::fseq::FSeqElement;
use super::profile::{Gfa, TidyProfile};
use crate::limits;
use crate::perm::Permutation;
use crate::trees::{TreeAction, UnrootedVertex, Window};
use crate::{Error, Result};

/// A coordinate where the profile jumps, with coset representatives of `P_{m-1}` in `P_m`.
#[derive(Clone, Debug)]
struct Jump {
    m: i64,
    lower: SubgroupSet,
    reps: Vec<usize>,
}

/// The element `h ∘ α^k` of `G(F, A)`: shift first, then multiply by `h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize)]
pub struct GfaElement {
    pub h: FSeqElement,
    pub k: i64,
}

impl GfaElement {
    pub fn new(h: FSeqElement, k: i64) -> Self {
        GfaElement { h, k }
    }

    pub fn alpha(k: i64) -> Self {
        GfaElement {
            h: FSeqElement::identity(),
            k,
        }
    }

    /// `(h₁α^{k₁})(h₂α^{k₂}) = h₁α^{k₁}(h₂) α^{k₁+k₂}`.
    pub fn compose(&self, tree: &CosetTree, other: &GfaElement) -> GfaElement {
        GfaElement {
            h: self.h.mul(&tree.profile.f, &other.h.shift(self.k)),
            k: self.k + other.k,
        }
    }

    /// `(hα^k)⁻¹ = α^{-k}(h⁻¹) α^{-k}`.
    pub fn inverse(&self, tree: &CosetTree) -> GfaElement {
        GfaElement {
            h: self.h.inverse(&tree.profile.f).shift(-self.k),
            k: -self.k,
        }
    }
}

/// A vertex `gα^n(V)` together with a representative `g`.
#[derive(Clone, Debug)]
pub struct CosetNode {
    pub vertex: UnrootedVertex,
    pub representative: FSeqElement,
}

/// The coset tree `T^(α)` of a tidy profile `V`, addressed through `φ` by digit strings.
#[derive(Clone, Debug)]
pub struct CosetTree {
    pub profile: TidyProfile,
    pub window: Window,
    q: usize,
    jumps: Vec<Jump>,
    transversal: Vec<FSeqElement>,
}

/// Builds the coset tree of `pf`, with transversal `g_i` of `V/α(V)` enumerated in mixed radix
/// over the jump coordinates (lowest coordinate fastest, coset representatives by least element).
pub fn build_coset_tree(ctx: &Gfa, pf: &TidyProfile, window: Window) -> Result<CosetTree> {
    let f = &pf.f;
    if !std::sync::Arc::ptr_eq(f, &ctx.f) && **f != *ctx.f {
        return Err(Error::Invalid("profile and context use different groups".into()));
    }
    let mut jumps = Vec::new();
    for m in pf.span() {
        let (upper, lower) = (pf.at(m), pf.at(m - 1));
        if !lower.is_subgroup_of(upper) {
            return Err(Error::Invalid(format!("α(V) is not contained in V at coordinate {m}")));
        }
        if lower.len() < upper.len() {
            jumps.push(Jump {
                m,
                lower: lower.clone(),
                reps: upper.left_cosets(f, lower),
            });
        }
    }
    let q: usize = jumps.iter().map(|j| j.reps.len()).product();
    if q != ctx.q() {
        return Err(Error::Invalid(format!("[V : α(V)] = {q} differs from |F/A| = {}", ctx.q())));
    }
    if window.q != q {
        return Err(Error::Invalid(format!("window has q = {}, tree has q = {q}", window.q)));
    }
    let transversal = (0..q)
        .map(|mut i| {
            FSeqElement::from_entries(jumps.iter().map(|j| {
                let k = j.reps.len();
                let e = (j.m, j.reps[i % k]);
                i /= k;
                e
            }))
        })
        .collect();
    Ok(CosetTree {
        profile: pf.clone(),
        window,
        q,
        jumps,
        transversal,
    })
}

impl CosetTree {
    pub fn q(&self) -> usize {
        self.q
    }

    /// `g_0 = 1, g_1, …, g_{q-1}`.
    pub fn transversal(&self) -> &[FSeqElement] {
        &self.transversal
    }

    /// The index `i` with `α^{-m}(x) α(V) = g_i α(V)`, for `x ∈ α^m(V)`.
    fn digit_of(&self, x: &FSeqElement, m: i64) -> usize {
        debug_assert!(self.profile.shifted(m).contains(x));
        let f = &self.profile.f;
        let mut digit = 0;
        let mut radix = 1;
        for j in &self.jumps {
            let idx = SubgroupSet::coset_index(f, &j.reps, &j.lower, x.get(j.m + m));
            digit += idx * radix;
            radix *= j.reps.len();
        }
        digit
    }

    /// Greedy digit expansion of `g α^n(V)`: `g α^n(V) = α^N(g_{i_N}) ⋯ α^{n-1}(g_{i_{n-1}}) α^n(V)`,
    /// read as the vertex with `w_{m+1} = i_m`.
    pub fn expand(&self, g: &FSeqElement, n: i64) -> UnrootedVertex {
        let f = &self.profile.f;
        let Some((lo, _)) = g.support() else {
            return UnrootedVertex::spine(self.q, n);
        };
        let start = lo - self.profile.hi();
        if start >= n {
            return UnrootedVertex::spine(self.q, n);
        }
        let mut g = g.clone();
        let mut digits = Vec::with_capacity((n - start) as usize);
        for m in start..n {
            let i = self.digit_of(&g, m);
            digits.push(i as u8);
            if i != 0 {
                g = self.transversal[i].shift(m).inverse(f).mul(f, &g);
            }
        }
        debug_assert!(self.profile.shifted(n).contains(&g));
        UnrootedVertex::from_parts(self.q, n, digits)
    }

    /// `α^N(g_{i_N}) ⋯ α^{n-1}(g_{i_{n-1}})` for the vertex `v`.
    pub fn representative(&self, v: &UnrootedVertex) -> FSeqElement {
        let f = &self.profile.f;
        let mut g = FSeqElement::identity();
        for m in v.lowest_position() - 1..v.level() {
            let i = v.digit_at(m + 1) as usize;
            if i != 0 {
                g = g.mul(f, &self.transversal[i].shift(m));
            }
        }
        g
    }

    /// `h.(gα^n V) = (hg)α^n V`, without window checks.
    pub fn act_unbounded(&self, h: &FSeqElement, v: &UnrootedVertex) -> UnrootedVertex {
        if h.is_identity() {
            return v.clone();
        }
        let g = h.mul(&self.profile.f, &self.representative(v));
        self.expand(&g, v.level())
    }

    /// `h.(gα^n V)`, failing outside the window.
    pub fn act(&self, h: &FSeqElement, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        self.window.check(v)?;
        let w = self.act_unbounded(h, v);
        self.window.check(&w)?;
        Ok(w)
    }

    /// `α^k.(gα^n V) = α^k(g)α^{n+k} V`, computed by re-expansion.
    pub fn act_alpha(&self, k: i64, v: &UnrootedVertex) -> UnrootedVertex {
        self.expand(&self.representative(v).shift(k), v.level() + k)
    }

    /// The action of `h ∘ α^k`.
    pub fn apply(&self, x: &GfaElement, v: &UnrootedVertex) -> UnrootedVertex {
        self.act_unbounded(&x.h, &v.x0_translate(x.k))
    }

    /// All window vertices with their representatives.
    pub fn nodes(&self) -> Result<Vec<CosetNode>> {
        limits::check_points("coset tree vertices", self.window.vertex_count())?;
        Ok(self
            .window
            .vertices()
            .into_iter()
            .map(|vertex| CosetNode {
                representative: self.representative(&vertex),
                vertex,
            })
            .collect())
    }

    /// Child edges `(v, vi, i)` of the window.
    pub fn edges(&self) -> Result<Vec<(UnrootedVertex, UnrootedVertex, usize)>> {
        limits::check_points("coset tree vertices", self.window.vertex_count())?;
        let mut out = Vec::new();
        for v in self.window.vertices() {
            if v.level() < self.window.bottom {
                for i in 0..self.q {
                    out.push((v.clone(), v.child(i), i));
                }
            }
        }
        Ok(out)
    }

    /// The permutation of child labels induced by `h` at each window vertex of horosphere `j`.
    pub fn local_permutations(&self, h: &FSeqElement, j: i64) -> Result<BTreeMap<UnrootedVertex, Permutation>> {
        if j < self.window.top || j >= self.window.bottom {
            return Err(Error::WindowExceeded(format!("horosphere {j} has no children in the window")));
        }
        let mut out = BTreeMap::new();
        for v in self.window.vertices_at(j) {
            let image = self.act(h, &v)?;
            let images = (0..self.q)
                .map(|c| {
                    let w = self.act(h, &v.child(c))?;
                    debug_assert_eq!(w.parent(), image);
                    Ok(w.last_digit())
                })
                .collect::<Result<Vec<_>>>()?;
            out.insert(v, Permutation::from_images(images)?);
        }
        Ok(out)
    }

    /// `g₂ α^{n₂-n₁} g₁⁻¹`, which maps `u₁` to `u₂` and preserves the labels below `u₁`.
    pub fn mover(&self, u1: &UnrootedVertex, u2: &UnrootedVertex) -> GfaElement {
        let f = &self.profile.f;
        let k = u2.level() - u1.level();
        let g1 = self.representative(u1);
        let g2 = self.representative(u2);
        GfaElement::new(g2.mul(f, &g1.inverse(f).shift(k)), k)
    }

    /// `f_{[m]}` for each coordinate `m` in `[lo, hi)` and each generator `f` of `P_m`.
    pub fn stabilizer_generators(&self, lo: i64, hi: i64) -> Vec<FSeqElement> {
        let f = &self.profile.f;
        (lo..hi)
            .flat_map(|m| {
                self.profile
                    .at(m)
                    .generators(f)
                    .into_iter()
                    .map(move |x| FSeqElement::single(m, x))
            })
            .collect()
    }

    pub fn action<'a>(&'a self, x: &GfaElement) -> GfaAction<'a> {
        GfaAction {
            tree: self,
            x: x.clone(),
            inv: x.inverse(self),
        }
    }
}

/// An element of `G(F, A)` acting on the coset tree.
#[derive(Clone, Debug)]
pub struct GfaAction<'a> {
    tree: &'a CosetTree,
    x: GfaElement,
    inv: GfaElement,
}

impl TreeAction for GfaAction<'_> {
    fn q(&self) -> usize {
        self.tree.q
    }

    fn act(&self, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        Ok(self.tree.apply(&self.x, v))
    }

    fn act_inverse(&self, v: &UnrootedVertex) -> Result<UnrootedVertex> {
        Ok(self.tree.apply(&self.inv, v))
    }
}

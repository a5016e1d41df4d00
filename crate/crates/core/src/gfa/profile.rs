use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;

use super::finite::{FiniteGroup, SubgroupSet};
use super::fseq::FSeqElement;
use crate::limits;
use crate::perm::{GroupFingerprint, PermGroup, Permutation};
use crate::residue::ResidueReport;
use crate::{Error, Result};

/// The group `G(F, A) = H ⋊ ⟨α⟩` with a fixed transversal of `A` in `F`.
#[derive(Clone, Debug)]
pub struct Gfa {
    pub f: Arc<FiniteGroup>,
    pub a: SubgroupSet,
    transversal: Vec<usize>,
}

/// Builds the context for `G(F, A)`; `A` must be a proper subgroup.
pub fn make_gfa(f: FiniteGroup, a: SubgroupSet) -> Result<Gfa> {
    let f = Arc::new(f);
    let a = f.subgroup(a.elements())?;
    if a.len() == f.order() {
        return Err(Error::Invalid("A = F gives q = 1".into()));
    }
    let transversal = f.whole().left_cosets(&f, &a);
    Ok(Gfa { f, a, transversal })
}

impl Gfa {
    /// `q = |F/A|`.
    pub fn q(&self) -> usize {
        self.transversal.len()
    }

    /// Coset representatives of `F/A`: identity first, then ascending element index.
    pub fn transversal(&self) -> &[usize] {
        &self.transversal
    }

    /// The shift `α(h)_m = h_{m-1}`.
    pub fn alpha(&self, h: &FSeqElement, k: i64) -> FSeqElement {
        h.shift(k)
    }

    pub fn kernel(&self) -> SubgroupSet {
        kernel_c(&self.f, &self.a)
    }
}

/// The normal core `C = ⋂_f f A f⁻¹`; `C^ℤ` is the kernel of the tree action.
pub fn kernel_c(f: &FiniteGroup, a: &SubgroupSet) -> SubgroupSet {
    f.core(a)
}

/// A coordinatewise subgroup profile: `left` for `m < lo`, `window[m - lo]` on `[lo, lo + len)`,
/// `right` above.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TidyProfile {
    pub f: Arc<FiniteGroup>,
    pub left: SubgroupSet,
    pub lo: i64,
    pub window: Vec<SubgroupSet>,
    pub right: SubgroupSet,
}

impl TidyProfile {
    pub fn new(f: Arc<FiniteGroup>, left: SubgroupSet, lo: i64, window: Vec<SubgroupSet>) -> Result<Self> {
        let right = f.whole();
        for s in std::iter::once(&left).chain(&window) {
            f.subgroup(s.elements())?;
        }
        Ok(TidyProfile {
            f,
            left,
            lo,
            window,
            right,
        })
    }

    /// `V_0 = {h : h_m ∈ A for m < 0}`.
    pub fn v0(ctx: &Gfa) -> Self {
        TidyProfile {
            f: ctx.f.clone(),
            left: ctx.a.clone(),
            lo: 0,
            window: Vec::new(),
            right: ctx.f.whole(),
        }
    }

    /// `A` below `-r`, `b` on `[-r, 0)`, `F` from `0` on; `V^(r)` and `W^(r)` are of this form.
    pub fn band(ctx: &Gfa, b: SubgroupSet, r: usize) -> Result<Self> {
        TidyProfile::new(ctx.f.clone(), ctx.a.clone(), -(r as i64), vec![b; r])
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.window.len() as i64
    }

    /// The subgroup at coordinate `m`.
    pub fn at(&self, m: i64) -> &SubgroupSet {
        if m < self.lo {
            &self.left
        } else if m >= self.hi() {
            &self.right
        } else {
            &self.window[(m - self.lo) as usize]
        }
    }

    pub fn contains(&self, h: &FSeqElement) -> bool {
        h.entries().all(|(m, x)| self.at(m).contains(x))
    }

    /// `α^k(V)`, whose coordinate `m` is `P_{m-k}`.
    pub fn shifted(&self, k: i64) -> TidyProfile {
        TidyProfile {
            lo: self.lo + k,
            ..self.clone()
        }
    }

    /// Coordinates `[lo - 1, hi]`, outside of which the profile is constant.
    pub fn span(&self) -> std::ops::RangeInclusive<i64> {
        self.lo - 1..=self.hi()
    }

    fn from_fn(f: &Arc<FiniteGroup>, lo: i64, hi: i64, at: impl Fn(i64) -> SubgroupSet) -> TidyProfile {
        TidyProfile {
            f: f.clone(),
            left: at(lo - 1),
            lo,
            window: (lo..hi).map(&at).collect(),
            right: at(hi),
        }
    }

    pub fn describe(&self) -> Vec<(i64, String)> {
        self.span().map(|m| (m, self.at(m).describe(&self.f))).collect()
    }
}

/// Coordinatewise tidiness data for `α`.
#[derive(Clone, Debug, Serialize)]
pub struct TidinessReport {
    /// `α(V) ≤ V`.
    pub alpha_invariant_decrease: bool,
    pub v_plus: Vec<(i64, String)>,
    pub v_minus: Vec<(i64, String)>,
    /// `V = V₊V₋` coordinatewise.
    pub tidy: bool,
    /// `[α⁻¹(V) : α⁻¹(V) ∩ V]`.
    pub index_of_shift: u128,
}

/// Computes `V₊ = ⋂_{n≥0} αⁿ(V)`, `V₋ = ⋂_{n≥0} α⁻ⁿ(V)` and the tidiness condition.
pub fn profile_tidiness(pf: &TidyProfile) -> Result<TidinessReport> {
    let f = &pf.f;
    for m in pf.span() {
        f.subgroup(pf.at(m).elements())?;
    }
    let (lo, hi) = (pf.lo, pf.hi());
    let meet_all = pf
        .span()
        .fold(f.whole(), |acc, m| acc.intersect(pf.at(m)));
    // V₊ at m meets P_k for k ≤ m; V₋ at m meets P_k for k ≥ m
    let plus_at = |m: i64| (lo - 1..=m.min(hi)).fold(pf.left.clone(), |acc, k| acc.intersect(pf.at(k)));
    let minus_at = |m: i64| (m.max(lo - 1)..=hi).fold(pf.right.clone(), |acc, k| acc.intersect(pf.at(k)));
    let v_plus = TidyProfile::from_fn(f, lo, hi, |m| if m > hi { meet_all.clone() } else { plus_at(m) });
    let v_minus = TidyProfile::from_fn(f, lo, hi, |m| if m < lo - 1 { meet_all.clone() } else { minus_at(m) });
    let alpha_invariant_decrease = (lo..=hi).all(|m| pf.at(m - 1).is_subgroup_of(pf.at(m)));
    let tidy = pf.span().all(|m| {
        let p = v_plus.at(m);
        let n = v_minus.at(m);
        let mut prod: Vec<usize> = p
            .elements()
            .iter()
            .flat_map(|&a| n.elements().iter().map(move |&b| f.mul(a, b)))
            .collect();
        prod.sort_unstable();
        prod.dedup();
        prod == pf.at(m).elements()
    });
    let index_of_shift = (lo - 1..=hi)
        .map(|m| {
            let up = pf.at(m + 1);
            (up.len() / up.intersect(pf.at(m)).len()) as u128
        })
        .product();
    Ok(TidinessReport {
        alpha_invariant_decrease,
        v_plus: v_plus.describe(),
        v_minus: v_minus.describe(),
        tidy,
        index_of_shift,
    })
}

/// One coordinate of the coset space `V / α^d(V)`.
#[derive(Clone, Debug, Serialize)]
pub struct CoordinateFactor {
    pub coordinate: i64,
    /// `[P_m : P_{m-d}]`.
    pub index: usize,
    /// Whether `P_{m-d}` is normal in `P_m`.
    pub normal: bool,
    pub fingerprint: GroupFingerprint,
}

/// Residue group of a profile computed on the coset space `V / α^d(V)`.
#[derive(Clone, Debug)]
pub struct ProfileResidue {
    pub report: ResidueReport,
    pub coset_count: u128,
    /// `[K : core K]` for `K = α^d(V)` over the finite coordinate window.
    pub core_index: u128,
    pub factors: Vec<CoordinateFactor>,
}

impl ProfileResidue {
    pub fn order(&self) -> BigUint {
        self.report.fingerprint.order.clone()
    }

    /// `order = coset_count · [K : core K]`.
    pub fn self_consistent(&self) -> bool {
        self.order() == BigUint::from(self.coset_count) * BigUint::from(self.core_index)
    }

    pub fn coordinatewise_normal(&self) -> bool {
        self.factors.iter().all(|c| c.normal)
    }
}

/// The permutation group induced by `V` on `V / α^d(V)`, built coordinatewise.
pub fn profile_residue(pf: &TidyProfile, d: usize) -> Result<ProfileResidue> {
    let f = &pf.f;
    let di = d as i64;
    let mut coords = Vec::new();
    for m in pf.lo..pf.hi() + di {
        let top = pf.at(m);
        let sub = pf.at(m - di);
        if !sub.is_subgroup_of(top) {
            return Err(Error::Invalid(format!(
                "profile is not decreasing under the shift at coordinate {m}"
            )));
        }
        if sub.len() < top.len() {
            coords.push((m, top.clone(), sub.clone()));
        }
    }
    let coset_count: u128 = coords.iter().map(|(_, t, s)| (t.len() / s.len()) as u128).product();
    limits::check_points("coset space", coset_count)?;
    let n = coset_count as usize;
    let mut radix = 1usize;
    let mut gens = Vec::new();
    let mut factors = Vec::new();
    let mut core_index = 1u128;
    for (m, top, sub) in &coords {
        let reps = top.left_cosets(f, sub);
        let k = reps.len();
        let local: Vec<Vec<usize>> = top
            .generators(f)
            .into_iter()
            .map(|g| {
                reps.iter()
                    .map(|&r| SubgroupSet::coset_index(f, &reps, sub, f.mul(g, r)))
                    .collect()
            })
            .collect();
        for img in &local {
            let images = (0..n)
                .map(|p| {
                    let digit = (p / radix) % k;
                    p - digit * radix + img[digit] * radix
                })
                .collect();
            gens.push(Permutation::from_images(images)?);
        }
        let factor = top.coset_permutation_group(f, sub)?;
        let core = f_core_in(f, top, sub);
        core_index *= (sub.len() / core.len()) as u128;
        factors.push(CoordinateFactor {
            coordinate: *m,
            index: k,
            normal: core.len() == sub.len(),
            fingerprint: factor.fingerprint()?,
        });
        radix *= k;
    }
    let group = PermGroup::new(n, gens)?;
    let factor_prints = factors.iter().map(|c| c.fingerprint.clone()).collect();
    Ok(ProfileResidue {
        report: ResidueReport::new(d, group, Some(factor_prints))?,
        coset_count,
        core_index,
        factors,
    })
}

/// `⋂_{t ∈ T} t K t⁻¹` for `K ≤ T`.
fn f_core_in(f: &FiniteGroup, t: &SubgroupSet, k: &SubgroupSet) -> SubgroupSet {
    let elements: Vec<usize> = k
        .elements()
        .iter()
        .copied()
        .filter(|&x| t.elements().iter().all(|&g| k.contains(f.mul(f.mul(f.inv(g), x), g))))
        .collect();
    f.subgroup(&elements).expect("cores are subgroups")
}

//! Residue groups: the finite permutation groups induced on the levels of the
//! rooted tree, their coset-action description and the primitivity criterion
//! for uniqueness of tree representations.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::automata::{level_quotient, SelfSimilarGroup};
use crate::perm::{BlockSystem, GroupFingerprint, PermGroup, Subgroup};
use crate::portraits::string_index;
use crate::{Error, Result};

/// The level-`d` residue group with its invariants.
#[derive(Clone, Debug)]
pub struct ResidueReport {
    pub d: usize,
    pub group: PermGroup,
    pub fingerprint: GroupFingerprint,
    /// Fingerprints of direct factors, when the group is built as a coordinatewise product.
    pub factors: Option<Vec<GroupFingerprint>>,
}

impl ResidueReport {
    pub fn new(d: usize, group: PermGroup, factors: Option<Vec<GroupFingerprint>>) -> Result<Self> {
        let fingerprint = group.fingerprint()?;
        Ok(ResidueReport {
            d,
            group,
            fingerprint,
            factors,
        })
    }

    pub fn generators(&self) -> Vec<String> {
        self.group.generators().iter().map(ToString::to_string).collect()
    }
}

impl Serialize for ResidueReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("d", &self.d)?;
        m.serialize_entry("degree", &self.group.degree())?;
        m.serialize_entry("order", &self.fingerprint.order.to_string())?;
        m.serialize_entry("abelian", &self.fingerprint.abelian)?;
        m.serialize_entry("generators", &self.generators())?;
        m.serialize_entry("element_order_histogram", &self.fingerprint.element_order_histogram)?;
        m.serialize_entry("derived_length", &self.fingerprint.derived_length)?;
        if let Some(f) = &self.factors {
            let orders: Vec<String> = f.iter().map(|x| x.order.to_string()).collect();
            m.serialize_entry("factor_orders", &orders)?;
        }
        m.end()
    }
}

/// The level-`d` residue group of a self-replicating group; `d = 1` gives `[P]`.
pub fn residue(g: &SelfSimilarGroup, d: usize) -> Result<ResidueReport> {
    let lq = level_quotient(g, d)?;
    ResidueReport::new(d, lq.group, None)
}

/// Result of comparing the level action with the coset action on a vertex stabilizer.
#[derive(Clone, Debug, Serialize)]
pub struct CosetEquivalence {
    pub equivalent: bool,
    /// `relabelling[c]` is the level-`d` vertex (lexicographic index) matched with coset `c`.
    pub relabelling: Vec<usize>,
}

/// Checks that the level-`d` action is the coset action on the stabilizer of `w`,
/// via the bijection `g·Stab(w) ↦ g.w`.
pub fn coset_equivalence_check(g: &SelfSimilarGroup, d: usize, w: &[u8]) -> Result<CosetEquivalence> {
    if w.len() != d {
        return Err(Error::Invalid(format!("vertex of length {} on level {d}", w.len())));
    }
    let lq = level_quotient(g, d)?;
    coset_equivalence_for(&lq.group, string_index(g.q(), w))
}

/// The same check for an arbitrary permutation group and point.
pub fn coset_equivalence_for(group: &PermGroup, x: usize) -> Result<CosetEquivalence> {
    if !group.is_transitive() {
        return Err(Error::Intransitive(format!("level of size {} has several orbits", group.degree())));
    }
    let action = group.coset_action(&Subgroup::PointStabilizer(x))?;
    let relabelling: Vec<usize> = action.representatives.iter().map(|r| r.image(x)).collect();
    let mut seen = vec![false; group.degree()];
    let mut equivalent = relabelling.len() == group.degree();
    for &p in &relabelling {
        equivalent &= !std::mem::replace(&mut seen[p], true);
    }
    if equivalent {
        for (gen, c) in group.generators().iter().zip(action.group.generators()) {
            for (coset, &point) in relabelling.iter().enumerate() {
                if relabelling[c.image(coset)] != gen.image(point) {
                    equivalent = false;
                }
            }
        }
    }
    Ok(CosetEquivalence {
        equivalent,
        relabelling,
    })
}

/// Outcome of the primitivity test for uniqueness of the tree representation.
#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    pub unique_up_to_conjugacy: bool,
    /// A block system witnessing an intermediate subgroup, when not unique.
    pub witness_blocks: Option<BlockSystem>,
}

/// Unique up to conjugacy iff the level-1 action is primitive.
pub fn uniqueness_criterion(level1_action: &PermGroup) -> Result<UniquenessReport> {
    let systems = level1_action.minimal_blocks()?;
    Ok(UniquenessReport {
        unique_up_to_conjugacy: systems.is_empty(),
        witness_blocks: systems.into_iter().next(),
    })
}

/// Orbit size of the child `0` under the level-1 action, and whether it equals `q`.
#[derive(Clone, Debug, Serialize)]
pub struct IndexReport {
    pub q: usize,
    pub index: usize,
    pub ok: bool,
}

pub fn index_check(g: &SelfSimilarGroup) -> Result<IndexReport> {
    let lq = level_quotient(g, 1)?;
    let index = lq.group.orbit(0).len();
    Ok(IndexReport {
        q: g.q(),
        index,
        ok: index == g.q(),
    })
}

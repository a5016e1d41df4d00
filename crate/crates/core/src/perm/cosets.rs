use std::collections::HashMap;

use super::{PermGroup, Permutation};
use crate::limits;
use crate::{Error, Result};

/// A subgroup given either as a point stabilizer or by generators.
#[derive(Clone, Debug)]
pub enum Subgroup {
    PointStabilizer(usize),
    Generated(Vec<Permutation>),
}

/// The action of a group on the left cosets of a subgroup.
#[derive(Clone, Debug)]
pub struct CosetAction {
    /// The induced permutation group, one generator per generator of the acting group.
    pub group: PermGroup,
    /// Coset representatives in enumeration order; coset 0 is the subgroup itself.
    pub representatives: Vec<Permutation>,
}

enum CosetKey<'a> {
    Point(usize),
    Canonical(&'a PermGroup),
}

impl CosetKey<'_> {
    fn key(&self, g: &Permutation) -> Result<Vec<u32>> {
        match self {
            CosetKey::Point(x) => Ok(vec![g.image(*x) as u32]),
            CosetKey::Canonical(h) => Ok(canonical_coset_rep(g, h)?.raw().to_vec()),
        }
    }
}

/// The least element of `gH` in the image order of the base of `H`'s stabilizer chain.
fn canonical_coset_rep(g: &Permutation, h: &PermGroup) -> Result<Permutation> {
    let chain = h.chain()?;
    let mut rep = g.clone();
    for level in &chain.levels {
        let best = level
            .orbit
            .iter()
            .map(|&o| o as usize)
            .min_by_key(|&o| rep.image(o))
            .expect("orbit contains the base point");
        if best != level.base {
            rep = rep.then_after(&level.rep(best));
        }
    }
    Ok(rep)
}

impl PermGroup {
    /// Permutation representation on left cosets `gH`, enumerated breadth-first from `H`.
    pub fn coset_action(&self, h: &Subgroup) -> Result<CosetAction> {
        let hgroup;
        let key = match h {
            Subgroup::PointStabilizer(x) => {
                if *x >= self.degree() {
                    return Err(Error::Invalid(format!("point {x} out of range")));
                }
                CosetKey::Point(*x)
            }
            Subgroup::Generated(gens) => {
                for g in gens {
                    if !self.contains(g)? {
                        return Err(Error::NotSubgroup(format!("{g} is not in the group")));
                    }
                }
                hgroup = PermGroup::new(self.degree(), gens.clone())?;
                CosetKey::Canonical(&hgroup)
            }
        };
        let limit = limits::max_points();
        let id = Permutation::identity(self.degree());
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        index.insert(key.key(&id)?, 0);
        let mut reps = vec![id];
        let mut images: Vec<Vec<usize>> = vec![Vec::new(); self.generators().len()];
        let mut i = 0;
        while i < reps.len() {
            for (s, g) in self.generators().iter().enumerate() {
                let x = g.then_after(&reps[i]);
                let k = key.key(&x)?;
                let j = match index.get(&k) {
                    Some(&j) => j,
                    None => {
                        let j = reps.len();
                        if j + 1 > limit {
                            return Err(Error::limit("coset count", (j + 1) as u128, limit as u128));
                        }
                        index.insert(k, j);
                        reps.push(x);
                        j
                    }
                };
                images[s].push(j);
            }
            i += 1;
        }
        let n = reps.len();
        let gens = images
            .into_iter()
            .map(Permutation::from_images)
            .collect::<Result<Vec<_>>>()?;
        Ok(CosetAction {
            group: PermGroup::new(n, gens)?,
            representatives: reps,
        })
    }
}

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use super::recursion::{GroupWord, SelfSimilarGroup, WreathRecursion};
use crate::limits;
use crate::perm::{PermGroup, Permutation};
use crate::Result;

/// The action of a self-similar group on the `q^d` strings of length `d`.
#[derive(Clone, Debug)]
pub struct LevelQuotient {
    pub depth: usize,
    pub q: usize,
    /// Generated by the images of the group's generators, in generator order.
    pub group: PermGroup,
    /// Image of each generator (identity images included).
    pub generator_images: Vec<Permutation>,
    recursion: Arc<WreathRecursion>,
}

impl LevelQuotient {
    /// The image of a word in the quotient.
    pub fn image(&self, w: &GroupWord) -> Permutation {
        let n = self.points();
        let images = (0..n)
            .map(|x| {
                let s = crate::portraits::index_string(self.q, self.depth, x);
                crate::portraits::string_index(self.q, &self.recursion.evaluate(w, &s))
            })
            .collect();
        Permutation::from_images(images).expect("words act bijectively")
    }

    pub fn points(&self) -> usize {
        self.q.pow(self.depth as u32)
    }
}

/// The permutation group induced on level `d`.
pub fn level_quotient(g: &SelfSimilarGroup, d: usize) -> Result<LevelQuotient> {
    let q = g.q();
    let n = (q as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    limits::check_points("level size", n)?;
    let all = g.recursion.state_level_images(d);
    let generator_images: Vec<Permutation> = g
        .generators
        .iter()
        .map(|&s| Permutation::from_images(all[s].iter().map(|&x| x as usize).collect()).expect("bijective"))
        .collect();
    Ok(LevelQuotient {
        depth: d,
        q,
        group: PermGroup::new(n as usize, generator_images.clone())?,
        generator_images,
        recursion: g.recursion.clone(),
    })
}

/// Outcome of the finite-depth self-replication test.
#[derive(Clone, Debug, Serialize)]
pub struct SelfReplicationReport {
    pub depth: usize,
    pub level1_transitive: bool,
    /// Level-1 vertex → whether its stabilizer restricts onto the full depth-`d` quotient.
    pub surjective_at: BTreeMap<usize, bool>,
    pub counterexample: Option<Counterexample>,
}

/// A level-1 vertex whose restricted stabilizer misses a generator of the quotient.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub vertex: usize,
    pub missing_generator: String,
}

impl SelfReplicationReport {
    pub fn passed(&self) -> bool {
        self.level1_transitive && self.surjective_at.values().all(|&b| b)
    }
}

/// Generators of the restriction to subtree `i` of the stabilizer of level-1 vertex `i`,
/// given generators acting on strings of length `d+1`.
pub(crate) fn restricted_stabilizer(q: usize, d: usize, gens: &[Permutation], i: usize) -> Vec<Permutation> {
    let stride = q.pow(d as u32);
    let top = |g: &Permutation, j: usize| g.image(j * stride) / stride;
    // transversal of the level-1 orbit of i
    let n = stride * q;
    let mut reps: HashMap<usize, Permutation> = HashMap::new();
    reps.insert(i, Permutation::identity(n));
    let mut order = vec![i];
    let mut queue = VecDeque::from([i]);
    while let Some(j) = queue.pop_front() {
        let u = reps[&j].clone();
        for g in gens {
            let k = top(g, j);
            if let std::collections::hash_map::Entry::Vacant(e) = reps.entry(k) {
                e.insert(g.then_after(&u));
                order.push(k);
                queue.push_back(k);
            }
        }
    }
    let mut out: Vec<Permutation> = Vec::new();
    for &j in &order {
        let u = &reps[&j];
        for g in gens {
            let k = top(g, j);
            let h = reps[&k].inverse().then_after(&g.then_after(u));
            let images = (0..stride)
                .map(|t| h.image(i * stride + t) - i * stride)
                .collect();
            let r = Permutation::from_images(images).expect("stabilizer preserves the subtree");
            if !r.is_identity() && !out.contains(&r) {
                out.push(r);
            }
        }
    }
    out
}

/// Checks level-1 transitivity and, for each level-1 vertex `i`, that the stabilizer of `i`
/// in the depth-`(d+1)` quotient restricts onto the whole depth-`d` quotient.
pub fn check_self_replicating(g: &SelfSimilarGroup, d: usize) -> Result<SelfReplicationReport> {
    let q = g.q();
    let upper = level_quotient(g, d + 1)?;
    let lower = level_quotient(g, d)?;
    let stride = q.pow(d as u32);
    let level1 = PermGroup::new(
        q,
        upper
            .generator_images
            .iter()
            .map(|p| Permutation::from_images((0..q).map(|j| p.image(j * stride) / stride).collect()))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let level1_transitive = level1.is_transitive();
    let mut surjective_at = BTreeMap::new();
    let mut counterexample = None;
    for i in 0..q {
        let sections = restricted_stabilizer(q, d, &upper.generator_images, i);
        let restricted = PermGroup::new(stride, sections)?;
        let mut ok = true;
        for gen in lower.group.generators() {
            if !restricted.contains(gen)? {
                ok = false;
                if counterexample.is_none() {
                    counterexample = Some(Counterexample {
                        vertex: i,
                        missing_generator: gen.to_string(),
                    });
                }
                break;
            }
        }
        surjective_at.insert(i, ok);
    }
    if !level1_transitive && counterexample.is_none() {
        counterexample = Some(Counterexample {
            vertex: 0,
            missing_generator: "level 1 is not a single orbit".to_string(),
        });
    }
    Ok(SelfReplicationReport {
        depth: d,
        level1_transitive,
        surjective_at,
        counterexample,
    })
}

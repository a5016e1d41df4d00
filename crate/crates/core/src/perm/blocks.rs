use serde::{Deserialize, Serialize};

use super::group::UnionFind;
use super::{PermGroup, Permutation};
use crate::{Error, Result};

/// A partition of the points into blocks of imprimitivity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockSystem {
    /// Blocks sorted internally and by least point.
    pub blocks: Vec<Vec<usize>>,
}

impl BlockSystem {
    pub fn block_size(&self) -> usize {
        self.blocks.first().map_or(0, Vec::len)
    }

    /// Index of the block containing each point.
    pub fn block_index(&self) -> Vec<usize> {
        let n: usize = self.blocks.iter().map(Vec::len).sum();
        let mut idx = vec![0; n];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                idx[x] = i;
            }
        }
        idx
    }

    /// Whether `g` maps every block onto a block.
    pub fn is_preserved_by(&self, g: &Permutation) -> bool {
        let idx = self.block_index();
        self.blocks.iter().all(|b| {
            let target = idx[g.image(b[0])];
            b.iter().all(|&x| idx[g.image(x)] == target)
        })
    }
}

impl PermGroup {
    /// The finest block system in which `a` and `b` share a block.
    pub fn minimal_block_system(&self, a: usize, b: usize) -> BlockSystem {
        let mut uf = UnionFind::new(self.degree());
        let mut queue = Vec::new();
        if uf.union(a, b) {
            queue.push((a, b));
        }
        while let Some((x, y)) = queue.pop() {
            for g in self.generators() {
                let (gx, gy) = (g.image(x), g.image(y));
                if uf.union(gx, gy) {
                    queue.push((gx, gy));
                }
            }
        }
        let mut blocks = uf.classes();
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort();
        BlockSystem { blocks }
    }

    /// All minimal nontrivial block systems of a transitive group.
    pub fn minimal_blocks(&self) -> Result<Vec<BlockSystem>> {
        if !self.is_transitive() {
            return Err(Error::Intransitive(format!(
                "group on {} points has {} orbits",
                self.degree(),
                self.orbits().len()
            )));
        }
        let n = self.degree();
        let mut candidates: Vec<BlockSystem> = Vec::new();
        for b in 1..n {
            let sys = self.minimal_block_system(0, b);
            if sys.blocks.len() == 1 {
                continue;
            }
            if !candidates.contains(&sys) {
                candidates.push(sys);
            }
        }
        // keep systems whose block through 0 contains no other candidate's block through 0
        let minimal: Vec<BlockSystem> = candidates
            .iter()
            .filter(|s| {
                !candidates.iter().any(|t| {
                    t.block_size() < s.block_size()
                        && t.blocks[0].iter().all(|x| s.blocks[0].contains(x))
                })
            })
            .cloned()
            .collect();
        let mut minimal = minimal;
        minimal.sort();
        Ok(minimal)
    }

    /// Primitive iff transitive with no nontrivial block system.
    pub fn is_primitive(&self) -> Result<bool> {
        Ok(self.minimal_blocks()?.is_empty())
    }
}

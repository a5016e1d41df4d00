use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::chain::StabChain;
use super::Permutation;
use crate::limits;
use crate::{Error, Result};

/// A permutation group given by generators, with compute-once caches.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabChain>,
    elements: OnceLock<Vec<Permutation>>,
}

impl std::fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("generators", &self.generators)
            .finish()
    }
}

impl PermGroup {
    /// Builds a group from generators of a common degree; identity generators are dropped.
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(degree, g.degree()));
            }
        }
        let mut seen = HashSet::new();
        let generators = generators
            .into_iter()
            .filter(|g| !g.is_identity() && seen.insert(g.clone()))
            .collect();
        Ok(PermGroup {
            degree,
            generators,
            chain: OnceLock::new(),
            elements: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
            chain: OnceLock::new(),
            elements: OnceLock::new(),
        }
    }

    /// The symmetric group on `n` points, generated by a transposition and an n-cycle.
    pub fn symmetric(n: usize) -> Self {
        let mut gens = Vec::new();
        if n >= 2 {
            gens.push(Permutation::from_cycles(n, &[vec![0, 1]]).expect("valid"));
            gens.push(Permutation::from_cycles(n, &[(0..n).collect()]).expect("valid"));
        }
        PermGroup::new(n, gens).expect("valid")
    }

    pub fn cyclic(n: usize) -> Self {
        let gens = if n >= 2 {
            vec![Permutation::from_cycles(n, &[(0..n).collect()]).expect("valid")]
        } else {
            Vec::new()
        };
        PermGroup::new(n, gens).expect("valid")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub(crate) fn chain(&self) -> Result<&StabChain> {
        if let Some(c) = self.chain.get() {
            return Ok(c);
        }
        limits::check_points("permutation degree", self.degree as u128)?;
        Ok(self
            .chain
            .get_or_init(|| StabChain::new(self.degree, &self.generators)))
    }

    /// Exact group order via a stabilizer chain.
    pub fn order(&self) -> Result<BigUint> {
        Ok(self.chain()?.order())
    }

    /// Group order as `u64` when it fits.
    pub fn order_u64(&self) -> Result<Option<u64>> {
        Ok(self.order()?.to_u64())
    }

    pub fn contains(&self, g: &Permutation) -> Result<bool> {
        Ok(self.chain()?.contains(g))
    }

    /// Base points of the cached stabilizer chain.
    pub fn base(&self) -> Result<Vec<usize>> {
        Ok(self.chain()?.base())
    }

    /// Whether `other` is a subgroup, by generator membership.
    pub fn contains_group(&self, other: &PermGroup) -> Result<bool> {
        for g in other.generators() {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Equality as subgroups of Sym(degree).
    pub fn same_group(&self, other: &PermGroup) -> Result<bool> {
        Ok(self.degree == other.degree
            && self.order()? == other.order()?
            && self.contains_group(other)?)
    }

    /// All elements by breadth-first closure over the generators.
    pub fn closure_elements(&self) -> Result<&[Permutation]> {
        if let Some(e) = self.elements.get() {
            return Ok(e);
        }
        let limit = limits::max_closure();
        let id = Permutation::identity(self.degree);
        let mut seen: HashSet<Permutation> = HashSet::new();
        let mut out = vec![id.clone()];
        seen.insert(id);
        let mut i = 0;
        while i < out.len() {
            for g in &self.generators {
                let x = g.then_after(&out[i]);
                if seen.insert(x.clone()) {
                    out.push(x);
                    if out.len() > limit {
                        return Err(Error::limit("closure size", out.len() as u128, limit as u128));
                    }
                }
            }
            i += 1;
        }
        Ok(self.elements.get_or_init(|| out))
    }

    /// Calls `f` on every element using the stabilizer chain (no storage).
    pub fn for_each_element(&self, f: &mut dyn FnMut(&Permutation)) -> Result<()> {
        self.chain()?.for_each_element(f);
        Ok(())
    }

    /// Orbit partition by union-find over generator images; orbits sorted by least point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.degree);
        for g in &self.generators {
            for x in 0..self.degree {
                uf.union(x, g.image(x));
            }
        }
        uf.classes()
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.orbit(0).len() == self.degree
    }

    /// Orbit of `x` in breadth-first order.
    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[x] = true;
        let mut out = vec![x];
        let mut i = 0;
        while i < out.len() {
            for g in &self.generators {
                let y = g.image(out[i]);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out
    }

    /// Orbit of `x` with a transversal: `reps[y]` maps `x` to `y`.
    pub fn orbit_transversal(&self, x: usize) -> HashMap<usize, Permutation> {
        let mut reps = HashMap::new();
        reps.insert(x, Permutation::identity(self.degree));
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            let u = reps[&y].clone();
            for g in &self.generators {
                let z = g.image(y);
                if let std::collections::hash_map::Entry::Vacant(e) = reps.entry(z) {
                    e.insert(g.then_after(&u));
                    queue.push_back(z);
                }
            }
        }
        reps
    }

    /// Schreier generators of the stabilizer of `x`.
    pub fn stabilizer_generators(&self, x: usize) -> Vec<Permutation> {
        let reps = self.orbit_transversal(x);
        let mut points: Vec<usize> = reps.keys().copied().collect();
        points.sort_unstable();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for y in points {
            let u = &reps[&y];
            for g in &self.generators {
                let z = g.image(y);
                let h = reps[&z].inverse().then_after(&g.then_after(u));
                if !h.is_identity() && seen.insert(h.clone()) {
                    out.push(h);
                }
            }
        }
        out
    }

    pub fn stabilizer(&self, x: usize) -> PermGroup {
        PermGroup::new(self.degree, self.stabilizer_generators(x)).expect("same degree")
    }

    /// Abelian iff all generator pairs commute.
    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        (0..g.len()).all(|i| (i + 1..g.len()).all(|j| g[i].commutes_with(&g[j])))
    }

    /// Normal closure of `elems` in this group.
    pub fn normal_closure(&self, elems: Vec<Permutation>) -> Result<PermGroup> {
        let mut gens: Vec<Permutation> = elems.into_iter().filter(|e| !e.is_identity()).collect();
        loop {
            let current = PermGroup::new(self.degree, gens.clone())?;
            let mut added = false;
            for n in current.generators() {
                for g in &self.generators {
                    let c = n.conjugate_by(g);
                    if !current.contains(&c)? {
                        gens.push(c);
                        added = true;
                        break;
                    }
                }
                if added {
                    break;
                }
            }
            if !added {
                return Ok(current);
            }
        }
    }

    /// Commutator subgroup.
    pub fn derived_subgroup(&self) -> Result<PermGroup> {
        let g = &self.generators;
        let mut comms = Vec::new();
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                let c = g[i]
                    .inverse()
                    .then_after(&g[j].inverse())
                    .then_after(&g[i])
                    .then_after(&g[j]);
                if !c.is_identity() {
                    comms.push(c);
                }
            }
        }
        self.normal_closure(comms)
    }

    /// The group induced on a union of blocks or on an invariant subset, given the point map.
    pub fn induced(&self, points: usize, map: impl Fn(usize) -> usize) -> Result<PermGroup> {
        let mut gens = Vec::new();
        let mut reps = vec![usize::MAX; points];
        for x in 0..self.degree {
            let b = map(x);
            if reps[b] == usize::MAX {
                reps[b] = x;
            }
        }
        for g in &self.generators {
            let mut images = vec![0usize; points];
            for (b, &x) in reps.iter().enumerate() {
                if x == usize::MAX {
                    images[b] = b;
                } else {
                    images[b] = map(g.image(x));
                }
            }
            gens.push(Permutation::from_images(images)?);
        }
        PermGroup::new(points, gens)
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes; returns true if they were distinct.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
        true
    }

    pub(crate) fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: HashMap<usize, usize> = HashMap::new();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let r = self.find(x);
            let idx = *by_root.entry(r).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[idx].push(x);
        }
        out
    }
}

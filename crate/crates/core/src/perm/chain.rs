//! Deterministic Schreier–Sims stabilizer chains.

use num_bigint::BigUint;

use super::Permutation;

const NOT_IN_ORBIT: u32 = u32::MAX;
const EXPLICIT_BUDGET: usize = 1 << 24;

#[derive(Clone, Debug)]
enum Transversal {
    /// Coset representative per orbit position.
    Explicit(Vec<Permutation>),
    /// Schreier tree: orbit position of the parent and generator index used.
    Tree(Vec<(u32, u32)>),
}

#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub(crate) base: usize,
    pub(crate) gens: Vec<Permutation>,
    pub(crate) orbit: Vec<u32>,
    pos: Vec<u32>,
    transversal: Transversal,
    checked: (usize, usize),
}

impl Level {
    fn new(degree: usize, base: usize) -> Self {
        let mut pos = vec![NOT_IN_ORBIT; degree];
        pos[base] = 0;
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base as u32],
            pos,
            transversal: Transversal::Explicit(vec![Permutation::identity(degree)]),
            checked: (0, 0),
        }
    }

    pub(crate) fn contains_point(&self, x: usize) -> bool {
        self.pos[x] != NOT_IN_ORBIT
    }

    /// Coset representative mapping the base point to `x`.
    pub(crate) fn rep(&self, x: usize) -> Permutation {
        let p = self.pos[x] as usize;
        match &self.transversal {
            Transversal::Explicit(reps) => reps[p].clone(),
            Transversal::Tree(tree) => {
                let mut path = Vec::new();
                let mut cur = p;
                while cur != 0 {
                    let (parent, g) = tree[cur];
                    path.push(g as usize);
                    cur = parent as usize;
                }
                let degree = self.pos.len();
                let mut acc = Permutation::identity(degree);
                for &g in path.iter().rev() {
                    acc = self.gens[g].then_after(&acc);
                }
                acc
            }
        }
    }

    fn push_point(&mut self, x: usize, parent_pos: usize, gen: usize, rep: Option<Permutation>) {
        self.pos[x] = self.orbit.len() as u32;
        self.orbit.push(x as u32);
        match &mut self.transversal {
            Transversal::Explicit(reps) => reps.push(rep.expect("explicit transversal needs rep")),
            Transversal::Tree(tree) => tree.push((parent_pos as u32, gen as u32)),
        }
    }

    /// Adds a generator and extends the orbit, keeping existing representatives.
    fn add_gen(&mut self, g: Permutation) {
        let degree = self.pos.len();
        self.gens.push(g);
        let new_idx = self.gens.len() - 1;
        let mut frontier_start = self.orbit.len();
        // apply the new generator to every old point
        for p in 0..frontier_start {
            let beta = self.orbit[p] as usize;
            self.try_extend(p, beta, new_idx, degree);
        }
        // then close the new points under all generators
        while frontier_start < self.orbit.len() {
            let end = self.orbit.len();
            for p in frontier_start..end {
                let beta = self.orbit[p] as usize;
                for s in 0..self.gens.len() {
                    self.try_extend(p, beta, s, degree);
                }
            }
            frontier_start = end;
        }
    }

    fn try_extend(&mut self, p: usize, beta: usize, s: usize, degree: usize) {
        let gamma = self.gens[s].image(beta);
        if self.pos[gamma] != NOT_IN_ORBIT {
            return;
        }
        if let Transversal::Explicit(reps) = &self.transversal {
            if (reps.len() + 1) * degree > EXPLICIT_BUDGET {
                self.to_tree();
                return;
            }
        }
        let rep = match &self.transversal {
            Transversal::Explicit(reps) => Some(self.gens[s].then_after(&reps[p])),
            Transversal::Tree(_) => None,
        };
        self.push_point(gamma, p, s, rep);
    }

    /// Switches to a Schreier tree, rebuilding the orbit by breadth-first search.
    fn to_tree(&mut self) {
        let degree = self.pos.len();
        let gens = std::mem::take(&mut self.gens);
        self.pos = vec![NOT_IN_ORBIT; degree];
        self.pos[self.base] = 0;
        self.orbit = vec![self.base as u32];
        self.transversal = Transversal::Tree(vec![(0, 0)]);
        self.gens = gens;
        self.checked = (0, 0);
        let mut i = 0;
        while i < self.orbit.len() {
            let beta = self.orbit[i] as usize;
            for s in 0..self.gens.len() {
                let gamma = self.gens[s].image(beta);
                if self.pos[gamma] == NOT_IN_ORBIT {
                    self.push_point(gamma, i, s, None);
                }
            }
            i += 1;
        }
    }
}

/// A base and strong generating set with transversals.
#[derive(Clone, Debug)]
pub(crate) struct StabChain {
    pub(crate) degree: usize,
    pub(crate) levels: Vec<Level>,
}

impl StabChain {
    pub(crate) fn new(degree: usize, gens: &[Permutation]) -> StabChain {
        let mut chain = StabChain {
            degree,
            levels: Vec::new(),
        };
        for g in gens {
            if g.is_identity() {
                continue;
            }
            let (residue, depth) = chain.strip(g.clone(), 0);
            if residue.is_identity() {
                continue;
            }
            chain.insert(residue, depth);
            chain.complete();
        }
        chain
    }

    /// Sifts `g` from level `start`; returns the residue and the level where sifting stopped.
    pub(crate) fn strip(&self, mut g: Permutation, start: usize) -> (Permutation, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            let beta = g.image(level.base);
            if !level.contains_point(beta) {
                return (g, i);
            }
            if beta != level.base {
                g = level.rep(beta).inverse().then_after(&g);
            }
        }
        (g, self.levels.len())
    }

    /// Adds a non-identity element fixing the bases of levels below `depth` to levels `from..=depth`.
    fn add_to_levels(&mut self, y: Permutation, from: usize, depth: usize) {
        if depth == self.levels.len() {
            let b = y.first_moved().expect("non-identity residue");
            self.levels.push(Level::new(self.degree, b));
        }
        for l in from..=depth {
            self.levels[l].add_gen(y.clone());
        }
    }

    fn insert(&mut self, y: Permutation, depth: usize) {
        // the residue fixes all earlier base points, so it belongs to every level up to `depth`
        self.add_to_levels(y, 0, depth);
    }

    /// Runs the Schreier–Sims test until every Schreier generator sifts to the identity.
    fn complete(&mut self) {
        if self.levels.is_empty() {
            return;
        }
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let li = i as usize;
            let mut restart: Option<usize> = None;
            let orbit_len = self.levels[li].orbit.len();
            let gen_len = self.levels[li].gens.len();
            let (co, cg) = self.levels[li].checked;
            'scan: for p in 0..orbit_len {
                let beta = self.levels[li].orbit[p] as usize;
                let mut u_beta: Option<Permutation> = None;
                for s in 0..gen_len {
                    if p < co && s < cg {
                        continue;
                    }
                    let level = &self.levels[li];
                    let gamma = level.gens[s].image(beta);
                    let ub = u_beta.get_or_insert_with(|| level.rep(beta));
                    let su = level.gens[s].then_after(ub);
                    let ug = level.rep(gamma);
                    if su == ug {
                        continue;
                    }
                    let h = ug.inverse().then_after(&su);
                    let (y, j) = self.strip(h, li + 1);
                    if j < self.levels.len() || !y.is_identity() {
                        self.add_to_levels(y, li + 1, j);
                        restart = Some(j);
                        break 'scan;
                    }
                }
            }
            match restart {
                Some(j) => {
                    i = j as isize;
                }
                None => {
                    self.levels[li].checked = (orbit_len, gen_len);
                    i -= 1;
                }
            }
        }
    }

    pub(crate) fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub(crate) fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (y, _) = self.strip(g.clone(), 0);
        y.is_identity()
    }

    pub(crate) fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Calls `f` on every group element, enumerated as products of transversal elements.
    pub(crate) fn for_each_element(&self, f: &mut dyn FnMut(&Permutation)) {
        fn rec(chain: &StabChain, i: usize, acc: &Permutation, f: &mut dyn FnMut(&Permutation)) {
            if i == chain.levels.len() {
                f(acc);
                return;
            }
            let level = &chain.levels[i];
            for &x in &level.orbit {
                let u = level.rep(x as usize);
                rec(chain, i + 1, &acc.then_after(&u), f);
            }
        }
        rec(self, 0, &Permutation::identity(self.degree), f);
    }
}

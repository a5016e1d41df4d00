use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::perm::{PermGroup, Permutation};
use crate::{Error, Result};

/// A finite group given by its Cayley table; element `0` is the identity.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    table: Vec<Vec<u32>>,
    inverses: Vec<u32>,
    names: Vec<String>,
    realization: Option<Vec<Permutation>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name, self.order())
    }
}

impl FiniteGroup {
    /// Validates a Cayley table: closure, identity `0`, inverses and associativity.
    pub fn from_table(name: impl Into<String>, table: Vec<Vec<u32>>, names: Option<Vec<String>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Invalid("empty Cayley table".into()));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Invalid(format!("row {a} has {} entries, expected {n}", row.len())));
            }
            let distinct: BTreeSet<u32> = row.iter().copied().collect();
            if distinct.len() != n || row.iter().any(|&x| x as usize >= n) {
                return Err(Error::Invalid(format!("row {a} is not a permutation of the elements")));
            }
            if row[0] as usize != a || table[0][a] as usize != a {
                return Err(Error::Invalid("element 0 is not the identity".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let ab = table[a][b] as usize;
                    let bc = table[b][c] as usize;
                    if table[ab][c] != table[a][bc] {
                        return Err(Error::Invalid(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|a| table[a].iter().position(|&x| x == 0).expect("rows are permutations") as u32)
            .collect();
        let names = names.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
        if names.len() != n {
            return Err(Error::Invalid("wrong number of element names".into()));
        }
        Ok(FiniteGroup {
            name: name.into(),
            table,
            inverses,
            names,
            realization: None,
        })
    }

    /// Builds the table of a faithful permutation realization; `perms[0]` must be the identity.
    pub fn from_permutations(name: impl Into<String>, perms: Vec<Permutation>, names: Vec<String>) -> Result<Self> {
        let index = |p: &Permutation| perms.iter().position(|x| x == p);
        let mut table = Vec::with_capacity(perms.len());
        for a in &perms {
            let row = perms
                .iter()
                .map(|b| {
                    index(&a.compose(b)?)
                        .map(|i| i as u32)
                        .ok_or_else(|| Error::Invalid("permutations are not closed".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            table.push(row);
        }
        let mut g = FiniteGroup::from_table(name, table, Some(names))?;
        g.realization = Some(perms);
        Ok(g)
    }

    /// `Sym(3) = ⟨σ, τ | σ² = τ³ = 1, στσ = τ⁻¹⟩` with `σ^i τ^j ↦ 3i + j`.
    pub fn sym3() -> Self {
        let sigma = Permutation::from_cycles(3, &[vec![0, 1]]).expect("valid");
        let tau = Permutation::from_cycles(3, &[vec![0, 1, 2]]).expect("valid");
        let mut perms = Vec::new();
        let mut names = Vec::new();
        for i in 0..2 {
            for j in 0..3 {
                perms.push(sigma.pow(i).compose(&tau.pow(j)).expect("same degree"));
                names.push(match (i, j) {
                    (0, 0) => "1".to_string(),
                    (0, 1) => "t".to_string(),
                    (0, _) => "t^2".to_string(),
                    (_, 0) => "s".to_string(),
                    (_, 1) => "st".to_string(),
                    _ => "st^2".to_string(),
                });
            }
        }
        FiniteGroup::from_permutations("sym3", perms, names).expect("Sym(3) is a group")
    }

    /// The cyclic group of order `n`, element `k` acting as rotation by `k`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("cyclic group of order 0".into()));
        }
        let perms = (0..n)
            .map(|k| Permutation::from_images((0..n).map(|x| (x + k) % n).collect()))
            .collect::<Result<Vec<_>>>()?;
        let names = (0..n).map(|k| k.to_string()).collect();
        FiniteGroup::from_permutations(format!("c{n}"), perms, names)
    }

    /// Parses `order n` followed by `n` rows of `n` element indices; `#` starts a comment.
    pub fn parse_cayley(name: &str, text: &str) -> Result<Self> {
        let mut order = None;
        let mut rows = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if order.is_none() {
                let n = line
                    .strip_prefix("order")
                    .and_then(|r| r.trim().parse::<usize>().ok())
                    .ok_or_else(|| Error::parse(no + 1, "expected `order n`"))?;
                order = Some(n);
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|_| Error::parse(no + 1, format!("bad index {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let n = order.ok_or_else(|| Error::parse(1, "missing `order n` line"))?;
        if rows.len() != n {
            return Err(Error::parse(text.lines().count(), format!("expected {n} rows, found {}", rows.len())));
        }
        FiniteGroup::from_table(name, rows, None)
    }

    /// `sym3`, `c<n>` / `cyclic(n)`.
    pub fn builtin(name: &str) -> Result<Self> {
        let name = name.trim();
        if name == "sym3" {
            return Ok(FiniteGroup::sym3());
        }
        let n = name
            .strip_prefix('c')
            .and_then(|r| r.parse::<usize>().ok())
            .or_else(|| name.strip_prefix("cyclic(")?.strip_suffix(')')?.parse().ok());
        match n {
            Some(n) => FiniteGroup::cyclic(n),
            None => Err(Error::Unknown(format!("finite group {name:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    pub fn element_name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn element_by_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn realization(&self) -> Option<&[Permutation]> {
        self.realization.as_deref()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn whole(&self) -> SubgroupSet {
        SubgroupSet {
            elements: (0..self.order()).collect(),
        }
    }

    pub fn trivial(&self) -> SubgroupSet {
        SubgroupSet { elements: vec![0] }
    }

    /// The subgroup generated by some elements.
    pub fn generate(&self, gens: &[usize]) -> SubgroupSet {
        let mut set = BTreeSet::from([0usize]);
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(g, x);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        SubgroupSet {
            elements: set.into_iter().collect(),
        }
    }

    /// Validates an explicit element set as a subgroup.
    pub fn subgroup(&self, elements: &[usize]) -> Result<SubgroupSet> {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        if !set.contains(&0) || set.iter().any(|&x| x >= self.order()) {
            return Err(Error::NotSubgroup("missing identity or out-of-range element".into()));
        }
        for &a in &set {
            if !set.contains(&self.inv(a)) {
                return Err(Error::NotSubgroup(format!("not closed under inverse at {a}")));
            }
            for &b in &set {
                if !set.contains(&self.mul(a, b)) {
                    return Err(Error::NotSubgroup(format!("not closed under product at ({a}, {b})")));
                }
            }
        }
        Ok(SubgroupSet {
            elements: set.into_iter().collect(),
        })
    }

    /// The normal core `⋂_f f A f⁻¹`, by direct intersection of conjugates.
    pub fn core(&self, a: &SubgroupSet) -> SubgroupSet {
        let elements = a
            .elements
            .iter()
            .copied()
            .filter(|&x| (0..self.order()).all(|f| a.contains(self.mul(self.mul(self.inv(f), x), f))))
            .collect();
        SubgroupSet { elements }
    }

    /// The left regular permutation representation of the elements of `s`.
    pub fn regular_permutations(&self, s: &[usize]) -> Vec<Permutation> {
        s.iter()
            .map(|&g| Permutation::from_images((0..self.order()).map(|x| self.mul(g, x)).collect()).expect("rows are bijective"))
            .collect()
    }
}

/// A subgroup of a [`FiniteGroup`] as a sorted element set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SubgroupSet {
    elements: Vec<usize>,
}

impl SubgroupSet {
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &SubgroupSet) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn intersect(&self, other: &SubgroupSet) -> SubgroupSet {
        SubgroupSet {
            elements: self.elements.iter().copied().filter(|&x| other.contains(x)).collect(),
        }
    }

    /// Greedy generating set: ascending elements not yet generated.
    pub fn generators(&self, f: &FiniteGroup) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut current = f.trivial();
        for &x in &self.elements {
            if !current.contains(x) {
                gens.push(x);
                current = f.generate(&gens);
            }
        }
        gens
    }

    /// Left cosets `xK` of a subgroup `K ≤ self`, ordered by least element; each coset is
    /// represented by that least element, so the identity coset comes first.
    pub fn left_cosets(&self, f: &FiniteGroup, k: &SubgroupSet) -> Vec<usize> {
        let mut reps = Vec::new();
        let mut covered = BTreeSet::new();
        for &x in &self.elements {
            if covered.contains(&x) {
                continue;
            }
            reps.push(x);
            covered.extend(k.elements.iter().map(|&y| f.mul(x, y)));
        }
        reps
    }

    /// Index of the left coset of `k` containing `x`, among `reps`.
    pub fn coset_index(f: &FiniteGroup, reps: &[usize], k: &SubgroupSet, x: usize) -> usize {
        reps.iter()
            .position(|&r| k.contains(f.mul(f.inv(r), x)))
            .expect("x lies in one of the cosets")
    }

    /// The permutation group of `self` acting on its left cosets of `k`.
    pub fn coset_permutation_group(&self, f: &FiniteGroup, k: &SubgroupSet) -> Result<PermGroup> {
        let reps = self.left_cosets(f, k);
        let gens = self
            .generators(f)
            .into_iter()
            .map(|g| {
                Permutation::from_images(
                    reps.iter()
                        .map(|&r| SubgroupSet::coset_index(f, &reps, k, f.mul(g, r)))
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        PermGroup::new(reps.len(), gens)
    }

    pub fn describe(&self, f: &FiniteGroup) -> String {
        let names: Vec<&str> = self.elements.iter().map(|&x| f.element_name(x)).collect();
        format!("{{{}}}", names.join(","))
    }
}

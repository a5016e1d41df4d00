use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A bijection of `{0, ..., degree-1}`.
///
/// Composition is a left action: `g.compose(&h)` maps `x` to `g(h(x))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PermutationRepr", into = "PermutationRepr")]
pub struct Permutation {
    images: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PermutationRepr {
    degree: usize,
    images: Vec<usize>,
}

impl TryFrom<PermutationRepr> for Permutation {
    type Error = Error;

    fn try_from(r: PermutationRepr) -> Result<Self> {
        if r.images.len() != r.degree {
            return Err(Error::InvalidPermutation(format!(
                "degree {} but {} images",
                r.degree,
                r.images.len()
            )));
        }
        Permutation::from_images(r.images)
    }
}

impl From<Permutation> for PermutationRepr {
    fn from(p: Permutation) -> Self {
        PermutationRepr {
            degree: p.degree(),
            images: p.images.iter().map(|&x| x as usize).collect(),
        }
    }
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from its image list, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n {
                return Err(Error::InvalidPermutation(format!(
                    "image {x} out of range for degree {n}"
                )));
            }
            if seen[x] {
                return Err(Error::InvalidPermutation(format!("image {x} repeated")));
            }
            seen[x] = true;
        }
        Ok(Permutation {
            images: images.into_iter().map(|x| x as u32).collect(),
        })
    }

    /// Builds a permutation from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= degree {
                    return Err(Error::InvalidPermutation(format!(
                        "point {x} not below degree {degree}"
                    )));
                }
                if used[x] {
                    return Err(Error::InvalidPermutation(format!("point {x} repeated")));
                }
                used[x] = true;
                images[x] = cycle[(i + 1) % cycle.len()] as u32;
            }
        }
        Ok(Permutation { images })
    }

    /// Parses cycle notation such as `(0 3)(1 4)(2 5)`; empty text and `()` give the identity.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let Some(body) = rest.strip_prefix('(') else {
                return Err(Error::InvalidPermutation(format!("expected '(' in {text:?}")));
            };
            let Some(end) = body.find(')') else {
                return Err(Error::InvalidPermutation(format!("unclosed cycle in {text:?}")));
            };
            let inner = &body[..end];
            if inner.contains('(') {
                return Err(Error::InvalidPermutation(format!("nested '(' in {text:?}")));
            }
            let cycle = inner
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::InvalidPermutation(format!("bad point {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = body[end + 1..].trim_start();
        }
        Permutation::from_cycles(degree, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize).collect()
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.images
    }

    /// Returns `self ∘ other`, applying `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(self.then_after(other))
    }

    /// Unchecked `self ∘ other`.
    pub(crate) fn then_after(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&x| self.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn pow(&self, e: i64) -> Permutation {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then_after(&sq);
            }
            sq = sq.then_after(&sq);
            e >>= 1;
        }
        acc
    }

    /// Conjugate `c ∘ self ∘ c⁻¹`.
    pub fn conjugate_by(&self, c: &Permutation) -> Permutation {
        c.then_after(self).then_after(&c.inverse())
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.images
            .iter()
            .zip(&other.images)
            .all(|(&a, &b)| other.images[a as usize] == self.images[b as usize])
    }

    /// Disjoint cycles of length at least two, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.image(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.image(start);
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.image(x);
            }
            out.push(cycle);
        }
        out
    }

    /// Order of the permutation as the lcm of its cycle lengths.
    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| lcm(acc, c.len() as u64))
    }

    /// Smallest moved point, if any.
    pub fn first_moved(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &x)| *i as u32 != x)
            .map(|(i, _)| i)
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self, self.degree())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Parses `degree:cycles`, e.g. `6:(0 3)(1 4)(2 5)`.
    fn from_str(s: &str) -> Result<Self> {
        let (d, c) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidPermutation(format!("expected degree:cycles, got {s:?}")))?;
        let degree = d
            .trim()
            .parse()
            .map_err(|_| Error::InvalidPermutation(format!("bad degree {d:?}")))?;
        Permutation::parse_cycles(c, degree)
    }
}

/// Convenience wrapper matching the cycle-notation parser signature.
pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation> {
    Permutation::parse_cycles(text, degree)
}

/// `g ∘ h` with degree checking.
pub fn compose(g: &Permutation, h: &Permutation) -> Result<Permutation> {
    g.compose(h)
}

use std::fmt;

use serde::Serialize;

use super::finite::FiniteGroup;

/// A finitely supported sequence `h = (h_m)` in `F^ℤ`, identity outside the support.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct FSeqElement {
    lo: i64,
    vals: Vec<u32>,
}

impl FSeqElement {
    pub fn identity() -> Self {
        FSeqElement::default()
    }

    /// `f_{[j]}`: the element `f` at coordinate `j`.
    pub fn single(j: i64, f: usize) -> Self {
        FSeqElement::from_entries([(j, f)])
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (i64, usize)>) -> Self {
        let entries: Vec<(i64, usize)> = entries.into_iter().filter(|&(_, f)| f != 0).collect();
        let Some(lo) = entries.iter().map(|e| e.0).min() else {
            return FSeqElement::identity();
        };
        let hi = entries.iter().map(|e| e.0).max().expect("nonempty");
        let mut vals = vec![0u32; (hi - lo + 1) as usize];
        for (m, f) in entries {
            vals[(m - lo) as usize] = f as u32;
        }
        FSeqElement { lo, vals }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.vals.last() == Some(&0) {
            self.vals.pop();
        }
        let lead = self.vals.iter().take_while(|&&x| x == 0).count();
        if lead == self.vals.len() {
            return FSeqElement::identity();
        }
        self.vals.drain(..lead);
        self.lo += lead as i64;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn get(&self, m: i64) -> usize {
        if m < self.lo {
            return 0;
        }
        self.vals.get((m - self.lo) as usize).map_or(0, |&x| x as usize)
    }

    /// Least and greatest coordinates of the support.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.vals.is_empty() {
            None
        } else {
            Some((self.lo, self.lo + self.vals.len() as i64 - 1))
        }
    }

    /// Nonidentity entries in coordinate order.
    pub fn entries(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.vals
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, &x)| (self.lo + i as i64, x as usize))
    }

    /// Coordinatewise product `self · other`.
    pub fn mul(&self, f: &FiniteGroup, other: &FSeqElement) -> FSeqElement {
        let (Some((a0, a1)), Some((b0, b1))) = (self.support(), other.support()) else {
            return if self.is_identity() { other.clone() } else { self.clone() };
        };
        let lo = a0.min(b0);
        let hi = a1.max(b1);
        let vals = (lo..=hi)
            .map(|m| f.mul(self.get(m), other.get(m)) as u32)
            .collect();
        FSeqElement { lo, vals }.trimmed()
    }

    pub fn inverse(&self, f: &FiniteGroup) -> FSeqElement {
        FSeqElement {
            lo: self.lo,
            vals: self.vals.iter().map(|&x| f.inv(x as usize) as u32).collect(),
        }
    }

    /// `α^k(h)` with `α(h)_m = h_{m-1}`.
    pub fn shift(&self, k: i64) -> FSeqElement {
        if self.is_identity() {
            return self.clone();
        }
        FSeqElement {
            lo: self.lo + k,
            vals: self.vals.clone(),
        }
    }

    pub fn display<'a>(&'a self, f: &'a FiniteGroup) -> impl fmt::Display + 'a {
        struct D<'a>(&'a FSeqElement, &'a FiniteGroup);
        impl fmt::Display for D<'_> {
            fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.0.is_identity() {
                    return write!(out, "1");
                }
                let parts: Vec<String> = self
                    .0
                    .entries()
                    .map(|(m, x)| format!("{}[{m}]", self.1.element_name(x)))
                    .collect();
                write!(out, "{}", parts.join("*"))
            }
        }
        D(self, f)
    }
}

impl fmt::Debug for FSeqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries().map(|(m, x)| format!("{x}@{m}")).collect();
        write!(f, "FSeq[{}]", parts.join(", "))
    }
}

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::perm::Permutation;
use crate::{Error, Result};

/// One state of a wreath recursion: a root permutation and a transition per digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub name: String,
    pub perm: Permutation,
    pub transitions: Vec<usize>,
}

/// A finite-state self-similar description `s = σ_s (s|_0, …, s|_{q-1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathRecursion {
    q: usize,
    states: Vec<State>,
    inverse_perms: Vec<Permutation>,
}

impl WreathRecursion {
    pub fn new(q: usize, states: Vec<State>) -> Result<Self> {
        if q < 2 {
            return Err(Error::Invalid(format!("alphabet size {q} must be at least 2")));
        }
        let mut names = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if names.insert(s.name.clone(), i).is_some() {
                return Err(Error::Invalid(format!("state {} declared twice", s.name)));
            }
            if s.perm.degree() != q {
                return Err(Error::DegreeMismatch(q, s.perm.degree()));
            }
            if s.transitions.len() != q {
                return Err(Error::Invalid(format!(
                    "state {} has {} transitions, expected {q}",
                    s.name,
                    s.transitions.len()
                )));
            }
            if let Some(&t) = s.transitions.iter().find(|&&t| t >= states.len()) {
                return Err(Error::Invalid(format!("state {} targets missing state {t}", s.name)));
            }
        }
        let inverse_perms = states.iter().map(|s| s.perm.inverse()).collect();
        Ok(WreathRecursion {
            q,
            states,
            inverse_perms,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s.name == name)
    }

    /// Whether a state acts trivially (trivial root permutation and all sections trivial).
    pub fn is_trivial_state(&self, s: usize) -> bool {
        let mut seen = vec![false; self.states.len()];
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            if seen[x] {
                continue;
            }
            seen[x] = true;
            if !self.states[x].perm.is_identity() {
                return false;
            }
            stack.extend(self.states[x].transitions.iter().copied());
        }
        true
    }

    /// Image of `s` under one letter, and the letter's section along `s`.
    fn apply_letter(&self, l: Letter, s: &[u8]) -> (Vec<u8>, Letter) {
        let mut state = l.state;
        let mut out = Vec::with_capacity(s.len());
        for &d in s {
            if l.inverse {
                let x = self.inverse_perms[state].image(d as usize);
                out.push(x as u8);
                state = self.states[state].transitions[x];
            } else {
                out.push(self.states[state].perm.image(d as usize) as u8);
                state = self.states[state].transitions[d as usize];
            }
        }
        (
            out,
            Letter {
                state,
                inverse: l.inverse,
            },
        )
    }

    /// Image of the string `s` under the word (rightmost letter acts first).
    pub fn evaluate(&self, w: &GroupWord, s: &[u8]) -> Vec<u8> {
        let mut cur = s.to_vec();
        for &l in w.letters.iter().rev() {
            cur = self.apply_letter(l, &cur).0;
        }
        cur
    }

    /// `(w.v, w|_v)` with `w.(v·s) = (w.v)·(w|_v . s)`.
    pub fn section_word(&self, w: &GroupWord, v: &[u8]) -> (Vec<u8>, GroupWord) {
        let mut cur = v.to_vec();
        let mut letters = vec![Letter { state: 0, inverse: false }; w.letters.len()];
        for (i, &l) in w.letters.iter().enumerate().rev() {
            let (img, sec) = self.apply_letter(l, &cur);
            letters[i] = sec;
            cur = img;
        }
        (cur, GroupWord { letters })
    }

    /// Root permutation of a word.
    pub fn root_permutation(&self, w: &GroupWord) -> Permutation {
        let images = (0..self.q)
            .map(|d| self.evaluate(w, &[d as u8])[0] as usize)
            .collect();
        Permutation::from_images(images).expect("letters permute digits")
    }

    /// Images of all length-`d` strings under every state, in lexicographic order.
    pub(crate) fn state_level_images(&self, d: usize) -> Vec<Vec<u32>> {
        let q = self.q;
        let mut prev: Vec<Vec<u32>> = vec![vec![0]; self.states.len()];
        for k in 1..=d {
            let stride = q.pow((k - 1) as u32);
            prev = self
                .states
                .iter()
                .map(|st| {
                    (0..stride * q)
                        .map(|x| {
                            let (x0, rest) = (x / stride, x % stride);
                            let top = st.perm.image(x0);
                            (top * stride) as u32 + prev[st.transitions[x0]][rest]
                        })
                        .collect()
                })
                .collect();
        }
        prev
    }
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub state: usize,
    pub inverse: bool,
}

/// A product of states and inverse states; the rightmost letter acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroupWord {
    pub letters: Vec<Letter>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::default()
    }

    pub fn state(s: usize) -> Self {
        GroupWord {
            letters: vec![Letter {
                state: s,
                inverse: false,
            }],
        }
    }

    pub fn from_letters(letters: Vec<(usize, i8)>) -> Self {
        GroupWord {
            letters: letters
                .into_iter()
                .map(|(state, e)| Letter {
                    state,
                    inverse: e < 0,
                })
                .collect(),
        }
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| Letter {
                    state: l.state,
                    inverse: !l.inverse,
                })
                .collect(),
        }
    }

    /// `self · other` (other acts first).
    pub fn times(&self, other: &GroupWord) -> GroupWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        GroupWord { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// A self-similar group: a recursion together with the states generating it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfSimilarGroup {
    pub name: String,
    pub recursion: Arc<WreathRecursion>,
    pub generators: Vec<usize>,
}

impl SelfSimilarGroup {
    pub fn new(name: impl Into<String>, recursion: WreathRecursion, generators: Vec<usize>) -> Result<Self> {
        if let Some(&g) = generators.iter().find(|&&g| g >= recursion.states().len()) {
            return Err(Error::Invalid(format!("generator {g} is not a state")));
        }
        Ok(SelfSimilarGroup {
            name: name.into(),
            recursion: Arc::new(recursion),
            generators,
        })
    }

    pub fn q(&self) -> usize {
        self.recursion.q()
    }

    pub fn generator_words(&self) -> Vec<GroupWord> {
        self.generators.iter().map(|&g| GroupWord::state(g)).collect()
    }

    pub fn generator_name(&self, i: usize) -> &str {
        &self.recursion.states()[self.generators[i]].name
    }

    /// Parses a word like `a b^-1 c` or `a*b^-1` over state names; `1` and empty give the identity.
    pub fn parse_word(&self, text: &str) -> Result<GroupWord> {
        let mut letters = Vec::new();
        for tok in text.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
            let (name, inverse) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok.strip_suffix("^1").unwrap_or(tok), false),
            };
            if name == "1" && self.recursion.state_index("1").is_none() {
                continue;
            }
            let state = self
                .recursion
                .state_index(name)
                .ok_or_else(|| Error::Unknown(format!("state {name}")))?;
            letters.push(Letter { state, inverse });
        }
        Ok(GroupWord { letters })
    }

    pub fn evaluate(&self, w: &GroupWord, s: &[u8]) -> Vec<u8> {
        self.recursion.evaluate(w, s)
    }

    pub fn section_word(&self, w: &GroupWord, v: &[u8]) -> (Vec<u8>, GroupWord) {
        self.recursion.section_word(w, v)
    }
}

impl fmt::Display for SelfSimilarGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

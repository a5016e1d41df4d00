use super::recursion::{SelfSimilarGroup, State, WreathRecursion};
use crate::perm::Permutation;
use crate::{Error, Result};

fn state(name: &str, perm: Permutation, transitions: Vec<usize>) -> State {
    State {
        name: name.to_string(),
        perm,
        transitions,
    }
}

fn identity_state(q: usize) -> State {
    state("1", Permutation::identity(q), vec![0; q])
}

fn cycle(q: usize) -> Permutation {
    Permutation::from_cycles(q, &[(0..q).collect()]).expect("valid cycle")
}

/// The adding machine on `T_{q,q}`: `a = (0 1 … q-1)(1, …, 1, a)`, first digit least significant.
pub fn odometer(q: usize) -> Result<SelfSimilarGroup> {
    if q < 2 {
        return Err(Error::Invalid(format!("odometer needs q >= 2, got {q}")));
    }
    let mut t = vec![0; q];
    t[q - 1] = 1;
    let rec = WreathRecursion::new(q, vec![identity_state(q), state("a", cycle(q), t)])?;
    SelfSimilarGroup::new(format!("odometer({q})"), rec, vec![1])
}

/// The first Grigorchuk group: `a = (0 1)`, `b = (a, c)`, `c = (a, d)`, `d = (1, b)`.
pub fn grigorchuk() -> Result<SelfSimilarGroup> {
    let swap = Permutation::from_cycles(2, &[vec![0, 1]])?;
    let id = Permutation::identity(2);
    let rec = WreathRecursion::new(
        2,
        vec![
            identity_state(2),
            state("a", swap, vec![0, 0]),
            state("b", id.clone(), vec![1, 3]),
            state("c", id.clone(), vec![1, 4]),
            state("d", id, vec![0, 2]),
        ],
    )?;
    SelfSimilarGroup::new("grigorchuk", rec, vec![1, 2, 3, 4])
}

/// The Gupta–Sidki 3-group: `a = (0 1 2)`, `t = (a, a⁻¹, t)`.
pub fn gupta_sidki_3() -> Result<SelfSimilarGroup> {
    let a = cycle(3);
    let rec = WreathRecursion::new(
        3,
        vec![
            identity_state(3),
            state("a", a.clone(), vec![0; 3]),
            state("A", a.inverse(), vec![0; 3]),
            state("t", Permutation::identity(3), vec![1, 2, 3]),
        ],
    )?;
    SelfSimilarGroup::new("gupta_sidki_3", rec, vec![1, 3])
}

/// Depth up to which `full_sym_level(q)` realizes the full iterated wreath product.
pub const FULL_SYM_DEFAULT_DEPTH: usize = 16;

/// Generators of a finite-state group whose level-`d` quotients are the full iterated
/// wreath product of `Sym(q)` for every `d <= depth`: for each `s` in a generating set of
/// `Sym(q)` and each `m < depth`, the element acting by `s` at the vertex `0^m` only; plus the
/// horospherically-constant element `c_s = s(c_s, …, c_s)`.
pub fn full_sym_level_depth(q: usize, depth: usize) -> Result<SelfSimilarGroup> {
    if q < 2 || depth == 0 {
        return Err(Error::Invalid(format!("full_sym_level needs q >= 2 and depth >= 1, got q={q}, depth={depth}")));
    }
    let mut perms = vec![Permutation::from_cycles(q, &[vec![0, 1]])?];
    if q > 2 {
        perms.push(cycle(q));
    }
    let mut states = vec![identity_state(q)];
    let mut gens = Vec::new();
    for (i, s) in perms.iter().enumerate() {
        let mut prev = 0;
        for m in 0..depth {
            let idx = states.len();
            if m == 0 {
                states.push(state(&format!("s{i}"), s.clone(), vec![0; q]));
            } else {
                let mut t = vec![0; q];
                t[0] = prev;
                states.push(state(&format!("s{i}_{m}"), Permutation::identity(q), t));
            }
            gens.push(idx);
            prev = idx;
        }
        let c = states.len();
        states.push(state(&format!("c{i}"), s.clone(), vec![c; q]));
        gens.push(c);
    }
    let rec = WreathRecursion::new(q, states)?;
    SelfSimilarGroup::new(format!("full_sym_level({q})"), rec, gens)
}

/// `full_sym_level_depth(q, FULL_SYM_DEFAULT_DEPTH)`.
pub fn full_sym_level(q: usize) -> Result<SelfSimilarGroup> {
    full_sym_level_depth(q, FULL_SYM_DEFAULT_DEPTH)
}

/// A single root permutation `σ` with trivial sections (not self-replicating).
pub fn root_permutation_group(sigma: Permutation) -> Result<SelfSimilarGroup> {
    let q = sigma.degree();
    let name = format!("root({sigma})");
    let rec = WreathRecursion::new(q, vec![identity_state(q), state("s", sigma, vec![0; q])])?;
    SelfSimilarGroup::new(name, rec, vec![1])
}

/// Looks up `odometer(q)`, `grigorchuk`, `gupta_sidki_3` or `full_sym_level(q)`.
pub fn builtin(name: &str) -> Result<SelfSimilarGroup> {
    let name = name.trim();
    let arg = |prefix: &str| -> Option<usize> {
        name.strip_prefix(prefix)?
            .strip_prefix('(')?
            .strip_suffix(')')?
            .trim()
            .parse()
            .ok()
    };
    if let Some(q) = arg("odometer") {
        return odometer(q);
    }
    if let Some(q) = arg("full_sym_level") {
        return full_sym_level(q);
    }
    if let Some((q, d)) = name
        .strip_prefix("full_sym_level(")
        .and_then(|r| r.strip_suffix(')'))
        .and_then(|r| r.split_once(','))
    {
        if let (Ok(q), Ok(d)) = (q.trim().parse(), d.trim().parse()) {
            return full_sym_level_depth(q, d);
        }
    }
    match name {
        "grigorchuk" => grigorchuk(),
        "gupta_sidki_3" => gupta_sidki_3(),
        _ => Err(Error::Unknown(format!("builtin group {name:?}"))),
    }
}

pub const BUILTIN_NAMES: &[&str] = &["odometer(q)", "grigorchuk", "gupta_sidki_3", "full_sym_level(q)", "full_sym_level(q,depth)"];

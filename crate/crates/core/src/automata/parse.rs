use std::collections::HashMap;

use super::recursion::{SelfSimilarGroup, State, WreathRecursion};
use crate::perm::Permutation;
use crate::{Error, Result};

struct PendingState {
    line: usize,
    name: String,
    perm: Permutation,
    targets: Vec<String>,
}

/// Parses the line-based automaton format:
///
/// ```text
/// alphabet 2
/// state a perm (0 1) -> 1 1
/// state b perm () -> a c
/// generators a b
/// ```
///
/// The state `1` is the identity and is created on first use.
pub fn parse_automaton(name: &str, text: &str) -> Result<SelfSimilarGroup> {
    let mut q: Option<usize> = None;
    let mut pending: Vec<PendingState> = Vec::new();
    let mut generators: Option<(usize, Vec<String>)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match keyword {
            "alphabet" => {
                let n: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad alphabet size {rest:?}")))?;
                if n < 2 {
                    return Err(Error::parse(line_no, "alphabet size must be at least 2"));
                }
                if q.replace(n).is_some() {
                    return Err(Error::parse(line_no, "alphabet declared twice"));
                }
            }
            "state" => {
                let q = q.ok_or_else(|| Error::parse(line_no, "state before alphabet"))?;
                let (head, targets) = rest
                    .split_once("->")
                    .ok_or_else(|| Error::parse(line_no, "expected '->'"))?;
                let head = head.trim();
                let (sname, perm_part) = head
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| Error::parse(line_no, "expected 'state NAME perm CYCLES'"))?;
                let perm_text = perm_part
                    .trim()
                    .strip_prefix("perm")
                    .ok_or_else(|| Error::parse(line_no, "expected 'perm'"))?;
                let perm = Permutation::parse_cycles(perm_text, q)
                    .map_err(|e| Error::parse(line_no, e.to_string()))?;
                let targets: Vec<String> = targets.split_whitespace().map(str::to_string).collect();
                if targets.len() != q {
                    return Err(Error::parse(
                        line_no,
                        format!("state {sname} has {} transitions, expected {q}", targets.len()),
                    ));
                }
                if sname == "1" {
                    return Err(Error::parse(line_no, "state name 1 is reserved for the identity"));
                }
                if pending.iter().any(|p| p.name == sname) {
                    return Err(Error::parse(line_no, format!("state {sname} declared twice")));
                }
                pending.push(PendingState {
                    line: line_no,
                    name: sname.to_string(),
                    perm,
                    targets,
                });
            }
            "generators" => {
                if generators.is_some() {
                    return Err(Error::parse(line_no, "generators declared twice"));
                }
                generators = Some((line_no, rest.split_whitespace().map(str::to_string).collect()));
            }
            other => return Err(Error::parse(line_no, format!("unknown keyword {other:?}"))),
        }
    }
    let q = q.ok_or_else(|| Error::parse(0, "missing alphabet line"))?;
    let mut index: HashMap<String, usize> = HashMap::new();
    index.insert("1".to_string(), 0);
    for (i, p) in pending.iter().enumerate() {
        index.insert(p.name.clone(), i + 1);
    }
    let mut states = vec![State {
        name: "1".to_string(),
        perm: Permutation::identity(q),
        transitions: vec![0; q],
    }];
    for p in &pending {
        let transitions = p
            .targets
            .iter()
            .map(|t| {
                index
                    .get(t)
                    .copied()
                    .ok_or_else(|| Error::parse(p.line, format!("undeclared state {t}")))
            })
            .collect::<Result<Vec<_>>>()?;
        states.push(State {
            name: p.name.clone(),
            perm: p.perm.clone(),
            transitions,
        });
    }
    let (gline, gnames) = generators.ok_or_else(|| Error::parse(0, "missing generators line"))?;
    let gens = gnames
        .iter()
        .map(|g| {
            index
                .get(g)
                .copied()
                .ok_or_else(|| Error::parse(gline, format!("undeclared generator {g}")))
        })
        .collect::<Result<Vec<_>>>()?;
    SelfSimilarGroup::new(name, WreathRecursion::new(q, states)?, gens)
}

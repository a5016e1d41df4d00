use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use std::path::Path;

use crate::corr::CompatibleLabelling;
use crate::gfa::CosetTree;
use crate::limits;
use crate::trees::{EdgeLabelling, UnrootedVertex, Window};
use crate::Result;

/// A window with edge labels, a highlighted 0-path and optional per-vertex notes.
#[derive(Clone, Debug)]
pub struct LabelledWindowTree {
    pub window: Window,
    pub labels: EdgeLabelling,
    pub spine: Vec<UnrootedVertex>,
    pub notes: BTreeMap<UnrootedVertex, String>,
}

impl LabelledWindowTree {
    /// The labelling is taken as given; its 0-path is highlighted when it reaches the bottom.
    pub fn new(window: Window, labels: EdgeLabelling) -> Self {
        let spine = labels.check_conditions(&window).unwrap_or_default();
        LabelledWindowTree {
            window,
            labels,
            spine,
            notes: BTreeMap::new(),
        }
    }

    pub fn standard(window: Window) -> Self {
        Self::new(window, EdgeLabelling::standard(&window))
    }

    pub fn from_compatible(l: &CompatibleLabelling) -> Self {
        LabelledWindowTree {
            window: l.window,
            labels: l.labels.clone(),
            spine: l.spine.clone(),
            notes: BTreeMap::new(),
        }
    }

    /// The coset tree with its standard labelling, each vertex noted with its representative.
    pub fn from_coset_tree(tree: &CosetTree) -> Result<Self> {
        let mut t = Self::standard(tree.window);
        for n in tree.nodes()? {
            t.notes
                .insert(n.vertex, n.representative.display(&tree.profile.f).to_string());
        }
        Ok(t)
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// A DOT digraph with one node `n:digits` per window vertex and labelled child edges.
pub fn export_dot(tree: &LabelledWindowTree) -> Result<String> {
    let window = &tree.window;
    let mut out = String::from("digraph window {\n  node [shape=ellipse, fontsize=10];\n");
    if window.is_empty() {
        out.push_str("}\n");
        return Ok(out);
    }
    limits::check_points("dot vertices", window.vertex_count())?;
    let spine: BTreeSet<&UnrootedVertex> = tree.spine.iter().collect();
    let highlight = " color=red, penwidth=2";
    for v in window.vertices() {
        let mut attrs = Vec::new();
        if let Some(note) = tree.notes.get(&v) {
            attrs.push(format!("xlabel={}", quote(note)));
        }
        if spine.contains(&v) {
            attrs.push(highlight.trim().to_string());
        }
        if attrs.is_empty() {
            writeln!(out, "  {};", quote(&v.to_string())).expect("string write");
        } else {
            writeln!(out, "  {} [{}];", quote(&v.to_string()), attrs.join(", ")).expect("string write");
        }
    }
    for v in window.vertices().into_iter().filter(|v| v.level() < window.bottom) {
        for (j, c) in v.children().into_iter().enumerate() {
            let label = tree.labels.label(&v, &c).unwrap_or(j);
            let on_spine = if spine.contains(&v) && spine.contains(&c) { format!(",{highlight}") } else { String::new() };
            writeln!(
                out,
                "  {} -> {} [label=\"{label}\"{on_spine}];",
                quote(&v.to_string()),
                quote(&c.to_string())
            )
            .expect("string write");
        }
    }
    out.push_str("}\n");
    Ok(out)
}

pub fn write_dot(tree: &LabelledWindowTree, path: &Path) -> Result<()> {
    std::fs::write(path, export_dot(tree)?)?;
    Ok(())
}

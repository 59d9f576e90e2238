//! Graphviz export of explicit and symbolic graphs.
//!
//! Output depends only on node numbering, which is deterministic, so two
//! exports of the same graph are byte-identical.

use std::fmt::Write as _;
use std::hash::Hash;

use crate::concrete::StateSpace;
use crate::graph::ExplicitGraph;
use crate::model::{LocId, Protocol};
use crate::symbolic::SymbolicGraph;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Nodes `n0, n1, …` in graph order; `highlight` nodes are drawn filled.
pub fn export_dot<S>(
    graph: &ExplicitGraph<S>,
    name: &str,
    label: impl Fn(&S) -> String,
    highlight: impl Fn(&S) -> bool,
) -> String
where
    S: Clone + Eq + Hash + Ord + Send + Sync,
{
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
    let _ = writeln!(out, "  node [shape=box, fontname=\"monospace\"];");
    for (i, s) in graph.nodes().iter().enumerate() {
        let extra = if highlight(s) { ", style=filled, fillcolor=lightgrey" } else { "" };
        let peripheries = if i == 0 { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  n{i} [label=\"{}\"{extra}{peripheries}];", escape(&label(s)));
    }
    for (a, b) in graph.edges() {
        let _ = writeln!(out, "  n{a} -> n{b};");
    }
    out.push_str("}\n");
    out
}

pub fn state_space_dot(space: &StateSpace, p: &Protocol, highlight: Option<LocId>) -> String {
    export_dot(
        space.graph(),
        &format!("{} k={}", p.name(), space.processes()),
        |g| g.display(p).to_string(),
        |g| highlight.is_some_and(|q| g.covers(q)),
    )
}

/// Index-0 nodes are labelled `{q0,q1},1`; others `{q0:2} | {q0,q1},1`.
pub fn symbolic_dot(graph: &SymbolicGraph, p: &Protocol, highlight: Option<LocId>) -> String {
    export_dot(
        graph.graph(),
        &format!("{} index={}", p.name(), graph.index()),
        |v| v.display(p).to_string(),
        |v| highlight.is_some_and(|q| v.involves(q)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concrete::explore;
    use crate::dsl::families;
    use crate::limits::Limits;
    use crate::symbolic::build;

    #[test]
    fn exports_are_deterministic() {
        let p = families::running();
        let s = explore(&p, 2, p.initial_datum(), &Limits::default()).unwrap();
        let a = state_space_dot(&s, &p, p.target());
        let b = state_space_dot(&explore(&p, 2, p.initial_datum(), &Limits::default()).unwrap(), &p, p.target());
        assert_eq!(a, b);
        assert!(a.starts_with("digraph"));
        assert_eq!(a.matches(" -> ").count(), s.edge_count());
    }

    #[test]
    fn symbolic_labels() {
        let p = families::running();
        let g = build(&p, p.initial_datum(), 0, &Limits::default()).unwrap();
        let dot = symbolic_dot(&g, &p, p.target());
        assert!(dot.contains("label=\"{q0},0\""));
        assert!(dot.contains("label=\"{q0,q1},1\""));
    }
}

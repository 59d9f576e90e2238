//! Symbolic graph of index `k` and the sign of the cut-off.
//!
//! A node tracks `k` processes exactly and every other process only by the
//! set of locations it may occupy. Once the index is large enough relative
//! to the coverability basis, the target is reached almost surely for all
//! large network sizes iff every reachable node can still reach a node that
//! involves the target.

use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::concrete::Stats;
use crate::coverability::{k_bound, pre_star_basis, CoverabilityError, KBound};
use crate::graph::{ExplicitGraph, TransitionSystem};
use crate::limits::{Limits, ResourceLimit};
use crate::model::{DatumId, LocId, LocSet, Multiset, Protocol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error(transparent)]
    Coverability(#[from] CoverabilityError),
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("index {index_used} is below the required index {required_index}; bounds are not certified")]
pub struct UncertifiedVerdict {
    pub index_used: u32,
    pub required_index: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolicNode {
    pub concrete: Multiset,
    pub abstract_part: LocSet,
    pub datum: DatumId,
}

impl SymbolicNode {
    pub fn involves(&self, q: LocId) -> bool {
        self.concrete.count(q) > 0 || self.abstract_part.contains(q)
    }

    /// `{q0:2} | {q0,q1},1`, or `{q0,q1},1` when the concrete part is empty.
    pub fn display<'a>(&'a self, p: &'a Protocol) -> impl fmt::Display + 'a {
        NodeDisplay(self, p)
    }
}

struct NodeDisplay<'a>(&'a SymbolicNode, &'a Protocol);

impl fmt::Display for NodeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let NodeDisplay(n, p) = *self;
        if n.concrete.cardinality() > 0 {
            crate::model::write_multiset(f, p, &n.concrete)?;
            f.write_str(" | ")?;
        }
        let names: Vec<&str> = n.abstract_part.iter().map(|q| p.location_name(q)).collect();
        write!(f, "{{{}}},{}", names.join(","), p.datum_name(n.datum))
    }
}

struct SymbolicSystem<'a>(&'a Protocol);

impl TransitionSystem for SymbolicSystem<'_> {
    type State = SymbolicNode;

    fn successors(&self, v: &SymbolicNode) -> Vec<SymbolicNode> {
        symbolic_successors(self.0, v)
    }
}

/// Successors of `v` under the concrete-move and abstract-move rules; sorted
/// and duplicate-free.
pub fn symbolic_successors(p: &Protocol, v: &SymbolicNode) -> Vec<SymbolicNode> {
    let mut out = Vec::new();
    for (q, _) in v.concrete.iter() {
        for t in p.transitions_from(q) {
            if let Some(d) = t.action.fire(v.datum) {
                out.push(SymbolicNode {
                    concrete: v.concrete.moved(q, t.destination).expect("q is in the support"),
                    abstract_part: v.abstract_part,
                    datum: d,
                });
            }
        }
    }
    for q in v.abstract_part.iter() {
        for t in p.transitions_from(q) {
            if let Some(d) = t.action.fire(v.datum) {
                for s in [v.abstract_part.without(q).with(t.destination), v.abstract_part.with(t.destination)] {
                    out.push(SymbolicNode { concrete: v.concrete.clone(), abstract_part: s, datum: d });
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Debug, Clone)]
pub struct SymbolicGraph {
    index: u32,
    graph: ExplicitGraph<SymbolicNode>,
    elapsed: Duration,
}

impl SymbolicGraph {
    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn graph(&self) -> &ExplicitGraph<SymbolicNode> {
        &self.graph
    }

    pub fn nodes(&self) -> &[SymbolicNode] {
        self.graph.nodes()
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn elapsed(&self) -> Duration {
        self.elapsed
    }

    pub fn has_edge(&self, from: &SymbolicNode, to: &SymbolicNode) -> bool {
        match (self.graph.index_of(from), self.graph.index_of(to)) {
            (Some(i), Some(j)) => self.graph.successors(i).contains(&(j as u32)),
            _ => false,
        }
    }
}

/// Reachable part of the symbolic graph of index `k` from
/// `(q0^k, {q0}, d0)`.
pub fn build(p: &Protocol, d0: DatumId, k: u32, limits: &Limits) -> Result<SymbolicGraph, SymbolicError> {
    if p.is_atomic() {
        return Err(CoverabilityError::AtomicUnsupported.into());
    }
    let start = Instant::now();
    let q0 = p.initial_location();
    let v0 = SymbolicNode {
        concrete: Multiset::power(p.num_locations(), q0, k),
        abstract_part: LocSet::singleton(q0),
        datum: d0,
    };
    let graph = ExplicitGraph::explore(&SymbolicSystem(p), v0, limits.node_cap, limits.exec)
        .map_err(|e| ResourceLimit { what: "symbolic graph", cap: e.cap })?;
    Ok(SymbolicGraph { index: k, graph, elapsed: start.elapsed() })
}

/// `max(1, K) · |Q|` for the target's coverability basis.
pub fn required_index(p: &Protocol, target: LocId, limits: &Limits) -> Result<(u32, KBound), SymbolicError> {
    let basis = pre_star_basis(p, target, limits)?.basis;
    let kb = k_bound(&basis);
    Ok((kb.value * p.num_locations() as u32, kb))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutoffVerdict {
    pub sign: Sign,
    pub index_used: u32,
    pub required_index: u32,
    /// `index_used >= required_index`.
    pub certified: bool,
    /// A reachable node that cannot reach any target-involving node.
    pub witness: Option<SymbolicNode>,
    /// Length of a shortest path from the root to the witness.
    pub witness_depth: Option<u32>,
    pub positive_bound: Option<u32>,
    pub negative_bound: Option<u32>,
    pub k_bound: KBound,
    pub stats: Stats,
}

/// Decides the sign of the cut-off at the required index, or at
/// `index_override` when given.
pub fn decide_cutoff(
    p: &Protocol,
    d0: DatumId,
    target: LocId,
    index_override: Option<u32>,
    limits: &Limits,
) -> Result<CutoffVerdict, SymbolicError> {
    let start = Instant::now();
    let (required, kb) = required_index(p, target, limits)?;
    let index = index_override.unwrap_or(required);
    let g = build(p, d0, index, limits)?;
    let good = g.graph.can_reach(|v| v.involves(target));
    // Nodes past the first involvement are irrelevant, as in the concrete
    // check; among the rest, take the one closest to the root.
    let dist = g.graph.distances_avoiding(0, |v| v.involves(target));
    let bad = (0..g.len()).filter(|&i| !good[i]).filter_map(|i| dist[i].map(|d| (d, i))).min();
    let witness = bad.map(|(_, i)| g.graph.node(i).clone());
    let witness_depth = bad.map(|(d, _)| d);
    let sign = if witness.is_some() { Sign::Negative } else { Sign::Positive };
    Ok(CutoffVerdict {
        sign,
        index_used: index,
        required_index: required,
        certified: index >= required,
        positive_bound: (sign == Sign::Positive).then_some(index + 1),
        negative_bound: witness_depth.map(|d| index + d + 1),
        witness,
        witness_depth,
        k_bound: kb,
        stats: Stats { nodes: g.len(), edges: g.edge_count(), elapsed: start.elapsed() },
    })
}

/// Upper bound on the tight cut-off implied by a certified verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub sign: Sign,
    pub index_used: u32,
    pub tight_cutoff_at_most: u32,
    pub k_bound: KBound,
    pub witness_depth: Option<u32>,
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.sign {
            Sign::Positive => "positive",
            Sign::Negative => "negative",
        };
        writeln!(f, "cut-off sign: {kind}")?;
        writeln!(f, "tight cut-off <= {}", self.tight_cutoff_at_most)?;
        write!(
            f,
            "index {} (K = {}, {} basis elements, max coordinate {})",
            self.index_used, self.k_bound.value, self.k_bound.elements, self.k_bound.max_coordinate
        )?;
        if let Some(d) = self.witness_depth {
            write!(f, "\nwitness depth {d}")?;
        }
        Ok(())
    }
}

pub fn cutoff_bounds(v: &CutoffVerdict) -> Result<BoundsReport, UncertifiedVerdict> {
    if !v.certified {
        return Err(UncertifiedVerdict { index_used: v.index_used, required_index: v.required_index });
    }
    let bound = match v.sign {
        Sign::Positive => v.positive_bound,
        Sign::Negative => v.negative_bound,
    };
    Ok(BoundsReport {
        sign: v.sign,
        index_used: v.index_used,
        tight_cutoff_at_most: bound.expect("bound matches sign"),
        k_bound: v.k_bound,
        witness_depth: v.witness_depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::families;

    #[test]
    fn index_zero_nodes_have_empty_concrete_part() {
        let p = families::running();
        let g = build(&p, p.initial_datum(), 0, &Limits::default()).unwrap();
        assert!(g.nodes().iter().all(|v| v.concrete.cardinality() == 0));
    }

    #[test]
    fn filter1_required_index() {
        let p = families::filter(1);
        let (idx, kb) = required_index(&p, p.target().unwrap(), &Limits::default()).unwrap();
        assert_eq!(kb.value, 1);
        assert_eq!(idx, 2);
    }

    #[test]
    fn abstract_move_keeps_or_drops_source() {
        let p = families::running();
        let q = |n| p.location_named(n).unwrap();
        let v = SymbolicNode {
            concrete: Multiset::empty(4),
            abstract_part: [q("q0"), q("q1")].into_iter().collect(),
            datum: p.datum_named("1").unwrap(),
        };
        let succ = symbolic_successors(&p, &v);
        let with_q2: LocSet = [q("q0"), q("q1"), q("q2")].into_iter().collect();
        let moved: LocSet = [q("q0"), q("q2")].into_iter().collect();
        assert!(succ.iter().any(|w| w.abstract_part == with_q2));
        assert!(succ.iter().any(|w| w.abstract_part == moved));
    }

    #[test]
    fn uncertified_verdict_has_no_bounds() {
        let p = families::running();
        let v = decide_cutoff(&p, p.initial_datum(), p.target().unwrap(), Some(0), &Limits::default()).unwrap();
        assert_eq!(v.sign, Sign::Positive);
        assert!(!v.certified);
        assert!(cutoff_bounds(&v).is_err());
    }

    #[test]
    fn atomic_is_rejected() {
        let p = families::atomic_parity();
        assert!(matches!(
            build(&p, p.initial_datum(), 0, &Limits::default()),
            Err(SymbolicError::Coverability(CoverabilityError::AtomicUnsupported))
        ));
    }
}

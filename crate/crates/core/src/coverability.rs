//! Backward coverability: the minimal basis of the set of configurations
//! from which some configuration covering the target is reachable.
//!
//! Bases are kept per datum as antichains under plain inclusion (same datum,
//! multiset inclusion, support ignored). That set is upward-closed under the
//! plain order because extra processes can always stay idle, and its bases
//! are much smaller than support-indexed ones.

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::limits::{Limits, ResourceLimit};
use crate::model::{Action, Configuration, DatumId, LocId, Multiset, Protocol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverabilityError {
    #[error("atomic read-write transitions are not supported by this analysis")]
    AtomicUnsupported,
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
}

/// A finite representation of an upward-closed set of configurations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    target: LocId,
    /// Indexed by datum; each list is a sorted antichain.
    per_datum: Vec<Vec<Multiset>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KBound {
    pub value: u32,
    pub elements: usize,
    pub max_coordinate: u32,
}

/// One basis element with names resolved, for fixtures and JSON output.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BasisRecord {
    pub datum: String,
    pub counts: Vec<(String, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreStar {
    pub basis: Basis,
    pub rounds: usize,
    pub elapsed: Duration,
}

impl Basis {
    pub fn target(&self) -> LocId {
        self.target
    }

    pub fn elements(&self, d: DatumId) -> &[Multiset] {
        &self.per_datum[d.index()]
    }

    /// All elements as configurations, by datum then multiset order.
    pub fn iter(&self) -> impl Iterator<Item = Configuration> + '_ {
        self.per_datum
            .iter()
            .enumerate()
            .flat_map(|(d, ms)| ms.iter().map(move |m| Configuration::new(m.clone(), DatumId(d as u16))))
    }

    pub fn len(&self) -> usize {
        self.per_datum.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Upward-closure membership under the plain order.
    pub fn member(&self, g: &Configuration) -> bool {
        self.per_datum
            .get(g.datum.index())
            .is_some_and(|ms| ms.iter().any(|m| m.is_included_in(&g.multiset)))
    }

    /// Inserts `m` under datum `d` unless already covered; drops elements it
    /// covers. Returns whether `m` was added.
    fn insert(&mut self, d: DatumId, m: Multiset) -> bool {
        let list = &mut self.per_datum[d.index()];
        if list.iter().any(|e| e.is_included_in(&m)) {
            return false;
        }
        list.retain(|e| !m.is_included_in(e));
        list.push(m);
        true
    }

    fn normalize(&mut self) {
        for list in &mut self.per_datum {
            list.sort_unstable();
        }
    }

    /// Sorted `(datum, sorted location:count)` records.
    pub fn records(&self, p: &Protocol) -> Vec<BasisRecord> {
        let mut out: Vec<BasisRecord> = self
            .iter()
            .map(|g| BasisRecord { datum: p.datum_name(g.datum).to_owned(), counts: g.named_counts(p) })
            .collect();
        out.sort();
        out
    }
}

fn require_non_atomic(p: &Protocol) -> Result<(), CoverabilityError> {
    if p.is_atomic() {
        Err(CoverabilityError::AtomicUnsupported)
    } else {
        Ok(())
    }
}

/// `{target:1}` under every datum.
pub fn initial_basis(p: &Protocol, target: LocId) -> Result<Basis, CoverabilityError> {
    require_non_atomic(p)?;
    let nq = p.num_locations();
    Ok(Basis {
        target,
        per_datum: (0..p.num_data()).map(|_| vec![Multiset::power(nq, target, 1)]).collect(),
    })
}

/// Minimal predecessors of the upward closure of `(m, d)` under one step.
fn predecessors(p: &Protocol, m: &Multiset, d: DatumId) -> Vec<(DatumId, Multiset)> {
    let mut out = Vec::new();
    for t in p.transitions() {
        let (guard, written) = match t.action {
            Action::Read(x) => (Some(x), x),
            Action::Write(x) => (None, x),
            Action::ReadWrite { .. } => unreachable!("atomic protocols are rejected up front"),
        };
        if written != d {
            continue;
        }
        let mut pred = m.clone();
        pred.remove_one(t.destination);
        pred.add(t.source, 1);
        match guard {
            Some(x) => out.push((x, pred)),
            None => out.extend(p.datum_ids().map(|e| (e, pred.clone()))),
        }
    }
    out
}

/// Basis of `Pre(↑b) ∪ ↑b`.
pub fn pre_image_basis(p: &Protocol, b: &Basis) -> Result<Basis, CoverabilityError> {
    require_non_atomic(p)?;
    let mut out = b.clone();
    for g in b.iter() {
        for (d, m) in predecessors(p, &g.multiset, g.datum) {
            out.insert(d, m);
        }
    }
    out.normalize();
    Ok(out)
}

/// Least fixpoint of [`pre_image_basis`] from [`initial_basis`].
///
/// Each round computes the predecessors of the elements added in the
/// previous round (possibly in parallel), then merges them in a fixed order.
/// The minimal elements of an upward-closed set are unique, so the result
/// does not depend on evaluation order.
pub fn pre_star_basis(p: &Protocol, target: LocId, limits: &Limits) -> Result<PreStar, CoverabilityError> {
    let start = Instant::now();
    let mut basis = initial_basis(p, target)?;
    let mut work: Vec<Configuration> = basis.iter().collect();
    let mut rounds = 0;
    while !work.is_empty() {
        rounds += 1;
        let preds = limits.exec.map(&work, |g| predecessors(p, &g.multiset, g.datum));
        let mut added = Vec::new();
        for (d, m) in preds.into_iter().flatten() {
            if basis.insert(d, m.clone()) {
                added.push(Configuration::new(m, d));
            }
        }
        if basis.len() > limits.basis_cap {
            return Err(ResourceLimit { what: "coverability basis", cap: limits.basis_cap }.into());
        }
        // Keep only additions that survived later insertions this round.
        added.retain(|g| basis.elements(g.datum).contains(&g.multiset));
        added.sort_unstable();
        added.dedup();
        work = added;
    }
    basis.normalize();
    Ok(PreStar { basis, rounds, elapsed: start.elapsed() })
}

/// `max(1, largest coordinate)` over all basis elements.
pub fn k_bound(b: &Basis) -> KBound {
    let max_coordinate = b.per_datum.iter().flatten().map(Multiset::max_count).max().unwrap_or(0);
    KBound { value: max_coordinate.max(1), elements: b.len(), max_coordinate }
}

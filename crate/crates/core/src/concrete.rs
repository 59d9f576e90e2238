//! Explicit-state analysis of the finite chain obtained by fixing the number
//! of processes.
//!
//! Sizes are preserved by every step, so the configurations reachable from
//! `⟨q0^k, d0⟩` form a finite graph. The target is reached almost surely iff
//! every configuration reachable before the first hit can still reach one
//! covering the target; that is a pure graph question and is answered
//! without any arithmetic.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{ExplicitGraph, TransitionSystem};
use crate::limits::{Limits, ResourceLimit};
use crate::model::{successors, Configuration, DatumId, LocId, Protocol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConcreteError {
    #[error("the number of processes must be at least 1")]
    NoProcesses,
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
}

/// The protocol's configuration graph as a [`TransitionSystem`].
pub struct ConfigurationSystem<'a>(pub &'a Protocol);

impl TransitionSystem for ConfigurationSystem<'_> {
    type State = Configuration;

    fn successors(&self, state: &Configuration) -> Vec<Configuration> {
        successors(self.0, state)
    }
}

/// All configurations reachable from `⟨q0^k, d0⟩`.
#[derive(Debug, Clone)]
pub struct StateSpace {
    processes: u32,
    graph: ExplicitGraph<Configuration>,
    elapsed: Duration,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Answer {
    AlmostSure,
    NotAlmostSure,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub nodes: usize,
    pub edges: usize,
    #[serde(serialize_with = "crate::report::millis")]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub processes: u32,
    pub answer: Answer,
    /// A reachable configuration that cannot reach the target; present iff
    /// the answer is [`Answer::NotAlmostSure`].
    pub witness: Option<Configuration>,
    pub stats: Stats,
}

impl Verdict {
    pub fn is_almost_sure(&self) -> bool {
        self.answer == Answer::AlmostSure
    }
}

/// Breadth-first closure from `⟨q0^k, d0⟩`.
pub fn explore(p: &Protocol, k: u32, d0: DatumId, limits: &Limits) -> Result<StateSpace, ConcreteError> {
    if k == 0 {
        return Err(ConcreteError::NoProcesses);
    }
    let start = Instant::now();
    let initial = Configuration::initial(p, k, d0);
    let graph = ExplicitGraph::explore(&ConfigurationSystem(p), initial, limits.node_cap, limits.exec)
        .map_err(|e| ResourceLimit { what: "state space", cap: e.cap })?;
    Ok(StateSpace { processes: k, graph, elapsed: start.elapsed() })
}

/// Whether some configuration reachable with `k` processes covers `target`.
pub fn check_coverable(
    p: &Protocol,
    k: u32,
    d0: DatumId,
    target: LocId,
    limits: &Limits,
) -> Result<bool, ConcreteError> {
    Ok(explore(p, k, d0, limits)?.is_coverable(target))
}

/// Almost-sure reachability of `target` with `k` processes.
pub fn check_almost_sure(
    p: &Protocol,
    k: u32,
    d0: DatumId,
    target: LocId,
    limits: &Limits,
) -> Result<Verdict, ConcreteError> {
    Ok(explore(p, k, d0, limits)?.almost_sure(target))
}

/// Exact probability of eventually covering `target` under the uniform
/// scheduler.
pub fn exact_reach_probability(
    p: &Protocol,
    k: u32,
    d0: DatumId,
    target: LocId,
    limits: &Limits,
) -> Result<BigRational, ConcreteError> {
    explore(p, k, d0, limits)?.reach_probability(target, limits.solve_cap)
}

impl StateSpace {
    pub fn processes(&self) -> u32 {
        self.processes
    }

    pub fn graph(&self) -> &ExplicitGraph<Configuration> {
        &self.graph
    }

    pub fn initial(&self) -> &Configuration {
        self.graph.node(0)
    }

    pub fn nodes(&self) -> &[Configuration] {
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

    pub fn is_coverable(&self, target: LocId) -> bool {
        self.nodes().iter().any(|g| g.covers(target))
    }

    /// Per node: can it reach a configuration covering `target`?
    pub fn can_reach(&self, target: LocId) -> Vec<bool> {
        self.graph.can_reach(|g| g.covers(target))
    }

    /// Per node: is it reachable from the initial configuration along a
    /// path that covers `target` at most in its last configuration? These
    /// are the configurations the walk can visit before its first hit.
    pub fn before_hit(&self, target: LocId) -> Vec<bool> {
        self.graph.distances_avoiding(0, |g| g.covers(target)).iter().map(Option::is_some).collect()
    }

    /// Almost sure iff every configuration visited before the first hit can
    /// still reach a covering one. Configurations only reachable after a hit
    /// do not affect the probability of eventually covering the target.
    pub fn almost_sure(&self, target: LocId) -> Verdict {
        let start = Instant::now();
        let good = self.can_reach(target);
        let dist = self.graph.distances_avoiding(0, |g| g.covers(target));
        // Closest failing configuration, ties broken by BFS index.
        let witness = (0..self.len())
            .filter(|&i| !good[i])
            .filter_map(|i| dist[i].map(|d| (d, i)))
            .min()
            .map(|(_, i)| self.graph.node(i).clone());
        Verdict {
            processes: self.processes,
            answer: if witness.is_none() { Answer::AlmostSure } else { Answer::NotAlmostSure },
            witness,
            stats: Stats {
                nodes: self.len(),
                edges: self.edge_count(),
                elapsed: self.elapsed + start.elapsed(),
            },
        }
    }

    /// Solves `x_s = Σ_{t ∈ Post(s)} x_t / |Post(s)|` exactly, with `x = 1`
    /// on covering nodes and `x = 0` on nodes that cannot reach them.
    pub fn reach_probability(&self, target: LocId, solve_cap: usize) -> Result<BigRational, ConcreteError> {
        let n = self.len();
        let good = self.can_reach(target);
        let covering: Vec<bool> = self.nodes().iter().map(|g| g.covers(target)).collect();
        if covering[0] {
            return Ok(BigRational::one());
        }
        if !good[0] {
            return Ok(BigRational::zero());
        }
        // Unknowns: nodes visited before the first hit that can still reach
        // the target.
        let live = self.before_hit(target);
        let mut slot = vec![usize::MAX; n];
        let mut unknowns = Vec::new();
        for i in 0..n {
            if live[i] && good[i] && !covering[i] {
                slot[i] = unknowns.len();
                unknowns.push(i);
            }
        }
        let m = unknowns.len();
        if m > solve_cap {
            return Err(ResourceLimit { what: "linear system", cap: solve_cap }.into());
        }

        // |Post(s)| x_s - Σ_{t ∈ U} x_t = |Post(s) ∩ covering|
        let mut a = vec![vec![BigRational::zero(); m + 1]; m];
        for (r, &i) in unknowns.iter().enumerate() {
            let succ = self.graph.successors(i);
            a[r][r] += BigRational::from_integer(BigInt::from(succ.len()));
            for &j in succ {
                let j = j as usize;
                if covering[j] {
                    a[r][m] += BigRational::one();
                } else if slot[j] != usize::MAX {
                    a[r][slot[j]] -= BigRational::one();
                }
            }
        }
        let x = solve(a).expect("reachability system is non-singular");
        Ok(x[slot[0]].clone())
    }
}

/// Gauss-Jordan elimination on an augmented `m × (m+1)` matrix.
fn solve(mut a: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col][col..].iter_mut().filter(|x| !x.is_zero()) {
            *x = &*x * &inv;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for c in col..=m {
                if !pivot_row[c].is_zero() {
                    row[c] -= &f * &pivot_row[c];
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[m].clone()).collect())
}

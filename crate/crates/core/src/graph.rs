//! Explicit finite graphs built by breadth-first closure of a successor
//! function, with deterministic node numbering.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::exec::Execution;

/// Anything with a successor function. Implementations must return
/// successors sorted and duplicate-free so node numbering is reproducible.
pub trait TransitionSystem: Sync {
    type State: Clone + Eq + Hash + Ord + Send + Sync;

    fn successors(&self, state: &Self::State) -> Vec<Self::State>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapExceeded {
    pub cap: usize,
}

/// A reachable subgraph. Node 0 is the initial state; nodes are numbered in
/// BFS order, expanding each node's successors in their sorted order.
#[derive(Debug, Clone)]
pub struct ExplicitGraph<S> {
    nodes: Vec<S>,
    index: HashMap<S, u32>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    depth: Vec<u32>,
}

impl<S: Clone + Eq + Hash + Ord + Send + Sync> ExplicitGraph<S> {
    /// Breadth-first closure from `initial`. Each BFS layer's successor
    /// computations may run in parallel; merging is sequential in node order.
    pub fn explore<T>(system: &T, initial: S, cap: usize, exec: Execution) -> Result<Self, CapExceeded>
    where
        T: TransitionSystem<State = S>,
    {
        let mut g = ExplicitGraph {
            nodes: vec![initial.clone()],
            index: HashMap::from([(initial, 0)]),
            offsets: vec![0],
            targets: Vec::new(),
            depth: vec![0],
        };
        if cap == 0 {
            return Err(CapExceeded { cap });
        }
        let mut layer_start = 0;
        let mut layer = 0;
        while layer_start < g.nodes.len() {
            let layer_end = g.nodes.len();
            let expanded = exec.map(&g.nodes[layer_start..layer_end], |s| system.successors(s));
            for succ in expanded {
                for s in succ {
                    let id = match g.index.get(&s) {
                        Some(&id) => id,
                        None => {
                            let id = g.nodes.len() as u32;
                            if g.nodes.len() >= cap {
                                return Err(CapExceeded { cap });
                            }
                            g.nodes.push(s.clone());
                            g.index.insert(s, id);
                            g.depth.push(layer + 1);
                            id
                        }
                    };
                    g.targets.push(id);
                }
                g.offsets.push(g.targets.len());
            }
            layer_start = layer_end;
            layer += 1;
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn nodes(&self) -> &[S] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &S {
        &self.nodes[i]
    }

    pub fn index_of(&self, s: &S) -> Option<usize> {
        self.index.get(s).map(|&i| i as usize)
    }

    /// Successor indices of node `i`, in the order the successor function
    /// returned them.
    pub fn successors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    /// BFS distance from the initial node.
    pub fn depth(&self, i: usize) -> u32 {
        self.depth[i]
    }

    /// Edges as `(from, to)` index pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.nodes.len()).flat_map(move |i| self.successors(i).iter().map(move |&j| (i, j as usize)))
    }

    /// Marks every node that can reach (in zero or more steps) a node
    /// satisfying `goal`.
    pub fn can_reach(&self, goal: impl Fn(&S) -> bool) -> Vec<bool> {
        let n = self.nodes.len();
        let mut rev_offsets = vec![0usize; n + 1];
        for &t in &self.targets {
            rev_offsets[t as usize + 1] += 1;
        }
        for i in 0..n {
            rev_offsets[i + 1] += rev_offsets[i];
        }
        let mut fill = rev_offsets.clone();
        let mut rev = vec![0u32; self.targets.len()];
        for (i, j) in self.edges() {
            rev[fill[j]] = i as u32;
            fill[j] += 1;
        }

        let mut mark = vec![false; n];
        let mut queue = VecDeque::new();
        for (i, s) in self.nodes.iter().enumerate() {
            if goal(s) {
                mark[i] = true;
                queue.push_back(i);
            }
        }
        while let Some(j) = queue.pop_front() {
            for &i in &rev[rev_offsets[j]..rev_offsets[j + 1]] {
                if !mark[i as usize] {
                    mark[i as usize] = true;
                    queue.push_back(i as usize);
                }
            }
        }
        mark
    }

    /// BFS distances from `start` along paths whose intermediate nodes do
    /// not satisfy `stop`; nodes satisfying `stop` are reached but never
    /// expanded. `None` marks nodes not reached this way.
    pub fn distances_avoiding(&self, start: usize, stop: impl Fn(&S) -> bool) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.nodes.len()];
        let mut queue = VecDeque::from([start]);
        dist[start] = Some(0);
        while let Some(i) = queue.pop_front() {
            if stop(&self.nodes[i]) {
                continue;
            }
            let d = dist[i].expect("queued nodes have a distance") + 1;
            for &j in self.successors(i) {
                if dist[j as usize].is_none() {
                    dist[j as usize] = Some(d);
                    queue.push_back(j as usize);
                }
            }
        }
        dist
    }

    /// Nodes reachable from `start` (inclusive).
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut mark = vec![false; self.nodes.len()];
        let mut stack = vec![start];
        mark[start] = true;
        while let Some(i) = stack.pop() {
            for &j in self.successors(i) {
                if !mark[j as usize] {
                    mark[j as usize] = true;
                    stack.push(j as usize);
                }
            }
        }
        mark
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `n -> {2n mod m, n+1 mod m}`.
    struct Modular(u32);

    impl TransitionSystem for Modular {
        type State = u32;
        fn successors(&self, s: &u32) -> Vec<u32> {
            let mut v = vec![(2 * s) % self.0, (s + 1) % self.0];
            v.sort_unstable();
            v.dedup();
            v
        }
    }

    #[test]
    fn bfs_numbering_is_deterministic() {
        let seq = ExplicitGraph::explore(&Modular(97), 1, usize::MAX, Execution::Sequential).unwrap();
        let par = ExplicitGraph::explore(&Modular(97), 1, usize::MAX, Execution::Parallel).unwrap();
        assert_eq!(seq.len(), 97);
        assert_eq!(seq.nodes(), par.nodes());
        assert_eq!(seq.edges().collect::<Vec<_>>(), par.edges().collect::<Vec<_>>());
        assert_eq!(seq.node(1), &2);
        assert_eq!(seq.depth(0), 0);
    }

    #[test]
    fn cap_is_enforced() {
        let err = ExplicitGraph::explore(&Modular(97), 1, 10, Execution::Sequential).unwrap_err();
        assert_eq!(err, CapExceeded { cap: 10 });
    }

    #[test]
    fn backward_and_forward_closure() {
        let g = ExplicitGraph::explore(&Modular(8), 1, usize::MAX, Execution::Sequential).unwrap();
        let reach0 = g.can_reach(|&s| s == 0);
        assert!(reach0.iter().all(|&b| b));
        let from0 = g.reachable_from(g.index_of(&0).unwrap());
        assert_eq!(from0.iter().filter(|&&b| b).count(), 8);
    }

    #[test]
    fn distances_avoiding_stops_at_goal() {
        let g = ExplicitGraph::explore(&Modular(7), 1, 100, Execution::Sequential).unwrap();
        let all = g.distances_avoiding(0, |_| false);
        assert!(all.iter().all(Option::is_some));
        let cut = g.distances_avoiding(0, |&s| s == 1);
        assert_eq!(cut.iter().filter(|d| d.is_some()).count(), 1);
    }
}

//! Independent brute-force oracles shared by the integration tests.
//!
//! Nothing here calls the library's successor, exploration or coverability
//! code; configurations are plain count vectors plus a datum index.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regcut_core::dsl::{random_protocol, RandomProtocolParams};
use regcut_core::model::{Action, Configuration, DatumId, LocId, LocSet, Multiset, Protocol};
use regcut_core::symbolic::SymbolicNode;

/// `(counts, datum)`.
pub type Conf = (Vec<u32>, u16);

pub fn to_conf(g: &Configuration) -> Conf {
    (g.multiset.counts().to_vec(), g.datum.0)
}

pub fn from_conf(c: &Conf) -> Configuration {
    Configuration::new(Multiset::from_counts(c.0.clone()), DatumId(c.1))
}

/// Successors straight from the definition: some transition `(q, op, d'', q')`
/// with a process in `q`; a read needs `d = d''` and keeps it, a write sets it.
pub fn oracle_successors(p: &Protocol, c: &Conf) -> BTreeSet<Conf> {
    let mut out = BTreeSet::new();
    for t in p.transitions() {
        let q = t.source.0 as usize;
        if c.0[q] == 0 {
            continue;
        }
        let datum = match t.action {
            Action::Read(d) if d.0 == c.1 => d.0,
            Action::Read(_) => continue,
            Action::Write(d) => d.0,
            Action::ReadWrite { read, write } if read.0 == c.1 => write.0,
            Action::ReadWrite { .. } => continue,
        };
        let mut counts = c.0.clone();
        counts[q] -= 1;
        counts[t.destination.0 as usize] += 1;
        out.insert((counts, datum));
    }
    out
}

/// Every count vector over `nq` locations with total `k`.
pub fn count_vectors(nq: usize, k: u32) -> Vec<Vec<u32>> {
    if nq == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in 0..=k {
        for mut rest in count_vectors(nq - 1, k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All of `Γ_k`.
pub fn all_confs(p: &Protocol, k: u32) -> Vec<Conf> {
    let mut out = Vec::new();
    for v in count_vectors(p.num_locations(), k) {
        for d in 0..p.num_data() as u16 {
            out.push((v.clone(), d));
        }
    }
    out
}

pub fn forward_closure(p: &Protocol, start: &Conf) -> BTreeSet<Conf> {
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(c) = queue.pop_front() {
        for s in oracle_successors(p, &c) {
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    seen
}

/// Configurations reachable from `start` without passing through one that
/// satisfies `stop` (such configurations are included but not expanded).
pub fn forward_closure_until(p: &Protocol, start: &Conf, stop: impl Fn(&Conf) -> bool) -> BTreeSet<Conf> {
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(c) = queue.pop_front() {
        if stop(&c) {
            continue;
        }
        for s in oracle_successors(p, &c) {
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    seen
}

/// The configurations of `Γ_k` that can reach one satisfying `goal`, by
/// iterating to a fixpoint over the whole of `Γ_k`.
pub fn backward_closure(p: &Protocol, k: u32, goal: impl Fn(&Conf) -> bool) -> BTreeSet<Conf> {
    let all = all_confs(p, k);
    let succ: BTreeMap<Conf, BTreeSet<Conf>> = all.iter().map(|c| (c.clone(), oracle_successors(p, c))).collect();
    let mut good: BTreeSet<Conf> = all.iter().filter(|c| goal(c)).cloned().collect();
    loop {
        let before = good.len();
        for c in &all {
            if !good.contains(c) && succ[c].iter().any(|s| good.contains(s)) {
                good.insert(c.clone());
            }
        }
        if good.len() == before {
            return good;
        }
    }
}

pub fn covers(c: &Conf, q: LocId) -> bool {
    c.0[q.0 as usize] > 0
}

/// Reachability probability by value iteration in `f64`, for comparison
/// against the exact solver.
pub fn value_iteration(p: &Protocol, start: &Conf, target: LocId, sweeps: usize) -> f64 {
    let states: Vec<Conf> = forward_closure(p, start).into_iter().collect();
    let index: BTreeMap<&Conf, usize> = states.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let succ: Vec<Vec<usize>> = states
        .iter()
        .map(|c| oracle_successors(p, c).iter().map(|s| index[s]).collect())
        .collect();
    let mut x: Vec<f64> = states.iter().map(|c| if covers(c, target) { 1.0 } else { 0.0 }).collect();
    for _ in 0..sweeps {
        for i in 0..states.len() {
            if covers(&states[i], target) {
                continue;
            }
            x[i] = succ[i].iter().map(|&j| x[j]).sum::<f64>() / succ[i].len() as f64;
        }
    }
    x[index[start]]
}

/// Support order: same datum, same support, pointwise `≤`.
pub fn support_leq(a: &Conf, b: &Conf) -> bool {
    a.1 == b.1 && a.0.iter().zip(&b.0).all(|(x, y)| x <= y && ((*x == 0) == (*y == 0)))
}

/// Plain order: same datum, pointwise `≤`.
pub fn plain_leq(a: &Conf, b: &Conf) -> bool {
    a.1 == b.1 && a.0.iter().zip(&b.0).all(|(x, y)| x <= y)
}

/// The fixed instance set: `count` random non-atomic protocols.
pub fn random_protocols(seed: u64, count: usize, params: RandomProtocolParams) -> Vec<Protocol> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_protocol(&mut rng, params)).collect()
}

pub fn small_params() -> RandomProtocolParams {
    RandomProtocolParams { max_locations: 4, max_data: 3, max_transitions: 12, allow_atomic: false }
}

pub fn tiny_params() -> RandomProtocolParams {
    RandomProtocolParams { max_locations: 3, max_data: 2, max_transitions: 8, allow_atomic: false }
}

/// Every `δ` with support exactly `s` and `|δ| ≤ |s| + 1`.
pub fn small_deltas(nq: usize, s: LocSet) -> Vec<Multiset> {
    let base: Vec<u32> = (0..nq).map(|i| u32::from(s.contains(LocId(i as u16)))).collect();
    let mut out = vec![Multiset::from_counts(base.clone())];
    for q in s.iter() {
        let mut c = base.clone();
        c[q.0 as usize] += 1;
        out.push(Multiset::from_counts(c));
    }
    out
}

/// Symbolic successors of `v` read off concrete steps of `⟨μ ⊔ δ, d⟩` for
/// every small `δ`: a step by a process of `μ` keeps the abstract part, a
/// step by a process of `δ` keeps `μ` and yields `supp(δ')`.
pub fn symbolic_successors_via_concrete(p: &Protocol, v: &SymbolicNode) -> BTreeSet<SymbolicNode> {
    let mut out = BTreeSet::new();
    for delta in small_deltas(p.num_locations(), v.abstract_part) {
        let whole = (v.concrete.union(&delta).counts().to_vec(), v.datum.0);
        for t in p.transitions() {
            let q = t.source.0 as usize;
            let datum = match t.action {
                Action::Read(d) if d == v.datum => d,
                Action::Write(d) => d,
                Action::ReadWrite { read, write } if read == v.datum => write,
                _ => continue,
            };
            if whole.0[q] == 0 {
                continue;
            }
            if v.concrete.count(t.source) > 0 {
                let mu = v.concrete.moved(t.source, t.destination).unwrap();
                out.insert(SymbolicNode { concrete: mu, abstract_part: v.abstract_part, datum });
            }
            if delta.count(t.source) > 0 {
                let dp = delta.moved(t.source, t.destination).unwrap();
                out.insert(SymbolicNode { concrete: v.concrete.clone(), abstract_part: dp.support(), datum });
            }
        }
    }
    out
}

/// Copycat check: for `γ1` of size at most 3, every `γ2` within four steps
/// and every `γ2' ⪰ γ2` of size at most 5, some `γ1' ⪰ γ1` reaches `γ2'`.
/// Returns the number of violations.
pub fn copycat_violations(p: &Protocol) -> usize {
    let mut violations = 0;
    let mut backward: BTreeMap<Conf, BTreeSet<Conf>> = BTreeMap::new();
    for k1 in 1..=3u32 {
        for g1 in all_confs(p, k1) {
            for g2 in within_steps(p, &g1, 4) {
                for g2p in support_extensions(&g2, 5) {
                    let pre = backward.entry(g2p.clone()).or_insert_with(|| {
                        let size = g2p.0.iter().sum();
                        backward_closure(p, size, |c| *c == g2p)
                    });
                    if !pre.iter().any(|g1p| support_leq(&g1, g1p)) {
                        violations += 1;
                    }
                }
            }
        }
    }
    violations
}

fn within_steps(p: &Protocol, start: &Conf, steps: usize) -> BTreeSet<Conf> {
    let mut seen = BTreeSet::from([start.clone()]);
    let mut layer = seen.clone();
    for _ in 0..steps {
        let next: BTreeSet<Conf> = layer.iter().flat_map(|c| oracle_successors(p, c)).collect();
        layer = next.difference(&seen).cloned().collect();
        seen.extend(layer.iter().cloned());
    }
    seen
}

/// Every `γ' ⪰ γ` of total size at most `max`.
fn support_extensions(g: &Conf, max: u32) -> Vec<Conf> {
    let size: u32 = g.0.iter().sum();
    let support: Vec<usize> = (0..g.0.len()).filter(|&i| g.0[i] > 0).collect();
    let mut out = Vec::new();
    for extra in 0..=max.saturating_sub(size) {
        for add in count_vectors(support.len(), extra) {
            let mut counts = g.0.clone();
            for (i, a) in support.iter().zip(add) {
                counts[*i] += a;
            }
            out.push((counts, g.1));
        }
    }
    out
}

//! Monte-Carlo runs of the uniform scheduler for a fixed number of processes.
//!
//! Trial `i` draws from a ChaCha8 stream seeded by `(seed, i)`, so every
//! trial is reproducible on its own and aggregates do not depend on how
//! trials are spread across threads.

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::concrete::ConfigurationSystem;
use crate::exec::Execution;
use crate::graph::ExplicitGraph;
use crate::model::{successors, Configuration, DatumId, LocId, Protocol};

/// Above this many reachable configurations, trials compute successors on
/// the fly instead of walking a precomputed graph.
pub const COMPILE_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    pub processes: u32,
    pub horizon: u64,
    pub trials: u64,
    pub seed: u64,
    pub target: LocId,
    /// Initial register content; the protocol's own when `None`.
    pub initial_datum: Option<DatumId>,
}

impl SimConfig {
    pub fn new(processes: u32, target: LocId) -> Self {
        SimConfig { processes, horizon: 10_000, trials: 10_000, seed: 0, target, initial_datum: None }
    }

    fn start(&self, p: &Protocol) -> Configuration {
        Configuration::initial(p, self.processes, self.initial_datum.unwrap_or(p.initial_datum()))
    }

    fn check(&self) {
        assert!(self.processes >= 1, "at least one process is required");
        assert!(self.horizon >= 1 && self.trials >= 1, "horizon and trials must be positive");
    }
}

/// The configurations visited by one trial, `γ_0 … γ_h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub configurations: Vec<Configuration>,
    /// Step at which the target was first covered.
    pub hit_step: Option<u64>,
}

impl Trace {
    /// One configuration per line in the `{q:n,...},d` text format.
    pub fn dump(&self, p: &Protocol) -> String {
        let mut s = String::new();
        for g in &self.configurations {
            let _ = writeln!(s, "{}", g.display(p));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub processes: u32,
    pub trials: u64,
    pub horizon: u64,
    pub seed: u64,
    pub hits: u64,
    pub estimate: f64,
    /// `3·sqrt(p̂(1−p̂)/trials)`.
    pub radius: f64,
    pub mean_hit_step: Option<f64>,
    pub min_hit_step: Option<u64>,
    pub max_hit_step: Option<u64>,
    /// Whether trials walked a precomputed state graph.
    pub compiled: bool,
}

fn rng_for(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// One scheduler step: a uniformly chosen element of the sorted successor
/// list, or `None` when there is none.
pub fn sample_successor<R: Rng + ?Sized>(p: &Protocol, g: &Configuration, rng: &mut R) -> Option<Configuration> {
    let mut succ = successors(p, g);
    if succ.is_empty() {
        return None;
    }
    let i = rng.gen_range(0..succ.len());
    Some(succ.swap_remove(i))
}

/// One trial, recording every configuration.
pub fn run_trial(p: &Protocol, cfg: &SimConfig, trial_index: u64) -> Trace {
    cfg.check();
    let mut rng = rng_for(cfg.seed, trial_index);
    let mut g = cfg.start(p);
    let mut configurations = vec![g.clone()];
    let mut hit_step = g.covers(cfg.target).then_some(0);
    let mut step = 0;
    while hit_step.is_none() && step < cfg.horizon {
        let Some(next) = sample_successor(p, &g, &mut rng) else { break };
        g = next;
        step += 1;
        if g.covers(cfg.target) {
            hit_step = Some(step);
        }
        configurations.push(g.clone());
    }
    Trace { configurations, hit_step }
}

/// Hit step of one trial on the fly, without recording the trace.
fn trial_on_the_fly(p: &Protocol, cfg: &SimConfig, trial_index: u64) -> Option<u64> {
    let mut rng = rng_for(cfg.seed, trial_index);
    let mut g = cfg.start(p);
    if g.covers(cfg.target) {
        return Some(0);
    }
    for step in 1..=cfg.horizon {
        g = sample_successor(p, &g, &mut rng)?;
        if g.covers(cfg.target) {
            return Some(step);
        }
    }
    None
}

/// Same draws as [`trial_on_the_fly`] on a precomputed graph: successor
/// lists there are in the same sorted order.
fn trial_compiled(graph: &ExplicitGraph<Configuration>, hit: &[bool], cfg: &SimConfig, trial_index: u64) -> Option<u64> {
    let mut rng = rng_for(cfg.seed, trial_index);
    let mut i = 0usize;
    if hit[i] {
        return Some(0);
    }
    for step in 1..=cfg.horizon {
        let succ = graph.successors(i);
        if succ.is_empty() {
            return None;
        }
        i = succ[rng.gen_range(0..succ.len())] as usize;
        if hit[i] {
            return Some(step);
        }
    }
    None
}

/// Aggregates `cfg.trials` independent trials.
pub fn estimate(p: &Protocol, cfg: &SimConfig, exec: Execution) -> SimResult {
    estimate_with_cap(p, cfg, exec, COMPILE_CAP)
}

/// [`estimate`] with an explicit limit on precomputed graph size; `0`
/// forces on-the-fly successors.
pub fn estimate_with_cap(p: &Protocol, cfg: &SimConfig, exec: Execution, compile_cap: usize) -> SimResult {
    cfg.check();
    let compiled = if compile_cap > 0 {
        ExplicitGraph::explore(&ConfigurationSystem(p), cfg.start(p), compile_cap, exec).ok()
    } else {
        None
    };
    let steps: Vec<Option<u64>> = match &compiled {
        Some(graph) => {
            let hit: Vec<bool> = graph.nodes().iter().map(|g| g.covers(cfg.target)).collect();
            exec.map_indices(cfg.trials, |t| trial_compiled(graph, &hit, cfg, t))
        }
        None => exec.map_indices(cfg.trials, |t| trial_on_the_fly(p, cfg, t)),
    };
    summarize(cfg, &steps, compiled.is_some())
}

fn summarize(cfg: &SimConfig, steps: &[Option<u64>], compiled: bool) -> SimResult {
    let hit: Vec<u64> = steps.iter().flatten().copied().collect();
    let hits = hit.len() as u64;
    let estimate = hits as f64 / cfg.trials as f64;
    SimResult {
        processes: cfg.processes,
        trials: cfg.trials,
        horizon: cfg.horizon,
        seed: cfg.seed,
        hits,
        estimate,
        radius: 3.0 * (estimate * (1.0 - estimate) / cfg.trials as f64).sqrt(),
        mean_hit_step: (hits > 0).then(|| hit.iter().map(|&s| s as f64).sum::<f64>() / hits as f64),
        min_hit_step: hit.iter().copied().min(),
        max_hit_step: hit.iter().copied().max(),
        compiled,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonitorError {
    #[error("location `{0}` is missing or not part of a filter protocol")]
    UnknownLocation(String),
}

/// Checks the counting invariant of the filter family on configurations:
/// for every `j ≤ m`, `Σ_{i≤j} γ(s_i) ≥ j + [datum = j+1]` where `m` is the
/// number of processes.
#[derive(Debug, Clone)]
pub struct FilterMonitor {
    /// `levels[i]` is the location `s_i`.
    levels: Vec<LocId>,
    /// `value[d]` is the integer named by datum `d`, if any.
    value: Vec<Option<u64>>,
}

impl FilterMonitor {
    /// Fails unless `p`'s locations are exactly `s_0 .. s_n`.
    pub fn new(p: &Protocol, n: u32) -> Result<Self, MonitorError> {
        let mut levels = Vec::with_capacity(n as usize + 1);
        for i in 0..=n {
            let name = format!("s{i}");
            levels.push(p.location_named(&name).ok_or(MonitorError::UnknownLocation(name))?);
        }
        if let Some(extra) = p.locations().iter().find(|q| {
            q.strip_prefix('s').and_then(|r| r.parse::<u32>().ok()).is_none_or(|i| i > n)
        }) {
            return Err(MonitorError::UnknownLocation(extra.clone()));
        }
        let value = p.data().iter().map(|d| d.parse().ok()).collect();
        Ok(FilterMonitor { levels, value })
    }

    pub fn holds(&self, g: &Configuration) -> bool {
        let m = g.size();
        let datum_value = self.value.get(g.datum.index()).copied().flatten();
        let mut prefix = 0u64;
        for j in 0..=m {
            if let Some(&q) = self.levels.get(j as usize) {
                prefix += u64::from(g.multiset.count(q));
            }
            let need = j + u64::from(datum_value == Some(j + 1));
            if prefix < need {
                return false;
            }
        }
        true
    }

    pub fn holds_on_trace(&self, trace: &[Configuration]) -> bool {
        trace.iter().all(|g| self.holds(g))
    }
}

/// Whether every configuration of `trace` satisfies the filter invariant.
pub fn monitor_filter_invariant(p: &Protocol, trace: &[Configuration], n: u32) -> Result<bool, MonitorError> {
    Ok(FilterMonitor::new(p, n)?.holds_on_trace(trace))
}

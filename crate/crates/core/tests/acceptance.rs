//! Acceptance suite. Runs every criterion, prints one line per criterion
//! and exits non-zero if any of them fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use regcut_core::concrete::{check_almost_sure, check_coverable, explore, exact_reach_probability};
use regcut_core::coverability::pre_star_basis;
use regcut_core::dsl::families;
use regcut_core::model::{Configuration, Protocol};
use regcut_core::simulator::{estimate, monitor_filter_invariant, run_trial, FilterMonitor, SimConfig};
use regcut_core::symbolic::{build, decide_cutoff, Sign, SymbolicNode};
use regcut_core::tight::{tight_search, TightOptions};
use regcut_core::{Execution, Limits};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn almost(p: &Protocol, k: u32, limits: &Limits) -> Result<bool, String> {
    check_almost_sure(p, k, p.initial_datum(), p.target().unwrap(), limits)
        .map(|v| v.is_almost_sure())
        .map_err(|e| format!("k={k}: {e}"))
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, || format!("took {:.1?}, limit {:.0?}", elapsed, limit))
}

fn running_example() -> Outcome {
    let start = Instant::now();
    let p = families::running();
    let (d0, qf) = (p.initial_datum(), p.target().unwrap());
    let l = Limits::default();
    let cov = |k| check_coverable(&p, k, d0, qf, &l).map_err(|e| e.to_string());
    ensure(!cov(1)? && cov(2)?, || "coverability must switch on at k=2".into())?;
    for k in 1..=6 {
        ensure(!almost(&p, k, &l)?, || format!("k={k} reported almost-sure"))?;
    }
    let v = decide_cutoff(&p, d0, qf, None, &l).map_err(|e| e.to_string())?;
    ensure(v.sign == Sign::Negative && v.certified, || format!("decide gave {:?}, certified={}", v.sign, v.certified))?;
    let o = decide_cutoff(&p, d0, qf, Some(0), &l).map_err(|e| e.to_string())?;
    ensure(o.sign == Sign::Positive && !o.certified, || format!("index 0 gave {:?}, certified={}", o.sign, o.certified))?;
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "coverable from k=2, not almost-sure for k=1..6, certified Negative at index {}, index 0 Positive (uncertified)",
        v.index_used
    ))
}

fn filter_family() -> Outcome {
    let start = Instant::now();
    let l = Limits::default();
    for n in 2..=4u32 {
        let p = families::filter(n);
        for k in 1..=n + 2 {
            let got = almost(&p, k, &l)?;
            ensure(got == (k >= n), || format!("Filter({n}) k={k}: almost-sure={got}"))?;
        }
    }
    let f2 = families::filter(2);
    let v = decide_cutoff(&f2, f2.initial_datum(), f2.target().unwrap(), None, &l).map_err(|e| e.to_string())?;
    ensure(v.sign == Sign::Positive, || format!("decide(Filter(2)) gave {:?}", v.sign))?;
    let f3 = families::filter(3);
    let opts = TightOptions { k_max: 6, certify: true, limits: l };
    let r = tight_search(&f3, f3.initial_datum(), f3.target().unwrap(), &opts);
    ensure(r.tight_cutoff == Some(3), || format!("tight_search(Filter(3)) reported {:?}", r.tight_cutoff))?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("n=2,3,4 switch at k=n, decide(Filter(2)) Positive, tight_search(Filter(3), 6) = 3 ({})", r.label_text()))
}

fn atomic_parity() -> Outcome {
    let start = Instant::now();
    let p = families::atomic_parity();
    let l = Limits::default();
    let mut pattern = String::new();
    for k in 1..=5 {
        let got = almost(&p, k, &l)?;
        pattern.push(if got { 'T' } else { 'F' });
        ensure(got == (k % 2 == 1), || format!("k={k}: almost-sure={got}"))?;
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("k=1..5 gives {pattern}"))
}

fn counter_family() -> Outcome {
    let start = Instant::now();
    let p = families::counter(2);
    let l = Limits::default().with_node_cap(5_000_000);
    ensure(almost(&p, 5, &l)?, || "k=5 must be almost-sure".into())?;
    ensure(!almost(&p, 6, &l)?, || "k=6 must not be almost-sure".into())?;
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok("Counter(2): almost-sure at k=5, not at k=6".into())
}

fn coverability_membership() -> Outcome {
    let mut checked = 0usize;
    for (i, p) in random_protocols(31, 50, small_params()).iter().enumerate() {
        let t = p.target().unwrap();
        let basis = pre_star_basis(p, t, &Limits::default()).map_err(|e| e.to_string())?.basis;
        for k in 1..=3 {
            let good = backward_closure(p, k, |c| covers(c, t));
            for c in all_confs(p, k) {
                ensure(basis.member(&from_conf(&c)) == good.contains(&c), || format!("instance {i}, {c:?}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("50 protocols, {checked} configurations with k<=3 agree with brute force"))
}

fn almost_sure_characterization() -> Outcome {
    let mut instances = 0;
    let mut literal_differs = 0;
    for (i, p) in random_protocols(61, 50, small_params()).iter().enumerate() {
        let t = p.target().unwrap();
        let basis = pre_star_basis(p, t, &Limits::default()).map_err(|e| e.to_string())?.basis;
        for k in 1..=3 {
            let space = explore(p, k, p.initial_datum(), &Limits::default()).map_err(|e| e.to_string())?;
            let verdict = space.almost_sure(t).is_almost_sure();
            let pre_hit = space.before_hit(t);
            let members = space.nodes().iter().zip(&pre_hit).filter(|(_, &b)| b).all(|(g, _)| basis.member(g));
            ensure(verdict == members, || format!("instance {i}, k={k}: verdict {verdict}, members {members}"))?;
            let literal = space.nodes().iter().all(|g| basis.member(g));
            literal_differs += usize::from(literal != verdict);
            instances += 1;
        }
    }
    Ok(format!(
        "{instances} instances agree with Pre* membership of the pre-hit region (whole-graph form differs on {literal_differs})"
    ))
}

fn symbolic_correspondence() -> Outcome {
    let mut edges = 0usize;
    for (i, p) in random_protocols(41, 20, tiny_params()).iter().enumerate() {
        for k in 0..=2 {
            let g = build(p, p.initial_datum(), k, &Limits::default()).map_err(|e| e.to_string())?;
            for (j, v) in g.nodes().iter().enumerate() {
                let got: std::collections::BTreeSet<SymbolicNode> =
                    g.graph().successors(j).iter().map(|&s| g.graph().node(s as usize).clone()).collect();
                let expected = symbolic_successors_via_concrete(p, v);
                ensure(got == expected, || format!("instance {i}, index {k}, node {}", v.display(p)))?;
                edges += got.len();
            }
        }
    }
    Ok(format!("20 protocols, index<=2, {edges} symbolic edges match concrete steps"))
}

fn copycat() -> Outcome {
    let violations: usize = random_protocols(4, 20, small_params()).iter().map(copycat_violations).sum();
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok("20 protocols, no violations".into())
}

fn simulator_fidelity() -> Outcome {
    let limits = Limits::default();
    let cases = [(families::running(), 2u32), (families::filter(2), 1), (families::filter(2), 2)];
    let mut parts = Vec::new();
    for (p, k) in &cases {
        let t = p.target().unwrap();
        let exact: BigRational =
            exact_reach_probability(p, *k, p.initial_datum(), t, &limits).map_err(|e| e.to_string())?;
        let pr = exact.to_f64().unwrap();
        let cfg = SimConfig { trials: 100_000, horizon: 10_000, seed: 7, ..SimConfig::new(*k, t) };
        let par = estimate(p, &cfg, Execution::Parallel);
        let seq = estimate(p, &cfg, Execution::Sequential);
        ensure(par == seq, || format!("k={k}: serial and parallel runs differ"))?;
        let tol = 3.0 * (pr * (1.0 - pr) / cfg.trials as f64).sqrt();
        ensure((par.estimate - pr).abs() <= tol, || {
            format!("k={k}: estimate {} vs exact {exact} (tolerance {tol:.5})", par.estimate)
        })?;
        ensure(!exact.is_zero() || par.hits == 0, || "hits on a zero-probability instance".into())?;
        parts.push(format!("{} vs {exact}", par.estimate));
    }
    Ok(format!("1e5 trials each: {}; serial == parallel", parts.join(", ")))
}

fn filter_invariant() -> Outcome {
    let p = families::filter(3);
    let monitor = FilterMonitor::new(&p, 3).map_err(|e| e.to_string())?;
    let space = explore(&p, 4, p.initial_datum(), &Limits::default()).map_err(|e| e.to_string())?;
    let bad: Vec<&Configuration> = space.nodes().iter().filter(|g| !monitor.holds(g)).collect();
    ensure(bad.is_empty(), || format!("{} reachable configurations violate it", bad.len()))?;
    let cfg = SimConfig { horizon: 10_000, seed: 11, ..SimConfig::new(4, p.target().unwrap()) };
    for trial in 0..1000 {
        let trace = run_trial(&p, &cfg, trial);
        ensure(monitor_filter_invariant(&p, &trace.configurations, 3).map_err(|e| e.to_string())?, || {
            format!("trace {trial} violates it")
        })?;
    }
    Ok(format!("all {} reachable configurations and 1000 simulated traces", space.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("running example", running_example),
        ("filter family", filter_family),
        ("atomic parity", atomic_parity),
        ("counter family", counter_family),
        ("coverability membership", coverability_membership),
        ("almost-sure characterization", almost_sure_characterization),
        ("symbolic edge correspondence", symbolic_correspondence),
        ("copycat", copycat),
        ("simulator fidelity", simulator_fidelity),
        ("filter invariant", filter_invariant),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS [{secs:.2}s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL [{secs:.2}s] {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

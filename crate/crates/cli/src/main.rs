//! `regcut` command-line front end.
//!
//! Every verb loads a protocol (from a file or a named family), runs one
//! analysis and prints either a short text report or a JSON document.
//! Exit codes: 0 success, 1 negative verdict under `--strict-exit`,
//! 2 input error, 3 resource limit.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use regcut_core::concrete::{self, Answer};
use regcut_core::coverability::pre_star_basis;
use regcut_core::dsl::{self, FamilySpec};
use regcut_core::limits::{BASIS_CAP_ENV, NODE_CAP_ENV};
use regcut_core::model::{DatumId, LocId, Protocol};
use regcut_core::simulator::{self, SimConfig};
use regcut_core::symbolic::{self, cutoff_bounds, decide_cutoff, Sign};
use regcut_core::tight::{tight_search, TightOptions};
use regcut_core::{Error, Execution, Limits};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "regcut", version, about = "Almost-sure reachability and cut-off analysis for register protocols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit with status 1 on NotAlmostSure or Negative verdicts.
    #[arg(long, global = true)]
    strict_exit: bool,
    /// Run every analysis on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Maximum number of explored graph nodes.
    #[arg(long, env = NODE_CAP_ENV, global = true)]
    node_cap: Option<usize>,
    /// Maximum number of basis elements in backward coverability.
    #[arg(long, env = BASIS_CAP_ENV, global = true)]
    basis_cap: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Args, Debug, Clone)]
struct ProtocolArgs {
    /// Protocol file.
    #[arg(value_name = "FILE", conflicts_with_all = ["file", "family"])]
    path: Option<PathBuf>,
    #[arg(long, conflicts_with = "family")]
    file: Option<PathBuf>,
    /// Built-in family: running, atomic-parity, filter, counter.
    #[arg(long)]
    family: Option<String>,
    /// Family parameter.
    #[arg(long, requires = "family")]
    n: Option<u32>,
    /// Target location (defaults to the protocol's `target`).
    #[arg(long)]
    target: Option<String>,
    /// Initial register value (defaults to the protocol's `register`).
    #[arg(long)]
    register: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a protocol.
    Validate {
        #[command(flatten)]
        protocol: ProtocolArgs,
    },
    /// Decide almost-sure reachability for a fixed number of processes.
    Check {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long)]
        k: u32,
        /// Also compute the exact reachability probability.
        #[arg(long)]
        exact: bool,
    },
    /// Decide whether the target can be covered with `k` processes.
    Coverable {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long)]
        k: u32,
    },
    /// Minimal basis of the configurations that can cover the target.
    Prestar {
        #[command(flatten)]
        protocol: ProtocolArgs,
    },
    /// Decide the sign of the cut-off on the symbolic graph.
    Decide {
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// Symbolic index to use instead of the required one.
        #[arg(long)]
        index: Option<u32>,
    },
    /// Upper bound on the tight cut-off from a certified decision.
    Bounds {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long)]
        index: Option<u32>,
    },
    /// Monte-Carlo estimate of the reachability probability.
    Simulate {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 10_000)]
        horizon: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the configurations of this trial instead of an estimate.
        #[arg(long)]
        trace: Option<u64>,
    },
    /// Graphviz export of the state space (`--k`) or symbolic graph (`--index`).
    Export {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long, required_unless_present = "index", conflicts_with = "index")]
        k: Option<u32>,
        #[arg(long)]
        index: Option<u32>,
        /// Location whose nodes are highlighted (defaults to the target).
        #[arg(long)]
        highlight: Option<String>,
        /// Do not highlight anything.
        #[arg(long, conflicts_with = "highlight")]
        no_highlight: bool,
    },
    /// Print a generated family in the protocol text format.
    Gen {
        /// Family name, or `name:n`.
        #[arg(value_name = "FAMILY", required_unless_present = "family_opt")]
        family: Option<String>,
        /// Family parameter.
        #[arg(value_name = "N")]
        n_pos: Option<u32>,
        #[arg(long = "family", conflicts_with = "family")]
        family_opt: Option<String>,
        #[arg(long, conflicts_with = "n_pos")]
        n: Option<u32>,
    },
    /// Least network size from which the almost-sure answer stays constant.
    Tight {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long, default_value_t = 8)]
        k_max: u32,
        /// Skip the symbolic decision used for certification.
        #[arg(long)]
        no_certify: bool,
    },
}

/// Errors that stop a command before or after the analysis.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("no protocol given (use FILE, --file or --family)")]
    NoProtocol,
    #[error("protocol has no target; pass --target")]
    NoTarget,
    #[error("unknown location `{0}`")]
    UnknownLocation(String),
    #[error("unknown datum `{0}`")]
    UnknownDatum(String),
    #[error("`{verb}` does not support --format {format}")]
    Format { verb: &'static str, format: &'static str },
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Io { .. } => "cli.io",
            CliError::NoProtocol => "cli.no-protocol",
            CliError::NoTarget => "cli.no-target",
            CliError::UnknownLocation(_) => "cli.unknown-location",
            CliError::UnknownDatum(_) => "cli.unknown-datum",
            CliError::Format { .. } => "cli.format",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.resource_limit().is_some() => 3,
            _ => 2,
        }
    }
}

fn core<E: Into<Error>>(e: E) -> CliError {
    CliError::Core(e.into())
}

/// A loaded protocol plus the resolved target and initial datum.
struct Loaded {
    protocol: Protocol,
    target: Option<LocId>,
    datum: DatumId,
}

impl Loaded {
    fn target(&self) -> Result<LocId, CliError> {
        self.target.ok_or(CliError::NoTarget)
    }
}

fn load(args: &ProtocolArgs) -> Result<Loaded, CliError> {
    let protocol = if let Some(family) = &args.family {
        let spec = match args.n {
            Some(n) => FamilySpec::from_parts(family, Some(n)),
            None => family.parse(),
        };
        dsl::generate(spec.map_err(core)?).map_err(core)?
    } else {
        let path = args.path.as_ref().or(args.file.as_ref()).ok_or(CliError::NoProtocol)?;
        let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        dsl::parse(&text).map_err(core)?.validated().map_err(core)?
    };
    let target = match &args.target {
        Some(name) => Some(protocol.location_named(name).ok_or_else(|| CliError::UnknownLocation(name.clone()))?),
        None => protocol.target(),
    };
    let datum = match &args.register {
        Some(name) => protocol.datum_named(name).ok_or_else(|| CliError::UnknownDatum(name.clone()))?,
        None => protocol.initial_datum(),
    };
    Ok(Loaded { protocol, target, datum })
}

/// What a command produced: the rendered output and whether the verdict was
/// property-negative.
struct Output {
    body: String,
    negative: bool,
}

impl Output {
    fn new(body: String) -> Self {
        Output { body, negative: false }
    }
}

struct Ctx<'a> {
    out: &'a OutputArgs,
    limits: Limits,
}

impl Ctx<'_> {
    /// Renders `doc` as JSON or calls `text`; `dot` is rejected.
    fn render<T: Serialize>(&self, verb: &'static str, doc: &T, text: impl FnOnce() -> String) -> Result<String, CliError> {
        match self.out.format {
            Format::Json => Ok(serde_json::to_string_pretty(doc).expect("documents serialize") + "\n"),
            Format::Text => Ok(text()),
            Format::Dot => Err(CliError::Format { verb, format: "dot" }),
        }
    }
}

#[derive(Serialize)]
struct ValidateDoc<'a> {
    valid: bool,
    name: &'a str,
    locations: &'a [String],
    data: &'a [String],
    transitions: usize,
    atomic: bool,
    target: Option<&'a str>,
}

#[derive(Serialize)]
struct CheckDoc {
    #[serde(flatten)]
    verdict: regcut_core::report::VerdictDoc,
    probability: Option<String>,
}

#[derive(Serialize)]
struct CoverableDoc {
    processes: u32,
    target: String,
    coverable: bool,
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let mut limits = Limits::from_env();
    if let Some(cap) = cli.output.node_cap {
        limits.node_cap = cap;
    }
    if let Some(cap) = cli.output.basis_cap {
        limits.basis_cap = cap;
    }
    if cli.output.sequential {
        limits.exec = Execution::Sequential;
    }
    let ctx = Ctx { out: &cli.output, limits };
    let limits = &ctx.limits;

    match &cli.command {
        Command::Validate { protocol } => {
            let l = load(protocol)?;
            let p = &l.protocol;
            let doc = ValidateDoc {
                valid: true,
                name: p.name(),
                locations: p.locations(),
                data: p.data(),
                transitions: p.transitions().len(),
                atomic: p.is_atomic(),
                target: l.target.map(|q| p.location_name(q)),
            };
            ctx.render("validate", &doc, || {
                format!(
                    "ok: protocol {} with {} locations, {} data, {} transitions{}\n",
                    p.name(),
                    p.num_locations(),
                    p.num_data(),
                    p.transitions().len(),
                    if p.is_atomic() { " (atomic)" } else { "" }
                )
            })
            .map(Output::new)
        }
        Command::Check { protocol, k, exact } => {
            let l = load(protocol)?;
            let (p, t) = (&l.protocol, l.target()?);
            let space = concrete::explore(p, *k, l.datum, limits).map_err(core)?;
            let verdict = space.almost_sure(t);
            let probability = if *exact { Some(space.reach_probability(t, limits.solve_cap).map_err(core)?) } else { None };
            let doc = CheckDoc { verdict: verdict.document(p), probability: probability.as_ref().map(|r| r.to_string()) };
            let body = ctx.render("check", &doc, || {
                let mut s = format!("k = {k}: {:?}\n", verdict.answer);
                if let Some(w) = &verdict.witness {
                    s += &format!("witness: {}\n", w.display(p));
                }
                if let Some(r) = &probability {
                    s += &format!("probability: {r}\n");
                }
                s + &format!("explored {} configurations, {} edges\n", verdict.stats.nodes, verdict.stats.edges)
            })?;
            Ok(Output { body, negative: verdict.answer == Answer::NotAlmostSure })
        }
        Command::Coverable { protocol, k } => {
            let l = load(protocol)?;
            let (p, t) = (&l.protocol, l.target()?);
            let coverable = concrete::check_coverable(p, *k, l.datum, t, limits).map_err(core)?;
            let doc = CoverableDoc { processes: *k, target: p.location_name(t).to_owned(), coverable };
            ctx.render("coverable", &doc, || {
                format!("k = {k}: {} {}\n", p.location_name(t), if coverable { "is coverable" } else { "is not coverable" })
            })
            .map(Output::new)
        }
        Command::Prestar { protocol } => {
            let l = load(protocol)?;
            let (p, t) = (&l.protocol, l.target()?);
            let pre = pre_star_basis(p, t, limits).map_err(core)?;
            let doc = pre.basis.document(p);
            ctx.render("prestar", &doc, || {
                let mut s = format!("{} minimal elements, K = {}\n", pre.basis.len(), doc.k_bound.value);
                for g in pre.basis.iter() {
                    s += &format!("{}\n", g.display(p));
                }
                s
            })
            .map(Output::new)
        }
        Command::Decide { protocol, index } => {
            let l = load(protocol)?;
            let (p, t) = (&l.protocol, l.target()?);
            let v = decide_cutoff(p, l.datum, t, *index, limits).map_err(core)?;
            let body = ctx.render("decide", &v.document(p), || {
                let mut s = format!(
                    "{:?} at index {} (required {}, {})\n",
                    v.sign,
                    v.index_used,
                    v.required_index,
                    if v.certified { "certified" } else { "uncertified" }
                );
                if let Some(w) = &v.witness {
                    s += &format!("witness: {} at depth {}\n", w.display(p), v.witness_depth.unwrap_or(0));
                }
                s + &format!("symbolic graph: {} nodes, {} edges\n", v.stats.nodes, v.stats.edges)
            })?;
            Ok(Output { body, negative: v.sign == Sign::Negative })
        }
        Command::Bounds { protocol, index } => {
            let l = load(protocol)?;
            let (p, t) = (&l.protocol, l.target()?);
            let v = decide_cutoff(p, l.datum, t, *index, limits).map_err(core)?;
            let b = cutoff_bounds(&v).map_err(core)?;
            let body = ctx.render("bounds", &b, || format!("{b}\n"))?;
            Ok(Output { body, negative: b.sign == Sign::Negative })
        }
        Command::Simulate { protocol, k, trials, horizon, seed, trace } => {
            let l = load(protocol)?;
            let (p, t) = (&l.protocol, l.target()?);
            let cfg = SimConfig {
                horizon: *horizon,
                trials: *trials,
                seed: *seed,
                initial_datum: Some(l.datum),
                ..SimConfig::new(*k, t)
            };
            if let Some(i) = trace {
                let tr = simulator::run_trial(p, &cfg, *i);
                return ctx.render("simulate", &TraceDoc::new(&tr, p), || tr.dump(p)).map(Output::new);
            }
            let r = simulator::estimate(p, &cfg, limits.exec);
            ctx.render("simulate", &r, || {
                format!(
                    "estimate {:.6} ± {:.6} ({} of {} trials hit within {} steps)\n",
                    r.estimate, r.radius, r.hits, r.trials, r.horizon
                )
            })
            .map(Output::new)
        }
        Command::Export { protocol, k, index, highlight, no_highlight } => {
            let l = load(protocol)?;
            let p = &l.protocol;
            if ctx.out.format == Format::Json {
                return Err(CliError::Format { verb: "export", format: "json" });
            }
            let mark = match (highlight, no_highlight) {
                (_, true) => None,
                (Some(name), _) => Some(p.location_named(name).ok_or_else(|| CliError::UnknownLocation(name.clone()))?),
                (None, false) => l.target,
            };
            let dot = match (k, index) {
                (Some(k), _) => dsl::state_space_dot(&concrete::explore(p, *k, l.datum, limits).map_err(core)?, p, mark),
                (None, Some(i)) => dsl::symbolic_dot(&symbolic::build(p, l.datum, *i, limits).map_err(core)?, p, mark),
                (None, None) => unreachable!("clap requires --k or --index"),
            };
            Ok(Output::new(dot))
        }
        Command::Gen { family, n_pos, family_opt, n } => {
            let name = family.as_ref().or(family_opt.as_ref()).expect("clap requires a family");
            let spec = match n_pos.or(*n) {
                Some(n) => FamilySpec::from_parts(name, Some(n)),
                None => name.parse(),
            }
            .map_err(core)?;
            let p = dsl::generate(spec).map_err(core)?;
            match ctx.out.format {
                Format::Text => Ok(Output::new(dsl::serialize(&p))),
                other => Err(CliError::Format { verb: "gen", format: if other == Format::Json { "json" } else { "dot" } }),
            }
        }
        Command::Tight { protocol, k_max, no_certify } => {
            let l = load(protocol)?;
            let (p, t) = (&l.protocol, l.target()?);
            let opts = TightOptions { k_max: *k_max, certify: !no_certify, limits: *limits };
            let r = tight_search(p, l.datum, t, &opts);
            let body = ctx.render("tight", &r, || {
                let mut s = String::new();
                for e in &r.entries {
                    match (&e.answer, &e.skipped) {
                        (Some(a), _) => s += &format!("k = {}: {a:?}\n", e.k),
                        (None, Some(limit)) => s += &format!("k = {}: skipped ({limit})\n", e.k),
                        (None, None) => s += &format!("k = {}: skipped\n", e.k),
                    }
                }
                match (r.tight_cutoff, r.sign) {
                    (Some(c), Some(sign)) => s += &format!("{sign:?} cut-off {c} ({})\n", r.label_text()),
                    _ => s += "no answer\n",
                }
                s
            })?;
            Ok(Output { body, negative: r.sign == Some(Sign::Negative) })
        }
    }
}

#[derive(Serialize)]
struct TraceDoc {
    configurations: Vec<regcut_core::report::ConfigurationDoc>,
    hit_step: Option<u64>,
}

impl TraceDoc {
    fn new(t: &simulator::Trace, p: &Protocol) -> Self {
        TraceDoc {
            configurations: t.configurations.iter().map(|g| regcut_core::report::ConfigurationDoc::new(g, p)).collect(),
            hit_step: t.hit_step,
        }
    }
}

fn emit(out: &OutputArgs, body: &str) -> Result<(), CliError> {
    match &out.out {
        Some(path) => fs::write(path, body).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|o| emit(&cli.output, &o.body).map(|_| o.negative));
    match result {
        Ok(true) if cli.output.strict_exit => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code())
        }
    }
}

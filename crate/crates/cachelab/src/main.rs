use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cachelab::{
    compare_parallel, emit_plain, emit_report, parse_lru_problem, parse_net, parse_plain,
    parse_smpc, run_lru_problem, CapacitySpec, ReportFormat,
};
use cachelab_core::bayes::{infer_enumeration, infer_variable_elimination, BayesError};
use cachelab_core::prefetch::{PredictorConfig, Trigger};
use cachelab_core::trace::{gen_markov_trace, TraceError};
use cachelab_core::{
    run_sim, CacheConfig, Policy, PreEvictConfig, PrefetchConfig, RunConfig, Trace,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Trace-driven cache replacement and prefetching lab.
#[derive(Parser)]
#[command(name = "cachelab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one policy at one capacity.
    Run(RunArgs),
    /// Simulate every (policy, capacity) pair over one trace.
    Compare(CompareArgs),
    /// Write a synthetic trace in plain format.
    GenTrace(GenTraceArgs),
    /// Letter-script LRU simulator: problem set on stdin, transcript on stdout.
    LruSim,
    /// Query a discrete Bayesian network.
    Bayes(BayesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceFormat {
    Plain,
    Smpc,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum PreEvictMode {
    Halfway,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrefetchMode {
    Pgm,
}

#[derive(Clone, Copy, ValueEnum)]
enum TriggerArg {
    Every,
    Miss,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Markov,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Enum,
    Ve,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, value_enum, default_value = "plain")]
    format: TraceFormat,
    #[arg(long, value_enum, default_value = "table")]
    out: OutFormat,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, value_enum)]
    pre_evict: Option<PreEvictMode>,
    /// Size of the key space; keys below half of it are cleared on a miss
    /// in the upper half.
    #[arg(long, requires = "pre_evict")]
    address_space: Option<u64>,
    /// Evict entries idle for this many requests.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pre_evict_timer: Option<u64>,
    #[arg(long, value_enum)]
    prefetch: Option<PrefetchMode>,
    #[arg(long, requires = "prefetch", value_parser = clap::value_parser!(u64).range(1..=2))]
    order: Option<u64>,
    #[arg(long, requires = "prefetch", value_parser = clap::value_parser!(u64).range(1..))]
    top_k: Option<u64>,
    #[arg(long, requires = "prefetch")]
    p_min: Option<f64>,
    #[arg(long, requires = "prefetch")]
    alpha: Option<f64>,
    #[arg(long, requires = "prefetch")]
    min_support: Option<u64>,
    #[arg(long, requires = "prefetch", value_enum)]
    trigger: Option<TriggerArg>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: TraceArgs,
    #[arg(long, value_parser = Policy::from_str_arg)]
    policy: Policy,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    capacity: u64,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    input: TraceArgs,
    /// Comma-separated policy names.
    #[arg(long, value_delimiter = ',', value_parser = Policy::from_str_arg, default_value = "fifo,lifo,lru,mru,arc")]
    policies: Vec<Policy>,
    /// Comma-separated capacities; `log` and `sqrt` derive from trace length.
    #[arg(long, value_delimiter = ',', required = true)]
    capacities: Vec<CapacitySpec>,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args)]
struct GenTraceArgs {
    #[arg(long, value_enum, default_value = "markov")]
    model: Model,
    #[arg(long)]
    states: u64,
    #[arg(long)]
    length: usize,
    #[arg(long)]
    determinism: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BayesArgs {
    #[arg(long)]
    net: PathBuf,
    #[arg(long)]
    query: String,
    /// Comma-separated `VAR=STATE` pairs.
    #[arg(long, value_delimiter = ',')]
    evidence: Vec<String>,
    #[arg(long, value_enum, default_value = "ve")]
    method: Method,
}

trait FromStrArg: Sized {
    fn from_str_arg(s: &str) -> Result<Self, String>;
}

impl FromStrArg for Policy {
    fn from_str_arg(s: &str) -> Result<Self, String> {
        s.trim().parse().map_err(|e| format!("{e}"))
    }
}

enum Failure {
    /// Bad invocation: exit 2.
    Usage(String),
    /// I/O, parse or evaluation error: exit 1.
    Runtime(String),
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::GenTrace(args) => cmd_gen_trace(args),
        Command::LruSim => cmd_lru_sim(),
        Command::Bayes(args) => cmd_bayes(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("cachelab: usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("cachelab: {msg}");
            ExitCode::from(1)
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn trace_error(path: &Path, e: TraceError) -> Failure {
    match e {
        TraceError::MalformedLine(line) => {
            Failure::Runtime(format!("{}:{line}: malformed trace line", path.display()))
        }
        TraceError::MalformedCase { line, reason } => {
            Failure::Runtime(format!("{}:{line}: {reason}", path.display()))
        }
        TraceError::InvalidParam(p) => Failure::Runtime(format!("{}: {p}", path.display())),
    }
}

fn load_trace(args: &TraceArgs) -> Result<Trace, Failure> {
    let bytes = read_file(&args.trace)?;
    let parsed = match args.format {
        TraceFormat::Plain => parse_plain(&bytes),
        TraceFormat::Smpc => parse_smpc(&bytes),
    };
    parsed.map_err(|e| trace_error(&args.trace, e))
}

fn write_stdout(text: &str) -> CmdResult {
    io::stdout()
        .lock()
        .write_all(text.as_bytes())
        .map_err(|e| Failure::Runtime(format!("stdout: {e}")))
}

fn report_format(out: OutFormat) -> ReportFormat {
    match out {
        OutFormat::Json => ReportFormat::Json,
        OutFormat::Csv => ReportFormat::Csv,
        OutFormat::Table => ReportFormat::Table,
    }
}

/// Applies the optional pre-eviction and prefetch flags to a base config.
fn build_config(label: String, cache: CacheConfig, sim: &SimArgs) -> Result<RunConfig, Failure> {
    let mut config = RunConfig::new(label, cache);
    let mut pre = PreEvictConfig::disabled();
    if sim.pre_evict.is_some() {
        let n = sim
            .address_space
            .ok_or_else(|| Failure::Usage("--pre-evict halfway needs --address-space N".into()))?;
        if n < 2 {
            return Err(Failure::Usage("--address-space must be at least 2".into()));
        }
        pre = pre.with_halfway(n);
    }
    if let Some(t) = sim.pre_evict_timer {
        pre = pre.with_timer(t);
    }
    if !pre.is_disabled() {
        config = config.with_pre_evict(pre);
    }
    if sim.prefetch.is_some() {
        let defaults = PrefetchConfig::default();
        let prefetch = PrefetchConfig {
            top_k: sim.top_k.map_or(defaults.top_k, |k| k as usize),
            p_min: sim.p_min.unwrap_or(defaults.p_min),
            trigger: match sim.trigger {
                Some(TriggerArg::Miss) => Trigger::OnMiss,
                Some(TriggerArg::Every) => Trigger::OnEveryAccess,
                None => defaults.trigger,
            },
            predictor: PredictorConfig {
                order: sim.order.map_or(defaults.predictor.order, |o| o as usize),
                alpha: sim.alpha.unwrap_or(defaults.predictor.alpha),
                min_support: sim.min_support.unwrap_or(defaults.predictor.min_support),
            },
        };
        prefetch.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        config = config.with_prefetch(prefetch);
    }
    Ok(config)
}

fn cmd_run(args: RunArgs) -> CmdResult {
    let capacity = args.capacity as usize;
    let cache = CacheConfig::new(capacity, args.policy).map_err(|e| Failure::Usage(e.to_string()))?;
    let config = build_config(format!("{}@{capacity}", args.policy), cache, &args.sim)?;
    let trace = load_trace(&args.input)?;
    let report = run_sim(&trace, &config).map_err(|e| Failure::Runtime(e.to_string()))?;
    write_stdout(&emit_report(&[report], report_format(args.input.out)))
}

fn cmd_compare(args: CompareArgs) -> CmdResult {
    if args.policies.is_empty() {
        return Err(Failure::Usage("--policies is empty".into()));
    }
    let trace = load_trace(&args.input)?;
    let mut configs = Vec::new();
    for &policy in &args.policies {
        for spec in &args.capacities {
            let k = spec.resolve(trace.len());
            let label = format!("{policy}@{k}");
            // `log` and a literal may resolve to the same capacity.
            if configs.iter().any(|c: &RunConfig| c.label == label) {
                continue;
            }
            let cache = CacheConfig::new(k, policy).map_err(|e| Failure::Usage(e.to_string()))?;
            configs.push(build_config(label, cache, &args.sim)?);
        }
    }
    let reports = compare_parallel(&trace, &configs).map_err(|e| Failure::Runtime(e.to_string()))?;
    write_stdout(&emit_report(&reports, report_format(args.input.out)))
}

fn cmd_gen_trace(args: GenTraceArgs) -> CmdResult {
    let Model::Markov = args.model;
    let trace = gen_markov_trace(args.seed, args.states, args.length, args.determinism)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    std::fs::write(&args.out, emit_plain(&trace))
        .map_err(|e| Failure::Runtime(format!("{}: {e}", args.out.display())))
}

fn cmd_lru_sim() -> CmdResult {
    let mut input = Vec::new();
    io::stdin()
        .read_to_end(&mut input)
        .map_err(|e| Failure::Runtime(format!("<stdin>: {e}")))?;
    let set = parse_lru_problem(&input).map_err(|e| trace_error(Path::new("<stdin>"), e))?;
    write_stdout(&run_lru_problem(&set))
}

fn cmd_bayes(args: BayesArgs) -> CmdResult {
    let bytes = read_file(&args.net)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::Runtime(format!("{}: not valid UTF-8", args.net.display())))?;
    let net = parse_net(&text).map_err(|e| match e.line() {
        Some(line) => Failure::Runtime(format!("{}:{line}: {}", args.net.display(), strip_line(&e))),
        None => Failure::Runtime(format!("{}: {e}", args.net.display())),
    })?;

    let mut pairs = Vec::new();
    for item in &args.evidence {
        let (var, state) = item
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("evidence `{item}` is not VAR=STATE")))?;
        if var.trim() == args.query {
            return Err(Failure::Usage(format!("query variable `{}` is also observed", args.query)));
        }
        pairs.push((var.trim(), state.trim()));
    }
    let runtime = |e: BayesError| Failure::Runtime(e.to_string());
    let query = net.var_id(&args.query).map_err(runtime)?;
    let evidence = net.evidence(&pairs).map_err(runtime)?;
    let dist = match args.method {
        Method::Enum => infer_enumeration(&net, query, &evidence),
        Method::Ve => infer_variable_elimination(&net, query, &evidence, None),
    }
    .map_err(|e| match e {
        BayesError::QueryInEvidence(_) => Failure::Usage(e.to_string()),
        e => runtime(e),
    })?;

    let mut out = String::new();
    for (label, p) in net.variables()[query].states.iter().zip(dist) {
        out.push_str(&format!("{label} {p:.6}\n"));
    }
    write_stdout(&out)
}

/// The error text without its own `line N:` prefix, which the caller replaces
/// with `path:N:`.
fn strip_line(e: &cachelab::NetFileError) -> String {
    match e {
        cachelab::NetFileError::Syntax { column, message, .. } => format!("column {column}: {message}"),
        cachelab::NetFileError::Invalid { source, .. } => source.to_string(),
    }
}

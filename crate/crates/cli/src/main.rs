use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use circular_recolour::chromatic::{colour_sparse_cycles, count_cycles_mod_k, threshold, ChromaticError, MAX_K};
use circular_recolour::circular::{verify_colouring, CircularColouring, CircularParams, ColouringError};
use circular_recolour::format::{parse_colouring_values, parse_graph, write_colouring, write_graph, ParseError};
use circular_recolour::graph::Graph;
use circular_recolour::hardness::{build_reduction, lift_sequence, HardnessError, ReductionInstance};
use circular_recolour::oracle::{components_summary, oracle_decide, OracleError, OracleOptions, DEFAULT_BUDGET};
use circular_recolour::recolour::{recolour, RecolourError, RecolourStep, Verdict};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

const EXIT_NO: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_PARSE: u8 = 65;
const EXIT_BUDGET: u8 = 69;

/// Reconfiguration of circular colourings.
#[derive(Parser)]
#[command(name = "recolour", version)]
struct Cli {
    /// Diagnostics level on stderr (error, info or debug); overrides RECOLOUR_LOG.
    #[arg(long, global = true, value_parser = ["error", "info", "debug"])]
    log_level: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a colouring is a proper (p,q)-colouring.
    Verify {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        colouring: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Decide whether one colouring reaches another, for 2 <= p/q < 4.
    Reconfigure {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        params: ParamArgs,
        /// Write the verdict here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive search over the configuration graph.
    Oracle {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, required_unless_present = "components")]
        from: Option<PathBuf>,
        #[arg(long, required_unless_present = "components", conflicts_with = "components")]
        to: Option<PathBuf>,
        /// Summarise the connected components instead of deciding a pair.
        #[arg(long)]
        components: bool,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Build the reduced instance from k-colourings, for p/q >= 4.
    Reduce {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        params: RequiredParams,
        /// Writes PREFIX.graph, PREFIX.alpha.col, PREFIX.beta.col and PREFIX.meta.json.
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Lift a k-colouring sequence to the reduced instance.
    Lift {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        params: RequiredParams,
        /// JSON document `{"sequence":[[v,c],...]}` of k-colouring steps.
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count cycles whose length is divisible by k.
    Cycles {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(short)]
        k: usize,
    },
    /// Build a k-colouring edge by edge.
    SparseColour {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GraphArg {
    /// Graph file, or one of the built-in names K<n>, P<n>, C<n>.
    #[arg(long)]
    graph: String,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    from: PathBuf,
    #[arg(long)]
    to: PathBuf,
}

/// Optional check against the parameters in the colouring files.
#[derive(Args)]
struct ParamArgs {
    #[arg(short, requires = "q")]
    p: Option<usize>,
    #[arg(short, requires = "p")]
    q: Option<usize>,
}

#[derive(Args)]
struct RequiredParams {
    #[arg(short)]
    p: usize,
    #[arg(short)]
    q: usize,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let env = env_logger::Env::new().filter_or("RECOLOUR_LOG", "error");
    let mut logger = env_logger::Builder::from_env(env);
    if let Some(level) = &cli.log_level {
        logger.parse_filters(level);
    }
    logger.init();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("recolour: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Verify {
            graph,
            colouring,
            params,
        } => cmd_verify(&graph, &colouring, &params),
        Command::Reconfigure {
            graph,
            pair,
            params,
            out,
        } => cmd_reconfigure(&graph, &pair, &params, out.as_deref()),
        Command::Oracle {
            graph,
            from,
            to,
            components,
            params,
            threads,
            budget,
        } => {
            let opts = OracleOptions { budget, threads };
            if components {
                cmd_components(&graph, from.as_deref(), &params, &opts)
            } else {
                let (from, to) = (from.expect("required by clap"), to.expect("required by clap"));
                cmd_oracle(&graph, &PairArgs { from, to }, &params, &opts)
            }
        }
        Command::Reduce {
            graph,
            pair,
            params,
            out_prefix,
        } => cmd_reduce(&graph, &pair, &params, &out_prefix),
        Command::Lift {
            graph,
            pair,
            params,
            sequence,
            out,
        } => cmd_lift(&graph, &pair, &params, &sequence, out.as_deref()),
        Command::Cycles { graph, k } => cmd_cycles(&graph, k),
        Command::SparseColour { graph, k, out } => cmd_sparse_colour(&graph, k, out.as_deref()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn parse_failure(path: &Path, e: ParseError) -> Failure {
    Failure::new(EXIT_PARSE, format!("{}: {e}", path.display()))
}

fn builtin_graph(name: &str) -> Option<Graph> {
    let (kind, n) = name.split_at_checked(1)?;
    let n: usize = n.parse().ok()?;
    match kind {
        "K" => Some(Graph::complete(n)),
        "P" => Some(Graph::path(n)),
        "C" if n >= 3 => Some(Graph::cycle(n)),
        _ => None,
    }
}

fn load_graph(arg: &GraphArg) -> Result<Graph, Failure> {
    let path = Path::new(&arg.graph);
    if !path.exists() {
        if let Some(g) = builtin_graph(&arg.graph) {
            return Ok(g);
        }
    }
    parse_graph(&read(path)?).map_err(|e| parse_failure(path, e))
}

fn invalid(e: ColouringError) -> Failure {
    Failure::new(EXIT_INVALID, format!("invalid colouring: {e}"))
}

/// Reads a colouring of `g`; range and length problems are invalid colourings,
/// not parse errors.
fn load_colouring(g: &Graph, path: &Path, params: &ParamArgs) -> Result<CircularColouring, Failure> {
    let (pq, colours) = parse_colouring_values(&read(path)?).map_err(|e| parse_failure(path, e))?;
    if let (Some(p), Some(q)) = (params.p, params.q) {
        if (p, q) != (pq.p(), pq.q()) {
            return Err(Failure::new(
                EXIT_USAGE,
                format!("{}: file has parameters {pq}, command line says ({p},{q})", path.display()),
            ));
        }
    }
    if colours.len() != g.vertex_count() {
        return Err(invalid(ColouringError::DomainMismatch {
            expected: g.vertex_count(),
            found: colours.len(),
        }));
    }
    CircularColouring::new(pq, colours).map_err(invalid)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::new(EXIT_USAGE, format!("stdout: {e}")))
        }
    }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json");
    s.push('\n');
    s
}

fn cmd_verify(graph: &GraphArg, colouring: &Path, params: &ParamArgs) -> Outcome {
    let g = load_graph(graph)?;
    let c = load_colouring(&g, colouring, params)?;
    match verify_colouring(&g, &c) {
        Ok(()) => {
            emit("ok\n", None)?;
            Ok(0)
        }
        Err(ColouringError::ViolatingEdge { u, v }) => {
            emit(&format!("violation e {u} {v}\n"), None)?;
            Ok(EXIT_INVALID)
        }
        Err(e) => Err(invalid(e)),
    }
}

fn load_pair(g: &Graph, pair: &PairArgs, params: &ParamArgs) -> Result<(CircularColouring, CircularColouring), Failure> {
    let f = load_colouring(g, &pair.from, params)?;
    let h = load_colouring(g, &pair.to, params)?;
    if f.params() != h.params() {
        return Err(Failure::new(
            EXIT_USAGE,
            format!("colourings use different parameters {} and {}", f.params(), h.params()),
        ));
    }
    verify_colouring(g, &f).map_err(invalid)?;
    verify_colouring(g, &h).map_err(invalid)?;
    Ok((f, h))
}

/// Runs the algorithm on each component and combines the verdicts: the
/// sequences are concatenated, and the first failing component decides a NO.
fn reconfigure_components(g: &Graph, f: &CircularColouring, h: &CircularColouring) -> Result<Verdict, RecolourError> {
    let params = f.params();
    let mut steps = Vec::new();
    for mut comp in g.components() {
        comp.sort_unstable();
        let sub = g.induced_subgraph(&comp);
        let restrict = |c: &CircularColouring| {
            CircularColouring::new(params, comp.iter().map(|&v| c.colour(v)).collect()).expect("restriction")
        };
        log::info!("component of {} vertices starting at {}", comp.len(), comp[0]);
        match recolour(&sub, &restrict(f), &restrict(h))? {
            Verdict::Yes(local) => steps.extend(local.into_iter().map(|s| RecolourStep::new(comp[s.vertex], s.colour))),
            Verdict::No(obs) => return Ok(Verdict::No(obs.embed(g, &comp))),
        }
    }
    Ok(Verdict::Yes(steps))
}

fn cmd_reconfigure(graph: &GraphArg, pair: &PairArgs, params: &ParamArgs, out: Option<&Path>) -> Outcome {
    let g = load_graph(graph)?;
    let (f, h) = load_pair(&g, pair, params)?;
    if !f.params().below_four() {
        return Err(Failure::new(
            EXIT_UNSUPPORTED,
            format!(
                "parameters {} have p/q >= 4; the problem is PSPACE-complete there, use `reduce` or `oracle`",
                f.params()
            ),
        ));
    }
    let verdict = reconfigure_components(&g, &f, &h).map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
    emit(&pretty(&verdict.to_json()), out)?;
    Ok(if verdict.is_yes() { 0 } else { EXIT_NO })
}

fn oracle_failure(e: OracleError) -> Failure {
    match e {
        OracleError::BudgetExceeded(_) => Failure::new(EXIT_BUDGET, e.to_string()),
        OracleError::ParamsTooLarge(_) => Failure::new(EXIT_UNSUPPORTED, e.to_string()),
        OracleError::InvalidColouring(c) => invalid(c),
        OracleError::ThreadPool(_) => Failure::new(EXIT_USAGE, e.to_string()),
    }
}

fn cmd_oracle(graph: &GraphArg, pair: &PairArgs, params: &ParamArgs, opts: &OracleOptions) -> Outcome {
    let g = load_graph(graph)?;
    let (f, h) = load_pair(&g, pair, params)?;
    let decision = oracle_decide(&g, &f, &h, opts).map_err(oracle_failure)?;
    let distance = decision.distance.map_or("none".to_string(), |d| d.to_string());
    emit(&format!("reachable={} distance={distance}\n", decision.reachable), None)?;
    Ok(if decision.reachable { 0 } else { EXIT_NO })
}

fn cmd_components(graph: &GraphArg, from: Option<&Path>, params: &ParamArgs, opts: &OracleOptions) -> Outcome {
    let g = load_graph(graph)?;
    let pq = match (params.p, params.q, from) {
        (Some(p), Some(q), _) => CircularParams::new(p, q).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?,
        (_, _, Some(path)) => load_colouring(&g, path, params)?.params(),
        _ => return Err(Failure::new(EXIT_USAGE, "--components needs -p and -q or --from")),
    };
    let summary = components_summary(&g, pq, opts.budget).map_err(oracle_failure)?;
    emit(&format!("{summary}\n"), None)?;
    Ok(0)
}

fn hardness_failure(e: HardnessError) -> Failure {
    let code = match e {
        HardnessError::ParamOutOfRange { .. } => EXIT_UNSUPPORTED,
        _ => EXIT_INVALID,
    };
    Failure::new(code, e.to_string())
}

/// Reads the two k-colourings, stored as `(k,1)`-colourings.
fn load_reduction(graph: &GraphArg, pair: &PairArgs, params: &RequiredParams) -> Result<ReductionInstance, Failure> {
    let g = load_graph(graph)?;
    let pq = CircularParams::new(params.p, params.q).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    if pq.below_four() {
        return Err(Failure::new(
            EXIT_UNSUPPORTED,
            format!("parameters {pq} have p/q < 4; use `reconfigure` instead"),
        ));
    }
    let none = ParamArgs { p: None, q: None };
    let f = load_colouring(&g, &pair.from, &none)?;
    let h = load_colouring(&g, &pair.to, &none)?;
    for c in [&f, &h] {
        if c.params().q() != 1 || c.params().p() != pq.k() {
            return Err(Failure::new(
                EXIT_USAGE,
                format!("expected {}-colourings stored as ({},1), found {}", pq.k(), pq.k(), c.params()),
            ));
        }
    }
    build_reduction(&g, f.colours(), h.colours(), pq).map_err(hardness_failure)
}

fn cmd_reduce(graph: &GraphArg, pair: &PairArgs, params: &RequiredParams, prefix: &Path) -> Outcome {
    let red = load_reduction(graph, pair, params)?;
    let with_suffix = |suffix: &str| {
        let mut name = prefix.as_os_str().to_owned();
        name.push(suffix);
        PathBuf::from(name)
    };
    emit(&write_graph(red.graph()), Some(&with_suffix(".graph")))?;
    emit(&write_colouring(red.alpha()), Some(&with_suffix(".alpha.col")))?;
    emit(&write_colouring(red.beta()), Some(&with_suffix(".beta.col")))?;
    emit(&pretty(&red.metadata()), Some(&with_suffix(".meta.json")))?;
    emit(
        &format!("vertices={} edges={}\n", red.graph().vertex_count(), red.graph().edge_count()),
        None,
    )?;
    Ok(0)
}

fn parse_steps(path: &Path, text: &str) -> Result<Vec<(usize, usize)>, Failure> {
    let bad = |msg: &str| Failure::new(EXIT_PARSE, format!("{}: {msg}", path.display()));
    let doc: Value = serde_json::from_str(text).map_err(|e| bad(&e.to_string()))?;
    let steps = doc
        .get("sequence")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("expected an object with a `sequence` array"))?;
    steps
        .iter()
        .map(|s| match s.as_array().map(Vec::as_slice) {
            Some([v, c]) => match (v.as_u64(), c.as_u64()) {
                (Some(v), Some(c)) => Ok((v as usize, c as usize)),
                _ => Err(bad("steps must be pairs of non-negative integers")),
            },
            _ => Err(bad("steps must be pairs [vertex, colour]")),
        })
        .collect()
}

fn cmd_lift(graph: &GraphArg, pair: &PairArgs, params: &RequiredParams, sequence: &Path, out: Option<&Path>) -> Outcome {
    let red = load_reduction(graph, pair, params)?;
    let ksteps = parse_steps(sequence, &read(sequence)?)?;
    let steps = lift_sequence(&red, &ksteps).map_err(hardness_failure)?;
    let doc = json!({ "sequence": steps.iter().map(|s| [s.vertex, s.colour]).collect::<Vec<_>>() });
    emit(&pretty(&doc), out)?;
    Ok(0)
}

fn check_k(k: usize, max: usize) -> Result<(), Failure> {
    if k < 2 {
        return Err(Failure::new(EXIT_USAGE, "k must be at least 2"));
    }
    if k > max {
        return Err(Failure::new(EXIT_UNSUPPORTED, format!("k = {k} exceeds the supported maximum {max}")));
    }
    Ok(())
}

fn cmd_cycles(graph: &GraphArg, k: usize) -> Outcome {
    check_k(k, 20)?;
    let g = load_graph(graph)?;
    let count = count_cycles_mod_k(&g, k);
    let bound = threshold(k);
    let verdict = if count < bound { "below" } else { "at-or-above" };
    emit(&format!("count={count} threshold={bound} verdict={verdict}\n"), None)?;
    Ok(0)
}

fn cmd_sparse_colour(graph: &GraphArg, k: usize, out: Option<&Path>) -> Outcome {
    check_k(k, MAX_K)?;
    let g = load_graph(graph)?;
    match colour_sparse_cycles(&g, k) {
        Ok(colours) => {
            let pq = CircularParams::new(k, 1).expect("k >= 2");
            let c = CircularColouring::new(pq, colours).expect("colours below k");
            emit(&write_colouring(&c), out)?;
            Ok(0)
        }
        Err(ChromaticError::Failure(w)) => {
            let (u, v) = w.edge;
            emit(
                &format!("failure step={} edge={u} {v} count={} threshold={}\n", w.step, w.count, w.threshold),
                None,
            )?;
            Ok(EXIT_NO)
        }
        Err(ChromaticError::UnsupportedK(_)) => Err(Failure::new(EXIT_UNSUPPORTED, format!("k = {k} is not supported"))),
        Err(e) => Err(Failure::new(EXIT_NO, e.to_string())),
    }
}

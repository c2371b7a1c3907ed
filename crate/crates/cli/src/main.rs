use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rainbow_core::algebra::{stick_sequence_search, StickRule};
use rainbow_core::explorer::{forall_check, ColoringFamily, ForallReport, Verdict};
use rainbow_core::patterns::{
    broom_pattern, caterpillar_pattern, enumerate_free_trees, path_pattern, spider_pattern, star_pattern,
    CaterpillarSpec,
};
use rainbow_core::rainbow::{count_rainbow_cycles, count_rainbow_tree, find_rainbow_cycle, find_rainbow_tree};
use rainbow_core::verify::{overall_verdict, run_all, RunConfig, RunVerdict};
use rainbow_core::{
    ColorId, ColoredGraph, ConstructionKind, ConstructionSpec, Error, SearchBudget, SearchOptions, SearchOutcome,
    TreePattern,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "rainbow", version, about = "Rainbow subgraph search in properly edge-colored graphs")]
struct Cli {
    /// Worker threads for searches (1 runs inline, 0 uses all cores).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Seed for randomized constructions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write the JSON result to this file.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Print a one-line human summary instead of JSON.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a named edge-colored graph.
    Construct(ConstructArgs),
    /// Emit a tree pattern, or all trees with a given number of edges.
    Pattern(PatternArgs),
    /// Look for (or count) rainbow copies of a tree or cycle in a graph.
    Search(SearchArgs),
    /// Solve the stick-sequence problem in GF(2)^d.
    Stick(StickArgs),
    /// Check a predicate on every proper coloring class of K_n.
    Explore(ExploreArgs),
    /// Run registered claims.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct ConstructArgs {
    /// kstar, dstar, k6, kminus, roundrobin, or random.
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 0)]
    param: u32,
    /// Edge probability for `random`.
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Output file; a `.dot` extension selects DOT.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Path,
    Star,
    Broom,
    Caterpillar,
    Spider,
    Enumerate,
}

#[derive(Args, Debug)]
struct PatternArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Edge count (path, star, broom, enumerate).
    #[arg(long)]
    k: Option<usize>,
    /// Broom handle length.
    #[arg(long)]
    l: Option<usize>,
    /// Caterpillar leaf counts, e.g. `3,1,2`.
    #[arg(long, value_delimiter = ',')]
    leaves: Vec<usize>,
    /// Spider: number of subdivided spokes.
    #[arg(long)]
    t: Option<usize>,
    /// Spider: total number of spokes.
    #[arg(long)]
    spokes: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, conflicts_with = "cycle", required_unless_present = "cycle")]
    pattern: Option<PathBuf>,
    /// Search for a rainbow cycle of this length instead of a tree.
    #[arg(long)]
    cycle: Option<usize>,
    #[arg(long)]
    count: bool,
    /// Node budget per search.
    #[arg(long)]
    budget: Option<u64>,
    /// Pin the search to start at this vertex (only sound on vertex-transitive hosts).
    #[arg(long, conflicts_with = "cycle")]
    anchor: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Rule {
    Strict,
    Membership,
}

#[derive(Args, Debug)]
struct StickArgs {
    #[arg(long)]
    d: usize,
    /// Report every canonical witness.
    #[arg(long)]
    all: bool,
    #[arg(long, value_enum, default_value = "strict")]
    rule: Rule,
}

#[derive(Args, Debug)]
struct ExploreArgs {
    #[arg(long)]
    n: usize,
    /// Range over 1-factorizations instead of all proper colorings.
    #[arg(long)]
    factorizations: bool,
    /// Largest palette for proper colorings (default: all edges distinct).
    #[arg(long)]
    max_colors: Option<usize>,
    /// no-rainbow-path:K, rainbow-path:K, or no-rainbow-tree:FILE.
    #[arg(long)]
    predicate: String,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Glob over claim ids, e.g. `D-*`.
    #[arg(long)]
    claim: Option<String>,
    #[arg(long)]
    budget: Option<u64>,
    /// Write the report array to this file.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Exit {
    Ok = 0,
    Refuted = 1,
    Usage = 2,
    Refused = 3,
}

struct Failure {
    exit: Exit,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { exit: Exit::Usage, kind: "usage", message: message.into() }
    }

    fn input(message: impl Into<String>) -> Self {
        Self { exit: Exit::Usage, kind: "input", message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        use rainbow_core::explorer::ExplorerError as X;
        use rainbow_core::GraphError as G;
        let refused = matches!(
            e,
            Error::Graph(G::SizeLimit { .. })
                | Error::Explorer(X::FactorizationSize(_) | X::ColoringSize(_) | X::CanonicalSize(_))
        );
        if refused {
            Self { exit: Exit::Refused, kind: "size-cap", message: e.to_string() }
        } else {
            Self { exit: Exit::Usage, kind: "invalid", message: e.to_string() }
        }
    }
}

fn core<E: Into<Error>>(e: E) -> Failure {
    Failure::from(e.into())
}

struct Output {
    json: Value,
    summary: String,
    exit: Exit,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<ColoredGraph, Failure> {
    ColoredGraph::from_json(&read(path)?).map_err(core)
}

fn load_pattern(path: &Path) -> Result<TreePattern, Failure> {
    TreePattern::from_json(&read(path)?).map_err(core)
}

fn random_graph(seed: u64, n: u32, density: f64) -> Result<ColoredGraph, Failure> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Failure::usage(format!("--density must lie in [0, 1], got {density}")));
    }
    let n = n as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    pairs.shuffle(&mut rng);
    let mut used = vec![vec![false; n.max(1)]; n];
    let mut edges = Vec::new();
    for (a, b) in pairs {
        if !rng.gen_bool(density) {
            continue;
        }
        let free: Vec<usize> = (0..n).filter(|&c| !used[a][c] && !used[b][c]).collect();
        if let Some(&c) = free.choose(&mut rng) {
            used[a][c] = true;
            used[b][c] = true;
            edges.push((a, b, ColorId(c as u32)));
        }
    }
    ColoredGraph::new(n, edges).map_err(core)
}

fn construct(args: &ConstructArgs, seed: u64) -> Result<Output, Failure> {
    let g = if args.kind == "random" {
        random_graph(seed, args.param, args.density)?
    } else {
        let kind: ConstructionKind =
            args.kind.parse().map_err(|e: rainbow_core::GraphError| Failure::usage(e.to_string()))?;
        ConstructionSpec { kind, parameter: args.param }.build().map_err(core)?
    };
    let summary = format!(
        "{} {}: {} vertices, {} edges, {} colors",
        args.kind,
        args.param,
        g.n(),
        g.edge_count(),
        g.color_count()
    );
    let json = match &args.out {
        Some(path) => {
            let dot = path.extension().is_some_and(|e| e == "dot");
            write(path, &if dot { g.to_dot() } else { g.to_json() })?;
            json!({
                "kind": args.kind,
                "param": args.param,
                "n": g.n(),
                "edge_count": g.edge_count(),
                "color_count": g.color_count(),
                "out": path.display().to_string(),
            })
        }
        None => serde_json::to_value(g.to_json_value()).expect("graph serializes"),
    };
    Ok(Output { json, summary, exit: Exit::Ok })
}

fn need(v: Option<usize>, flag: &str, family: Family) -> Result<usize, Failure> {
    v.ok_or_else(|| Failure::usage(format!("--{flag} is required for --family {family:?}").to_lowercase()))
}

fn pattern(args: &PatternArgs) -> Result<Output, Failure> {
    let one = |t: TreePattern| serde_json::to_value(t.to_json_value()).expect("pattern serializes");
    let (json, summary) = match args.family {
        Family::Enumerate => {
            let k = need(args.k, "k", args.family)?;
            let trees = enumerate_free_trees(k).map_err(core)?;
            let summary = format!("{} trees with {k} edges", trees.len());
            (Value::Array(trees.into_iter().map(one).collect()), summary)
        }
        family => {
            let t = match family {
                Family::Path => path_pattern(need(args.k, "k", family)?),
                Family::Star => star_pattern(need(args.k, "k", family)?),
                Family::Broom => broom_pattern(need(args.k, "k", family)?, need(args.l, "l", family)?),
                Family::Caterpillar => {
                    if args.leaves.is_empty() {
                        return Err(Failure::usage("--leaves is required for --family caterpillar"));
                    }
                    caterpillar_pattern(&CaterpillarSpec::new(args.leaves.clone()))
                }
                Family::Spider => spider_pattern(need(args.t, "t", family)?, need(args.spokes, "spokes", family)?),
                Family::Enumerate => unreachable!(),
            }
            .map_err(core)?;
            let summary = format!("{} vertices, {} edges", t.vertex_count(), t.edge_count());
            (one(t), summary)
        }
    };
    if let Some(path) = &args.out {
        write(path, &serde_json::to_string(&json).expect("json"))?;
    }
    Ok(Output { json, summary, exit: Exit::Ok })
}

fn search(args: &SearchArgs, threads: usize) -> Result<Output, Failure> {
    let g = load_graph(&args.graph)?;
    let mut opts = SearchOptions::with_budget(args.budget.unwrap_or(SearchBudget::DEFAULT.max_nodes)).threads(threads);
    if let Some(a) = args.anchor {
        opts = opts.anchored(a);
    }
    let (status, witness, count, nodes) = match (args.cycle, &args.pattern) {
        (Some(len), _) if args.count => {
            let r = count_rainbow_cycles(&g, len, &opts).map_err(core)?;
            counted(r.outcome, r.nodes_visited)
        }
        (Some(len), _) => {
            let r = find_rainbow_cycle(&g, len, &opts).map_err(core)?;
            let w = r.outcome.found().map(|c| serde_json::to_value(c).expect("json"));
            (r.outcome.status(), w, None, r.nodes_visited)
        }
        (None, Some(p)) => {
            let t = load_pattern(p)?;
            if args.count {
                let r = count_rainbow_tree(&g, &t, &opts).map_err(core)?;
                counted(r.outcome, r.nodes_visited)
            } else {
                let r = find_rainbow_tree(&g, &t, &opts).map_err(core)?;
                let w = r.outcome.found().map(|e| serde_json::to_value(e).expect("json"));
                (r.outcome.status(), w, None, r.nodes_visited)
            }
        }
        (None, None) => return Err(Failure::usage("either --pattern or --cycle is required")),
    };
    let exit = if status == "budget" { Exit::Refused } else { Exit::Ok };
    let summary = match count {
        Some(c) => format!("{status}: {c} rainbow copies, {nodes} nodes"),
        None => format!("{status}, {nodes} nodes"),
    };
    let json = json!({"status": status, "witness": witness, "count": count, "nodes_visited": nodes});
    Ok(Output { json, summary, exit })
}

fn counted(outcome: SearchOutcome<u128>, nodes: u64) -> (&'static str, Option<Value>, Option<u64>, u64) {
    match outcome {
        SearchOutcome::Found(c) => (if c > 0 { "found" } else { "none" }, None, Some(c as u64), nodes),
        other => (other.status(), None, None, nodes),
    }
}

fn stick(args: &StickArgs) -> Result<Output, Failure> {
    let rule = match args.rule {
        Rule::Strict => StickRule::Strict,
        Rule::Membership => StickRule::Membership,
    };
    let r = stick_sequence_search(args.d, rule, args.all).map_err(core)?;
    let status = if r.is_sat() { "sat" } else { "unsat" };
    let mut json = json!({
        "d": args.d,
        "status": status,
        "witness": r.witness().map(|w| w.vectors.clone()),
        "nodes": r.nodes,
        "rule": rule,
    });
    if args.all {
        json["witnesses"] = json!(r.witnesses.iter().map(|w| w.vectors.clone()).collect::<Vec<_>>());
    }
    let summary = format!("d = {}: {status} ({} nodes)", args.d, r.nodes);
    Ok(Output { json, summary, exit: Exit::Ok })
}

enum Predicate {
    HasPath(usize),
    NoPath(usize),
    NoTree(TreePattern),
}

fn parse_predicate(text: &str) -> Result<Predicate, Failure> {
    let (name, arg) =
        text.split_once(':').ok_or_else(|| Failure::usage(format!("predicate '{text}' must look like NAME:ARG")))?;
    let k = || arg.parse::<usize>().map_err(|_| Failure::usage(format!("'{arg}' is not an edge count")));
    match name {
        "rainbow-path" => Ok(Predicate::HasPath(k()?)),
        "no-rainbow-path" => Ok(Predicate::NoPath(k()?)),
        "no-rainbow-tree" => Ok(Predicate::NoTree(load_pattern(Path::new(arg))?)),
        other => Err(Failure::usage(format!("unknown predicate '{other}'"))),
    }
}

fn explore(args: &ExploreArgs, threads: usize) -> Result<Output, Failure> {
    let predicate = parse_predicate(&args.predicate)?;
    let (tree, want) = match predicate {
        Predicate::HasPath(k) => (path_pattern(k).map_err(core)?, true),
        Predicate::NoPath(k) => (path_pattern(k).map_err(core)?, false),
        Predicate::NoTree(t) => (t, false),
    };
    let family = if args.factorizations {
        ColoringFamily::OneFactorizations { n: args.n }
    } else {
        ColoringFamily::ProperColorings {
            n: args.n,
            max_colors: args.max_colors.unwrap_or(args.n * args.n.saturating_sub(1) / 2),
        }
    };
    let opts = SearchOptions::with_budget(args.budget.unwrap_or(SearchBudget::DEFAULT.max_nodes)).threads(threads);
    let mut failure = None;
    let report = forall_check(family, |g| match find_rainbow_tree(g, &tree, &opts) {
        Err(e) => {
            failure = Some(e);
            Verdict::Unknown("search error".into())
        }
        Ok(r) => match (r.outcome, want) {
            (SearchOutcome::BudgetExceeded, _) => Verdict::Unknown("budget".into()),
            (SearchOutcome::Found(_), true) | (SearchOutcome::NotFound, false) => Verdict::Holds,
            (SearchOutcome::Found(e), false) => Verdict::Fails(serde_json::to_string(&e).expect("json")),
            (SearchOutcome::NotFound, true) => Verdict::Fails("no rainbow copy".into()),
        },
    })
    .map_err(core)?;
    if let Some(e) = failure {
        return Err(core(e));
    }
    let (exit, summary) = match &report {
        ForallReport::HoldsForAll { classes } => (Exit::Ok, format!("holds for all {classes} classes")),
        ForallReport::Counterexample { index, .. } => (Exit::Refuted, format!("counterexample at class {index}")),
        ForallReport::Inconclusive { index, reason } => {
            (Exit::Refused, format!("inconclusive at class {index}: {reason}"))
        }
    };
    let mut json = json!({
        "n": args.n,
        "family": if args.factorizations { "factorizations" } else { "colorings" },
        "predicate": args.predicate,
    });
    if let ColoringFamily::ProperColorings { max_colors, .. } = family {
        json["max_colors"] = json!(max_colors);
    }
    let body = serde_json::to_value(&report).expect("json");
    for (k, v) in body.as_object().expect("object") {
        json[k] = v.clone();
    }
    Ok(Output { json, summary, exit })
}

fn verify(args: &VerifyArgs, threads: usize) -> Result<Output, Failure> {
    let config = RunConfig { budget: args.budget.map_or(SearchBudget::DEFAULT, SearchBudget::new), threads };
    let reports = run_all(args.claim.as_deref(), &config).map_err(core)?;
    if reports.is_empty() {
        return Err(Failure::usage(format!("no claim matches '{}'", args.claim.as_deref().unwrap_or("*"))));
    }
    let json = serde_json::to_value(&reports).expect("reports serialize");
    if let Some(path) = &args.json {
        write(path, &serde_json::to_string_pretty(&json).expect("json"))?;
    }
    let verdict = overall_verdict(&reports);
    let exit = match verdict {
        RunVerdict::Success => Exit::Ok,
        RunVerdict::Failure => Exit::Refuted,
        RunVerdict::Abstained => Exit::Refused,
    };
    let mut lines: Vec<String> = reports.iter().map(|r| r.summary_line()).collect();
    lines.push(format!(
        "{} claims, verdict {}",
        reports.len(),
        serde_json::to_value(verdict).expect("json").as_str().unwrap_or("?")
    ));
    Ok(Output { json, summary: lines.join("\n"), exit })
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Construct(a) => construct(a, cli.seed),
        Command::Pattern(a) => pattern(a),
        Command::Search(a) => search(a, cli.threads),
        Command::Stick(a) => stick(a),
        Command::Explore(a) => explore(a, cli.threads),
        Command::Verify(a) => verify(a, cli.threads),
    }
}

fn fail(f: Failure) -> ExitCode {
    eprintln!("{}", json!({"error": f.kind, "message": f.message}));
    ExitCode::from(f.exit as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(Failure::usage(e.to_string().trim_end())),
    };
    match run(&cli) {
        Ok(out) => {
            let text = serde_json::to_string(&out.json).expect("json");
            if let Some(path) = &cli.json_out {
                if let Err(f) = write(path, &text) {
                    return fail(f);
                }
            }
            let line = if cli.quiet { &out.summary } else { &text };
            let _ = writeln!(std::io::stdout().lock(), "{line}");
            ExitCode::from(out.exit as u8)
        }
        Err(f) => fail(f),
    }
}

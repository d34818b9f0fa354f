//! `mcplab`: sample, solve, audit and sweep colored random bipartite graphs.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or validation error,
//! 3 IO error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mcplab::audit::{dense_cut_witness, empty_cut_witness, lemma1_witness, lemma2_witness, SearchMode};
use mcplab::experiment::{self, emit_summary, parse_omega, parse_omega_list, Checks, ExperimentConfig, OutputFormat, ProfileSuite};
use mcplab::matcher::MatchError;
use mcplab::oracle::{enumerate_mcp_with_limit, DEFAULT_DP_LIMIT};
use mcplab::sampler::threshold_p;
use mcplab::{
    achieve_profile, default_constants, expansion_trace, isolated_color_vertices, max_matching, monochromatic_perfect_matching,
    parse_graph, profile_of, sample_graph, serialize_graph, ColorProfile, ColorSpec, ColoredBipartiteGraph, Matching, SampleParams,
    WalkFailure,
};

#[derive(Parser)]
#[command(
    name = "mcplab",
    version,
    about = "Color profiles of perfect matchings in random colored bipartite graphs"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Vertices per side.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Number of colors, uniform when --alpha is absent.
    #[arg(long, global = true)]
    q: Option<usize>,
    /// Color probabilities, e.g. 0.5,0.25,0.25.
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Comma-separated reals; `k*llog` means k ln ln n.
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega: Option<String>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file, stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or jsonl.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Sweep configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph at the threshold for --omega (or at --p) and write it.
    Gen {
        /// Edge probability, overriding the threshold formula.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Maximum matching over all colors, or a perfect matching in one color.
    Match {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        color: Option<usize>,
    },
    /// Reach a target color profile by alternating-cycle recoloring.
    Walk {
        #[arg(long)]
        graph: PathBuf,
        /// Per-color edge counts, e.g. 334,333,333.
        #[arg(long)]
        target: String,
    },
    /// Exact set of color profiles, one per line (small n).
    Mcp {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DP_LIMIT)]
        limit: usize,
    },
    /// Isolated vertices per color, plus optional witness search and expansion trace.
    Audit {
        #[arg(long)]
        graph: PathBuf,
        /// Color for the witness search and trace; the rarest observed color when absent.
        #[arg(long)]
        color: Option<usize>,
        #[arg(long, value_enum)]
        witness: Option<Witness>,
        /// Size of the A-side set S.
        #[arg(long, default_value_t = 1)]
        s: usize,
        /// Size of the B-side set (T, or Y for --witness concentrated).
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Size of X for low-degree and concentrated witnesses.
        #[arg(long, default_value_t = 1)]
        x: usize,
        /// Degree cut, degree lower bound or edge count, depending on --witness.
        #[arg(long, default_value_t = 1.0)]
        threshold: f64,
        /// Greedy empty-cut search; its negative answers prove nothing.
        #[arg(long)]
        heuristic: bool,
        /// Trace the expansion sets around a maximum matching.
        #[arg(long)]
        expansion: bool,
        /// Free coefficient of the small-set size used by the trace.
        #[arg(long, default_value_t = 10.0)]
        delta: f64,
    },
    /// Monte Carlo sweep over the omega grid.
    Sweep {
        /// corners, random:K or explicit:P;P.
        #[arg(long)]
        suite: Option<String>,
        /// Comma-separated subset of pm,walk,isolated,mcp.
        #[arg(long)]
        checks: Option<String>,
        /// Also write the per-omega summary table (CSV) here.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Fill the ms column; output is then no longer reproducible byte for byte.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Witness {
    LowDegree,
    Concentrated,
    Dense,
    Empty,
}

enum Failure {
    Check(String),
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn io_error(path: &Path, e: io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match &cli.command {
        Command::Gen { p } => gen(&cli.global, *p),
        Command::Match { graph, color } => matching(&cli.global, graph, *color),
        Command::Walk { graph, target } => walk(&cli.global, graph, target),
        Command::Mcp { graph, limit } => mcp(&cli.global, graph, *limit),
        Command::Audit {
            graph,
            color,
            witness,
            s,
            t,
            x,
            threshold,
            heuristic,
            expansion,
            delta,
        } => {
            let w = witness.map(|kind| WitnessQuery {
                kind,
                s: *s,
                t: *t,
                x: *x,
                threshold: *threshold,
                heuristic: *heuristic,
            });
            audit(&cli.global, graph, *color, w, *expansion, *delta)
        }
        Command::Sweep {
            suite,
            checks,
            summary,
            timings,
        } => sweep(&cli.global, suite.as_deref(), checks.as_deref(), summary.as_deref(), *timings),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Check(m) => eprintln!("check failed: {m}"),
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Io(m) => eprintln!("io error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn write_out(global: &Global, text: &[u8]) -> Outcome {
    match &global.out {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => io::stdout().write_all(text).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn write_json(global: &Global, value: &Value) -> Outcome {
    let mut text = serde_json::to_string(value).expect("json value serializes");
    text.push('\n');
    write_out(global, text.as_bytes())
}

fn read_graph(path: &Path) -> Result<ColoredBipartiteGraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_graph(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn colors(global: &Global) -> Result<Option<ColorSpec>, Failure> {
    match (&global.alpha, global.q) {
        (Some(text), q) => {
            let alphas = text
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("--alpha: not a number: {t:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            if q.is_some_and(|q| q != alphas.len()) {
                return Err(usage("--q disagrees with the length of --alpha"));
            }
            ColorSpec::new(alphas).map(Some).map_err(usage)
        }
        (None, Some(q)) => ColorSpec::uniform(q).map(Some).map_err(usage),
        (None, None) => Ok(None),
    }
}

fn pairs_json(g: &ColoredBipartiteGraph, m: &Matching) -> Value {
    Value::Array(m.pairs().map(|(a, b)| json!([a, b, g.color_of(a, b)])).collect())
}

fn gen(global: &Global, p: Option<f64>) -> Outcome {
    let n = global.n.ok_or_else(|| usage("gen needs --n"))?;
    let colors = colors(global)?.ok_or_else(|| usage("gen needs --q or --alpha"))?;
    let p = match p {
        Some(p) => p,
        None => {
            let omega = parse_omega(global.omega.as_deref().unwrap_or("0"), n).map_err(usage)?;
            threshold_p(n, omega, colors.alpha_min()).map_err(usage)?
        }
    };
    let params = SampleParams::new(n, p, colors.clone(), global.seed.unwrap_or(0)).map_err(usage)?;
    let g = sample_graph(&params).with_alphas(&colors).map_err(usage)?;
    log::info!("sampled n = {n}, p = {p}, {} edges", g.edge_count());
    write_out(global, serialize_graph(&g).as_bytes())
}

fn matching(global: &Global, path: &Path, color: Option<usize>) -> Outcome {
    let g = read_graph(path)?;
    match color {
        Some(c) => match monochromatic_perfect_matching(&g, c) {
            Ok(m) => write_json(
                global,
                &json!({ "color": c, "perfect": true, "size": m.size(), "matching": pairs_json(&g, &m) }),
            ),
            Err(MatchError::NoPerfectMatching(h)) => {
                write_json(global, &json!({ "color": c, "perfect": false, "hall_violation": h }))?;
                Err(Failure::Check(format!("no perfect matching in color {c}")))
            }
            Err(e) => Err(usage(e)),
        },
        None => {
            let all: Vec<usize> = (1..=g.q()).collect();
            let m = max_matching(&g, &all).map_err(usage)?;
            let perfect = m.is_perfect();
            let mut out = json!({ "perfect": perfect, "size": m.size(), "matching": pairs_json(&g, &m) });
            if perfect {
                out["profile"] = json!(profile_of(&g, &m).map_err(usage)?.to_string());
            }
            write_json(global, &out)?;
            if perfect {
                Ok(())
            } else {
                Err(Failure::Check(format!("maximum matching has size {} < {}", m.size(), g.n())))
            }
        }
    }
}

fn walk(global: &Global, path: &Path, target: &str) -> Outcome {
    let g = read_graph(path)?;
    let target = ColorProfile::parse(target).map_err(usage)?;
    match achieve_profile(&g, &target, global.seed.unwrap_or(0)) {
        Ok(s) => write_json(
            global,
            &json!({ "success": true, "target": target.to_string(), "report": s.report, "matching": pairs_json(&g, &s.matching) }),
        ),
        Err(WalkFailure::InvalidTarget(m)) => Err(usage(format!("target {target}: {m}"))),
        Err(f) => {
            let mut out = json!({ "success": false, "target": target.to_string(), "error": f.to_string(), "report": f.report() });
            if let WalkFailure::StepExhausted { reached, .. } = &f {
                out["reached"] = json!(reached.to_string());
            }
            write_json(global, &out)?;
            Err(Failure::Check(f.to_string()))
        }
    }
}

fn mcp(global: &Global, path: &Path, limit: usize) -> Outcome {
    let g = read_graph(path)?;
    let set = enumerate_mcp_with_limit(&g, limit).map_err(usage)?;
    let mut text = String::new();
    for p in &set {
        text.push_str(&p.to_string());
        text.push('\n');
    }
    write_out(global, text.as_bytes())
}

struct WitnessQuery {
    kind: Witness,
    s: usize,
    t: usize,
    x: usize,
    threshold: f64,
    heuristic: bool,
}

fn audit(global: &Global, path: &Path, color: Option<usize>, witness: Option<WitnessQuery>, expansion: bool, delta: f64) -> Outcome {
    let g = read_graph(path)?;
    let mut per_color = Vec::new();
    let mut fewest_edges = (usize::MAX, 1);
    for c in 1..=g.q() {
        let (a, b) = isolated_color_vertices(&g, c).map_err(usage)?;
        let edges: usize = (0..g.n()).map(|v| g.color_degree_a(v, c)).sum();
        fewest_edges = fewest_edges.min((edges, c));
        per_color.push(
            json!({ "color": c, "edges": edges, "isolated_a": a, "isolated_b": b, "corner_excluded": !a.is_empty() || !b.is_empty() }),
        );
    }
    let color = color.unwrap_or(fewest_edges.1);
    let mut out = json!({ "n": g.n(), "q": g.q(), "colors": per_color, "color": color });
    if let Some(w) = witness {
        let found = match w.kind {
            Witness::LowDegree => json!(lemma1_witness(&g, color, w.s, w.t, w.x, w.threshold).map_err(usage)?),
            Witness::Concentrated => json!(lemma2_witness(&g, color, w.x, w.t, w.threshold).map_err(usage)?),
            Witness::Dense => json!(dense_cut_witness(&g, color, w.s, w.t, w.threshold).map_err(usage)?),
            Witness::Empty => {
                let mode = if w.heuristic {
                    SearchMode::Heuristic
                } else {
                    SearchMode::Exhaustive
                };
                json!(empty_cut_witness(&g, color, w.s, w.t, mode).map_err(usage)?)
            }
        };
        out["witness"] = found;
    }
    if expansion {
        let all: Vec<usize> = (1..=g.q()).collect();
        let m = max_matching(&g, &all).map_err(usage)?;
        if !m.is_perfect() {
            write_json(global, &out)?;
            return Err(Failure::Check("expansion trace needs a perfect matching".into()));
        }
        let alpha_min = g
            .alphas()
            .map_or(1.0 / g.q() as f64, |a| a.iter().copied().fold(f64::INFINITY, f64::min));
        let consts = default_constants(g.n(), g.q(), alpha_min, delta, 1.0).map_err(usage)?;
        let trace = expansion_trace(&g, &m, color, &consts, None).map_err(usage)?;
        out["constants"] = json!(consts);
        out["expansion"] = json!(trace);
    }
    write_json(global, &out)
}

fn sweep(global: &Global, suite: Option<&str>, checks: Option<&str>, summary: Option<&Path>, timings: bool) -> Outcome {
    let mut config = match &global.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            ExperimentConfig::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => {
            let n = global.n.ok_or_else(|| usage("sweep needs --n or --config"))?;
            ExperimentConfig::new(n, ColorSpec::uniform(2).map_err(usage)?)
        }
    };
    if let Some(n) = global.n {
        config.n = n;
    }
    if let Some(c) = colors(global)? {
        config.colors = c;
    }
    if let Some(text) = &global.omega {
        config.omega_grid = parse_omega_list(text, config.n).map_err(usage)?;
    }
    if let Some(t) = global.trials {
        config.trials = t;
    }
    if let Some(s) = global.seed {
        config.base_seed = s;
    }
    if let Some(w) = global.workers {
        config.workers = w;
    }
    if let Some(s) = suite {
        config.profile_suite = s.parse::<ProfileSuite>().map_err(usage)?;
    }
    if let Some(c) = checks {
        config.checks = c.parse::<Checks>().map_err(usage)?;
    }
    config.record_timings |= timings;
    let format: OutputFormat = global.format.as_deref().unwrap_or("csv").parse().map_err(usage)?;
    config.validate().map_err(usage)?;

    let result = experiment::sweep(&config).map_err(usage)?;
    let mut buf = Vec::new();
    experiment::emit(&result.records, format, &mut buf).map_err(usage)?;
    write_out(global, &buf)?;
    for s in &result.summary {
        log::info!(
            "omega {:.4} {:<12} {}/{} = {:.3}",
            s.omega,
            s.check,
            s.successes,
            s.count,
            s.fraction()
        );
    }
    if let Some(path) = summary {
        let mut buf = Vec::new();
        emit_summary(&result.summary, &mut buf).map_err(usage)?;
        fs::write(path, buf).map_err(|e| io_error(path, e))?;
    }
    Ok(())
}

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use quborouter::expansion::{expand, ExpansionDocument, ExpansionOptions, SliceLimit, WeightOverride};
use quborouter::formulation::multi::DEFAULT_CORRIDOR;
use quborouter::formulation::{subdivide_for_speed, FleetDocument, FleetProblem};
use quborouter::graph::{emit_graph, parse_graph, GraphDocument, RouteQuery};
use quborouter::harness::gen::{generate, GenOptions, GraphFamily};
use quborouter::harness::problem::{ProblemFile, ProblemSource};
use quborouter::harness::{
    problem_stats, read_json, read_text, solve_problem, to_json_text, verify, write_output, ReportFile,
};
use quborouter::solvers::{AnnealConfig, Backend, QaoaConfig, SolveConfig};
use quborouter::Digraph;

/// Compile routing problems on weighted digraphs to QUBO, solve them and check
/// the answers against classical oracles.
///
/// Backend parallelism is capped by the QUBOROUTER_THREADS environment variable.
#[derive(Parser)]
#[command(name = "quborouter", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a routing problem to a QUBO problem file.
    #[command(subcommand)]
    Compile(CompileCommand),
    /// Build the time-expanded graph of a route query.
    Expand(ExpandArgs),
    /// Minimize a compiled problem.
    Solve(SolveArgs),
    /// Decode a solve report and compare it with a classical optimum.
    ///
    /// Exit status: 0 optimal or feasible, 2 infeasible, 3 unverified, 1 error.
    Verify(VerifyArgs),
    /// Print size and coefficient statistics of a problem file.
    Stats(StatsArgs),
    /// Generate seeded random graphs.
    Gen(GenArgs),
}

#[derive(Args)]
struct Output {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace the output file if it exists.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum CompileCommand {
    /// One variable per arc.
    Single {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        origin: String,
        #[arg(long)]
        dest: String,
        /// Penalty weight; defaults to the total arc weight plus one.
        #[arg(long)]
        penalty: Option<f64>,
        /// Use the linear flow-balance term instead of the squared one.
        #[arg(long)]
        literal_flow_balance: bool,
        #[command(flatten)]
        output: Output,
    },
    /// One variable per (slice, vertex) of a time-expanded graph.
    Sliced {
        /// Expansion file written by `expand`.
        #[arg(long)]
        expansion: PathBuf,
        /// JSON list of {"c", "s", "t", "w"} weight replacements.
        #[arg(long)]
        weights_override: Option<PathBuf>,
        /// Penalty weight; defaults to the sum of distinct arc weights plus one.
        #[arg(long)]
        penalty: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Closed tour through every vertex.
    Tsp {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        start: String,
        /// Keep every (slice, vertex) variable instead of pruning by reachability.
        #[arg(long)]
        no_prune: bool,
        /// Penalty weight; defaults to the total arc weight plus one.
        #[arg(long)]
        penalty: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Several vehicles without vertex collisions.
    Multi {
        #[arg(long)]
        graph: PathBuf,
        /// JSON list of {"id", "origin", "dest"}, or {"vehicles": [...], "c_max": K}.
        #[arg(long)]
        fleet: PathBuf,
        /// Number of shortest paths whose union forms each vehicle's subgraph.
        #[arg(long, default_value_t = DEFAULT_CORRIDOR, conflicts_with = "full_graph")]
        corridor: usize,
        /// Let every vehicle use the whole graph.
        #[arg(long)]
        full_graph: bool,
        /// JSON object mapping arc labels "s->t" to step counts.
        #[arg(long)]
        steps: Option<PathBuf>,
        /// Shared number of steps; overrides the fleet file.
        #[arg(long)]
        cmax: Option<usize>,
        /// Penalty weight; defaults to a bound on the joint route weight plus one.
        #[arg(long)]
        penalty: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    origin: String,
    #[arg(long)]
    dest: String,
    /// Slice budget: stop here if the destination has not been isolated.
    #[arg(long)]
    cmax: Option<usize>,
    /// Build exactly --cmax steps, waiting at the destination once reached.
    #[arg(long, requires = "cmax")]
    exact: bool,
    /// Drop vertices that cannot reach the destination in the remaining steps.
    #[arg(long, conflicts_with = "no_backward_prune")]
    backward_prune: bool,
    /// Keep every reachable vertex (the default).
    #[arg(long)]
    no_backward_prune: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, value_enum)]
    backend: Backend,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// QAOA layers.
    #[arg(long = "p")]
    depth: Option<usize>,
    /// QAOA grid points per angle for the first layer.
    #[arg(long)]
    grid: Option<usize>,
    /// QAOA coordinate-descent rounds per depth.
    #[arg(long)]
    descent_iters: Option<usize>,
    /// QAOA measurement samples.
    #[arg(long)]
    shots: Option<usize>,
    /// Annealing sweeps per restart.
    #[arg(long)]
    sweeps: Option<usize>,
    /// Annealing restarts.
    #[arg(long)]
    restarts: Option<usize>,
    /// Annealing start temperature.
    #[arg(long)]
    t_hi: Option<f64>,
    /// Annealing final temperature.
    #[arg(long)]
    t_lo: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    report: PathBuf,
    /// Also write the verdict to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, requires = "out")]
    force: bool,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    problem: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: GraphFamily,
    /// Vertex count, or grid width.
    #[arg(long)]
    size: usize,
    /// Grid height; defaults to the width.
    #[arg(long)]
    height: Option<usize>,
    /// Total arc count for the connected family; defaults to twice the vertex count.
    #[arg(long)]
    arcs: Option<usize>,
    /// Weights are integers from 1 to this value.
    #[arg(long, default_value_t = 9)]
    max_weight: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write this many graphs with seeds seed, seed+1, … into the --out directory.
    #[arg(long)]
    count: Option<usize>,
    #[command(flatten)]
    output: Output,
}

fn load_graph(path: &Path) -> Result<Digraph> {
    parse_graph(&read_text(path)?).with_context(|| format!("{}", path.display()))
}

impl Output {
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => write_output(path, text, self.force)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Compile(c) => compile(c).map(|_| 0),
        Command::Expand(a) => {
            let g = load_graph(&a.graph)?;
            let limit = match (a.cmax, a.exact) {
                (None, _) => SliceLimit::Auto,
                (Some(k), false) => SliceLimit::Hint(k),
                (Some(k), true) => SliceLimit::Exact(k),
            };
            let opts = ExpansionOptions {
                limit,
                backward_prune: a.backward_prune && !a.no_backward_prune,
            };
            let x = expand(&g, &RouteQuery::new(a.origin, a.dest), opts)?;
            a.output.emit(&to_json_text(&ExpansionDocument::from_expansion(&x)))?;
            Ok(0)
        }
        Command::Solve(a) => {
            let problem: ProblemFile = read_json(&a.problem)?;
            let mut anneal = AnnealConfig::default();
            let mut qaoa = QaoaConfig::default();
            anneal.sweeps = a.sweeps.unwrap_or(anneal.sweeps);
            anneal.restarts = a.restarts.unwrap_or(anneal.restarts);
            anneal.t_hi = a.t_hi;
            anneal.t_lo = a.t_lo;
            qaoa.depth = a.depth.unwrap_or(qaoa.depth);
            qaoa.grid = a.grid.unwrap_or(qaoa.grid);
            qaoa.descent_iters = a.descent_iters.unwrap_or(qaoa.descent_iters);
            qaoa.shots = a.shots.unwrap_or(qaoa.shots);
            let config = SolveConfig {
                backend: a.backend,
                seed: a.seed,
                anneal,
                qaoa,
            };
            let report = solve_problem(&problem, &config)?;
            a.output.emit(&to_json_text(&report))?;
            Ok(0)
        }
        Command::Verify(a) => {
            let problem: ProblemFile = read_json(&a.problem)?;
            let report: ReportFile = read_json(&a.report)?;
            let verdict = verify(&problem, &report)?;
            let text = to_json_text(&verdict);
            print!("{text}");
            if let Some(out) = &a.out {
                write_output(out, &text, a.force)?;
            }
            Ok(verdict.status.exit_code() as u8)
        }
        Command::Stats(a) => {
            let problem: ProblemFile = read_json(&a.problem)?;
            print!("{}", to_json_text(&problem_stats(&problem)?));
            Ok(0)
        }
        Command::Gen(a) => {
            let opts = GenOptions {
                max_weight: a.max_weight,
                arcs: a.arcs,
            };
            match a.count {
                None => {
                    let g = generate(a.family, a.size, a.height, a.seed, opts);
                    a.output.emit(&emit_graph(&g))?;
                }
                Some(count) => {
                    let Some(dir) = &a.output.out else {
                        bail!("--count needs --out naming a directory");
                    };
                    std::fs::create_dir_all(dir).with_context(|| format!("{}", dir.display()))?;
                    let family = serde_json::to_value(a.family)?;
                    for k in 0..count as u64 {
                        let seed = a.seed + k;
                        let g = generate(a.family, a.size, a.height, seed, opts);
                        let name = format!("{}-{}-{seed}.json", family.as_str().unwrap_or("graph"), a.size);
                        write_output(&dir.join(name), &emit_graph(&g), a.output.force)?;
                    }
                }
            }
            Ok(0)
        }
    }
}

fn compile(c: CompileCommand) -> Result<()> {
    let (source, penalty, output) = match c {
        CompileCommand::Single {
            graph,
            origin,
            dest,
            penalty,
            literal_flow_balance,
            output,
        } => {
            let g = load_graph(&graph)?;
            let source = ProblemSource::Single {
                graph: GraphDocument::from_graph(&g),
                origin,
                dest,
                literal_flow_balance,
            };
            (source, penalty, output)
        }
        CompileCommand::Sliced {
            expansion,
            weights_override,
            penalty,
            output,
        } => {
            let doc: ExpansionDocument = read_json(&expansion)?;
            let mut x = doc.to_expansion::<f64>()?;
            if let Some(path) = weights_override {
                let ov: Vec<WeightOverride> = read_json(&path)?;
                let ov: Vec<_> = ov.into_iter().map(|o| (o.c, o.s, o.t, o.w)).collect();
                x = x.with_weight_overrides(&ov)?;
            }
            let source = ProblemSource::Sliced {
                expansion: ExpansionDocument::from_expansion(&x),
            };
            (source, penalty, output)
        }
        CompileCommand::Tsp {
            graph,
            start,
            no_prune,
            penalty,
            output,
        } => {
            let g = load_graph(&graph)?;
            let source = ProblemSource::Tsp {
                graph: GraphDocument::from_graph(&g),
                start,
                prune: !no_prune,
            };
            (source, penalty, output)
        }
        CompileCommand::Multi {
            graph,
            fleet,
            corridor,
            full_graph,
            steps,
            cmax,
            penalty,
            output,
        } => {
            let mut g = load_graph(&graph)?;
            if let Some(path) = steps {
                let steps: BTreeMap<String, usize> = read_json(&path)?;
                g = subdivide_for_speed(&g, &steps)?;
            }
            let doc: FleetDocument = read_json(&fleet)?;
            let mut f = FleetProblem::from_document(g, &doc, (!full_graph).then_some(corridor))?;
            if cmax.is_some() {
                f.c_max = cmax;
            }
            if f.c_max == Some(0) {
                bail!("--cmax must be at least 1");
            }
            (ProblemSource::from_fleet(&f)?, penalty, output)
        }
    };
    let (file, compiled) = ProblemFile::build(source, penalty)?;
    log::info!("compiled {} variables", compiled.polynomial().num_vars());
    output.emit(&to_json_text(&file))
}

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rowalk::estimators::{approx_pagerank, approx_rp, walk_cap, EstimateRecord, EstimatorError};
use rowalk::generate;
use rowalk::lower_bound::{
    run_trials, success_rate, AlwaysZero, DecisionRule, Family, FullMemoryPageRank, FullMemoryWalkSampler, Roles,
    StreamAlgorithm,
};
use rowalk::oracle::{exact_pagerank, exact_rp, DEFAULT_TOL, MAX_DENSE_N};
use rowalk::rng::child_seed;
use rowalk::sampler::{simulate_walks, ConfigError, Mode, SamplerConfig, SamplerError, DEFAULT_C, DEFAULT_D, DEFAULT_S_BUDGET};
use rowalk::{make_stream, Graph};

/// Exit code when faithful mode refuses to run.
const EXIT_BUDGET: u8 = 2;
/// Exit code when more than half of the trials FAIL.
const EXIT_FAIL_DOMINATED: u8 = 3;

#[derive(Parser)]
#[command(name = "rowalk", version, about = "Random walks and estimators over random-order graph streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list.
    GenGraph {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, env = "ROWALK_SEED", default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the timestamped random-order stream of a graph as CSV.
    MakeStream {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, env = "ROWALK_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample `b` walks per trial, each from a fresh stream.
    SampleWalks {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[arg(long, default_value_t = 1)]
        b: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Estimate the average k-step return probability.
    Rp {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Estimate the PageRank mass of a vertex set.
    Pagerank {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[arg(long, default_value_t = 0.3)]
        alpha: f64,
        /// Comma-separated target vertices.
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the Indexing protocol on hard instances with a reference algorithm.
    LbSim {
        #[arg(long, value_enum, default_value_t = InstanceArg::Digraph)]
        instance: InstanceArg,
        /// Indexing bits (digraph) or vertex count (chosen-vertex).
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 24)]
        beta: usize,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::FullWalk)]
        algorithm: AlgorithmArg,
        /// Walk length for the full-memory walk sampler.
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0.15)]
        alpha: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, env = "ROWALK_SEED", default_value_t = 0)]
        seed: u64,
        /// Per-trial CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Aggregate JSON; stderr when absent.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Edge-list file to load instead of generating.
    #[arg(long, conflicts_with = "family")]
    graph: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Vertex count of the family (of each part for disjoint-union).
    #[arg(long)]
    n: Option<usize>,
    /// Degree for random-regular.
    #[arg(long)]
    d: Option<usize>,
    /// Part family for disjoint-union.
    #[arg(long, value_enum)]
    part: Option<FamilyArg>,
    /// Number of parts for disjoint-union.
    #[arg(long, default_value_t = 2)]
    copies: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FamilyArg {
    Path,
    Cycle,
    Complete,
    Star,
    RandomRegular,
    DisjointUnion,
}

#[derive(Args, Clone)]
struct SamplerArgs {
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    /// Window width (lab mode).
    #[arg(long)]
    eta: Option<f64>,
    /// Instance count (lab mode).
    #[arg(long)]
    s: Option<usize>,
    #[arg(long = "C", default_value_t = DEFAULT_C)]
    c_eta: f64,
    #[arg(long = "D", default_value_t = DEFAULT_D)]
    d_batch: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Lab)]
    mode: ModeArg,
    /// Largest instance count a run may allocate.
    #[arg(long, default_value_t = DEFAULT_S_BUDGET)]
    budget: usize,
    /// Worker threads per pass; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    shards: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Lab,
    Faithful,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, env = "ROWALK_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum InstanceArg {
    Digraph,
    ChosenVertex,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum AlgorithmArg {
    /// Exact walk from a uniform start, over the whole stored stream.
    FullWalk,
    /// Exact PageRank mass of the 0-sinks, over the whole stored stream.
    FullPagerank,
    /// Always reports all mass on the 0-sinks.
    AlwaysZero,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GenGraph { graph, seed, out } => {
            let g = load_graph(&graph, seed)?;
            let mut w = open_out(out.as_deref())?;
            g.write_edge_list(&mut w)?;
            w.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::MakeStream { graph, seed, out } => {
            let g = load_graph(&graph, seed)?;
            let mut w = open_out(out.as_deref())?;
            make_stream(&g, seed).write_csv(&mut w)?;
            w.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::SampleWalks { graph, sampler, b, run } => sample_walks(&graph, &sampler, b, &run),
        Command::Rp { graph, sampler, run } => estimate(&graph, &sampler, &run, Estimator::Rp),
        Command::Pagerank {
            graph,
            sampler,
            alpha,
            target,
            run,
        } => estimate(&graph, &sampler, &run, Estimator::PageRank { alpha, target }),
        Command::LbSim {
            instance,
            n,
            beta,
            algorithm,
            k,
            alpha,
            trials,
            seed,
            out,
            summary,
        } => lb_sim(instance, n, beta, algorithm, k, alpha, trials, seed, out, summary),
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_graph(args: &GraphArgs, seed: u64) -> Result<Graph> {
    if let Some(path) = &args.graph {
        let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let g = Graph::read_edge_list(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))?;
        return Ok(g);
    }
    let Some(family) = args.family else {
        bail!("give either --graph FILE or --family");
    };
    let n = args.n.context("--n is required with --family")?;
    if family == FamilyArg::DisjointUnion {
        let part = args.part.context("--part is required for disjoint-union")?;
        if part == FamilyArg::DisjointUnion {
            bail!("--part cannot itself be disjoint-union");
        }
        if args.copies == 0 {
            bail!("--copies must be at least 1");
        }
        let parts = (0..args.copies as u64)
            .map(|i| generated(part, n, args.d, child_seed(seed, i)))
            .collect::<Result<Vec<_>>>()?;
        return Ok(generate::disjoint_union(&parts)?);
    }
    generated(family, n, args.d, seed)
}

fn generated(family: FamilyArg, n: usize, d: Option<usize>, seed: u64) -> Result<Graph> {
    Ok(match family {
        FamilyArg::Path => generate::path(n)?,
        FamilyArg::Cycle => generate::cycle(n)?,
        FamilyArg::Complete => generate::complete(n)?,
        FamilyArg::Star => generate::star(n)?,
        FamilyArg::RandomRegular => generate::random_regular(n, d.context("--d is required for random-regular")?, seed)?,
        FamilyArg::DisjointUnion => unreachable!("handled by the caller"),
    })
}

fn sampler_config(args: &SamplerArgs, k: usize, b: usize, seed: u64) -> Result<SamplerConfig> {
    let mode = match args.mode {
        ModeArg::Lab => Mode::Lab,
        ModeArg::Faithful => Mode::Faithful,
    };
    if mode == Mode::Faithful && (args.eta.is_some() || args.s.is_some()) {
        bail!("--eta and --s are lab-mode settings; faithful mode derives them");
    }
    Ok(SamplerConfig {
        k,
        epsilon: args.epsilon,
        b,
        c_eta: args.c_eta,
        d_batch: args.d_batch,
        eta_override: args.eta,
        s_override: args.s,
        mode,
        seed,
        s_budget: args.budget,
        shards: args.shards.max(1),
    })
}

/// Checks the effective configuration once before any trial runs. A budget
/// refusal is reported loudly and turned into an exit code.
fn preflight(cfg: &SamplerConfig) -> Result<Option<ExitCode>> {
    match cfg.instances_for_batch() {
        Ok(_) => Ok(None),
        Err(ConfigError::BudgetExceeded { s, budget }) => {
            let eta = cfg.eta().unwrap_or(f64::NAN);
            eprintln!("NOTICE: {} mode needs s = {s:.3e} instances (eta = {eta:.3e}, k = {}, b = {}),", mode_name(cfg.mode), cfg.k, cfg.b);
            eprintln!("NOTICE: above the budget of {budget}. Nothing was run.");
            eprintln!("NOTICE: use --mode lab with --eta and --s, or raise --budget.");
            Ok(Some(ExitCode::from(EXIT_BUDGET)))
        }
        Err(e) => Err(e.into()),
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Lab => "lab",
        Mode::Faithful => "faithful",
    }
}

fn fail_dominated(failed: usize, trials: usize) -> ExitCode {
    if 2 * failed > trials {
        eprintln!("warning: {failed} of {trials} trials returned FAIL");
        ExitCode::from(EXIT_FAIL_DOMINATED)
    } else {
        ExitCode::SUCCESS
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    Ok(())
}

#[derive(Serialize)]
struct WalkRow {
    trial: usize,
    seed: u64,
    k: usize,
    b: usize,
    eta: f64,
    s: usize,
    mode: &'static str,
    index: Option<usize>,
    failed: bool,
    /// Space-separated vertex ids.
    walk: String,
}

fn sample_walks(graph: &GraphArgs, sampler: &SamplerArgs, b: usize, run: &RunArgs) -> Result<ExitCode> {
    check_trials(run.trials)?;
    let g = load_graph(graph, run.seed)?;
    let probe = sampler_config(sampler, sampler.k, b, run.seed)?;
    if let Some(code) = preflight(&probe)? {
        return Ok(code);
    }
    let (eta, s) = (probe.eta()?, probe.instances()?);
    let mut rows = Vec::new();
    let mut failed = 0;
    for trial in 0..run.trials {
        let seed = child_seed(run.seed, trial as u64);
        let cfg = sampler_config(sampler, sampler.k, b, seed)?;
        let row = |index, failed, walk| WalkRow {
            trial,
            seed,
            k: sampler.k,
            b,
            eta,
            s,
            mode: mode_name(cfg.mode),
            index,
            failed,
            walk,
        };
        match simulate_walks(&make_stream(&g, seed), &cfg) {
            Ok(walks) => {
                for (i, w) in walks.iter().enumerate() {
                    let text = w.vertices().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
                    rows.push(row(Some(i), false, text));
                }
            }
            Err(SamplerError::Fail { .. }) => {
                failed += 1;
                rows.push(row(None, true, String::new()));
            }
            Err(e) => return Err(e.into()),
        }
    }
    write_rows(&rows, run)?;
    Ok(fail_dominated(failed, run.trials))
}

enum Estimator {
    Rp,
    PageRank { alpha: f64, target: Vec<usize> },
}

#[derive(Serialize)]
struct EstimateRow {
    trial: usize,
    seed: u64,
    estimate: Option<f64>,
    failed: bool,
    /// Estimator batch size.
    b: usize,
    /// `k` for return probability, `alpha` for PageRank.
    k_or_alpha: f64,
    epsilon: f64,
    /// Walk length the sampler ran with.
    k: usize,
    eta: f64,
    s: usize,
    mode: &'static str,
    #[serde(rename = "C")]
    c: f64,
    #[serde(rename = "D")]
    d: f64,
    /// Oracle value, when the graph is small enough.
    exact: Option<f64>,
}

fn estimate(graph: &GraphArgs, sampler: &SamplerArgs, run: &RunArgs, which: Estimator) -> Result<ExitCode> {
    check_trials(run.trials)?;
    let g = load_graph(graph, run.seed)?;
    if g.is_directed() {
        bail!("the estimators take undirected graphs");
    }
    let eps = sampler.epsilon;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(EstimatorError::Epsilon(eps).into());
    }
    let base = sampler_config(sampler, sampler.k, 1, run.seed)?;
    let b = base.estimator_batch(eps);
    // the configuration the sampler actually runs with
    let (k, sampler_b, k_or_alpha, exact) = match &which {
        Estimator::Rp => {
            let exact = (g.n() <= MAX_DENSE_N).then(|| exact_rp(&g, sampler.k)).transpose()?;
            (sampler.k, b, sampler.k as f64, exact)
        }
        Estimator::PageRank { alpha, target } => {
            if !(*alpha > 0.0 && *alpha < 1.0) {
                return Err(EstimatorError::Alpha(*alpha).into());
            }
            if let Some(&v) = target.iter().find(|&&v| v >= g.n()) {
                bail!("target vertex {v} outside 0..{}", g.n());
            }
            let k_cap = walk_cap(*alpha, eps);
            let exact = exact_pagerank(&g, *alpha, DEFAULT_TOL)?;
            let mass = target.iter().map(|&v| exact[v]).sum();
            (k_cap.max(1), b * (k_cap + 1), *alpha, Some(mass))
        }
    };
    let probe = SamplerConfig { k, b: sampler_b, ..base.clone() };
    if let Some(code) = preflight(&probe)? {
        return Ok(code);
    }
    let (eta, s) = (probe.eta()?, probe.instances()?);

    let mut rows = Vec::with_capacity(run.trials);
    let mut failed = 0;
    for trial in 0..run.trials {
        let seed = child_seed(run.seed, trial as u64);
        let cfg = sampler_config(sampler, sampler.k, 1, seed)?;
        let stream = make_stream(&g, seed);
        let result = match &which {
            Estimator::Rp => approx_rp(&stream, sampler.k, eps, &cfg),
            Estimator::PageRank { alpha, target } => {
                approx_pagerank(&stream, *alpha, &|v| target.contains(&v), eps, &cfg)
            }
        };
        let record = EstimateRecord::from_result(result, b, k_or_alpha, eps, seed)?;
        failed += record.failed as usize;
        rows.push(EstimateRow {
            trial,
            seed,
            estimate: record.estimate,
            failed: record.failed,
            b,
            k_or_alpha,
            epsilon: eps,
            k,
            eta,
            s,
            mode: mode_name(cfg.mode),
            c: sampler.c_eta,
            d: sampler.d_batch,
            exact,
        });
    }
    write_rows(&rows, run)?;
    Ok(fail_dominated(failed, run.trials))
}

fn write_rows<T: Serialize>(rows: &[T], run: &RunArgs) -> Result<()> {
    let mut w = open_out(run.out.as_deref())?;
    match run.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w)?;
        }
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            for row in rows {
                csv.serialize(row)?;
            }
            csv.flush()?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct LbSummary {
    instance: &'static str,
    n: usize,
    beta: Option<usize>,
    algorithm: &'static str,
    k: Option<usize>,
    alpha: Option<f64>,
    trials: usize,
    seed: u64,
    success_rate: f64,
    event_rate: f64,
}

#[allow(clippy::too_many_arguments)]
type MakeAlgorithm = Box<dyn Fn(&Roles) -> Box<dyn StreamAlgorithm>>;

fn lb_sim(
    instance: InstanceArg,
    n: usize,
    beta: usize,
    algorithm: AlgorithmArg,
    k: usize,
    alpha: f64,
    trials: usize,
    seed: u64,
    out: Option<PathBuf>,
    summary: Option<PathBuf>,
) -> Result<ExitCode> {
    check_trials(trials)?;
    let family = match instance {
        InstanceArg::Digraph => Family::Digraph { n, beta },
        InstanceArg::ChosenVertex => Family::ChosenVertex { n },
    };
    let (make, rule): (MakeAlgorithm, DecisionRule) = match algorithm {
        AlgorithmArg::FullWalk => {
            // a walk from a is the natural query on the chosen-vertex instance
            let start = match instance {
                InstanceArg::Digraph => None,
                InstanceArg::ChosenVertex => Some(0),
            };
            (
                Box::new(move |_: &Roles| Box::new(FullMemoryWalkSampler { k, start }) as Box<dyn StreamAlgorithm>),
                DecisionRule::WalkEndpoint,
            )
        }
        AlgorithmArg::FullPagerank => (
            Box::new(move |roles: &Roles| {
                Box::new(FullMemoryPageRank {
                    alpha,
                    target: roles.zero_sinks(),
                    tol: 1e-10,
                }) as Box<dyn StreamAlgorithm>
            }),
            DecisionRule::ThresholdHalf,
        ),
        AlgorithmArg::AlwaysZero => (
            Box::new(|_: &Roles| Box::new(AlwaysZero) as Box<dyn StreamAlgorithm>),
            DecisionRule::ThresholdHalf,
        ),
    };
    let records = run_trials(family, make.as_ref(), rule, trials, seed)?;

    let mut w = open_out(out.as_deref())?;
    {
        let mut csv = csv::Writer::from_writer(&mut w);
        for r in &records {
            csv.serialize(r)?;
        }
        csv.flush()?;
    }
    w.flush()?;

    let events = records.iter().filter(|r| r.event).count();
    let digraph = instance == InstanceArg::Digraph;
    let agg = LbSummary {
        instance: if digraph { "digraph" } else { "chosen-vertex" },
        n,
        beta: digraph.then_some(beta),
        algorithm: match algorithm {
            AlgorithmArg::FullWalk => "full-walk",
            AlgorithmArg::FullPagerank => "full-pagerank",
            AlgorithmArg::AlwaysZero => "always-zero",
        },
        k: (algorithm == AlgorithmArg::FullWalk).then_some(k),
        alpha: (algorithm == AlgorithmArg::FullPagerank).then_some(alpha),
        trials,
        seed,
        success_rate: success_rate(&records),
        event_rate: events as f64 / trials as f64,
    };
    let json = serde_json::to_string_pretty(&agg)?;
    match summary {
        Some(p) => std::fs::write(&p, json + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => eprintln!("{json}"),
    }
    Ok(ExitCode::SUCCESS)
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use chance_pareto::archive::ArchiveDump;
use chance_pareto::engine::{self, Initialization, RunRecord};
use chance_pareto::experiments::{self, stats, ExperimentConfig, ReportFormat};
use chance_pareto::graph::{self, EdgeListOptions, Graph, GraphModel, Indexing};
use chance_pareto::instance::{generate_weights, load_instance, save_instance};
use chance_pareto::oracle::{self, ExtractionPool, Query};
use chance_pareto::rng::stream;
use chance_pareto::{Algorithm, ConstraintFunction, StochasticInstance, WeightSetting, BETA_GRID};

#[derive(Parser)]
#[command(
    name = "chance-pareto",
    version,
    about = "Pareto optimization for chance-constrained subset selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance or graph.
    #[command(subcommand)]
    Generate(Generate),
    /// Run one algorithm and write its run record.
    Run(RunArgs),
    /// Run a comparison study from a config file and print the report.
    Experiment(ExperimentArgs),
    /// Check a run record against the exact optima.
    Certify(CertifyArgs),
    /// Mann-Whitney U test on two files of values.
    Stats(StatsArgs),
    /// Summarize an edge list.
    GraphInfo(GraphInfoArgs),
}

#[derive(Subcommand)]
enum Generate {
    Instance {
        /// Weight setting: uniform, uniform-fixed or degree-based.
        #[arg(long, default_value = "uniform")]
        weights: WeightSetting,
        /// Item count; taken from --graph if given.
        #[arg(long, required_unless_present = "graph")]
        n: Option<usize>,
        #[command(flatten)]
        graph: GraphOpt,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    Graph {
        /// random-regular:D or erdos-renyi:P
        #[arg(long)]
        model: GraphModel,
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct GraphOpt {
    /// Edge list; the constraint becomes the number of dominated nodes.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Node numbering in the edge list: 0 or 1.
    #[arg(long, default_value = "1")]
    indexing: Indexing,
}

impl GraphOpt {
    fn load(&self) -> Result<Option<Graph>> {
        let Some(path) = &self.graph else {
            return Ok(None);
        };
        let options = EdgeListOptions {
            indexing: self.indexing,
            node_count: None,
        };
        let (g, norm) = graph::load_edge_list(path, options)?;
        if norm.dropped() > 0 {
            eprintln!(
                "note: dropped {} self-loops and {} duplicate edges from {}",
                norm.self_loops,
                norm.duplicate_edges,
                path.display()
            );
        }
        Ok(Some(g))
    }

    fn constraint(&self, instance: &StochasticInstance) -> Result<ConstraintFunction> {
        Ok(match self.load()? {
            Some(g) => {
                if g.node_count() != instance.n() {
                    bail!(
                        "graph has {} nodes but the instance has {} items",
                        g.node_count(),
                        instance.n()
                    );
                }
                ConstraintFunction::DominationCount(Arc::new(g))
            }
            None => ConstraintFunction::Cardinality,
        })
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    graph: GraphOpt,
    /// SEMO2D, SEMO3D, GSEMO2D or GSEMO3D.
    #[arg(long)]
    algorithm: Algorithm,
    /// Offspring to generate; `1e6` and `1_000_000` are accepted.
    #[arg(long, default_value = "1000000", value_parser = parse_budget)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Constraint level for the 2D formulation; defaults to n.
    #[arg(long)]
    k: Option<usize>,
    /// uniform-random or all-zeros.
    #[arg(long, default_value = "uniform-random")]
    init: Initialization,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Flat key = value file; see the README for keys.
    config: PathBuf,
    /// csv or markdown.
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write every run's extracted values.
    #[arg(long)]
    runs_output: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Run record or bare archive dump.
    record: PathBuf,
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    graph: GraphOpt,
    /// Comma-separated tail probabilities; defaults to the standard grid.
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    /// Print every query, not just failures.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct StatsArgs {
    /// Whitespace- or comma-separated numbers.
    a: PathBuf,
    b: PathBuf,
}

#[derive(Args)]
struct GraphInfoArgs {
    graph: PathBuf,
    #[arg(long, default_value = "1")]
    indexing: Indexing,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate(g) => generate(g)?,
        Command::Run(args) => run(args)?,
        Command::Experiment(args) => experiment(args)?,
        Command::Certify(args) => return certify(args),
        Command::Stats(args) => mann_whitney(args)?,
        Command::GraphInfo(args) => graph_info(args)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn generate(g: Generate) -> Result<()> {
    match g {
        Generate::Instance {
            weights,
            n,
            graph,
            seed,
            output,
        } => {
            let (n, degrees) = match graph.load()? {
                Some(g) => {
                    if n.is_some_and(|n| n != g.node_count()) {
                        bail!("--n disagrees with the graph's {} nodes", g.node_count());
                    }
                    (g.node_count(), g.degrees())
                }
                None => {
                    if weights == WeightSetting::DegreeBased {
                        bail!("degree-based weights need --graph");
                    }
                    let n = n.expect("clap requires n without a graph");
                    (n, vec![0; n])
                }
            };
            let instance = generate_weights(weights, &degrees, n, &mut stream(seed))?;
            save_instance(&instance, &output)?;
        }
        Generate::Graph {
            model,
            nodes,
            seed,
            output,
        } => {
            let g = graph::generate_synthetic(model, nodes, &mut stream(seed))?;
            graph::save_edge_list(&g, &output)?;
        }
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let instance = load_instance(&args.instance)?;
    let constraint = args.graph.constraint(&instance)?;
    let k = args.k.unwrap_or(instance.n());
    let config = args.algorithm.config(k, args.budget, args.seed, args.init);
    let mut record = engine::run(&instance, &constraint, &config)?;
    record.algorithm = Some(args.algorithm);
    fs::write(&args.output, record.to_text()).with_context(|| format!("writing {}", args.output.display()))?;
    eprintln!(
        "{}: final archive {} members, max {}, {:.2}s",
        args.algorithm,
        record.archive.solutions().len(),
        record.max_population_size,
        record.wall_time.as_secs_f64()
    );
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let config = ExperimentConfig::load(&args.config)?;
    let report = experiments::run_experiment(&config)?;
    let text = experiments::emit_report(&report, args.format);
    match &args.output {
        Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    if let Some(path) = &args.runs_output {
        let runs = experiments::emit_runs(&report, args.format);
        fs::write(path, runs).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn read_archive(path: &Path) -> Result<ArchiveDump> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.starts_with("run-record") {
        Ok(RunRecord::parse(&text)?.archive)
    } else {
        Ok(ArchiveDump::parse(&text)?)
    }
}

fn certify(args: CertifyArgs) -> Result<ExitCode> {
    let instance = load_instance(&args.instance)?;
    let constraint = args.graph.constraint(&instance)?;
    let archive = read_archive(&args.record)?;
    if archive.bits() != instance.n() {
        bail!(
            "archive has {} bits but the instance has {} items",
            archive.bits(),
            instance.n()
        );
    }
    let betas = args.betas.unwrap_or_else(|| BETA_GRID.to_vec());

    let reference: Vec<_> = match &constraint {
        ConstraintFunction::Cardinality => oracle::build_extreme_set(&instance).solutions().cloned().collect(),
        ConstraintFunction::DominationCount(_) => oracle::exhaustive_front(&instance, &constraint)
            .context("the domination reference is exhaustive")?
            .into_iter()
            .map(|p| p.witness)
            .collect(),
    };
    let candidates = ExtractionPool::new(archive.solutions(), &instance, &constraint)?;
    let reference = ExtractionPool::new(&reference, &instance, &constraint)?;
    let outcomes = oracle::certify(&candidates, &reference, &betas, constraint.max_value(instance.n()))?;

    let show = |v: Option<f64>| v.map_or("none".to_string(), |v| format!("{v}"));
    let mut failures = 0;
    for o in &outcomes {
        if !o.pass {
            failures += 1;
        }
        if o.pass && !args.verbose {
            continue;
        }
        let query = match o.query {
            Query::MinWeight { k } => format!("min-weight k={k}"),
            Query::MaxC { budget } => format!("max-c B={budget}"),
        };
        println!(
            "{} beta={:e} {query}: found {} expected {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.beta,
            show(o.found),
            show(o.expected)
        );
    }
    println!("{} of {} queries passed", outcomes.len() - failures, outcomes.len());
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn read_values(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .with_context(|| format!("{}: not a number: {t:?}", path.display()))
        })
        .collect()
}

fn mann_whitney(args: StatsArgs) -> Result<()> {
    let (a, b) = (read_values(&args.a)?, read_values(&args.b)?);
    let p = stats::mann_whitney_u(&a, &b)?;
    let method = if a.len() + b.len() <= stats::EXACT_LIMIT {
        "exact"
    } else {
        "normal"
    };
    println!("n_a {}", a.len());
    println!("n_b {}", b.len());
    println!("mean_a {}", stats::mean(&a).unwrap_or(f64::NAN));
    println!("mean_b {}", stats::mean(&b).unwrap_or(f64::NAN));
    println!("u {}", stats::u_statistic(&a, &b)?);
    println!("p {p}");
    println!("method {method}");
    Ok(())
}

fn graph_info(args: GraphInfoArgs) -> Result<()> {
    let options = EdgeListOptions {
        indexing: args.indexing,
        node_count: None,
    };
    let (g, norm) = graph::load_edge_list(&args.graph, options)?;
    println!("nodes {}", g.node_count());
    println!("edges {}", g.edge_count());
    println!("self_loops_dropped {}", norm.self_loops);
    println!("duplicates_dropped {}", norm.duplicate_edges);
    let degrees = g.degrees();
    if let (Some(min), Some(max)) = (degrees.iter().min(), degrees.iter().max()) {
        println!("degree_min {min}");
        println!("degree_max {max}");
    }
    for (d, count) in g.degree_histogram() {
        println!("degree {d} {count}");
    }
    Ok(())
}

fn parse_budget(value: &str) -> std::result::Result<u64, String> {
    experiments::parse_count(value).ok_or_else(|| format!("not a count: {value}"))
}

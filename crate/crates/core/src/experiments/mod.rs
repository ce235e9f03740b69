//! Seeded multi-run comparisons on minimum-weight dominating set.
//!
//! Run `r` draws node weights from `derive_seed(master, "instance", r)` and
//! every algorithm sees that same instance; the algorithm's own stream is
//! `derive_seed(master, <ALGORITHM>, r)`. A synthetic graph is drawn once
//! from `derive_seed(master, "graph", 0)`. After a run, the best feasible
//! solution (all nodes dominated) is extracted from the final archive for
//! each beta.

mod config;
mod report;
pub mod stats;

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;

pub use config::{parse_count, ExperimentConfig, GraphSource};
pub use report::{
    emit_report, emit_runs, parse_tables, AlgorithmSummary, ComparisonReport, PairComparison, ReportFormat, RunSummary,
    COMPARED_PAIRS,
};
pub use stats::mann_whitney_u;

use crate::chance::ConfidenceLevel;
use crate::engine::{self, Algorithm, RunRecord};
use crate::error::{Error, Result};
use crate::graph::{generate_synthetic, load_edge_list, EdgeListOptions, Graph};
use crate::instance::{generate_weights, StochasticInstance};
use crate::objectives::ConstraintFunction;
use crate::oracle::ExtractionPool;
use crate::rng::{derive_seed, stream};

pub fn load_graph(config: &ExperimentConfig) -> Result<Graph> {
    match &config.graph {
        GraphSource::EdgeList { path, indexing } => {
            let options = EdgeListOptions {
                indexing: *indexing,
                node_count: None,
            };
            Ok(load_edge_list(path, options)?.0)
        }
        GraphSource::Synthetic { model, nodes } => {
            generate_synthetic(*model, *nodes, &mut stream(derive_seed(config.master_seed, "graph", 0)))
        }
    }
}

/// The weights for run `run`.
pub fn run_instance(config: &ExperimentConfig, graph: &Graph, run: usize) -> Result<StochasticInstance> {
    let mut rng = stream(derive_seed(config.master_seed, "instance", run as u64));
    generate_weights(config.weights, &graph.degrees(), graph.node_count(), &mut rng)
}

/// The extracted `w_hat` per confidence level, or `None` if no archive member
/// reaches `c(x) >= k`.
///
/// Fails with [`Error::Logic`] if the values are not monotone in alpha,
/// which would mean the extraction is broken.
pub fn extract_run_values(
    record: &RunRecord,
    instance: &StochasticInstance,
    constraint: &ConstraintFunction,
    k: usize,
    levels: &[ConfidenceLevel],
) -> Result<Option<Vec<f64>>> {
    let pool = ExtractionPool::new(record.archive.solutions(), instance, constraint)?;
    let values: Option<Vec<f64>> = levels
        .iter()
        .map(|cl| pool.min_weight(cl, k).map(|e| e.value))
        .collect();
    if let Some(values) = &values {
        let mut by_alpha: Vec<(f64, f64)> = levels
            .iter()
            .map(|cl| cl.k_alpha())
            .zip(values.iter().copied())
            .collect();
        by_alpha.sort_by(|a, b| a.0.total_cmp(&b.0));
        if by_alpha.windows(2).any(|w| w[1].1 < w[0].1) {
            return Err(Error::Logic(
                "extracted weight decreased with a larger confidence level",
            ));
        }
    }
    Ok(values)
}

/// Where the record of run `run` of `algorithm` is stored.
pub fn record_path(dir: &std::path::Path, algorithm: Algorithm, run: usize) -> PathBuf {
    dir.join(format!("{}-run{run:03}.txt", algorithm.name()))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ComparisonReport> {
    config.validate()?;
    let graph = Arc::new(load_graph(config)?);
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::Config("the graph has no nodes".into()));
    }
    let k = config.k.unwrap_or(n);
    if k > n {
        return Err(Error::Config(format!("k = {k} exceeds the {n} nodes")));
    }
    let constraint = ConstraintFunction::DominationCount(Arc::clone(&graph));
    let levels: Vec<ConfidenceLevel> = config
        .betas
        .iter()
        .map(|&b| ConfidenceLevel::from_beta(b))
        .collect::<Result<_>>()?;
    let instances: Vec<StochasticInstance> = (0..config.runs)
        .map(|r| run_instance(config, &graph, r))
        .collect::<Result<_>>()?;
    if let Some(dir) = &config.archive_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }

    let jobs: Vec<(Algorithm, usize)> = config
        .algorithms
        .iter()
        .flat_map(|&alg| (0..config.runs).map(move |r| (alg, r)))
        .collect();
    let outcomes: Vec<RunSummary> = jobs
        .par_iter()
        .map(|&(alg, r)| {
            let seed = derive_seed(config.master_seed, alg.name(), r as u64);
            let mut record = engine::run(
                &instances[r],
                &constraint,
                &alg.config(k, config.budget, seed, config.init),
            )?;
            record.algorithm = Some(alg);
            if let Some(dir) = &config.archive_dir {
                let path = record_path(dir, alg, r);
                fs::write(&path, record.to_text()).map_err(|e| Error::io(&path, e))?;
            }
            Ok(RunSummary {
                max_population: record.max_population_size,
                values: extract_run_values(&record, &instances[r], &constraint, k, &levels)?,
            })
        })
        .collect::<Result<_>>()?;

    let mut outcomes = outcomes.into_iter();
    let per_algorithm = config
        .algorithms
        .iter()
        .map(|&alg| (alg, outcomes.by_ref().take(config.runs).collect()))
        .collect();
    ComparisonReport::from_runs(config.betas.clone(), per_algorithm)
}

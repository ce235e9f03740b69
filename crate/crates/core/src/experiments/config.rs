use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::engine::{Algorithm, Initialization};
use crate::error::{Error, Result};
use crate::graph::{GraphModel, Indexing};
use crate::instance::WeightSetting;
use crate::BETA_GRID;

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    EdgeList { path: PathBuf, indexing: Indexing },
    Synthetic { model: GraphModel, nodes: usize },
}

/// A full comparison study on one graph.
///
/// On disk this is flat `key = value` text; `#` starts a comment line.
///
/// | key          | value                                          | default            |
/// |--------------|------------------------------------------------|--------------------|
/// | `graph`      | edge-list path (excludes `model`)              |                    |
/// | `indexing`   | `0` or `1`, node ids in `graph`                | `1`                |
/// | `model`      | `random-regular:D` or `erdos-renyi:P`          | `random-regular:4` |
/// | `nodes`      | node count for `model`                         | `200`              |
/// | `weights`    | `uniform`, `uniform-fixed`, `degree-based`     | `uniform`          |
/// | `algorithms` | comma list of SEMO2D, SEMO3D, GSEMO2D, GSEMO3D | all four           |
/// | `runs`       | positive integer                               | `10`               |
/// | `budget`     | iterations per run                             | `1000000`          |
/// | `betas`      | comma list in (0, 0.5]                         | the standard grid  |
/// | `seed`       | master seed                                    | `0`                |
/// | `k`          | 2D constraint level                            | node count         |
/// | `init`       | `uniform-random` or `all-zeros`                | `uniform-random`   |
/// | `archive_dir`| directory for per-run records                  | none               |
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub weights: WeightSetting,
    pub algorithms: Vec<Algorithm>,
    pub runs: usize,
    pub budget: u64,
    pub betas: Vec<f64>,
    pub master_seed: u64,
    pub k: Option<usize>,
    pub init: Initialization,
    pub archive_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graph: GraphSource::Synthetic {
                model: GraphModel::RandomRegular(4),
                nodes: 200,
            },
            weights: WeightSetting::Uniform,
            algorithms: Algorithm::ALL.to_vec(),
            runs: 10,
            budget: 1_000_000,
            betas: BETA_GRID.to_vec(),
            master_seed: 0,
            k: None,
            init: Initialization::UniformRandom,
            archive_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if let Some(b) = self.betas.iter().find(|b| !(**b > 0.0 && **b <= 0.5)) {
            return Err(Error::Domain(*b, "tail probabilities (0, 0.5]"));
        }
        if let GraphSource::Synthetic { nodes: 0, .. } = self.graph {
            return Err(Error::Config("a synthetic graph needs at least one node".into()));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        let mut path = None;
        let mut indexing = Indexing::OneBased;
        let (mut model, mut nodes) = match config.graph {
            GraphSource::Synthetic { model, nodes } => (model, nodes),
            GraphSource::EdgeList { .. } => unreachable!(),
        };
        let mut synthetic_keys = false;

        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::Config(format!("line {}: {msg}", idx + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let number = |what: &str| bad(format!("{key}: not {what}: {value:?}"));
            match key {
                "graph" => path = Some(PathBuf::from(value)),
                "indexing" => indexing = value.parse().map_err(|e: Error| bad(e.to_string()))?,
                "model" => {
                    model = value.parse().map_err(|e: Error| bad(e.to_string()))?;
                    synthetic_keys = true;
                }
                "nodes" => {
                    nodes = value.parse().map_err(|_| number("a node count"))?;
                    synthetic_keys = true;
                }
                "weights" => config.weights = value.parse().map_err(|e: Error| bad(e.to_string()))?,
                "algorithms" => {
                    config.algorithms = list(value)
                        .map(str::parse)
                        .collect::<Result<_>>()
                        .map_err(|e| bad(e.to_string()))?
                }
                "runs" => config.runs = value.parse().map_err(|_| number("an integer"))?,
                "budget" => config.budget = parse_count(value).ok_or_else(|| number("an integer"))?,
                "betas" => {
                    config.betas = list(value)
                        .map(|b| b.parse::<f64>().map_err(|_| number("a list of reals")))
                        .collect::<Result<_>>()?
                }
                "seed" => config.master_seed = value.parse().map_err(|_| number("a 64-bit integer"))?,
                "k" => config.k = Some(value.parse().map_err(|_| number("an integer"))?),
                "init" => config.init = value.parse().map_err(|e: Error| bad(e.to_string()))?,
                "archive_dir" => config.archive_dir = Some(PathBuf::from(value)),
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        config.graph = match path {
            Some(_) if synthetic_keys => {
                return Err(Error::Config("give either graph or model/nodes, not both".into()))
            }
            Some(path) => GraphSource::EdgeList { path, indexing },
            None => GraphSource::Synthetic { model, nodes },
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.graph {
            GraphSource::EdgeList { path, indexing } => {
                let _ = writeln!(out, "graph = {}", path.display());
                let _ = writeln!(
                    out,
                    "indexing = {}",
                    if *indexing == Indexing::ZeroBased { 0 } else { 1 }
                );
            }
            GraphSource::Synthetic { model, nodes } => {
                let _ = writeln!(out, "model = {model}");
                let _ = writeln!(out, "nodes = {nodes}");
            }
        }
        let algorithms: Vec<&str> = self.algorithms.iter().map(|a| a.name()).collect();
        let betas: Vec<String> = self.betas.iter().map(|b| format!("{b:e}")).collect();
        let _ = writeln!(out, "weights = {}", self.weights);
        let _ = writeln!(out, "algorithms = {}", algorithms.join(","));
        let _ = writeln!(out, "runs = {}", self.runs);
        let _ = writeln!(out, "budget = {}", self.budget);
        let _ = writeln!(out, "betas = {}", betas.join(","));
        let _ = writeln!(out, "seed = {}", self.master_seed);
        if let Some(k) = self.k {
            let _ = writeln!(out, "k = {k}");
        }
        let _ = writeln!(out, "init = {}", self.init);
        if let Some(dir) = &self.archive_dir {
            let _ = writeln!(out, "archive_dir = {}", dir.display());
        }
        out
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Integers with optional `_` separators or a power-of-ten shorthand (`1e6`).
pub fn parse_count(value: &str) -> Option<u64> {
    let plain: String = value.chars().filter(|&c| c != '_').collect();
    if let Ok(v) = plain.parse() {
        return Some(v);
    }
    let (mantissa, exp) = plain.split_once(['e', 'E'])?;
    let mantissa: u64 = mantissa.parse().ok()?;
    let exp: u32 = exp.parse().ok()?;
    mantissa.checked_mul(10u64.checked_pow(exp)?)
}

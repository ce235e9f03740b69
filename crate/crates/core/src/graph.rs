//! Undirected simple graphs for the dominating-set constraint.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::solution::Solution;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
}

/// What normalization removed while building a [`Graph`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Normalization {
    pub self_loops: usize,
    pub duplicate_edges: usize,
}

impl Normalization {
    pub fn dropped(&self) -> usize {
        self.self_loops + self.duplicate_edges
    }
}

impl Graph {
    /// Builds a simple graph from 0-based edges, dropping self-loops and
    /// repeated edges (in either direction).
    pub fn from_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<(Self, Normalization)> {
        let mut adjacency = vec![Vec::new(); node_count];
        let mut report = Normalization::default();
        for (u, v) in edges {
            let bad = u.max(v);
            if bad >= node_count {
                return Err(Error::Dimension {
                    expected: node_count,
                    actual: bad + 1,
                });
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        }
        let mut directed = 0;
        for list in &mut adjacency {
            let before = list.len();
            list.sort_unstable();
            list.dedup();
            report.duplicate_edges += before - list.len();
            directed += list.len();
        }
        // each duplicate undirected edge was counted once per endpoint
        report.duplicate_edges /= 2;
        Ok((
            Graph {
                adjacency,
                edge_count: directed / 2,
            },
            report,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().map(move |&v| (u, v as usize)).filter(|&(u, v)| u < v))
    }

    /// Degree value to node count, ascending.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for d in self.degrees() {
            *hist.entry(d).or_insert(0) += 1;
        }
        hist
    }

    /// Number of nodes that are selected or adjacent to a selected node.
    pub fn domination_count(&self, x: &Solution) -> Result<usize> {
        if x.len() != self.node_count() {
            return Err(Error::Dimension {
                expected: self.node_count(),
                actual: x.len(),
            });
        }
        Ok(DominationScratch::new(self.node_count()).count(self, x))
    }

    pub fn is_dominating_set(&self, x: &Solution) -> Result<bool> {
        Ok(self.domination_count(x)? == self.node_count())
    }

    /// Edge-list text: a `# nodes N` header, then 1-based `u v` lines.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# nodes {}\n", self.node_count());
        for (u, v) in self.edges() {
            out.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        out
    }
}

/// Reusable marker array for repeated domination counts over one graph.
#[derive(Clone, Debug)]
pub struct DominationScratch {
    stamp: Vec<u32>,
    epoch: u32,
}

impl DominationScratch {
    pub fn new(node_count: usize) -> Self {
        DominationScratch {
            stamp: vec![0; node_count],
            epoch: 0,
        }
    }

    pub fn count(&mut self, graph: &Graph, x: &Solution) -> usize {
        debug_assert_eq!(x.len(), graph.node_count());
        if self.stamp.len() != graph.node_count() {
            *self = DominationScratch::new(graph.node_count());
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        let mut count = 0;
        for u in x.iter_ones() {
            if self.stamp[u] != epoch {
                self.stamp[u] = epoch;
                count += 1;
            }
            for &v in graph.neighbors(u) {
                let v = v as usize;
                if self.stamp[v] != epoch {
                    self.stamp[v] = epoch;
                    count += 1;
                }
            }
        }
        count
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Indexing {
    ZeroBased,
    #[default]
    OneBased,
}

impl FromStr for Indexing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" | "zero" | "zero-based" => Ok(Indexing::ZeroBased),
            "1" | "one" | "one-based" => Ok(Indexing::OneBased),
            other => Err(Error::Config(format!("unknown node indexing {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EdgeListOptions {
    pub indexing: Indexing,
    /// Node count; otherwise taken from a `# nodes N` header or the largest
    /// node id seen.
    pub node_count: Option<usize>,
}

/// Parses whitespace-separated `u v` pairs. Lines starting with `%` or `#`
/// are comments, except a `# nodes N` header which declares the node count.
/// Tokens after the first two on a line (edge weights) are ignored.
pub fn parse_edge_list(text: &str, options: EdgeListOptions, origin: &Path) -> Result<(Graph, Normalization)> {
    let mut declared = options.node_count;
    let mut edges = Vec::new();
    let mut max_id = None::<usize>;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') || line.starts_with('%') {
            let mut words = line.trim_start_matches(['#', '%']).split_whitespace();
            if words.next() == Some("nodes") && options.node_count.is_none() {
                let n = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| Error::parse(origin, lineno, "malformed '# nodes N' header"))?;
                declared = Some(n);
            }
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::parse(origin, lineno, "expected an edge \"u v\""));
        };
        let id = |tok: &str| -> Result<usize> {
            let raw: usize = tok
                .parse()
                .map_err(|_| Error::parse(origin, lineno, format!("not a node id: {tok:?}")))?;
            match options.indexing {
                Indexing::ZeroBased => Ok(raw),
                Indexing::OneBased => raw
                    .checked_sub(1)
                    .ok_or_else(|| Error::parse(origin, lineno, "node id 0 in a 1-based edge list")),
            }
        };
        let (u, v) = (id(a)?, id(b)?);
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        edges.push((u, v));
    }
    let node_count = match (declared, max_id) {
        (Some(n), Some(m)) if m >= n => {
            return Err(Error::Config(format!(
                "node id {} exceeds the declared {n} nodes",
                m + 1
            )))
        }
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => 0,
    };
    Graph::from_edges(node_count, edges)
}

pub fn load_edge_list(path: impl AsRef<Path>, options: EdgeListOptions) -> Result<(Graph, Normalization)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, options, path)
}

pub fn save_edge_list(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, graph.to_edge_list()).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GraphModel {
    /// Uniform-ish random `d`-regular graph (pairing model with restarts).
    RandomRegular(usize),
    /// `G(n, p)`.
    ErdosRenyi(f64),
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphModel::RandomRegular(d) => write!(f, "random-regular:{d}"),
            GraphModel::ErdosRenyi(p) => write!(f, "erdos-renyi:{p}"),
        }
    }
}

impl FromStr for GraphModel {
    type Err = Error;

    /// `random-regular:D` or `erdos-renyi:P`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown graph model {s:?}"));
        let (name, arg) = s.split_once(':').ok_or_else(bad)?;
        match name {
            "random-regular" | "regular" => arg.parse().map(GraphModel::RandomRegular).map_err(|_| bad()),
            "erdos-renyi" | "gnp" => arg.parse().map(GraphModel::ErdosRenyi).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

const REGULAR_RESTARTS: usize = 10_000;

pub fn generate_synthetic<R: Rng + ?Sized>(model: GraphModel, n: usize, rng: &mut R) -> Result<Graph> {
    match model {
        GraphModel::RandomRegular(d) => {
            if (d > 0 && d >= n) || (n * d) % 2 == 1 {
                return Err(Error::Config(format!("no simple {d}-regular graph on {n} nodes")));
            }
            for _ in 0..REGULAR_RESTARTS {
                if let Some(edges) = try_regular_pairing(n, d, rng) {
                    return Ok(Graph::from_edges(n, edges)?.0);
                }
            }
            Err(Error::Config(format!(
                "pairing for a {d}-regular graph on {n} nodes failed {REGULAR_RESTARTS} times"
            )))
        }
        GraphModel::ErdosRenyi(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("edge probability {p} outside [0, 1]")));
            }
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            Ok(Graph::from_edges(n, edges)?.0)
        }
    }
}

/// One attempt of the pairing model: stubs are matched one at a time, each
/// new stub paired with a random remaining stub that keeps the graph simple.
fn try_regular_pairing<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Option<Vec<(usize, usize)>> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|u| std::iter::repeat_n(u, d)).collect();
    stubs.shuffle(rng);
    let mut adjacency = vec![Vec::with_capacity(d); n];
    let mut edges = Vec::with_capacity(n * d / 2);
    while let Some(u) = stubs.pop() {
        let candidates: Vec<usize> = (0..stubs.len())
            .filter(|&i| stubs[i] != u && !adjacency[u].contains(&stubs[i]))
            .collect();
        let &pick = candidates.get(rng.random_range(0..candidates.len().max(1)))?;
        let v = stubs.swap_remove(pick);
        adjacency[u].push(v);
        adjacency[v].push(u);
        edges.push((u, v));
    }
    Some(edges)
}

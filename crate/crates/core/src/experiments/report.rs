use std::fmt::Write as _;
use std::str::FromStr;

use super::stats::{mann_whitney_u, mean, sample_std};
use crate::engine::Algorithm;
use crate::error::{Error, Result};

/// One run of one algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub max_population: usize,
    /// Extracted `w_hat` per beta; absent when the final archive holds no
    /// feasible solution.
    pub values: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub runs: Vec<RunSummary>,
    /// Over feasible runs, per beta.
    pub means: Vec<Option<f64>>,
    pub stds: Vec<Option<f64>>,
    /// Over all runs.
    pub pop_mean: f64,
    pub pop_std: Option<f64>,
    pub infeasible_runs: usize,
}

impl AlgorithmSummary {
    fn new(algorithm: Algorithm, runs: Vec<RunSummary>, beta_count: usize) -> Self {
        let mut means = Vec::with_capacity(beta_count);
        let mut stds = Vec::with_capacity(beta_count);
        for j in 0..beta_count {
            let values = feasible_values(&runs, j);
            means.push(mean(&values));
            stds.push(sample_std(&values));
        }
        let pops: Vec<f64> = runs.iter().map(|r| r.max_population as f64).collect();
        AlgorithmSummary {
            algorithm,
            means,
            stds,
            pop_mean: mean(&pops).unwrap_or(0.0),
            pop_std: sample_std(&pops),
            infeasible_runs: runs.iter().filter(|r| r.values.is_none()).count(),
            runs,
        }
    }

    /// Extracted values at beta index `j`, feasible runs only, in run order.
    pub fn values_at(&self, j: usize) -> Vec<f64> {
        feasible_values(&self.runs, j)
    }
}

fn feasible_values(runs: &[RunSummary], j: usize) -> Vec<f64> {
    runs.iter().filter_map(|r| r.values.as_ref().map(|v| v[j])).collect()
}

/// Mann-Whitney p-values between two algorithms (indices into
/// [`ComparisonReport::algorithms`]).
#[derive(Clone, Debug, PartialEq)]
pub struct PairComparison {
    pub first: usize,
    pub second: usize,
    /// Per beta; absent when either side has no feasible run.
    pub p_values: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub betas: Vec<f64>,
    pub algorithms: Vec<AlgorithmSummary>,
    pub pairs: Vec<PairComparison>,
}

/// The 2D and 3D variants of each operator family are compared.
pub const COMPARED_PAIRS: [(Algorithm, Algorithm); 2] = [
    (Algorithm::Semo2D, Algorithm::Semo3D),
    (Algorithm::Gsemo2D, Algorithm::Gsemo3D),
];

impl ComparisonReport {
    pub fn from_runs(betas: Vec<f64>, runs: Vec<(Algorithm, Vec<RunSummary>)>) -> Result<Self> {
        for (_, rs) in &runs {
            if let Some(bad) = rs
                .iter()
                .filter_map(|r| r.values.as_ref())
                .find(|v| v.len() != betas.len())
            {
                return Err(Error::Dimension {
                    expected: betas.len(),
                    actual: bad.len(),
                });
            }
        }
        let algorithms: Vec<AlgorithmSummary> = runs
            .into_iter()
            .map(|(alg, rs)| AlgorithmSummary::new(alg, rs, betas.len()))
            .collect();
        let position = |alg| algorithms.iter().position(|s| s.algorithm == alg);
        let mut pairs = Vec::new();
        for (a, b) in COMPARED_PAIRS {
            let (Some(first), Some(second)) = (position(a), position(b)) else {
                continue;
            };
            let p_values = (0..betas.len())
                .map(|j| {
                    let (xa, xb) = (algorithms[first].values_at(j), algorithms[second].values_at(j));
                    if xa.is_empty() || xb.is_empty() {
                        Ok(None)
                    } else {
                        mann_whitney_u(&xa, &xb).map(Some)
                    }
                })
                .collect::<Result<_>>()?;
            pairs.push(PairComparison {
                first,
                second,
                p_values,
            });
        }
        Ok(ComparisonReport {
            betas,
            algorithms,
            pairs,
        })
    }

    pub fn summary(&self, algorithm: Algorithm) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|s| s.algorithm == algorithm)
    }

    fn pair_label(&self, pair: &PairComparison) -> String {
        format!(
            "{}_{}",
            self.algorithms[pair.first].algorithm.name(),
            self.algorithms[pair.second].algorithm.name()
        )
    }

    /// Index of the algorithm with the strictly lower mean at beta `j`.
    fn best_of(&self, pair: &PairComparison, j: usize) -> Option<usize> {
        let a = self.algorithms[pair.first].means[j]?;
        let b = self.algorithms[pair.second].means[j]?;
        match a.partial_cmp(&b)? {
            std::cmp::Ordering::Less => Some(pair.first),
            std::cmp::Ordering::Greater => Some(pair.second),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// The value table (one row per beta) and the population table (one row
    /// per algorithm), as cells. Best means are marked in the returned flags.
    fn tables(&self) -> [Table; 2] {
        let mut header = vec!["beta".to_string()];
        for s in &self.algorithms {
            header.push(format!("{}_mean", s.algorithm.name()));
            header.push(format!("{}_std", s.algorithm.name()));
        }
        for pair in &self.pairs {
            header.push(format!("p_{}", self.pair_label(pair)));
            header.push(format!("best_{}", self.pair_label(pair)));
        }
        let mut values = Table::new(header);
        if !self.algorithms.is_empty() {
            for (j, beta) in self.betas.iter().enumerate() {
                let mut row = vec![Cell::plain(format!("{beta:e}"))];
                let best: Vec<usize> = self.pairs.iter().filter_map(|p| self.best_of(p, j)).collect();
                for (i, s) in self.algorithms.iter().enumerate() {
                    row.push(Cell {
                        text: fixed(s.means[j], 3),
                        best: best.contains(&i),
                    });
                    row.push(Cell::plain(fixed(s.stds[j], 3)));
                }
                for pair in &self.pairs {
                    row.push(Cell::plain(fixed(pair.p_values[j], 6)));
                    let winner = match (self.best_of(pair, j), self.algorithms[pair.first].means[j]) {
                        (Some(i), _) => self.algorithms[i].algorithm.name(),
                        (None, Some(_)) if self.algorithms[pair.second].means[j].is_some() => "tie",
                        _ => "NA",
                    };
                    row.push(Cell::plain(winner.to_string()));
                }
                values.rows.push(row);
            }
        }

        let mut population = Table::new(
            ["algorithm", "pop_mean", "pop_std", "infeasible_runs"]
                .map(String::from)
                .to_vec(),
        );
        for s in &self.algorithms {
            population.rows.push(vec![
                Cell::plain(s.algorithm.name().to_string()),
                Cell::plain(format!("{:.3}", s.pop_mean)),
                Cell::plain(fixed(s.pop_std, 3)),
                Cell::plain(s.infeasible_runs.to_string()),
            ]);
        }
        [values, population]
    }

    /// Per-run values: one row per (algorithm, run).
    fn run_table(&self) -> Table {
        let mut header: Vec<String> = ["algorithm", "run", "max_population", "feasible"]
            .map(String::from)
            .to_vec();
        header.extend(self.betas.iter().map(|b| format!("w_{b:e}")));
        let mut table = Table::new(header);
        for s in &self.algorithms {
            for (r, run) in s.runs.iter().enumerate() {
                let mut row = vec![
                    Cell::plain(s.algorithm.name().to_string()),
                    Cell::plain(r.to_string()),
                    Cell::plain(run.max_population.to_string()),
                    Cell::plain(run.values.is_some().to_string()),
                ];
                for j in 0..self.betas.len() {
                    let v = run.values.as_ref().map(|v| v[j].to_string());
                    row.push(Cell::plain(v.unwrap_or_else(|| "NA".into())));
                }
                table.rows.push(row);
            }
        }
        table
    }
}

fn fixed(value: Option<f64>, digits: usize) -> String {
    match value {
        Some(v) => format!("{v:.digits$}"),
        None => "NA".to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

struct Cell {
    text: String,
    best: bool,
}

impl Cell {
    fn plain(text: String) -> Self {
        Cell { text, best: false }
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: Vec<String>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    fn write(&self, format: ReportFormat, title: &str, out: &mut String) {
        match format {
            ReportFormat::Csv => {
                let _ = writeln!(out, "{}", self.header.join(","));
                for row in &self.rows {
                    let cells: Vec<&str> = row.iter().map(|c| c.text.as_str()).collect();
                    let _ = writeln!(out, "{}", cells.join(","));
                }
            }
            ReportFormat::Markdown => {
                let _ = writeln!(out, "### {title}\n");
                let _ = writeln!(out, "| {} |", self.header.join(" | "));
                let _ = writeln!(out, "|{}", "---|".repeat(self.header.len()));
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|c| {
                            if c.best {
                                format!("**{}**", c.text)
                            } else {
                                c.text.clone()
                            }
                        })
                        .collect();
                    let _ = writeln!(out, "| {} |", cells.join(" | "));
                }
            }
        }
    }
}

/// Renders the value table and the population table, separated by a blank
/// line.
///
/// Value table columns: `beta`, then `<ALG>_mean` and `<ALG>_std` for each
/// algorithm, then `p_<A>_<B>` (two-sided Mann-Whitney) and `best_<A>_<B>`
/// (lower mean, `tie` or `NA`) for each compared pair. Means and standard
/// deviations have three decimals, p-values six; missing values are `NA`.
/// Markdown additionally bolds the lower mean of each pair.
///
/// Population table columns: `algorithm`, `pop_mean`, `pop_std`,
/// `infeasible_runs`.
pub fn emit_report(report: &ComparisonReport, format: ReportFormat) -> String {
    let [values, population] = report.tables();
    let mut out = String::new();
    values.write(format, "Extracted weight", &mut out);
    out.push('\n');
    population.write(format, "Maximum population size", &mut out);
    out
}

/// Renders every run: `algorithm`, `run`, `max_population`, `feasible`, then
/// one `w_<beta>` column per beta with the extracted value at full precision.
pub fn emit_runs(report: &ComparisonReport, format: ReportFormat) -> String {
    let mut out = String::new();
    report.run_table().write(format, "Runs", &mut out);
    out
}

/// Splits emitted tables back into cells (markdown emphasis removed), for
/// comparing the two formats.
pub fn parse_tables(text: &str, format: ReportFormat) -> Vec<Vec<Vec<String>>> {
    let mut tables = Vec::new();
    let mut current: Vec<Vec<String>> = Vec::new();
    for line in text.lines() {
        let row = match format {
            ReportFormat::Csv if !line.trim().is_empty() => {
                Some(line.split(',').map(str::to_string).collect::<Vec<_>>())
            }
            ReportFormat::Markdown if line.starts_with('|') => {
                if line.starts_with("|---") {
                    continue;
                }
                let inner = line.trim().trim_start_matches('|').trim_end_matches('|');
                Some(inner.split('|').map(|c| c.trim().replace("**", "")).collect())
            }
            _ => None,
        };
        match row {
            Some(row) => current.push(row),
            None if !current.is_empty() => tables.push(std::mem::take(&mut current)),
            None => {}
        }
    }
    if !current.is_empty() {
        tables.push(current);
    }
    tables
}

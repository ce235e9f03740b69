//! Ground truth for archives: greedy `f_lambda` optima, brute-force fronts,
//! and the extraction queries that answer the two chance-constrained
//! problems from a set of candidate solutions.
//!
//! * min-weight: minimize `w_hat(x)` subject to `c(x) >= k`;
//! * max-c: maximize `c(x)` subject to `w_hat(x) <= B`.
//!
//! For the cardinality constraint, the greedy prefixes at the midpoints of
//! the breakpoint set (plus the lexicographic orders at `lambda = 0` and
//! `lambda = 1`) contain a min-weight optimum for every `(k, alpha)`, since
//! `w_hat` is concave in `(mu, v)` and is minimized at a vertex of the lower
//! convex hull of each `k`-slice.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::chance::{lambda_breakpoints, ConfidenceLevel};
use crate::error::{Error, Result};
use crate::instance::StochasticInstance;
use crate::objectives::{ConstraintFunction, Evaluator, ObjectiveVector3D, ParetoObjective};
use crate::solution::Solution;

/// Items in increasing `f_lambda(e_i)` order, ties by index. The endpoints
/// use the lexicographic orders `(mu, var)` at 1 and `(var, mu)` at 0.
pub fn greedy_order(instance: &StochasticInstance, lambda: f64) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(lambda, "scalarization weights [0, 1]"));
    }
    let (mu, var) = (instance.mu(), instance.var());
    let mut order: Vec<usize> = (0..instance.n()).collect();
    if lambda == 1.0 {
        order.sort_by(|&a, &b| mu[a].total_cmp(&mu[b]).then(var[a].total_cmp(&var[b])).then(a.cmp(&b)));
    } else if lambda == 0.0 {
        order.sort_by(|&a, &b| var[a].total_cmp(&var[b]).then(mu[a].total_cmp(&mu[b])).then(a.cmp(&b)));
    } else {
        let key = |i: usize| lambda * mu[i] + (1.0 - lambda) * var[i];
        order.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
    }
    Ok(order)
}

/// The `k` smallest items under [`greedy_order`]: an `f_lambda` minimizer
/// among all solutions with exactly `k` items.
pub fn greedy_optimum(instance: &StochasticInstance, k: usize, lambda: f64) -> Result<Solution> {
    if k > instance.n() {
        return Err(Error::Config(format!("k = {k} exceeds n = {}", instance.n())));
    }
    let order = greedy_order(instance, lambda)?;
    Ok(Solution::from_indices(instance.n(), order[..k].iter().copied()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeEntry {
    pub k: usize,
    pub lambda: f64,
    pub solution: Solution,
    pub mu: f64,
    pub var: f64,
}

/// Greedy optima for every `k` and every breakpoint midpoint, plus both
/// lexicographic endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeSet {
    lambdas: Vec<f64>,
    entries: Vec<ExtremeEntry>,
}

impl ExtremeSet {
    /// The weights used, endpoints included: `[0, midpoints.., 1]`.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn entries(&self) -> &[ExtremeEntry] {
        &self.entries
    }

    pub fn solutions(&self) -> impl Iterator<Item = &Solution> {
        self.entries.iter().map(|e| &e.solution)
    }

    pub fn get(&self, k: usize, lambda_index: usize) -> &ExtremeEntry {
        &self.entries[lambda_index * self.slice_len() + k]
    }

    fn slice_len(&self) -> usize {
        self.entries.len() / self.lambdas.len()
    }
}

pub fn build_extreme_set(instance: &StochasticInstance) -> ExtremeSet {
    let n = instance.n();
    let breakpoints = lambda_breakpoints(instance);
    let mut lambdas = vec![0.0];
    lambdas.extend_from_slice(breakpoints.midpoints());
    lambdas.push(1.0);

    let mut entries = Vec::with_capacity(lambdas.len() * (n + 1));
    for &lambda in &lambdas {
        let order = greedy_order(instance, lambda).expect("lambda lies in [0, 1]");
        let mut x = Solution::zeros(n);
        for k in 0..=n {
            if k > 0 {
                x.flip(order[k - 1]);
            }
            let (mu, var) = instance.moments(&x);
            entries.push(ExtremeEntry {
                k,
                lambda,
                solution: x.clone(),
                mu,
                var,
            });
        }
    }
    ExtremeSet { lambdas, entries }
}

pub const EXHAUSTIVE_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct FrontPoint {
    pub vector: ObjectiveVector3D,
    pub witness: Solution,
}

/// All non-dominated `(mu, v, c)` vectors over `{0,1}^n`, each with the
/// lowest-numbered witness (item `i` is bit `i` of the witness number).
///
/// Evaluation is spread over worker threads; the front itself is a
/// sequential sweep in `(-c, mu, v, witness)` order, in which every
/// dominator precedes the points it dominates.
pub fn exhaustive_front(instance: &StochasticInstance, constraint: &ConstraintFunction) -> Result<Vec<FrontPoint>> {
    let n = instance.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    Evaluator::new(instance, constraint)?;
    let mut points: Vec<(ObjectiveVector3D, u64)> = (0..1u64 << n)
        .into_par_iter()
        .map_init(
            || Evaluator::new(instance, constraint).expect("checked above"),
            |ev, mask| (ev.eval_3d(&Solution::from_mask(n, mask)), mask),
        )
        .collect();
    points.par_sort_unstable_by(|(a, ma), (b, mb)| {
        b.c.cmp(&a.c)
            .then(a.mu.total_cmp(&b.mu))
            .then(a.v.total_cmp(&b.v))
            .then(ma.cmp(mb))
    });

    let mut front: Vec<FrontPoint> = Vec::new();
    for (vector, mask) in points {
        if front.iter().any(|p| p.vector.weakly_dominates(&vector)) {
            continue;
        }
        front.push(FrontPoint {
            vector,
            witness: Solution::from_mask(n, mask),
        });
    }
    Ok(front)
}

/// A candidate solution with its moments and constraint value.
#[derive(Clone, Debug)]
pub struct Candidate<'a> {
    pub solution: &'a Solution,
    pub mu: f64,
    pub var: f64,
    pub c: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Extracted<'a> {
    pub solution: &'a Solution,
    /// `w_hat(solution)`.
    pub value: f64,
    pub c: usize,
}

/// Candidate solutions prepared for repeated extraction queries.
#[derive(Clone, Debug)]
pub struct ExtractionPool<'a> {
    rows: Vec<Candidate<'a>>,
}

impl<'a> ExtractionPool<'a> {
    pub fn new(
        solutions: impl IntoIterator<Item = &'a Solution>,
        instance: &StochasticInstance,
        constraint: &ConstraintFunction,
    ) -> Result<Self> {
        let mut evaluator = Evaluator::new(instance, constraint)?;
        let rows = solutions
            .into_iter()
            .map(|x| {
                instance.check_len(x)?;
                let (mu, var) = instance.moments(x);
                Ok(Candidate {
                    solution: x,
                    mu,
                    var,
                    c: evaluator.constraint(x),
                })
            })
            .collect::<Result<_>>()?;
        Ok(ExtractionPool { rows })
    }

    pub fn candidates(&self) -> &[Candidate<'a>] {
        &self.rows
    }

    /// Minimizes `w_hat` over candidates with `c(x) >= k`; ties go to fewer
    /// items, then the smaller bit string.
    pub fn min_weight(&self, cl: &ConfidenceLevel, k: usize) -> Option<Extracted<'a>> {
        self.rows
            .iter()
            .filter(|r| r.c >= k)
            .map(|r| (r, cl.weighted(r.mu, r.var)))
            .min_by(|(a, va), (b, vb)| va.total_cmp(vb).then_with(|| simpler(a.solution, b.solution)))
            .map(|(r, value)| Extracted {
                solution: r.solution,
                value,
                c: r.c,
            })
    }

    /// Maximizes `c(x)` over candidates with `w_hat(x) <= budget`; ties go to
    /// the smaller `w_hat`, then as in [`ExtractionPool::min_weight`].
    pub fn max_c(&self, cl: &ConfidenceLevel, budget: f64) -> Result<Option<Extracted<'a>>> {
        if budget.is_nan() || budget < 0.0 {
            return Err(Error::Domain(budget, "weight bounds [0, inf)"));
        }
        Ok(self
            .rows
            .iter()
            .map(|r| (r, cl.weighted(r.mu, r.var)))
            .filter(|(_, value)| *value <= budget)
            .min_by(|(a, va), (b, vb)| {
                b.c.cmp(&a.c)
                    .then(va.total_cmp(vb))
                    .then_with(|| simpler(a.solution, b.solution))
            })
            .map(|(r, value)| Extracted {
                solution: r.solution,
                value,
                c: r.c,
            }))
    }
}

fn simpler(a: &Solution, b: &Solution) -> Ordering {
    a.count_ones().cmp(&b.count_ones()).then_with(|| a.cmp_lex(b))
}

pub fn extract_min_weight<'a>(
    solutions: impl IntoIterator<Item = &'a Solution>,
    instance: &StochasticInstance,
    cl: &ConfidenceLevel,
    k: usize,
    constraint: &ConstraintFunction,
) -> Result<Option<(Solution, f64)>> {
    let pool = ExtractionPool::new(solutions, instance, constraint)?;
    Ok(pool.min_weight(cl, k).map(|e| (e.solution.clone(), e.value)))
}

pub fn extract_max_c<'a>(
    solutions: impl IntoIterator<Item = &'a Solution>,
    instance: &StochasticInstance,
    cl: &ConfidenceLevel,
    budget: f64,
    constraint: &ConstraintFunction,
) -> Result<Option<(Solution, usize)>> {
    let pool = ExtractionPool::new(solutions, instance, constraint)?;
    Ok(pool.max_c(cl, budget)?.map(|e| (e.solution.clone(), e.c)))
}

/// Equality up to `1e-9` relative.
pub fn values_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Sorted distinct `w_hat(x_alpha^k)` values over `k`, followed by the
/// midpoint of every consecutive pair: every regime of the max-c answer.
pub fn budget_grid(reference: &ExtractionPool<'_>, cl: &ConfidenceLevel, max_k: usize) -> Vec<f64> {
    let mut values: Vec<f64> = (0..=max_k)
        .filter_map(|k| reference.min_weight(cl, k).map(|e| e.value))
        .collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mids: Vec<f64> = values.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    values.extend(mids);
    values
}

#[derive(Clone, Debug, PartialEq)]
pub enum Query {
    MinWeight { k: usize },
    MaxC { budget: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryOutcome {
    pub beta: f64,
    pub query: Query,
    /// Answer from the candidates: `w_hat` for min-weight, `c` for max-c.
    pub found: Option<f64>,
    pub expected: Option<f64>,
    pub pass: bool,
}

/// Answers every min-weight query `k = 0..=c_max` and every max-c query on
/// the budget grid, for each `beta`, from both `candidates` and `reference`.
pub fn certify(
    candidates: &ExtractionPool<'_>,
    reference: &ExtractionPool<'_>,
    betas: &[f64],
    max_k: usize,
) -> Result<Vec<QueryOutcome>> {
    let mut out = Vec::new();
    for &beta in betas {
        let cl = ConfidenceLevel::from_beta(beta)?;
        for k in 0..=max_k {
            let found = candidates.min_weight(&cl, k).map(|e| e.value);
            let expected = reference.min_weight(&cl, k).map(|e| e.value);
            let pass = match (found, expected) {
                (Some(f), Some(e)) => values_match(f, e),
                (None, None) => true,
                _ => false,
            };
            out.push(QueryOutcome {
                beta,
                query: Query::MinWeight { k },
                found,
                expected,
                pass,
            });
        }
        for budget in budget_grid(reference, &cl, max_k) {
            let found = candidates.max_c(&cl, budget)?.map(|e| e.c as f64);
            let expected = reference.max_c(&cl, budget)?.map(|e| e.c as f64);
            out.push(QueryOutcome {
                beta,
                query: Query::MaxC { budget },
                found,
                expected,
                pass: found == expected,
            });
        }
    }
    Ok(out)
}

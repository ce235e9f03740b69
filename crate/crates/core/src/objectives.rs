//! Fitness formulations and their dominance relations.
//!
//! * `f_2D(x) = (mu_hat, v_hat)`: the true moments when `c(x) >= k`, otherwise
//!   `(k - c(x))` times `1 + sum mu_i` (resp. `1 + sum var_i`). Both
//!   coordinates are minimized.
//! * `f_3D(x) = (mu, v, c)`: moments minimized, constraint value maximized,
//!   no penalty.
//!
//! Comparisons are exact; no epsilon is applied anywhere.

use std::sync::Arc;

use crate::error::Result;
use crate::graph::{DominationScratch, Graph};
use crate::instance::StochasticInstance;
use crate::solution::Solution;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dominance {
    /// Weakly dominates and the vectors differ.
    Strong,
    /// Equal or better in every coordinate, with equal vectors.
    Weak,
    None,
}

/// An objective vector with a Pareto dominance relation.
pub trait ParetoObjective: Clone + PartialEq + std::fmt::Debug {
    /// How `self` relates to `other`: [`Dominance::Strong`] when `self` is no
    /// worse everywhere and the vectors differ, [`Dominance::Weak`] when
    /// they are equal.
    fn dominance(&self, other: &Self) -> Dominance;

    fn weakly_dominates(&self, other: &Self) -> bool {
        self.dominance(other) != Dominance::None
    }

    fn strongly_dominates(&self, other: &Self) -> bool {
        self.dominance(other) == Dominance::Strong
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectiveVector2D {
    pub mu_hat: f64,
    pub v_hat: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectiveVector3D {
    pub mu: f64,
    pub v: f64,
    pub c: usize,
}

impl ParetoObjective for ObjectiveVector2D {
    #[inline]
    fn dominance(&self, other: &Self) -> Dominance {
        dominates_2d(self, other)
    }
}

impl ParetoObjective for ObjectiveVector3D {
    #[inline]
    fn dominance(&self, other: &Self) -> Dominance {
        dominates_3d(self, other)
    }
}

#[inline]
pub fn dominates_2d(a: &ObjectiveVector2D, b: &ObjectiveVector2D) -> Dominance {
    if a.mu_hat <= b.mu_hat && a.v_hat <= b.v_hat {
        if a == b {
            Dominance::Weak
        } else {
            Dominance::Strong
        }
    } else {
        Dominance::None
    }
}

#[inline]
pub fn dominates_3d(a: &ObjectiveVector3D, b: &ObjectiveVector3D) -> Dominance {
    if a.c >= b.c && a.mu <= b.mu && a.v <= b.v {
        if a == b {
            Dominance::Weak
        } else {
            Dominance::Strong
        }
    } else {
        Dominance::None
    }
}

/// The deterministic constraint `c(x)`, maximized.
#[derive(Clone, Debug)]
pub enum ConstraintFunction {
    /// `c(x) = |x|_1`.
    Cardinality,
    /// `c(x)` = number of nodes selected or adjacent to a selected node.
    DominationCount(Arc<Graph>),
}

impl ConstraintFunction {
    pub fn name(&self) -> &'static str {
        match self {
            ConstraintFunction::Cardinality => "cardinality",
            ConstraintFunction::DominationCount(_) => "domination-count",
        }
    }

    /// Largest attainable value for solutions of length `n`.
    pub fn max_value(&self, n: usize) -> usize {
        match self {
            ConstraintFunction::Cardinality => n,
            ConstraintFunction::DominationCount(g) => g.node_count(),
        }
    }

    pub fn value(&self, x: &Solution) -> Result<usize> {
        match self {
            ConstraintFunction::Cardinality => Ok(x.count_ones()),
            ConstraintFunction::DominationCount(g) => g.domination_count(x),
        }
    }

    pub(crate) fn check_instance(&self, instance: &StochasticInstance) -> Result<()> {
        if let ConstraintFunction::DominationCount(g) = self {
            if g.node_count() != instance.n() {
                return Err(crate::Error::Dimension {
                    expected: instance.n(),
                    actual: g.node_count(),
                });
            }
        }
        Ok(())
    }
}

pub fn constraint_value(c: &ConstraintFunction, x: &Solution) -> Result<usize> {
    c.value(x)
}

fn penalized(k: usize, c: usize, total: f64) -> f64 {
    (k - c) as f64 * (1.0 + total)
}

pub fn eval_2d(
    instance: &StochasticInstance,
    x: &Solution,
    k: usize,
    c: &ConstraintFunction,
) -> Result<ObjectiveVector2D> {
    instance.check_len(x)?;
    let cx = c.value(x)?;
    Ok(vector_2d(instance, x, k, cx))
}

pub fn eval_3d(instance: &StochasticInstance, x: &Solution, c: &ConstraintFunction) -> Result<ObjectiveVector3D> {
    instance.check_len(x)?;
    let cx = c.value(x)?;
    let (mu, v) = instance.moments(x);
    Ok(ObjectiveVector3D { mu, v, c: cx })
}

fn vector_2d(instance: &StochasticInstance, x: &Solution, k: usize, cx: usize) -> ObjectiveVector2D {
    if cx >= k {
        let (mu_hat, v_hat) = instance.moments(x);
        ObjectiveVector2D { mu_hat, v_hat }
    } else {
        ObjectiveVector2D {
            mu_hat: penalized(k, cx, instance.mu_total()),
            v_hat: penalized(k, cx, instance.var_total()),
        }
    }
}

/// Evaluates many solutions against one instance, reusing scratch space.
///
/// Produces exactly the values of [`eval_2d`] / [`eval_3d`]; the moments are
/// recomputed from scratch each call.
#[derive(Clone, Debug)]
pub struct Evaluator<'a> {
    instance: &'a StochasticInstance,
    constraint: &'a ConstraintFunction,
    scratch: DominationScratch,
    mu_penalty: f64,
    var_penalty: f64,
}

impl<'a> Evaluator<'a> {
    pub fn new(instance: &'a StochasticInstance, constraint: &'a ConstraintFunction) -> Result<Self> {
        constraint.check_instance(instance)?;
        Ok(Evaluator {
            instance,
            constraint,
            scratch: DominationScratch::new(instance.n()),
            mu_penalty: 1.0 + instance.mu_total(),
            var_penalty: 1.0 + instance.var_total(),
        })
    }

    #[inline]
    pub fn constraint(&mut self, x: &Solution) -> usize {
        match self.constraint {
            ConstraintFunction::Cardinality => x.count_ones(),
            ConstraintFunction::DominationCount(g) => self.scratch.count(g, x),
        }
    }

    pub fn eval_3d(&mut self, x: &Solution) -> ObjectiveVector3D {
        let c = self.constraint(x);
        let (mu, v) = self.instance.moments(x);
        ObjectiveVector3D { mu, v, c }
    }

    pub fn eval_2d(&mut self, x: &Solution, k: usize) -> ObjectiveVector2D {
        let c = self.constraint(x);
        if c >= k {
            let (mu_hat, v_hat) = self.instance.moments(x);
            ObjectiveVector2D { mu_hat, v_hat }
        } else {
            let gap = (k - c) as f64;
            ObjectiveVector2D {
                mu_hat: gap * self.mu_penalty,
                v_hat: gap * self.var_penalty,
            }
        }
    }
}

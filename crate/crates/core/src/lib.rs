//! Pareto optimization for chance-constrained subset selection.
//!
//! Items carry independent Normally distributed weights `N(mu_i, sigma_i^2)`.
//! A subset `x` is scored by its expected weight `mu(x)`, its variance `v(x)`
//! and a deterministic constraint value `c(x)`. Two fitness formulations are
//! provided:
//!
//! * a bi-objective one, `(mu_hat, v_hat)`, where solutions violating
//!   `c(x) >= k` are pushed away by a penalty, and
//! * a tri-objective one, `(mu, v, c)`, where the constraint value is simply
//!   maximized alongside the two minimized moments.
//!
//! Both are driven by the same GSEMO loop ([`engine`]) over a Pareto archive
//! ([`archive`]). The [`oracle`] module holds the greedy and exhaustive
//! solvers used to certify archives, and [`experiments`] runs seeded
//! multi-algorithm comparisons on dominating-set instances.

pub mod archive;
pub mod chance;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod instance;
pub mod objectives;
pub mod oracle;
pub mod rng;
pub mod solution;

pub use archive::{Insertion, ParetoArchive};
pub use chance::{normal_quantile, ConfidenceLevel, LambdaBreakpoints};
pub use engine::{Algorithm, AlgorithmConfig, Formulation, Initialization, MutationOperator, RunRecord};
pub use error::{Error, Result};
pub use graph::Graph;
pub use instance::{StochasticInstance, WeightSetting};
pub use objectives::{ConstraintFunction, Dominance, ObjectiveVector2D, ObjectiveVector3D};
pub use solution::Solution;

/// The confidence grid used throughout the dominating-set study, as tail
/// probabilities `beta = 1 - alpha`.
pub const BETA_GRID: [f64; 10] = [0.2, 0.1, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-14, 1e-16];

//! Normal quantiles and the scalarizations built on item moments.
//!
//! A chance constraint `Pr(w(x) <= W) >= alpha` on independent Normal weights
//! reduces to the deterministic value `mu(x) + K_alpha * sqrt(v(x))`, where
//! `K_alpha` is the `alpha`-quantile of the standard Normal distribution.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::instance::StochasticInstance;
use crate::solution::Solution;

/// Standard Normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Standard Normal upper tail `1 - Phi(z)`, without cancellation for large `z`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// Inverse of the standard Normal CDF.
///
/// Acklam's rational approximation (relative error ~1.2e-9) followed by one
/// Halley step against the erfc-based CDF. Only the lower half is computed
/// directly; `p > 0.5` is mirrored through `1 - p`, which is exact in that
/// range, so `quantile(1 - a) == -quantile(a)` holds bit for bit.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(p, "the Normal quantile (0, 1)"));
    }
    if p > 0.5 {
        Ok(-lower_quantile(1.0 - p))
    } else {
        Ok(lower_quantile(p))
    }
}

/// `Phi^{-1}(1 - beta)` computed from the tail probability, so that tiny
/// `beta` (down to subnormals) keep full accuracy instead of being rounded
/// away in `1 - beta`.
pub fn upper_quantile(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(beta, "the Normal upper quantile (0, 1)"));
    }
    if beta > 0.5 {
        Ok(lower_quantile(1.0 - beta))
    } else {
        Ok(-lower_quantile(beta))
    }
}

#[allow(clippy::excessive_precision)]
fn lower_quantile(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p <= 0.5);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };

    let e = normal_cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// A confidence level `alpha in [1/2, 1)` with its cached quantile `K_alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfidenceLevel {
    alpha: f64,
    beta: f64,
    k_alpha: f64,
}

impl ConfidenceLevel {
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !(0.5..1.0).contains(&alpha) {
            return Err(Error::Domain(alpha, "confidence levels [0.5, 1)"));
        }
        let k_alpha = if alpha == 0.5 { 0.0 } else { normal_quantile(alpha)? };
        Ok(ConfidenceLevel {
            alpha,
            beta: 1.0 - alpha,
            k_alpha,
        })
    }

    /// Level `alpha = 1 - beta`; prefer this for small `beta`.
    pub fn from_beta(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 0.5) {
            return Err(Error::Domain(beta, "tail probabilities (0, 0.5]"));
        }
        let k_alpha = if beta == 0.5 { 0.0 } else { upper_quantile(beta)? };
        Ok(ConfidenceLevel {
            alpha: 1.0 - beta,
            beta,
            k_alpha,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k_alpha(&self) -> f64 {
        self.k_alpha
    }

    /// `mu + K_alpha * sqrt(var)`.
    #[inline]
    pub fn weighted(&self, mu: f64, var: f64) -> f64 {
        mu + self.k_alpha * var.sqrt()
    }
}

/// `w_hat(x) = mu(x) + K_alpha * sqrt(v(x))`.
pub fn chance_value(instance: &StochasticInstance, x: &Solution, cl: &ConfidenceLevel) -> Result<f64> {
    instance.check_len(x)?;
    let (mu, var) = instance.moments(x);
    Ok(cl.weighted(mu, var))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::Domain(lambda, "scalarization weights [0, 1]"))
    }
}

/// `f_lambda(x) = lambda * mu(x) + (1 - lambda) * v(x)`.
pub fn f_lambda(instance: &StochasticInstance, x: &Solution, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    instance.check_len(x)?;
    let (mu, var) = instance.moments(x);
    Ok(lambda * mu + (1.0 - lambda) * var)
}

/// `f_lambda(e_i) = lambda * mu_i + (1 - lambda) * var_i`.
pub fn f_lambda_item(instance: &StochasticInstance, item: usize, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if item >= instance.n() {
        return Err(Error::Dimension {
            expected: instance.n(),
            actual: item,
        });
    }
    Ok(lambda * instance.mu()[item] + (1.0 - lambda) * instance.var()[item])
}

/// Weights at which the `f_lambda` order of two items can swap, framed by
/// 0 and 1, with the midpoint of every gap.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaBreakpoints {
    values: Vec<f64>,
    midpoints: Vec<f64>,
}

/// Relative tolerance under which two breakpoints are treated as one.
pub const BREAKPOINT_MERGE_TOL: f64 = 1e-12;

impl LambdaBreakpoints {
    /// `0 = l_0 < l_1 <= .. <= l_m < l_{m+1} = 1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Interior breakpoints only.
    pub fn interior(&self) -> &[f64] {
        &self.values[1..self.values.len() - 1]
    }

    pub fn midpoints(&self) -> &[f64] {
        &self.midpoints
    }
}

/// Collects `(var_j - var_i) / ((mu_i - mu_j) + (var_j - var_i))` over every
/// unordered pair oriented so that `var_i < var_j` and `mu_i > mu_j`.
/// Pairs tied in either moment contribute nothing.
pub fn lambda_breakpoints(instance: &StochasticInstance) -> LambdaBreakpoints {
    let (mu, var) = (instance.mu(), instance.var());
    let mut raw = Vec::new();
    for a in 0..instance.n() {
        for b in a + 1..instance.n() {
            let (i, j) = if var[a] < var[b] { (a, b) } else { (b, a) };
            if var[i] < var[j] && mu[i] > mu[j] {
                let num = var[j] - var[i];
                raw.push(num / ((mu[i] - mu[j]) + num));
            }
        }
    }
    raw.sort_by(f64::total_cmp);

    let mut values = vec![0.0];
    for lambda in raw {
        let last = *values.last().unwrap();
        if (lambda - last).abs() > BREAKPOINT_MERGE_TOL * lambda.abs().max(1.0) {
            values.push(lambda);
        }
    }
    values.push(1.0);
    let midpoints = values.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    LambdaBreakpoints { values, midpoints }
}

//! Stochastic item weights and their generators.
//!
//! Instance files are plain text: the item count on the first line, then one
//! `mu var` line per item in shortest round-trip decimal notation.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::solution::Solution;

/// Items with independent Normal weights `N(mu_i, var_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticInstance {
    mu: Vec<f64>,
    var: Vec<f64>,
}

impl StochasticInstance {
    /// Requires `mu_i >= 1` and `var_i >= 1` for every item.
    pub fn new(mu: Vec<f64>, var: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::Validation("instance has no items".into()));
        }
        if mu.len() != var.len() {
            return Err(Error::Validation(format!(
                "{} expected weights but {} variances",
                mu.len(),
                var.len()
            )));
        }
        for (i, (&m, &v)) in mu.iter().zip(&var).enumerate() {
            // written so that NaN fails too
            if !(m >= 1.0 && m.is_finite()) {
                return Err(Error::Validation(format!("item {i}: expected weight {m} < 1")));
            }
            if !(v >= 1.0 && v.is_finite()) {
                return Err(Error::Validation(format!("item {i}: variance {v} < 1")));
            }
        }
        Ok(StochasticInstance { mu, var })
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn var(&self) -> &[f64] {
        &self.var
    }

    pub fn mu_max(&self) -> f64 {
        self.mu.iter().copied().fold(f64::MIN, f64::max)
    }

    pub fn var_max(&self) -> f64 {
        self.var.iter().copied().fold(f64::MIN, f64::max)
    }

    /// `sum_i mu_i`, summed in index order.
    pub fn mu_total(&self) -> f64 {
        self.mu.iter().sum()
    }

    pub fn var_total(&self) -> f64 {
        self.var.iter().sum()
    }

    /// `(mu(x), v(x))`, summed over selected items in index order.
    ///
    /// Every objective in the crate goes through this function so that the
    /// same subset always yields bit-identical values.
    pub fn moments(&self, x: &Solution) -> (f64, f64) {
        debug_assert_eq!(x.len(), self.n());
        let mut mu = 0.0;
        let mut var = 0.0;
        for i in x.iter_ones() {
            mu += self.mu[i];
            var += self.var[i];
        }
        (mu, var)
    }

    pub(crate) fn check_len(&self, x: &Solution) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n());
        for (m, v) in self.mu.iter().zip(&self.var) {
            out.push_str(&format!("{m} {v}\n"));
        }
        out
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(origin, 1, "empty instance file"))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::parse(origin, 1, format!("expected item count, found {header:?}")))?;
        let mut mu = Vec::with_capacity(n);
        let mut var = Vec::with_capacity(n);
        for (lineno, line) in lines {
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(m), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::parse(origin, lineno, "expected two fields \"mu var\""));
            };
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(origin, lineno, format!("not a number: {s:?}")))
            };
            mu.push(parse(m)?);
            var.push(parse(v)?);
        }
        if mu.len() != n {
            return Err(Error::parse(
                origin,
                n + 1,
                format!("header declares {n} items but {} were listed", mu.len()),
            ));
        }
        StochasticInstance::new(mu, var)
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<StochasticInstance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    StochasticInstance::parse(&text, path)
}

pub fn save_instance(instance: &StochasticInstance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, instance.to_text()).map_err(|e| Error::io(path, e))
}

/// How expected weights and variances are drawn for a node-weighted graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeightSetting {
    /// `mu ~ U{n..2n}`, `var ~ U{n^2..2n^2}`.
    Uniform,
    /// `mu ~ U{n..2n}`, `var = 2n^2`.
    UniformFixed,
    /// `mu = (n + deg)^5 / n^4`, `var ~ U{n^2..2n^2}`.
    DegreeBased,
}

impl WeightSetting {
    pub const ALL: [WeightSetting; 3] = [
        WeightSetting::Uniform,
        WeightSetting::UniformFixed,
        WeightSetting::DegreeBased,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightSetting::Uniform => "uniform",
            WeightSetting::UniformFixed => "uniform-fixed",
            WeightSetting::DegreeBased => "degree-based",
        }
    }
}

impl fmt::Display for WeightSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(WeightSetting::Uniform),
            "uniform-fixed" => Ok(WeightSetting::UniformFixed),
            "degree-based" | "degree" => Ok(WeightSetting::DegreeBased),
            other => Err(Error::Config(format!("unknown weight setting {other:?}"))),
        }
    }
}

/// Draws an instance for `n` items.
///
/// `degrees` is only read by [`WeightSetting::DegreeBased`], but must have
/// length `n` regardless. Per item, the expected weight is drawn before the
/// variance.
pub fn generate_weights<R: Rng + ?Sized>(
    setting: WeightSetting,
    degrees: &[usize],
    n: usize,
    rng: &mut R,
) -> Result<StochasticInstance> {
    if n == 0 {
        return Err(Error::Config("cannot generate weights for n = 0".into()));
    }
    if degrees.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: degrees.len(),
        });
    }
    let n64 = n as u64;
    let sq = n64
        .checked_mul(n64)
        .filter(|s| s.checked_mul(2).is_some())
        .ok_or_else(|| Error::Config(format!("n = {n} is too large")))?;
    let nf = n as f64;

    let mut mu = Vec::with_capacity(n);
    let mut var = Vec::with_capacity(n);
    for &deg in degrees {
        let m = match setting {
            WeightSetting::Uniform | WeightSetting::UniformFixed => rng.random_range(n64..=2 * n64) as f64,
            WeightSetting::DegreeBased => (nf + deg as f64).powi(5) / nf.powi(4),
        };
        let v = match setting {
            WeightSetting::UniformFixed => (2 * sq) as f64,
            WeightSetting::Uniform | WeightSetting::DegreeBased => rng.random_range(sq..=2 * sq) as f64,
        };
        mu.push(m);
        var.push(v);
    }
    StochasticInstance::new(mu, var)
}

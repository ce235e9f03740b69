//! The GSEMO loop and its SEMO variants.
//!
//! One run: pick an initial solution, insert it, then for `budget`
//! iterations choose a parent uniformly from the archive, mutate it, evaluate
//! the offspring and offer it to the archive. Per iteration the random
//! stream is consumed in a fixed order (parent index, then mutation), so a
//! run is a pure function of the instance and the config.
//!
//! | algorithm | formulation | mutation        |
//! |-----------|-------------|-----------------|
//! | GSEMO2D   | 2D          | standard bit    |
//! | GSEMO3D   | 3D          | standard bit    |
//! | SEMO2D    | 2D          | 1- or 2-bit     |
//! | SEMO3D    | 3D          | 1-bit           |

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Geometric;

use crate::archive::{ArchiveDump, ParetoArchive};
use crate::error::{Error, Result};
use crate::instance::StochasticInstance;
use crate::objectives::{ConstraintFunction, Evaluator, ObjectiveVector2D, ObjectiveVector3D, ParetoObjective};
use crate::rng::{stream, Stream};
use crate::solution::Solution;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MutationOperator {
    /// Flip every bit independently with probability `1/n`; may copy.
    StandardBit,
    /// Flip exactly one uniformly chosen bit.
    OneBit,
    /// With probability 1/2 a 1-bit flip, otherwise flip two distinct
    /// uniformly chosen positions.
    MixedOneTwo,
}

impl MutationOperator {
    pub fn name(self) -> &'static str {
        match self {
            MutationOperator::StandardBit => "standard-bit",
            MutationOperator::OneBit => "one-bit",
            MutationOperator::MixedOneTwo => "mixed-1-2",
        }
    }

    fn check(self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Config("cannot mutate an empty bit string".into()));
        }
        if self == MutationOperator::MixedOneTwo && n < 2 {
            return Err(Error::Config("mixed 1/2-bit mutation needs n >= 2".into()));
        }
        Ok(())
    }
}

impl fmt::Display for MutationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MutationOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard-bit" => Ok(MutationOperator::StandardBit),
            "one-bit" => Ok(MutationOperator::OneBit),
            "mixed-1-2" => Ok(MutationOperator::MixedOneTwo),
            other => Err(Error::Config(format!("unknown mutation operator {other:?}"))),
        }
    }
}

/// Returns a mutated copy of `x`.
pub fn mutate<R: Rng + ?Sized>(x: &Solution, op: MutationOperator, rng: &mut R) -> Result<Solution> {
    op.check(x.len())?;
    let mut y = x.clone();
    mutate_in_place(&mut y, op, rng);
    Ok(y)
}

fn mutate_in_place<R: Rng + ?Sized>(x: &mut Solution, op: MutationOperator, rng: &mut R) {
    let n = x.len();
    match op {
        MutationOperator::StandardBit => {
            // Gaps between flipped positions are geometric with p = 1/n,
            // which is the same law as n independent coin flips.
            let gaps = Geometric::new(1.0 / n as f64).expect("1/n is a probability");
            let mut pos = 0u64;
            loop {
                pos += gaps.sample(rng);
                if pos >= n as u64 {
                    break;
                }
                x.flip(pos as usize);
                pos += 1;
            }
        }
        MutationOperator::OneBit => x.flip(rng.random_range(0..n)),
        MutationOperator::MixedOneTwo => {
            if rng.random_bool(0.5) {
                x.flip(rng.random_range(0..n));
            } else {
                let i = rng.random_range(0..n);
                let mut j = rng.random_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                x.flip(i);
                x.flip(j);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Formulation {
    /// Penalized `(mu_hat, v_hat)` with feasibility `c(x) >= k`.
    TwoD { k: usize },
    /// `(mu, v, c)`.
    ThreeD,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formulation::TwoD { k } => write!(f, "2d {k}"),
            Formulation::ThreeD => f.write_str("3d"),
        }
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let words: Vec<&str> = s.split_whitespace().collect();
        match words.as_slice() {
            ["3d"] => Ok(Formulation::ThreeD),
            ["2d", k] => k
                .parse()
                .map(|k| Formulation::TwoD { k })
                .map_err(|_| Error::Config(format!("bad constraint level {k:?}"))),
            _ => Err(Error::Config(format!("unknown formulation {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Initialization {
    /// Each bit set with probability 1/2.
    #[default]
    UniformRandom,
    AllZeros,
}

impl Initialization {
    pub fn name(self) -> &'static str {
        match self {
            Initialization::UniformRandom => "uniform-random",
            Initialization::AllZeros => "all-zeros",
        }
    }
}

impl fmt::Display for Initialization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Initialization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-random" | "random" => Ok(Initialization::UniformRandom),
            "all-zeros" | "zeros" => Ok(Initialization::AllZeros),
            other => Err(Error::Config(format!("unknown initialization {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AlgorithmConfig {
    pub formulation: Formulation,
    pub mutation: MutationOperator,
    /// Offspring to generate. The initial solution is evaluated on top of
    /// this, so a run performs `budget + 1` evaluations.
    pub budget: u64,
    pub seed: u64,
    pub init: Initialization,
}

impl AlgorithmConfig {
    pub fn validate(&self, n: usize, constraint: &ConstraintFunction) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        self.mutation.check(n)?;
        if let Formulation::TwoD { k } = self.formulation {
            let max = constraint.max_value(n);
            if k > max {
                return Err(Error::Config(format!(
                    "constraint level {k} exceeds the attainable {max}"
                )));
            }
        }
        Ok(())
    }
}

/// The four named algorithm variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Semo2D,
    Semo3D,
    Gsemo2D,
    Gsemo3D,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Semo2D,
        Algorithm::Semo3D,
        Algorithm::Gsemo2D,
        Algorithm::Gsemo3D,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Semo2D => "SEMO2D",
            Algorithm::Semo3D => "SEMO3D",
            Algorithm::Gsemo2D => "GSEMO2D",
            Algorithm::Gsemo3D => "GSEMO3D",
        }
    }

    pub fn mutation(self) -> MutationOperator {
        match self {
            Algorithm::Semo2D => MutationOperator::MixedOneTwo,
            Algorithm::Semo3D => MutationOperator::OneBit,
            Algorithm::Gsemo2D | Algorithm::Gsemo3D => MutationOperator::StandardBit,
        }
    }

    pub fn is_3d(self) -> bool {
        matches!(self, Algorithm::Semo3D | Algorithm::Gsemo3D)
    }

    /// `k` is only used by the 2D variants.
    pub fn config(self, k: usize, budget: u64, seed: u64, init: Initialization) -> AlgorithmConfig {
        AlgorithmConfig {
            formulation: if self.is_3d() {
                Formulation::ThreeD
            } else {
                Formulation::TwoD { k }
            },
            mutation: self.mutation(),
            budget,
            seed,
            init,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

/// The outcome of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub algorithm: Option<Algorithm>,
    pub config: AlgorithmConfig,
    pub archive: ArchiveDump,
    pub max_population_size: usize,
    pub evaluations_used: u64,
    pub wall_time: Duration,
}

/// Borrowed view of a live archive handed to run observers.
#[derive(Clone, Copy, Debug)]
pub enum ArchiveRef<'a> {
    TwoD(&'a ParetoArchive<ObjectiveVector2D>),
    ThreeD(&'a ParetoArchive<ObjectiveVector3D>),
}

impl ArchiveRef<'_> {
    pub fn solutions(&self) -> &[Solution] {
        match self {
            ArchiveRef::TwoD(a) => a.solutions(),
            ArchiveRef::ThreeD(a) => a.solutions(),
        }
    }

    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        match self {
            ArchiveRef::TwoD(a) => a.check_invariants(),
            ArchiveRef::ThreeD(a) => a.check_invariants(),
        }
    }
}

pub fn run(
    instance: &StochasticInstance,
    constraint: &ConstraintFunction,
    config: &AlgorithmConfig,
) -> Result<RunRecord> {
    run_observed(instance, constraint, config, 0, |_, _| {})
}

/// Like [`run`], calling `observer(iteration, archive)` after every `every`
/// iterations and once at the end (`every = 0` only at the end).
pub fn run_observed(
    instance: &StochasticInstance,
    constraint: &ConstraintFunction,
    config: &AlgorithmConfig,
    every: u64,
    mut observer: impl FnMut(u64, ArchiveRef<'_>),
) -> Result<RunRecord> {
    let n = instance.n();
    config.validate(n, constraint)?;
    let mut evaluator = Evaluator::new(instance, constraint)?;
    let started = Instant::now();
    let mut rng = stream(config.seed);

    let (archive, max_population_size) = match config.formulation {
        Formulation::ThreeD => {
            let archive = evolve(
                n,
                config,
                &mut rng,
                |x| evaluator.eval_3d(x),
                every,
                |i, a| observer(i, ArchiveRef::ThreeD(a)),
            );
            let max = archive.max_size_seen();
            (ArchiveDump::ThreeD(archive), max)
        }
        Formulation::TwoD { k } => {
            let archive = evolve(
                n,
                config,
                &mut rng,
                |x| evaluator.eval_2d(x, k),
                every,
                |i, a| observer(i, ArchiveRef::TwoD(a)),
            );
            let max = archive.max_size_seen();
            (ArchiveDump::TwoD(archive), max)
        }
    };

    Ok(RunRecord {
        algorithm: None,
        config: *config,
        archive,
        max_population_size,
        evaluations_used: config.budget + 1,
        wall_time: started.elapsed(),
    })
}

fn evolve<O: ParetoObjective>(
    n: usize,
    config: &AlgorithmConfig,
    rng: &mut Stream,
    mut evaluate: impl FnMut(&Solution) -> O,
    every: u64,
    mut observer: impl FnMut(u64, &ParetoArchive<O>),
) -> ParetoArchive<O> {
    let initial = match config.init {
        Initialization::UniformRandom => {
            let bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            Solution::from_bits(&bits)
        }
        Initialization::AllZeros => Solution::zeros(n),
    };
    let mut archive = ParetoArchive::new(n);
    let f = evaluate(&initial);
    archive.try_insert(initial, f);

    for iteration in 1..=config.budget {
        let mut child = archive
            .sample_uniform(rng)
            .expect("the archive is never empty after the first insert")
            .clone();
        mutate_in_place(&mut child, config.mutation, rng);
        let f = evaluate(&child);
        archive.try_insert(child, f);
        if every > 0 && iteration % every == 0 {
            observer(iteration, &archive);
        }
    }
    if every == 0 || !config.budget.is_multiple_of(every) {
        observer(config.budget, &archive);
    }
    archive
}

impl RunRecord {
    pub fn bits(&self) -> usize {
        self.archive.bits()
    }

    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &RunRecord) -> bool {
        self.algorithm == other.algorithm
            && self.config == other.config
            && self.archive == other.archive
            && self.max_population_size == other.max_population_size
            && self.evaluations_used == other.evaluations_used
    }

    /// Line-oriented text; see the crate README for the field list.
    pub fn to_text(&self) -> String {
        let algorithm = self.algorithm.map_or("custom", Algorithm::name);
        format!(
            "run-record 1\nalgorithm {algorithm}\nseed {}\nformulation {}\nmutation {}\ninit {}\nbudget {}\nn {}\n\
             evaluations {}\nmax-population {}\nwall-time-ms {:.3}\n{}",
            self.config.seed,
            self.config.formulation,
            self.config.mutation,
            self.config.init,
            self.config.budget,
            self.bits(),
            self.evaluations_used,
            self.max_population_size,
            self.wall_time.as_secs_f64() * 1e3,
            self.archive.dump(),
        )
    }

    pub fn parse(text: &str) -> Result<RunRecord> {
        let origin = "<run record>";
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut field = |key: &str| -> Result<(usize, String)> {
            let (lineno, line) = lines
                .next()
                .ok_or_else(|| Error::parse(origin, 0, format!("missing field {key:?}")))?;
            match line.split_once(' ') {
                Some((k, v)) if k == key => Ok((lineno, v.trim().to_string())),
                _ => Err(Error::parse(origin, lineno, format!("expected field {key:?}"))),
            }
        };
        fn value<T: FromStr>(origin: &str, (lineno, raw): (usize, String)) -> Result<T> {
            raw.parse()
                .map_err(|_| Error::parse(origin, lineno, format!("bad value {raw:?}")))
        }

        let (lineno, version) = field("run-record")?;
        if version != "1" {
            return Err(Error::parse(origin, lineno, format!("unsupported version {version}")));
        }
        let (_, algorithm) = field("algorithm")?;
        let algorithm = if algorithm == "custom" {
            None
        } else {
            Some(algorithm.parse()?)
        };
        let seed = value(origin, field("seed")?)?;
        let formulation = value(origin, field("formulation")?)?;
        let mutation = value(origin, field("mutation")?)?;
        let init = value(origin, field("init")?)?;
        let budget = value(origin, field("budget")?)?;
        let n: usize = value(origin, field("n")?)?;
        let evaluations_used = value(origin, field("evaluations")?)?;
        let max_population_size = value(origin, field("max-population")?)?;
        let wall_ms: f64 = value(origin, field("wall-time-ms")?)?;
        let archive = ArchiveDump::parse_lines(&mut lines)?;
        if archive.bits() != n {
            return Err(Error::parse(origin, 8, "archive length differs from n"));
        }
        Ok(RunRecord {
            algorithm,
            config: AlgorithmConfig {
                formulation,
                mutation,
                budget,
                seed,
                init,
            },
            archive,
            max_population_size,
            evaluations_used,
            wall_time: Duration::from_secs_f64(wall_ms.max(0.0) / 1e3),
        })
    }
}

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.
//!
//! Run a subset with `cargo test --test acceptance -- 1 4 8`.
//!
//! Every exact optimum below comes from enumeration written here, not from
//! the crate's oracle module.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use chance_pareto::archive::ParetoArchive;
use chance_pareto::chance::{lambda_breakpoints, normal_quantile, upper_quantile};
use chance_pareto::engine::{self, Initialization};
use chance_pareto::experiments::{self, stats, ExperimentConfig, GraphSource, ReportFormat};
use chance_pareto::graph::GraphModel;
use chance_pareto::instance::generate_weights;
use chance_pareto::objectives::{eval_2d, ObjectiveVector2D, ObjectiveVector3D};
use chance_pareto::oracle::{build_extreme_set, extract_max_c, extract_min_weight, greedy_optimum};
use chance_pareto::rng::{derive_seed, stream};
use chance_pareto::{
    Algorithm, ConfidenceLevel, ConstraintFunction, Graph, Solution, StochasticInstance, WeightSetting, BETA_GRID,
};
use rand::seq::SliceRandom;
use rand::Rng;

const SEED: u64 = 20_240_601;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

fn within_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Every subset of a small instance with its moments, summed in index order.
struct Enumeration {
    n: usize,
    rows: Vec<(u64, usize, f64, f64)>,
}

impl Enumeration {
    fn new(instance: &StochasticInstance) -> Self {
        let n = instance.n();
        let rows = (0..1u64 << n)
            .map(|mask| {
                let (mut mu, mut var) = (0.0, 0.0);
                for i in 0..n {
                    if mask >> i & 1 == 1 {
                        mu += instance.mu()[i];
                        var += instance.var()[i];
                    }
                }
                (mask, mask.count_ones() as usize, mu, var)
            })
            .collect();
        Enumeration { n, rows }
    }

    /// `min { w_hat(x) : |x| >= k }` for every `k`.
    fn min_weight(&self, k_alpha: f64) -> Vec<f64> {
        let mut exact = vec![f64::INFINITY; self.n + 1];
        for &(_, c, mu, var) in &self.rows {
            exact[c] = exact[c].min(mu + k_alpha * var.sqrt());
        }
        for k in (0..self.n).rev() {
            exact[k] = exact[k].min(exact[k + 1]);
        }
        exact
    }

    /// `max { |x| : w_hat(x) <= budget }`.
    fn max_count(&self, k_alpha: f64, budget: f64) -> usize {
        self.rows
            .iter()
            .filter(|r| r.2 + k_alpha * r.3.sqrt() <= budget)
            .map(|r| r.1)
            .max()
            .unwrap_or(0)
    }
}

fn random_instance(n: usize, seed: u64) -> StochasticInstance {
    generate_weights(WeightSetting::Uniform, &vec![0; n], n, &mut stream(seed)).unwrap()
}

fn small_instances() -> Vec<StochasticInstance> {
    let mut rng = stream(derive_seed(SEED, "small-instances", 0));
    (0..50)
        .map(|i| random_instance(rng.random_range(6..=12), derive_seed(SEED, "small-instance", i)))
        .collect()
}

/// `erfc` from the Maclaurin series of `erf` below 2 and the Laplace
/// continued fraction (modified Lentz) above.
fn reference_erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - reference_erfc(-x);
    }
    if x < 2.0 {
        let (mut term, mut sum) = (x, x);
        for n in 1..200 {
            term *= -x * x / n as f64;
            let next = term / (2 * n + 1) as f64;
            sum += next;
            if next.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        return 1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum;
    }
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let tiny = 1e-300;
    let mut f = x;
    let (mut c, mut d) = (x, 0.0);
    for n in 1..500 {
        let a = n as f64 / 2.0;
        d = x + a * d;
        d = if d.abs() < tiny { 1.0 / tiny } else { 1.0 / d };
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-x * x).exp() / (std::f64::consts::PI.sqrt() * f)
}

/// Upper-tail quantile by bisection on `0.5 erfc(z / sqrt 2)`.
fn bisect_upper_quantile(beta: f64) -> f64 {
    let tail = |z: f64| 0.5 * reference_erfc(z / std::f64::consts::SQRT_2);
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if tail(mid) > beta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Upper-tail quantiles of the standard grid, computed once at 60 digits.
const GRID_QUANTILES: [f64; 10] = [
    0.841_621_233_572_914_2,
    1.281_551_565_544_600_5,
    2.326_347_874_040_841,
    3.719_016_485_455_680_6,
    4.753_424_308_822_899,
    5.612_001_244_174_789,
    6.361_340_902_404_056,
    7.034_483_825_301_132,
    7.650_628_092_935_269,
    8.222_082_216_130_436,
];

fn criterion_1() -> Verdict {
    let mut rng = stream(derive_seed(SEED, "quantile", 0));
    let mut betas: Vec<f64> = BETA_GRID.to_vec();
    // half spread uniformly in alpha, half uniformly in log10(beta)
    for i in 0..100 {
        let beta = if i % 2 == 0 {
            1.0 - rng.random_range(0.5..1.0)
        } else {
            10f64.powf(rng.random_range(-16.0..0.5f64.log10()))
        };
        if beta > 1e-16 && beta < 0.5 {
            betas.push(beta);
        }
    }
    let mut worst = 0.0f64;
    for &beta in &betas {
        let expected = bisect_upper_quantile(beta);
        let by_beta = upper_quantile(beta).unwrap();
        worst = worst.max((by_beta - expected).abs());
        // Where 1 - beta is exact, the alpha route must agree as well.
        let alpha = 1.0 - beta;
        if 1.0 - alpha == beta {
            worst = worst.max((normal_quantile(alpha).unwrap() - expected).abs());
        }
    }
    let mut oracle_drift = 0.0f64;
    for (&beta, &frozen) in BETA_GRID.iter().zip(&GRID_QUANTILES) {
        worst = worst.max((upper_quantile(beta).unwrap() - frozen).abs());
        oracle_drift = oracle_drift.max((bisect_upper_quantile(beta) - frozen).abs());
    }
    Verdict::new(
        worst <= 1e-10 && oracle_drift <= 1e-12,
        format!(
            "{} levels, max abs error {worst:.2e} (bisection vs frozen grid {oracle_drift:.1e})",
            betas.len()
        ),
    )
}

fn criterion_2(instances: &[StochasticInstance]) -> Verdict {
    let mut checks = 0usize;
    let mut mismatches = 0usize;
    for inst in instances {
        let all = Enumeration::new(inst);
        let mut lambdas = vec![0.0, 1.0];
        lambdas.extend_from_slice(lambda_breakpoints(inst).midpoints());
        for &lambda in &lambdas {
            let f = |mu: f64, var: f64| lambda * mu + (1.0 - lambda) * var;
            let mut best = vec![f64::INFINITY; inst.n() + 1];
            for &(_, c, mu, var) in &all.rows {
                best[c] = best[c].min(f(mu, var));
            }
            for (k, &expected) in best.iter().enumerate() {
                let x = greedy_optimum(inst, k, lambda).unwrap();
                let (mu, var) = inst.moments(&x);
                checks += 1;
                if x.count_ones() != k || !within_rel(f(mu, var), expected, 1e-9) {
                    mismatches += 1;
                }
            }
        }
    }
    Verdict::new(
        mismatches == 0,
        format!("{checks} (instance, k, lambda) checks, {mismatches} mismatches"),
    )
}

fn criterion_3(instances: &[StochasticInstance]) -> Verdict {
    let card = ConstraintFunction::Cardinality;
    let (mut min_checks, mut max_checks, mut mismatches) = (0usize, 0usize, 0usize);
    for inst in instances {
        let n = inst.n();
        let all = Enumeration::new(inst);
        let extreme = build_extreme_set(inst);
        let members: Vec<Solution> = extreme.solutions().cloned().collect();
        for &beta in &BETA_GRID {
            let cl = ConfidenceLevel::from_beta(beta).unwrap();
            let expected = all.min_weight(cl.k_alpha());
            let mut optima = Vec::with_capacity(n + 1);
            for (k, &e) in expected.iter().enumerate() {
                min_checks += 1;
                match extract_min_weight(&members, inst, &cl, k, &card).unwrap() {
                    Some((x, value)) if within_rel(value, e, 1e-9) => optima.push(x),
                    _ => mismatches += 1,
                }
            }
            // budgets: every optimum's weight and the midpoints between them
            let mut budgets: Vec<f64> = expected.clone();
            budgets.sort_by(f64::total_cmp);
            budgets.dedup();
            let mids: Vec<f64> = budgets.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
            budgets.extend(mids);
            for budget in budgets {
                max_checks += 1;
                let found = extract_max_c(&optima, inst, &cl, budget, &card).unwrap().map(|r| r.1);
                if found != Some(all.max_count(cl.k_alpha(), budget)) {
                    mismatches += 1;
                }
            }
        }
    }
    Verdict::new(
        mismatches == 0,
        format!("{min_checks} min-weight and {max_checks} max-c queries, {mismatches} mismatches"),
    )
}

/// Runs `algorithm` on 20 seeded n = 10 instances and counts the runs whose
/// final archive answers every (k, beta) min-weight query optimally.
fn one_bit_sufficiency(algorithm: Algorithm) -> Verdict {
    let card = ConstraintFunction::Cardinality;
    let n = 10;
    let mut good = 0;
    let mut largest_archive = 0;
    for run in 0..20u64 {
        let inst = random_instance(n, derive_seed(SEED, "sufficiency", run));
        let all = Enumeration::new(&inst);
        let seed = derive_seed(SEED, algorithm.name(), run);
        let record = engine::run(
            &inst,
            &card,
            &algorithm.config(n, 1_000_000, seed, Initialization::UniformRandom),
        )
        .unwrap();
        let archive = record.archive.solutions();
        largest_archive = largest_archive.max(record.max_population_size);
        let complete = BETA_GRID.iter().all(|&beta| {
            let cl = ConfidenceLevel::from_beta(beta).unwrap();
            all.min_weight(cl.k_alpha()).iter().enumerate().all(|(k, &e)| {
                matches!(extract_min_weight(archive, &inst, &cl, k, &card).unwrap(), Some((_, v)) if within_rel(v, e, 1e-9))
            })
        });
        good += usize::from(complete);
    }
    Verdict::new(
        good >= 19,
        format!("{good}/20 runs optimal for every (k, beta); largest archive {largest_archive}"),
    )
}

fn brute_invariants<O: PartialEq>(vectors: &[O], weakly: impl Fn(&O, &O) -> bool) -> usize {
    let mut violations = 0;
    for (i, a) in vectors.iter().enumerate() {
        for b in &vectors[i + 1..] {
            if a == b || weakly(a, b) || weakly(b, a) {
                violations += 1;
            }
        }
    }
    violations
}

fn criterion_6() -> Verdict {
    let mut rng = stream(derive_seed(SEED, "archive-fuzz", 0));
    let mut a3 = ParetoArchive::<ObjectiveVector3D>::new(24);
    let mut a2 = ParetoArchive::<ObjectiveVector2D>::new(24);
    let weak3 = |a: &ObjectiveVector3D, b: &ObjectiveVector3D| a.mu <= b.mu && a.v <= b.v && a.c >= b.c;
    let weak2 = |a: &ObjectiveVector2D, b: &ObjectiveVector2D| a.mu_hat <= b.mu_hat && a.v_hat <= b.v_hat;
    let (mut checkpoints, mut violations, mut peak) = (0, 0, (0, 0));
    for step in 1..=1_000_000u32 {
        let x = Solution::from_mask(24, rng.random_range(0..1 << 24));
        // vectors near a trade-off surface, so the archive stays large
        let (mu, v) = (rng.random_range(0..300u32), rng.random_range(0..300u32));
        let v3 = ObjectiveVector3D {
            mu: mu as f64,
            v: v as f64,
            c: ((mu + v) / 25 + rng.random_range(0..2)) as usize,
        };
        let mu_hat = rng.random_range(0..2000u32);
        let v2 = ObjectiveVector2D {
            mu_hat: mu_hat as f64,
            v_hat: (2000 - mu_hat + rng.random_range(0..40)) as f64,
        };
        a3.try_insert(x.clone(), v3);
        a2.try_insert(x, v2);
        if step % 10_000 == 0 {
            checkpoints += 1;
            // any weak dominance between distinct members breaks an invariant
            violations += brute_invariants(a3.vectors(), weak3) + brute_invariants(a2.vectors(), weak2);
            violations += usize::from(a3.check_invariants().is_err()) + usize::from(a2.check_invariants().is_err());
            peak = (peak.0.max(a2.len()), peak.1.max(a3.len()));
        }
    }
    Verdict::new(
        violations == 0,
        format!(
            "{checkpoints} checkpoints, {violations} violations, peak archive sizes 2D {} / 3D {}",
            peak.0, peak.1
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut rng = stream(derive_seed(SEED, "penalty", 0));
    let (mut instances, mut pairs, mut violations) = (0, 0u64, 0);
    for n in 1..=10usize {
        for rep in 0..3 {
            let inst = random_instance(n, derive_seed(SEED, "penalty-instance", (n * 10 + rep) as u64));
            let mut constraints = vec![ConstraintFunction::Cardinality];
            if n >= 2 {
                let edges: Vec<(usize, usize)> = (0..n)
                    .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                    .filter(|_| rng.random_bool(0.3))
                    .collect();
                constraints.push(ConstraintFunction::DominationCount(
                    Graph::from_edges(n, edges).unwrap().0.into(),
                ));
            }
            for c in &constraints {
                instances += 1;
                let xs: Vec<Solution> = (0..1u64 << n).map(|m| Solution::from_mask(n, m)).collect();
                let cs: Vec<usize> = xs.iter().map(|x| c.value(x).unwrap()).collect();
                for k in 0..=c.max_value(n) {
                    let fs: Vec<ObjectiveVector2D> = xs.iter().map(|x| eval_2d(&inst, x, k, c).unwrap()).collect();
                    let (feasible, infeasible): (Vec<_>, Vec<_>) = fs.iter().zip(&cs).partition(|(_, &c)| c >= k);
                    for (fi, _) in &infeasible {
                        for (fj, _) in &feasible {
                            pairs += 1;
                            if fi.mu_hat <= fj.mu_hat && fi.v_hat <= fj.v_hat {
                                violations += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Verdict::new(
        violations == 0,
        format!("{instances} (instance, constraint) cases, {pairs} infeasible/feasible pairs, {violations} violations"),
    )
}

/// Two-sided p-value by listing every split of the pooled sample.
fn enumerate_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let u = |mask: u32| -> f64 {
        let mut u = 0.0;
        for i in (0..n).filter(|i| mask >> i & 1 == 1) {
            for j in (0..n).filter(|j| mask >> j & 1 == 0) {
                u += if pooled[i] > pooled[j] {
                    1.0
                } else if pooled[i] == pooled[j] {
                    0.5
                } else {
                    0.0
                };
            }
        }
        u
    };
    let centre = (a.len() * b.len()) as f64 / 2.0;
    let observed = (u((1 << a.len()) - 1) - centre).abs();
    let (mut extreme, mut total) = (0u64, 0u64);
    for mask in (0..1u32 << n).filter(|m| m.count_ones() as usize == a.len()) {
        total += 1;
        if (u(mask) - centre).abs() >= observed {
            extreme += 1;
        }
    }
    extreme as f64 / total as f64
}

fn criterion_8() -> Verdict {
    let p_disjoint = stats::mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
    let p_same = stats::mann_whitney_u(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
    let p_tied = stats::mann_whitney_u(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
    let mut pass = (p_disjoint - 0.1).abs() < 1e-12 && p_same == 1.0 && p_tied == 1.0;
    pass &= (enumerate_p(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]) - 0.1).abs() < 1e-12;

    let mut rng = stream(derive_seed(SEED, "mann-whitney", 0));
    let mut worst = 0.0f64;
    let mut oracle_worst = 0.0f64;
    for trial in 0..100 {
        let mut pool: Vec<f64> = (0..20).map(|i| i as f64 + rng.random_range(0.0..0.9)).collect();
        pool.shuffle(&mut rng);
        let shift = rng.random_range(0.0..6.0);
        let a = pool[..10].to_vec();
        let b: Vec<f64> = pool[10..].iter().map(|v| v + shift).collect();
        let exact = stats::mann_whitney_exact(&a, &b).unwrap();
        let approx = stats::mann_whitney_normal(&a, &b).unwrap();
        worst = worst.max((exact - approx).abs());
        if trial < 5 {
            oracle_worst = oracle_worst.max((exact - enumerate_p(&a, &b)).abs());
        }
    }
    pass &= worst <= 0.02 && oracle_worst < 1e-12;
    Verdict::new(
        pass,
        format!(
            "p(disjoint) {p_disjoint}, p(identical) {p_same}, p(tied) {p_tied}; \
             max |exact - normal| {worst:.4} over 100 samples; exact vs enumeration {oracle_worst:.1e}"
        ),
    )
}

fn study(weights: WeightSetting) -> ExperimentConfig {
    ExperimentConfig {
        graph: GraphSource::Synthetic {
            model: GraphModel::RandomRegular(4),
            nodes: 200,
        },
        weights,
        algorithms: vec![Algorithm::Gsemo2D, Algorithm::Gsemo3D],
        runs: 10,
        budget: 1_000_000,
        betas: BETA_GRID.to_vec(),
        master_seed: SEED,
        ..ExperimentConfig::default()
    }
}

fn criterion_9(report: &experiments::ComparisonReport) -> Verdict {
    let two = report.summary(Algorithm::Gsemo2D).unwrap().pop_mean;
    let three = report.summary(Algorithm::Gsemo3D).unwrap().pop_mean;
    Verdict::new(
        three >= 5.0 * two,
        format!(
            "mean max population GSEMO3D {three:.1} vs GSEMO2D {two:.1} (ratio {:.1})",
            three / two
        ),
    )
}

fn criterion_10(report: &experiments::ComparisonReport) -> Verdict {
    let j = report.betas.iter().position(|&b| b == 1e-16).unwrap();
    let two = report.summary(Algorithm::Gsemo2D).unwrap();
    let three = report.summary(Algorithm::Gsemo3D).unwrap();
    let mut wins = 0;
    for (r2, r3) in two.runs.iter().zip(&three.runs) {
        wins += usize::from(match (&r2.values, &r3.values) {
            (Some(v2), Some(v3)) => v3[j] <= v2[j],
            (None, Some(_)) => true,
            _ => false,
        });
    }
    Verdict::new(
        wins >= 8,
        format!(
            "GSEMO3D <= GSEMO2D at beta=1e-16 in {wins}/10 instances (means {:.1} vs {:.1})",
            three.means[j].unwrap_or(f64::NAN),
            two.means[j].unwrap_or(f64::NAN)
        ),
    )
}

fn main() -> ExitCode {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let selected = |c: usize| wanted.is_empty() || wanted.contains(&c);
    let mut failures = 0;
    let mut report = |c: usize, limit: Duration, started: Instant, v: Verdict| {
        let elapsed = started.elapsed();
        let pass = v.pass && elapsed <= limit;
        failures += usize::from(!pass);
        println!(
            "criterion {c:>2} {} {} [{:.1}s, limit {}s]",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    };
    let secs = Duration::from_secs;

    if selected(1) {
        let t = Instant::now();
        report(1, secs(1), t, criterion_1());
    }
    if selected(2) || selected(3) {
        let instances = small_instances();
        if selected(2) {
            let t = Instant::now();
            report(2, secs(30), t, criterion_2(&instances));
        }
        if selected(3) {
            let t = Instant::now();
            report(3, secs(60), t, criterion_3(&instances));
        }
    }
    if selected(4) {
        let t = Instant::now();
        report(4, secs(300), t, one_bit_sufficiency(Algorithm::Semo3D));
    }
    if selected(5) {
        let t = Instant::now();
        report(5, secs(300), t, one_bit_sufficiency(Algorithm::Gsemo3D));
    }
    if selected(6) {
        let t = Instant::now();
        report(6, secs(600), t, criterion_6());
    }
    if selected(7) {
        let t = Instant::now();
        report(7, secs(600), t, criterion_7());
    }
    if selected(8) {
        let t = Instant::now();
        report(8, secs(60), t, criterion_8());
    }
    if selected(9) {
        let t = Instant::now();
        let r = experiments::run_experiment(&study(WeightSetting::Uniform)).unwrap();
        report(9, secs(900), t, criterion_9(&r));
    }
    if selected(10) || selected(11) {
        let t = Instant::now();
        let config = study(WeightSetting::DegreeBased);
        let first = experiments::run_experiment(&config).unwrap();
        if selected(10) {
            report(10, secs(900), t, criterion_10(&first));
        }
        if selected(11) {
            let t = Instant::now();
            let second = experiments::run_experiment(&config).unwrap();
            let csv =
                |r| experiments::emit_report(r, ReportFormat::Csv) + &experiments::emit_runs(r, ReportFormat::Csv);
            let (a, b) = (csv(&first), csv(&second));
            report(
                11,
                secs(900),
                t,
                Verdict::new(
                    a == b,
                    format!(
                        "repeated degree-based study: {} CSV bytes, identical: {}",
                        a.len(),
                        a == b
                    ),
                ),
            );
        }
    }

    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}

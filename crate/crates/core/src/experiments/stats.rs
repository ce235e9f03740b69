//! Summary statistics and the two-sided Mann-Whitney U test.

use crate::chance::normal_sf;
use crate::error::{Error, Result};

/// Combined sample size up to which [`mann_whitney_u`] enumerates the exact
/// permutation distribution.
pub const EXACT_LIMIT: usize = 20;

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Sample standard deviation (divisor `len - 1`); absent below two values.
pub fn sample_std(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values)?;
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}

/// Midranks of the pooled sample, doubled so they are integers, together
/// with the tie groups' sizes.
fn doubled_midranks(a: &[f64], b: &[f64]) -> Result<(Vec<u64>, Vec<usize>)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Validation("Mann-Whitney needs two non-empty samples".into()));
    }
    if let Some(v) = a.iter().chain(b).find(|v| !v.is_finite()) {
        return Err(Error::Domain(*v, "finite sample values"));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));

    let mut ranks = vec![0u64; pooled.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && pooled[order[end]] == pooled[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share the rank (start + 1 + end) / 2
        let doubled = (start + 1 + end) as u64;
        for &i in &order[start..end] {
            ranks[i] = doubled;
        }
        ties.push(end - start);
        start = end;
    }
    Ok((ranks, ties))
}

/// `U` for sample `a`: the number of pairs `(x in a, y in b)` with `x > y`,
/// ties counting one half.
pub fn u_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    let (ranks, _) = doubled_midranks(a, b)?;
    let rank_sum: u64 = ranks[..a.len()].iter().sum();
    let na = a.len() as f64;
    Ok(rank_sum as f64 / 2.0 - na * (na + 1.0) / 2.0)
}

/// Two-sided p-value by exact enumeration of all `C(N, |a|)` ways to assign
/// the pooled midranks to sample `a`.
pub fn mann_whitney_exact(a: &[f64], b: &[f64]) -> Result<f64> {
    let (ranks, _) = doubled_midranks(a, b)?;
    let total = ranks.len();
    if total > EXACT_LIMIT {
        return Err(Error::TooLarge {
            n: total,
            limit: EXACT_LIMIT,
        });
    }
    let na = a.len();
    let max_sum: usize = ranks.iter().sum::<u64>() as usize;
    // ways[j][s]: subsets of size j with doubled rank sum s
    let mut ways = vec![vec![0u64; max_sum + 1]; na + 1];
    ways[0][0] = 1;
    for &r in &ranks {
        let r = r as usize;
        for j in (1..=na).rev() {
            for s in (r..=max_sum).rev() {
                ways[j][s] += ways[j - 1][s - r];
            }
        }
    }
    let observed: i64 = ranks[..na].iter().sum::<u64>() as i64;
    // E[doubled rank sum] = na (N + 1)
    let centre = (na * (total + 1)) as i64;
    let deviation = (observed - centre).abs();
    let subsets: u64 = ways[na].iter().sum();
    let extreme: u64 = ways[na]
        .iter()
        .enumerate()
        .filter(|&(s, _)| (s as i64 - centre).abs() >= deviation)
        .map(|(_, &w)| w)
        .sum();
    Ok((extreme as f64 / subsets as f64).min(1.0))
}

/// Two-sided p-value from the Normal approximation with tie and continuity
/// corrections.
pub fn mann_whitney_normal(a: &[f64], b: &[f64]) -> Result<f64> {
    let (ranks, ties) = doubled_midranks(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let u = ranks[..a.len()].iter().sum::<u64>() as f64 / 2.0 - na * (na + 1.0) / 2.0;
    let centre = na * nb / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
    let variance = if n > 1.0 {
        na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)))
    } else {
        0.0
    };
    if variance <= 0.0 {
        return Ok(1.0);
    }
    let z = ((u - centre).abs() - 0.5).max(0.0) / variance.sqrt();
    Ok((2.0 * normal_sf(z)).min(1.0))
}

/// Two-sided Mann-Whitney U p-value: exact for combined sizes up to
/// [`EXACT_LIMIT`], Normal approximation beyond.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() + b.len() <= EXACT_LIMIT {
        mann_whitney_exact(a, b)
    } else {
        mann_whitney_normal(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::Rng;

    /// Enumerates every split of the pooled sample directly.
    fn brute_force_p(a: &[f64], b: &[f64]) -> f64 {
        let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
        let n = pooled.len();
        let u_of = |mask: u32| {
            let (xa, xb): (Vec<f64>, Vec<f64>) = {
                let mut xa = Vec::new();
                let mut xb = Vec::new();
                for (i, &v) in pooled.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        xa.push(v)
                    } else {
                        xb.push(v)
                    }
                }
                (xa, xb)
            };
            let mut u = 0.0;
            for x in &xa {
                for y in &xb {
                    u += if x > y {
                        1.0
                    } else if x == y {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
            u
        };
        let centre = (a.len() * b.len()) as f64 / 2.0;
        let observed = (u_of((1 << a.len()) - 1) - centre).abs();
        let masks: Vec<u32> = (0..1u32 << n).filter(|m| m.count_ones() as usize == a.len()).collect();
        let extreme = masks
            .iter()
            .filter(|&&m| (u_of(m) - centre).abs() >= observed - 1e-9)
            .count();
        extreme as f64 / masks.len() as f64
    }

    #[test]
    fn exact_examples() {
        assert!((mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(mann_whitney_u(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(mann_whitney_u(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(u_statistic(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap(), 0.0);
        assert_eq!(u_statistic(&[4.0, 5.0, 6.0], &[1.0, 2.0, 3.0]).unwrap(), 9.0);
    }

    #[test]
    fn errors() {
        assert!(mann_whitney_u(&[], &[1.0]).is_err());
        assert!(mann_whitney_u(&[1.0], &[]).is_err());
        assert!(mann_whitney_u(&[f64::NAN], &[1.0]).is_err());
        let big: Vec<f64> = (0..21).map(f64::from).collect();
        assert!(mann_whitney_exact(&big[..11], &big[11..]).is_err());
    }

    #[test]
    fn all_tied_is_not_significant() {
        assert_eq!(mann_whitney_normal(&[2.0; 15], &[2.0; 15]).unwrap(), 1.0);
        assert_eq!(mann_whitney_exact(&[2.0; 5], &[2.0; 5]).unwrap(), 1.0);
    }

    #[test]
    fn exact_matches_enumeration_with_ties() {
        let mut rng = stream(8);
        for _ in 0..40 {
            let na = rng.random_range(1..7);
            let nb = rng.random_range(1..7);
            let a: Vec<f64> = (0..na).map(|_| rng.random_range(0..5) as f64).collect();
            let b: Vec<f64> = (0..nb).map(|_| rng.random_range(0..5) as f64).collect();
            let exact = mann_whitney_exact(&a, &b).unwrap();
            assert!((exact - brute_force_p(&a, &b)).abs() < 1e-12, "{a:?} {b:?}");
        }
    }

    #[test]
    fn approximation_tracks_exact_on_ten_vs_ten() {
        let mut rng = stream(9);
        let mut pool: Vec<f64> = (0..20).map(f64::from).collect();
        for _ in 0..100 {
            pool.shuffle(&mut rng);
            let shift = rng.random_range(0.0..8.0);
            let a: Vec<f64> = pool[..10].to_vec();
            let b: Vec<f64> = pool[10..].iter().map(|v| v + shift + 0.5).collect();
            let exact = mann_whitney_exact(&a, &b).unwrap();
            let approx = mann_whitney_normal(&a, &b).unwrap();
            assert!((exact - approx).abs() <= 0.02, "{exact} vs {approx}");
        }
    }

    #[test]
    fn mean_and_std() {
        assert_eq!(mean(&[]), None);
        assert_eq!(mean(&[1.0, 2.0, 6.0]), Some(3.0));
        assert_eq!(sample_std(&[5.0]), None);
        assert_eq!(sample_std(&[1.0, 3.0]), Some(2f64.sqrt()));
    }

    proptest! {
        #[test]
        fn p_values_are_probabilities_and_symmetric(
            a in proptest::collection::vec(0u8..6, 1..11),
            b in proptest::collection::vec(0u8..6, 1..11),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            for p in [mann_whitney_exact(&a, &b).unwrap(), mann_whitney_normal(&a, &b).unwrap()] {
                prop_assert!((0.0..=1.0).contains(&p));
            }
            prop_assert_eq!(mann_whitney_exact(&a, &b).unwrap(), mann_whitney_exact(&b, &a).unwrap());
            let ua = u_statistic(&a, &b).unwrap();
            let ub = u_statistic(&b, &a).unwrap();
            prop_assert_eq!(ua + ub, (a.len() * b.len()) as f64);
        }
    }
}

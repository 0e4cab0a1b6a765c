//! Two-sample Mann-Whitney U test.
//!
//! Small tie-free samples use the exact null distribution of U built with the
//! counting recurrence `f(u; m, n) = f(u - n; m - 1, n) + f(u; m, n - 1)`.
//! Everything else falls back to the normal approximation with tie-corrected
//! variance and a 0.5 continuity correction.

pub mod enumeration;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Pooled sizes up to this bound use the exact distribution when tie-free.
pub const EXACT_CUTOFF: usize = 20;

/// Beyond this the u64 subset counts could overflow.
const EXACT_MAX_POOLED: usize = 60;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Alternative {
    #[default]
    TwoSided,
    /// The first sample tends to be larger than the second.
    Greater,
    /// The first sample tends to be smaller than the second.
    Less,
}

impl Alternative {
    pub fn as_str(self) -> &'static str {
        match self {
            Alternative::TwoSided => "two-sided",
            Alternative::Greater => "greater",
            Alternative::Less => "less",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "two-sided" | "twosided" => Some(Alternative::TwoSided),
            "greater" => Some(Alternative::Greater),
            "less" => Some(Alternative::Less),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    NormalApprox,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MwuResult {
    /// U of the first sample.
    pub u_statistic: f64,
    pub p_value: f64,
    pub method: Method,
}

/// Midranks (1-based) of `pooled`; tied values share the mean of their positions.
pub fn rank_with_ties(pooled: &[f64]) -> Result<Vec<f64>> {
    if pooled.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(&bad) = pooled.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));

    let mut ranks = vec![0.0; pooled.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && pooled[order[end]] == pooled[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their average
        let midrank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = midrank;
        }
        start = end;
    }
    Ok(ranks)
}

/// Sizes of the groups of equal values in `pooled` (singletons included).
pub fn tie_groups(pooled: &[f64]) -> Vec<usize> {
    let mut sorted = pooled.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut groups = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        groups.push(end - start);
        start = end;
    }
    groups
}

/// Number of group assignments yielding each `u` in `0..=n1 * n2`.
pub fn exact_counts(n1: usize, n2: usize) -> Vec<u64> {
    // table[m][n] holds the count vector for sizes (m, n)
    let mut table: Vec<Vec<Vec<u64>>> = vec![vec![Vec::new(); n2 + 1]; n1 + 1];
    for m in 0..=n1 {
        for n in 0..=n2 {
            table[m][n] = if m == 0 || n == 0 {
                vec![1]
            } else {
                let mut counts = vec![0u64; m * n + 1];
                for (u, slot) in counts.iter_mut().enumerate() {
                    let with_largest_in_first = if u >= n {
                        table[m - 1][n].get(u - n).copied().unwrap_or(0)
                    } else {
                        0
                    };
                    let with_largest_in_second = table[m][n - 1].get(u).copied().unwrap_or(0);
                    *slot = with_largest_in_first + with_largest_in_second;
                }
                counts
            };
        }
    }
    std::mem::take(&mut table[n1][n2])
}

/// Exact p-value of `u` for sample sizes `n1`, `n2`. Requires an integer `u`
/// (tie-free data).
pub fn exact_p(u: f64, n1: usize, n2: usize, alt: Alternative) -> Result<f64> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::EmptySample);
    }
    if n1 + n2 > EXACT_MAX_POOLED {
        return Err(Error::InvalidInput(format!(
            "exact distribution limited to {EXACT_MAX_POOLED} pooled values"
        )));
    }
    if u.fract() != 0.0 {
        return Err(Error::TiesPresent);
    }
    let max_u = n1 * n2;
    if !(0.0..=max_u as f64).contains(&u) {
        return Err(Error::InvalidInput(format!("U = {u} outside [0, {max_u}]")));
    }
    let u = u as usize;
    let counts = exact_counts(n1, n2);
    let total: u64 = counts.iter().sum();
    let lower: u64 = counts[..=u].iter().sum();
    let upper: u64 = counts[u..].iter().sum();
    let total = total as f64;
    let p = match alt {
        Alternative::Less => lower as f64 / total,
        Alternative::Greater => upper as f64 / total,
        Alternative::TwoSided => (2.0 * lower.min(upper) as f64 / total).min(1.0),
    };
    Ok(p)
}

fn upper_normal_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Normal approximation with tie-corrected variance and continuity correction.
///
/// `tie_groups` lists the sizes of groups of equal values in the pooled
/// sample; singletons may be included or omitted.
pub fn normal_approx_p(u: f64, n1: usize, n2: usize, tie_groups: &[usize], alt: Alternative) -> f64 {
    let (nf1, nf2) = (n1 as f64, n2 as f64);
    let n = nf1 + nf2;
    let tie_term: f64 = tie_groups
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let variance = if n > 1.0 {
        nf1 * nf2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)))
    } else {
        0.0
    };
    if variance <= 0.0 {
        return 1.0;
    }
    let sigma = variance.sqrt();
    let mean = nf1 * nf2 / 2.0;
    let p = match alt {
        Alternative::Greater => upper_normal_tail((u - mean - 0.5) / sigma),
        Alternative::Less => upper_normal_tail((mean - u - 0.5) / sigma),
        Alternative::TwoSided => 2.0 * upper_normal_tail(((u - mean).abs() - 0.5) / sigma),
    };
    p.clamp(0.0, 1.0)
}

/// Mann-Whitney U test of `a` against `b`.
pub fn mann_whitney_u(a: &[f64], b: &[f64], alt: Alternative) -> Result<MwuResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = rank_with_ties(&pooled)?;
    let (n1, n2) = (a.len(), b.len());
    let rank_sum_a: f64 = ranks[..n1].iter().sum();
    let u = rank_sum_a - (n1 * (n1 + 1)) as f64 / 2.0;

    let groups = tie_groups(&pooled);
    let has_ties = groups.iter().any(|&g| g > 1);
    if !has_ties && n1 + n2 <= EXACT_CUTOFF {
        Ok(MwuResult {
            u_statistic: u,
            p_value: exact_p(u, n1, n2, alt)?,
            method: Method::Exact,
        })
    } else {
        Ok(MwuResult {
            u_statistic: u,
            p_value: normal_approx_p(u, n1, n2, &groups, alt),
            method: Method::NormalApprox,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn ranks_of_distinct_values() {
        assert_eq!(rank_with_ties(&[5.0, 1.0, 3.0]).unwrap(), vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(rank_with_ties(&[2.0, 2.0, 7.0]).unwrap(), vec![1.5, 1.5, 3.0]);
        assert_eq!(rank_with_ties(&[4.0, 4.0, 4.0]).unwrap(), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn ranking_rejects_bad_input() {
        assert!(matches!(rank_with_ties(&[]), Err(Error::EmptySample)));
        assert!(matches!(rank_with_ties(&[1.0, f64::NAN]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn tie_group_sizes() {
        assert_eq!(tie_groups(&[3.0, 1.0, 3.0, 3.0, 2.0]), vec![1, 1, 3]);
    }

    #[test]
    fn separated_samples_one_sided() {
        let r = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], Alternative::Less).unwrap();
        assert_eq!(r.u_statistic, 0.0);
        assert_eq!(r.method, Method::Exact);
        assert!((r.p_value - 0.05).abs() < 1e-15);
    }

    #[test]
    fn separated_samples_two_sided() {
        let r = mann_whitney_u(&[1.0, 2.0], &[3.0, 4.0], Alternative::TwoSided).unwrap();
        assert_eq!(r.u_statistic, 0.0);
        assert!((r.p_value - 2.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn identical_samples_have_unit_p() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let r = mann_whitney_u(&a, &a, Alternative::TwoSided).unwrap();
        assert_eq!(r.u_statistic, 8.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn smallest_exact_case() {
        assert_eq!(exact_counts(1, 1), vec![1, 1]);
        assert_eq!(exact_p(0.0, 1, 1, Alternative::Less).unwrap(), 0.5);
        assert_eq!(exact_p(0.0, 1, 1, Alternative::TwoSided).unwrap(), 1.0);
    }

    #[test]
    fn exact_counts_sum_to_binomial() {
        for n1 in 1..=8 {
            for n2 in 1..=8 {
                let total: u64 = exact_counts(n1, n2).iter().sum();
                assert_eq!(total as f64, binom((n1 + n2) as u64, n1 as u64));
            }
        }
    }

    #[test]
    fn two_by_two_distribution() {
        // C(4,2) = 6 assignments give U = 0, 1, 2, 2, 3, 4
        assert_eq!(exact_counts(2, 2), vec![1, 1, 2, 1, 1]);
    }

    #[test]
    fn extreme_separation_seven_by_seven() {
        let reference: Vec<f64> = (0..7).map(f64::from).collect();
        let query: Vec<f64> = (10..17).map(f64::from).collect();
        let r = mann_whitney_u(&query, &reference, Alternative::TwoSided).unwrap();
        assert_eq!(r.u_statistic, 49.0);
        assert!((r.p_value - 2.0 / 3432.0).abs() < 1e-15);
    }

    #[test]
    fn exact_p_rejects_ties_and_range() {
        assert!(matches!(exact_p(2.5, 3, 3, Alternative::Less), Err(Error::TiesPresent)));
        assert!(exact_p(10.0, 3, 3, Alternative::Less).is_err());
        assert!(exact_p(0.0, 0, 3, Alternative::Less).is_err());
    }

    #[test]
    fn normal_approx_degenerate_variance() {
        assert_eq!(normal_approx_p(8.0, 4, 4, &[8], Alternative::TwoSided), 1.0);
        let r = mann_whitney_u(&[2.0; 5], &[2.0; 9], Alternative::Greater).unwrap();
        assert_eq!(r.method, Method::NormalApprox);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn normal_approx_without_ties_uses_plain_variance() {
        // sigma^2 = n1 n2 (n + 1) / 12 = 49 * 15 / 12; z = (|10 - 24.5| - 0.5) / sigma
        let sigma = (49.0_f64 * 15.0 / 12.0).sqrt();
        let z = (14.5 - 0.5) / sigma;
        let expected = 2.0 * 0.5 * erfc(z / std::f64::consts::SQRT_2);
        let p = normal_approx_p(10.0, 7, 7, &[], Alternative::TwoSided);
        assert!((p - expected).abs() < 1e-15);
    }

    #[test]
    fn normal_approx_tracks_exact_for_seven_by_seven() {
        let exact = exact_p(10.0, 7, 7, Alternative::TwoSided).unwrap();
        let approx = normal_approx_p(10.0, 7, 7, &[], Alternative::TwoSided);
        assert!((exact - approx).abs() <= 0.01, "exact {exact} approx {approx}");
    }

    #[test]
    fn ties_force_normal_approximation() {
        let r = mann_whitney_u(&[1.0, 2.0, 2.0], &[3.0, 4.0, 5.0], Alternative::TwoSided).unwrap();
        assert_eq!(r.method, Method::NormalApprox);
        assert_eq!(r.u_statistic, 0.0);
    }

    #[test]
    fn large_samples_use_normal_approximation() {
        let a: Vec<f64> = (0..15).map(f64::from).collect();
        let b: Vec<f64> = (100..110).map(f64::from).collect();
        let r = mann_whitney_u(&a, &b, Alternative::Less).unwrap();
        assert_eq!(r.method, Method::NormalApprox);
        assert!(r.p_value < 1e-3);
    }

    #[test]
    fn alternative_parsing() {
        assert_eq!(Alternative::parse("two_sided"), Some(Alternative::TwoSided));
        assert_eq!(Alternative::parse("GREATER"), Some(Alternative::Greater));
        assert_eq!(Alternative::parse("sideways"), None);
    }
}

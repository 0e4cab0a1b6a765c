//! Brute-force reference for the exact U distribution.
//!
//! Enumerates every assignment of the pooled observations to the two groups
//! and counts pairwise wins directly, sharing no code with the recurrence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{exact_p, mann_whitney_u, Alternative, Method};
use crate::error::Result;

/// U of the first group counted as pairwise wins (ties count one half).
pub fn pairwise_u(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .map(|&x| {
            b.iter()
                .map(|&y| {
                    if x > y {
                        1.0
                    } else if x == y {
                        0.5
                    } else {
                        0.0
                    }
                })
                .sum::<f64>()
        })
        .sum()
}

/// p-value of the observed split by visiting all `C(n1 + n2, n1)` relabellings.
pub fn enumerated_p(a: &[f64], b: &[f64], alt: Alternative) -> f64 {
    enumerate_tails(a, b).p_value(alt)
}

#[derive(Clone, Copy, Debug)]
struct Tails {
    total: u64,
    lower: u64,
    upper: u64,
}

impl Tails {
    fn p_value(self, alt: Alternative) -> f64 {
        let total = self.total as f64;
        match alt {
            Alternative::Less => self.lower as f64 / total,
            Alternative::Greater => self.upper as f64 / total,
            Alternative::TwoSided => (2.0 * self.lower.min(self.upper) as f64 / total).min(1.0),
        }
    }
}

fn enumerate_tails(a: &[f64], b: &[f64]) -> Tails {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    assert!(n <= 24, "enumeration only practical for small samples");
    let observed = pairwise_u(a, b);
    let (mut total, mut lower, mut upper) = (0u64, 0u64, 0u64);
    let mut first = Vec::with_capacity(a.len());
    let mut second = Vec::with_capacity(b.len());
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        first.clear();
        second.clear();
        for (i, &v) in pooled.iter().enumerate() {
            if mask & (1 << i) != 0 {
                first.push(v);
            } else {
                second.push(v);
            }
        }
        let u = pairwise_u(&first, &second);
        total += 1;
        if u <= observed {
            lower += 1;
        }
        if u >= observed {
            upper += 1;
        }
    }
    Tails { total, lower, upper }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleReport {
    pub cases: usize,
    pub max_abs_diff: f64,
}

fn tie_free_sample(rng: &mut ChaCha8Rng, len: usize, taken: &mut Vec<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let v: f64 = rng.random_range(-100.0..100.0);
        if !taken.contains(&v) {
            taken.push(v);
            out.push(v);
        }
    }
    out
}

/// Compares `exact_p` with enumeration for every `(n1, n2)` in `1..=max_n`,
/// `trials` random tie-free samples each, under all three alternatives.
pub fn check_exact_against_enumeration(max_n: usize, trials: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport {
        cases: 0,
        max_abs_diff: 0.0,
    };
    for n1 in 1..=max_n {
        for n2 in 1..=max_n {
            for _ in 0..trials {
                let mut taken = Vec::with_capacity(n1 + n2);
                let a = tie_free_sample(&mut rng, n1, &mut taken);
                let b = tie_free_sample(&mut rng, n2, &mut taken);
                let tails = enumerate_tails(&a, &b);
                for alt in [Alternative::TwoSided, Alternative::Greater, Alternative::Less] {
                    let result = mann_whitney_u(&a, &b, alt)?;
                    debug_assert_eq!(result.method, Method::Exact);
                    let direct = exact_p(result.u_statistic, n1, n2, alt)?;
                    let oracle = tails.p_value(alt);
                    let diff = (direct - oracle).abs().max((result.p_value - oracle).abs());
                    report.max_abs_diff = report.max_abs_diff.max(diff);
                    report.cases += 1;
                }
            }
        }
    }
    Ok(report)
}

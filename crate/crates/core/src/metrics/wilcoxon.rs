use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math::{erfc, sqrt};

/// Significance level for declaring a difference.
pub const SIGNIFICANCE: f64 = 0.05;

/// Which direction of an indicator is desirable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// IGD.
    LowerIsBetter,
    /// HV.
    HigherIsBetter,
}

/// Outcome for the first sample relative to the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Better,
    Worse,
    Equivalent,
}

impl Verdict {
    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::Better => "+",
            Verdict::Worse => "−",
            Verdict::Equivalent => "=",
        }
    }

    pub fn flipped(self) -> Verdict {
        match self {
            Verdict::Better => Verdict::Worse,
            Verdict::Worse => Verdict::Better,
            Verdict::Equivalent => Verdict::Equivalent,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonVerdict {
    pub verdict: Verdict,
    pub p_value: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub median_a: f64,
    pub median_b: f64,
    /// NaN entries dropped from each sample before testing.
    pub nan_removed_a: usize,
    pub nan_removed_b: usize,
}

/// Two-sided Wilcoxon rank-sum comparison of `a` against `b`.
///
/// NaN entries are removed first. A sample left empty loses to a non-empty
/// one (`p = 0`); two empty samples are equivalent (`p = 1`). Otherwise the
/// verdict is `Equivalent` when `p >= 0.05`, and the direction comes from
/// the mean ranks under `orientation`.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], orientation: Orientation) -> ComparisonVerdict {
    let clean_a: Vec<f64> = a.iter().copied().filter(|v| !v.is_nan()).collect();
    let clean_b: Vec<f64> = b.iter().copied().filter(|v| !v.is_nan()).collect();
    let mut out = ComparisonVerdict {
        verdict: Verdict::Equivalent,
        p_value: 1.0,
        mean_a: mean(&clean_a),
        mean_b: mean(&clean_b),
        median_a: median(&clean_a),
        median_b: median(&clean_b),
        nan_removed_a: a.len() - clean_a.len(),
        nan_removed_b: b.len() - clean_b.len(),
    };
    match (clean_a.is_empty(), clean_b.is_empty()) {
        (true, true) => return out,
        (true, false) => {
            out.verdict = Verdict::Worse;
            out.p_value = 0.0;
            return out;
        }
        (false, true) => {
            out.verdict = Verdict::Better;
            out.p_value = 0.0;
            return out;
        }
        (false, false) => {}
    }
    let ranked = RankedSamples::new(&clean_a, &clean_b);
    out.p_value = ranked.normal_p_value();
    if out.p_value < SIGNIFICANCE {
        let na = clean_a.len() as f64;
        let nb = clean_b.len() as f64;
        let total = (na + nb) * (na + nb + 1.0) / 2.0;
        let a_ranks_lower = ranked.rank_sum_a / na < (total - ranked.rank_sum_a) / nb;
        out.verdict = match (a_ranks_lower, orientation) {
            (true, Orientation::LowerIsBetter) | (false, Orientation::HigherIsBetter) => {
                Verdict::Better
            }
            _ => Verdict::Worse,
        };
    }
    out
}

/// Two-sided p-value from the normal approximation with tie and continuity
/// corrections. Both samples must be non-empty and NaN-free.
pub fn rank_sum_p_value(a: &[f64], b: &[f64]) -> f64 {
    RankedSamples::new(a, b).normal_p_value()
}

/// Exact two-sided p-value: the share of all ways of drawing `|a|` of the
/// pooled mid-ranks whose rank sum deviates from its mean at least as much
/// as the observed one. `None` beyond 60 pooled observations.
pub fn rank_sum_exact_p_value(a: &[f64], b: &[f64]) -> Option<f64> {
    let total = a.len() + b.len();
    if a.is_empty() || b.is_empty() || total > 60 {
        return None;
    }
    let ranked = RankedSamples::new(a, b);
    // Mid-ranks are multiples of 1/2; work with doubled ranks as integers.
    let doubled: Vec<usize> = ranked.ranks.iter().map(|r| (2.0 * r) as usize).collect();
    let k = a.len();
    let max_sum: usize = doubled.iter().sum();
    // ways[j][s]: subsets of size j with doubled rank sum s.
    let mut ways = vec![vec![0u64; max_sum + 1]; k + 1];
    ways[0][0] = 1;
    for &r in &doubled {
        for j in (1..=k).rev() {
            for s in (r..=max_sum).rev() {
                ways[j][s] += ways[j - 1][s - r];
            }
        }
    }
    let centre = (k * (total + 1)) as i64; // twice the expected rank sum
    let observed = ((2.0 * ranked.rank_sum_a) as i64 - centre).abs();
    let (mut extreme, mut all) = (0u64, 0u64);
    for (s, &count) in ways[k].iter().enumerate() {
        all += count;
        if (s as i64 - centre).abs() >= observed {
            extreme += count;
        }
    }
    Some(extreme as f64 / all as f64)
}

struct RankedSamples {
    /// Mid-ranks of the pooled observations, `a` first.
    ranks: Vec<f64>,
    rank_sum_a: f64,
    na: usize,
    nb: usize,
    /// Sum of `t³ - t` over tie groups.
    tie_term: f64,
}

impl RankedSamples {
    fn new(a: &[f64], b: &[f64]) -> Self {
        let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
        let len = pooled.len();
        let mut order: Vec<usize> = (0..len).collect();
        order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
        let mut ranks = vec![0.0; len];
        let mut tie_term = 0.0;
        let mut start = 0;
        while start < len {
            let mut end = start + 1;
            while end < len && pooled[order[end]] == pooled[order[start]] {
                end += 1;
            }
            let mid = (start + end + 1) as f64 / 2.0;
            for &i in &order[start..end] {
                ranks[i] = mid;
            }
            let t = (end - start) as f64;
            tie_term += t * t * t - t;
            start = end;
        }
        let rank_sum_a = ranks[..a.len()].iter().sum();
        RankedSamples {
            ranks,
            rank_sum_a,
            na: a.len(),
            nb: b.len(),
            tie_term,
        }
    }

    fn normal_p_value(&self) -> f64 {
        let na = self.na as f64;
        let nb = self.nb as f64;
        let n = na + nb;
        let u = self.rank_sum_a - na * (na + 1.0) / 2.0;
        let mean_u = na * nb / 2.0;
        let variance = na * nb / 12.0 * ((n + 1.0) - self.tie_term / (n * (n - 1.0)));
        if !(variance > 0.0) {
            return 1.0;
        }
        let z = ((u - mean_u).abs() - 0.5).max(0.0) / sqrt(variance);
        erfc(z / core::f64::consts::SQRT_2).min(1.0)
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let mid = s.len() / 2;
    if s.len() % 2 == 0 {
        (s[mid - 1] + s[mid]) / 2.0
    } else {
        s[mid]
    }
}

//! Two-sided Wilcoxon rank-sum (Mann-Whitney) test.
//!
//! Small tie-free samples use the exact null distribution of the rank sum;
//! everything else uses the normal approximation with tie and continuity
//! corrections.

use statrs::function::erf::erfc;

/// Largest smaller-sample size handled by the exact path.
pub const EXACT_MAX_SMALLER: usize = 8;

/// Midranks (1-based) of the pooled sample, plus the tie group sizes.
fn pooled_ranks(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut pooled: Vec<(f64, usize)> = a
        .iter()
        .chain(b)
        .copied()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let mid = (i + 1 + j) as f64 / 2.0;
        for item in &pooled[i..j] {
            ranks[item.1] = mid;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

fn clamp_p(p: f64) -> f64 {
    p.clamp(f64::MIN_POSITIVE, 1.0)
}

/// Exact two-sided p-value by counting every assignment of ranks to the
/// first sample. Returns `None` if the samples contain ties or either is empty.
pub fn wilcoxon_rank_sum_exact(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let (ranks, ties) = pooled_ranks(a, b);
    if !ties.is_empty() {
        return None;
    }
    // the null distribution is built for the smaller sample's rank sum
    let total = ranks.len();
    let (n, own) = if a.len() <= b.len() {
        (a.len(), &ranks[..a.len()])
    } else {
        (b.len(), &ranks[a.len()..])
    };
    let observed = own.iter().sum::<f64>().round() as usize;

    // counts[k][s]: number of k-subsets of {1..=r} with rank sum s
    let max_sum = n * total;
    let mut counts = vec![vec![0.0f64; max_sum + 1]; n + 1];
    counts[0][0] = 1.0;
    for r in 1..=total {
        for k in (1..=n.min(r)).rev() {
            let (lower, upper) = counts.split_at_mut(k);
            let prev = &lower[k - 1];
            let cur = &mut upper[0];
            for s in (r..=max_sum).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    let dist = &counts[n];
    let all: f64 = dist.iter().sum();
    let lower: f64 = dist[..=observed].iter().sum();
    let upper: f64 = dist[observed..].iter().sum();
    Some(clamp_p(2.0 * lower.min(upper) / all))
}

/// Normal approximation with tie correction and a 0.5 continuity correction.
pub fn wilcoxon_rank_sum_normal(a: &[f64], b: &[f64]) -> f64 {
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let total = n1 + n2;
    let (ranks, ties) = pooled_ranks(a, b);
    let r1: f64 = ranks[..a.len()].iter().sum();
    let u1 = r1 - n1 * (n1 + 1.0) / 2.0;
    let mean = n1 * n2 / 2.0;
    let tie_term: f64 = ties
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let var = n1 * n2 / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if !(var > 0.0) {
        return 1.0;
    }
    let z = ((u1 - mean).abs() - 0.5).max(0.0) / var.sqrt();
    clamp_p(erfc(z / std::f64::consts::SQRT_2))
}

/// Two-sided rank-sum p-value: exact when the smaller sample has at most
/// [`EXACT_MAX_SMALLER`] values and there are no ties, normal approximation
/// otherwise.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "rank-sum test needs two non-empty samples");
    if a.len().min(b.len()) <= EXACT_MAX_SMALLER {
        if let Some(p) = wilcoxon_rank_sum_exact(a, b) {
            return p;
        }
    }
    wilcoxon_rank_sum_normal(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force oracle: enumerate every n-subset of ranks 1..=N.
    fn brute_force_p(n: usize, total: usize, observed: usize) -> f64 {
        fn walk(start: usize, left: usize, total: usize, sum: usize, out: &mut Vec<usize>) {
            if left == 0 {
                out.push(sum);
                return;
            }
            for r in start..=total {
                walk(r + 1, left - 1, total, sum + r, out);
            }
        }
        let mut sums = Vec::new();
        walk(1, n, total, 0, &mut sums);
        let all = sums.len() as f64;
        let lo = sums.iter().filter(|&&s| s <= observed).count() as f64;
        let hi = sums.iter().filter(|&&s| s >= observed).count() as f64;
        (2.0 * lo.min(hi) / all).min(1.0)
    }

    #[test]
    fn fully_separated_triples() {
        // C(6, 3) = 20 splits, one per tail is as extreme: 2 / 20
        assert_eq!(wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]), 0.1);
        assert_eq!(wilcoxon_rank_sum(&[4.0, 5.0, 6.0], &[1.0, 2.0, 3.0]), 0.1);
    }

    #[test]
    fn exact_matches_enumeration_for_small_samples() {
        // every arrangement of ranks for all size pairs up to 5 x 5
        for n in 1..=5usize {
            for m in 1..=5usize {
                let total = n + m;
                for mask in 0u32..(1 << total) {
                    if mask.count_ones() as usize != n {
                        continue;
                    }
                    let a: Vec<f64> = (0..total).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1) as f64).collect();
                    let b: Vec<f64> = (0..total).filter(|i| mask >> i & 1 == 0).map(|i| (i + 1) as f64).collect();
                    let w: usize = a.iter().map(|v| *v as usize).sum();
                    let expect = brute_force_p(n, total, w);
                    let got = wilcoxon_rank_sum(&a, &b);
                    assert!((got - expect).abs() < 1e-12, "n={n} m={m} a={a:?}: {got} vs {expect}");
                }
            }
        }
    }

    #[test]
    fn identical_samples_are_not_significant() {
        let a: Vec<f64> = (0..20).map(|i| i as f64 * 0.37).collect();
        assert!(wilcoxon_rank_sum(&a, &a) >= 0.95);
        assert_eq!(wilcoxon_rank_sum(&[2.0; 5], &[2.0; 5]), 1.0);
    }

    #[test]
    fn large_shift_is_significant() {
        let a: Vec<f64> = (1..=20).map(f64::from).collect();
        let b: Vec<f64> = a.iter().map(|v| v + 100.0).collect();
        assert!(wilcoxon_rank_sum(&a, &b) < 0.001);
    }

    #[test]
    fn exact_and_normal_agree_for_eight_by_eight() {
        let base: Vec<f64> = (0..16).map(|i| i as f64 + 0.5).collect();
        for shift in 0..8 {
            // interleave the pooled order progressively
            let a: Vec<f64> = (0..8).map(|i| base[i + shift]).collect();
            let b: Vec<f64> = base.iter().filter(|v| !a.contains(v)).copied().collect();
            let exact = wilcoxon_rank_sum_exact(&a, &b).unwrap();
            let normal = wilcoxon_rank_sum_normal(&a, &b);
            assert!((exact - normal).abs() <= 0.02, "shift {shift}: {exact} vs {normal}");
        }
    }

    #[test]
    fn ties_fall_back_to_normal() {
        assert!(wilcoxon_rank_sum_exact(&[1.0, 2.0], &[2.0, 3.0]).is_none());
        let p = wilcoxon_rank_sum(&[1.0, 2.0], &[2.0, 3.0]);
        assert!(p > 0.0 && p <= 1.0);
    }

    proptest! {
        #[test]
        fn symmetric_in_arguments(
            a in prop::collection::vec(-100.0f64..100.0, 1..25),
            b in prop::collection::vec(-100.0f64..100.0, 1..25),
        ) {
            let p1 = wilcoxon_rank_sum(&a, &b);
            let p2 = wilcoxon_rank_sum(&b, &a);
            prop_assert!((p1 - p2).abs() < 1e-12);
            prop_assert!(p1 > 0.0 && p1 <= 1.0);
        }
    }
}

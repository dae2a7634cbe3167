//! How the verdict on one pair depends on the pool it is tested in.
//!
//! For a fixed pair, every pool of a given size that contains the pair is
//! formed, ranked from scratch and tested. A pool-independent test yields the
//! same statistic in every pool; the mean-ranks test does not.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::omnibus::friedman;
use crate::posthoc::{decide_pair, CorrectionPolicy, PosthocTest};
use crate::ranking::PerformanceMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolResult<T> {
    /// Pool members in the original matrix order.
    pub members: Vec<String>,
    pub statistic: Option<T>,
    pub p_raw: Option<T>,
    pub reject: bool,
    /// Comparison count the correction used inside this pool.
    pub num_comparisons: usize,
    /// Friedman p-value of the pool, advisory only; the post-hoc runs
    /// regardless of it.
    pub friedman_p: T,
    pub untestable: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport<T> {
    pub pair: (String, String),
    pub test: PosthocTest,
    pub policy: CorrectionPolicy<T>,
    pub pool_cardinality: usize,
    pub pools_evaluated: usize,
    pub pools_significant: usize,
    pub per_pool: Vec<PoolResult<T>>,
}

/// k-subsets of `items` in lexicographic order.
fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn walk(items: &[usize], k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for idx in start..items.len() {
            if items.len() - idx < k - current.len() {
                break;
            }
            current.push(items[idx]);
            walk(items, k, idx + 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    walk(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Tests `pair` inside every pool of size `cardinality` that contains it.
///
/// The correction inside each pool uses that pool's own m(m−1)/2 comparison
/// count unless `policy.num_comparisons` pins it.
pub fn subset_stability<T: Scalar>(
    perf: &PerformanceMatrix<T>,
    pair: (&str, &str),
    cardinality: usize,
    test: PosthocTest,
    policy: &CorrectionPolicy<T>,
) -> Result<StabilityReport<T>> {
    let m = perf.num_algorithms();
    let i = perf.index_of(pair.0)?;
    let j = perf.index_of(pair.1)?;
    if i == j {
        return Err(Error::validation(format!("pair compares '{}' with itself", pair.0)));
    }
    if cardinality < 2 || cardinality > m {
        return Err(Error::validation(format!(
            "pool cardinality must lie in [2, {m}], got {cardinality}"
        )));
    }
    let others: Vec<usize> = (0..m).filter(|&k| k != i && k != j).collect();
    let names = perf.algorithm_names();

    let mut per_pool = Vec::new();
    for extra in combinations(&others, cardinality - 2) {
        let mut members: Vec<usize> = extra;
        members.push(i);
        members.push(j);
        members.sort_unstable();
        let member_names: Vec<String> = members.iter().map(|&k| names[k].clone()).collect();
        let pool = perf.restrict(&member_names)?;
        let entry = decide_pair(&pool, pair, test, policy)?;
        let friedman_p = friedman(&pool, policy.alpha)?.p_value;
        per_pool.push(PoolResult {
            members: member_names,
            statistic: entry.statistic(),
            p_raw: entry.p_raw(),
            reject: entry.reject,
            num_comparisons: policy.comparisons(cardinality),
            friedman_p,
            untestable: entry.untestable,
        });
    }
    let pools_significant = per_pool.iter().filter(|p| p.reject).count();
    Ok(StabilityReport {
        pair: (pair.0.to_string(), pair.1.to_string()),
        test,
        policy: *policy,
        pool_cardinality: cardinality,
        pools_evaluated: per_pool.len(),
        pools_significant,
        per_pool,
    })
}

/// [`subset_stability`] for every cardinality from 2 to m.
pub fn stability_profile<T: Scalar>(
    perf: &PerformanceMatrix<T>,
    pair: (&str, &str),
    test: PosthocTest,
    policy: &CorrectionPolicy<T>,
) -> Result<Vec<StabilityReport<T>>> {
    (2..=perf.num_algorithms())
        .map(|k| subset_stability(perf, pair, k, test, policy))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reproduce::example1_matrix;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn combinations_enumerate_in_order() {
        let c = combinations(&[1, 3, 5, 7], 2);
        assert_eq!(c, vec![vec![1, 3], vec![1, 5], vec![1, 7], vec![3, 5], vec![3, 7], vec![5, 7]]);
        assert_eq!(combinations(&[1, 2], 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn example1_mean_ranks_flip() {
        let perf = example1_matrix::<f64>();
        let policy = CorrectionPolicy::bonferroni(0.05);
        let two = subset_stability(&perf, ("A", "B"), 2, PosthocTest::MeanRanks, &policy).unwrap();
        assert_eq!((two.pools_significant, two.pools_evaluated), (0, 1));
        let five = subset_stability(&perf, ("A", "B"), 5, PosthocTest::MeanRanks, &policy).unwrap();
        assert_eq!((five.pools_significant, five.pools_evaluated), (1, 1));
        assert!(five.per_pool[0].friedman_p < 1e-8);
    }

    #[test]
    fn pool_counts_are_binomial() {
        let perf = example1_matrix::<f64>();
        let policy = CorrectionPolicy::bonferroni(0.05);
        for k in 2..=5 {
            let r = subset_stability(&perf, ("B", "D"), k, PosthocTest::Wilcoxon, &policy).unwrap();
            assert_eq!(r.pools_evaluated, binomial(3, k - 2));
        }
    }

    #[test]
    fn pair_only_tests_constant_across_pools() {
        let perf = example1_matrix::<f64>();
        let policy = CorrectionPolicy::bonferroni(0.05).with_comparisons(10);
        for test in [PosthocTest::Wilcoxon, PosthocTest::SignExact] {
            let profile = stability_profile(&perf, ("A", "E"), test, &policy).unwrap();
            let first = &profile[0].per_pool[0];
            for report in &profile {
                for pool in &report.per_pool {
                    assert_eq!(pool.statistic, first.statistic);
                    assert_eq!(pool.p_raw, first.p_raw);
                    assert_eq!(pool.reject, first.reject);
                }
            }
        }
    }

    #[test]
    fn cardinality_out_of_range() {
        let perf = example1_matrix::<f64>();
        let policy = CorrectionPolicy::bonferroni(0.05);
        for k in [0, 1, 6] {
            assert!(matches!(
                subset_stability(&perf, ("A", "B"), k, PosthocTest::MeanRanks, &policy),
                Err(Error::Validation(_))
            ));
        }
    }
}

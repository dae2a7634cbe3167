//! Friedman omnibus test and the shared [`TestOutcome`] record.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distributions::chi_square_sf;
use crate::error::{Error, Result};
use crate::ranking::{rank_columns, Direction, PerformanceMatrix, RankMatrix};
use crate::scalar::Scalar;

/// Which test produced an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Friedman,
    MeanRanks,
    SignExact,
    SignNormalApprox,
    WilcoxonExact,
    WilcoxonNormalApprox,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Friedman => "friedman",
            Method::MeanRanks => "mean-ranks",
            Method::SignExact => "sign-exact",
            Method::SignNormalApprox => "sign-normal-approx",
            Method::WilcoxonExact => "wilcoxon-exact",
            Method::WilcoxonNormalApprox => "wilcoxon-normal-approx",
        })
    }
}

/// How `reject` was decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionRule {
    /// reject ⇔ p_value ≤ alpha_effective
    PValue,
    /// reject ⇔ statistic ≥ critical_value
    Threshold,
}

/// Result of one hypothesis test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome<T> {
    pub method: Method,
    pub rule: DecisionRule,
    pub statistic: T,
    pub p_value: T,
    /// Per-test level the decision was made at.
    pub alpha_effective: T,
    /// Set for threshold-form decisions.
    pub critical_value: Option<T>,
    pub reject: bool,
    /// Named numeric diagnostics (mean ranks, counts, thresholds).
    pub detail: BTreeMap<String, T>,
    pub notes: Vec<String>,
}

impl<T: Scalar> TestOutcome<T> {
    pub(crate) fn by_p_value(method: Method, statistic: T, p_value: T, alpha: T) -> Self {
        TestOutcome {
            method,
            rule: DecisionRule::PValue,
            statistic,
            p_value,
            alpha_effective: alpha,
            critical_value: None,
            reject: p_value <= alpha,
            detail: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn with_detail(mut self, key: impl Into<String>, value: T) -> Self {
        self.detail.insert(key.into(), value);
        self
    }

    pub fn detail(&self, key: &str) -> Option<T> {
        self.detail.get(key).copied()
    }
}

pub(crate) fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha < T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Friedman test on a performance matrix. The statistic does not depend on
/// the rank direction.
pub fn friedman<T: Scalar>(perf: &PerformanceMatrix<T>, alpha: T) -> Result<TestOutcome<T>> {
    friedman_from_ranks(&rank_columns(perf, Direction::HigherIsBetter), alpha)
}

/// S = 12 / (n m (m+1)) · Σ_i (R_i − n(m+1)/2)², referred to χ² with m − 1
/// degrees of freedom. No tie correction is applied.
pub fn friedman_from_ranks<T: Scalar>(ranks: &RankMatrix<T>, alpha: T) -> Result<TestOutcome<T>> {
    check_alpha(alpha)?;
    let m = ranks.m();
    let n = ranks.n();
    if m < 2 {
        return Err(Error::validation(format!("Friedman test needs m ≥ 2, got {m}")));
    }
    let expected = T::from_count(n * (m + 1)) / T::two();
    let squares: T = ranks
        .rank_sums()
        .iter()
        .map(|&r| (r - expected) * (r - expected))
        .sum();
    let statistic = T::lit(12.0) * squares / T::from_count(n * m * (m + 1));
    let p_value = chi_square_sf(statistic, m - 1)?;
    let mut outcome = TestOutcome::by_p_value(Method::Friedman, statistic, p_value, alpha)
        .with_detail("m", T::from_count(m))
        .with_detail("n", T::from_count(n))
        .with_detail("dof", T::from_count(m - 1));
    for (name, &mr) in ranks.algorithm_names().iter().zip(ranks.mean_ranks()) {
        outcome = outcome.with_detail(format!("mean_rank[{name}]"), mr);
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::normal_two_sided_p;
    use crate::reproduce::example1_matrix;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn example1_statistic_and_p() {
        let out = friedman(&example1_matrix::<f64>(), 0.05).unwrap();
        assert_eq!(out.statistic, 48.0);
        assert_relative_eq!(out.p_value, 25.0 * (-24.0f64).exp(), max_relative = 1e-12);
        assert!(out.reject);
        assert_eq!(out.rule, DecisionRule::PValue);
        assert_eq!(out.detail("mean_rank[B]"), Some(3.5));
        assert_eq!(out.detail("dof"), Some(4.0));
    }

    #[test]
    fn identical_rows_give_zero() {
        let row = vec![1.0, 5.0, 3.0, 2.5];
        let perf = PerformanceMatrix::from_rows(["x", "y", "z"], vec![row.clone(), row.clone(), row]).unwrap();
        let out = friedman(&perf, 0.05).unwrap();
        assert_eq!(out.statistic, 0.0);
        assert_eq!(out.p_value, 1.0);
        assert!(!out.reject);
    }

    #[test]
    fn bad_alpha() {
        assert!(friedman(&example1_matrix::<f64>(), 0.0).is_err());
        assert!(friedman(&example1_matrix::<f64>(), 1.0).is_err());
    }

    #[test]
    fn direction_does_not_matter() {
        let perf = example1_matrix::<f64>();
        let hi = friedman_from_ranks(&rank_columns(&perf, Direction::HigherIsBetter), 0.05).unwrap();
        let lo = friedman_from_ranks(&rank_columns(&perf, Direction::LowerIsBetter), 0.05).unwrap();
        assert_eq!(hi.statistic, lo.statistic);
    }

    proptest! {
        #[test]
        fn two_algorithms_match_sign_test(
            diffs in prop::collection::vec(prop_oneof![-100.0f64..-0.01, 0.01f64..100.0], 1..60)
        ) {
            let n = diffs.len();
            let a: Vec<f64> = diffs.clone();
            let b = vec![0.0; n];
            let perf = PerformanceMatrix::from_rows(["a", "b"], vec![a, b]).unwrap();
            let out = friedman(&perf, 0.05).unwrap();
            let wins = diffs.iter().filter(|d| **d > 0.0).count() as f64;
            let z = (wins - (n as f64 - wins)) / (n as f64).sqrt();
            prop_assert!((out.statistic - z * z).abs() <= 1e-9 * (1.0 + z * z));
            prop_assert!((out.p_value - normal_two_sided_p(z)).abs() <= 1e-10);
        }

        #[test]
        fn statistic_label_and_column_symmetric(
            rows in prop::collection::vec(prop::collection::vec(0i32..6, 7), 3..6),
            shift in 0usize..7,
        ) {
            let m = rows.len();
            let names: Vec<String> = (0..m).map(|i| format!("a{i}")).collect();
            let to_f = |r: &Vec<i32>| r.iter().map(|&v| f64::from(v)).collect::<Vec<_>>();
            let base: Vec<Vec<f64>> = rows.iter().map(to_f).collect();
            let perf = PerformanceMatrix::from_rows(names.clone(), base.clone()).unwrap();
            let s = friedman(&perf, 0.05).unwrap().statistic;
            prop_assert!(s >= 0.0);

            let mut relabeled = base.clone();
            relabeled.reverse();
            let mut cols = base.clone();
            for r in cols.iter_mut() { r.rotate_left(shift); }
            let transformed: Vec<Vec<f64>> = base.iter().map(|r| r.iter().map(|v| v * v * v + 2.0 * v).collect()).collect();
            for other in [relabeled, cols, transformed] {
                let p = PerformanceMatrix::from_rows(names.clone(), other).unwrap();
                let s2 = friedman(&p, 0.05).unwrap().statistic;
                prop_assert!((s - s2).abs() <= 1e-12 * (1.0 + s));
            }
        }
    }
}

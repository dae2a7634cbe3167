//! Pairwise post-hoc tests and family-wise correction.
//!
//! Three pairwise tests are offered. The sign test and the Wilcoxon
//! signed-rank test look only at the two rows being compared. The mean-ranks
//! test reads mean ranks computed over the whole pool, so its verdict on a
//! pair moves when other algorithms are added or removed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::{
    binomial_two_sided_p, normal_quantile, normal_two_sided_p, wilcoxon_null_table,
    EXACT_WILCOXON_LIMIT,
};
use crate::error::{Error, Result};
use crate::omnibus::{check_alpha, DecisionRule, Method, TestOutcome};
use crate::ranking::{midranks, rank_columns, Direction, PerformanceMatrix, RankMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrectionKind {
    None,
    #[default]
    Bonferroni,
    Holm,
}

impl FromStr for CorrectionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(CorrectionKind::None),
            "bonferroni" => Ok(CorrectionKind::Bonferroni),
            "holm" => Ok(CorrectionKind::Holm),
            other => Err(Error::validation(format!("unknown correction '{other}'"))),
        }
    }
}

impl fmt::Display for CorrectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrectionKind::None => "none",
            CorrectionKind::Bonferroni => "bonferroni",
            CorrectionKind::Holm => "holm",
        })
    }
}

/// Family-wise correction at level `alpha` over `num_comparisons` tests
/// (default m(m−1)/2 for a pool of m algorithms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionPolicy<T> {
    pub kind: CorrectionKind,
    pub alpha: T,
    pub num_comparisons: Option<usize>,
}

impl<T: Scalar> CorrectionPolicy<T> {
    pub fn new(kind: CorrectionKind, alpha: T) -> Self {
        CorrectionPolicy {
            kind,
            alpha,
            num_comparisons: None,
        }
    }

    pub fn none(alpha: T) -> Self {
        Self::new(CorrectionKind::None, alpha)
    }

    pub fn bonferroni(alpha: T) -> Self {
        Self::new(CorrectionKind::Bonferroni, alpha)
    }

    pub fn holm(alpha: T) -> Self {
        Self::new(CorrectionKind::Holm, alpha)
    }

    /// Pins the comparison count instead of deriving it from the pool size.
    pub fn with_comparisons(mut self, c: usize) -> Self {
        self.num_comparisons = Some(c);
        self
    }

    /// Comparison count c used for a pool of `m` algorithms. Always 1 when no
    /// correction is applied.
    pub fn comparisons(&self, m: usize) -> usize {
        match self.kind {
            CorrectionKind::None => 1,
            _ => self.num_comparisons.unwrap_or(m * (m - 1) / 2).max(1),
        }
    }

    /// Two-sided per-comparison level α/c (the first Holm step for Holm).
    pub fn per_comparison_alpha(&self, m: usize) -> T {
        self.alpha / T::from_count(self.comparisons(m))
    }

    /// Upper standard normal quantile at α/(2c).
    pub fn critical_z(&self, m: usize) -> Result<T> {
        critical_z(self.alpha, self.comparisons(m))
    }

    fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.num_comparisons == Some(0) {
            return Err(Error::validation("num_comparisons must be positive"));
        }
        Ok(())
    }
}

fn critical_z<T: Scalar>(alpha: T, c: usize) -> Result<T> {
    normal_quantile(T::one() - alpha / (T::two() * T::from_count(c)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignMode {
    Exact,
    NormalApprox,
}

/// Pairwise test used for post-hoc comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PosthocTest {
    SignExact,
    SignNormalApprox,
    Wilcoxon,
    MeanRanks,
}

impl PosthocTest {
    /// True when the verdict depends only on the two compared rows.
    pub fn is_pool_independent(self) -> bool {
        !matches!(self, PosthocTest::MeanRanks)
    }

    fn is_threshold_form(self) -> bool {
        matches!(self, PosthocTest::MeanRanks | PosthocTest::SignNormalApprox)
    }
}

impl FromStr for PosthocTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sign" | "sign-exact" => Ok(PosthocTest::SignExact),
            "sign-normal" | "sign-normal-approx" => Ok(PosthocTest::SignNormalApprox),
            "wilcoxon" => Ok(PosthocTest::Wilcoxon),
            "mean-ranks" | "nemenyi" => Ok(PosthocTest::MeanRanks),
            other => Err(Error::validation(format!("unknown post-hoc test '{other}'"))),
        }
    }
}

impl fmt::Display for PosthocTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PosthocTest::SignExact => "sign-exact",
            PosthocTest::SignNormalApprox => "sign-normal-approx",
            PosthocTest::Wilcoxon => "wilcoxon",
            PosthocTest::MeanRanks => "mean-ranks",
        })
    }
}

/// |R̄_i − R̄_j| / √(m(m+1) / 6n).
pub fn mean_ranks_statistic<T: Scalar>(mean_rank_i: T, mean_rank_j: T, m: usize, n: usize) -> T {
    (mean_rank_i - mean_rank_j).abs() / mean_ranks_standard_error(m, n)
}

/// √(m(m+1) / 6n), the null standard deviation of a mean-rank difference.
pub fn mean_ranks_standard_error<T: Scalar>(m: usize, n: usize) -> T {
    (T::from_count(m * (m + 1)) / T::from_count(6 * n)).sqrt()
}

/// Critical mean-rank difference z*·√(m(m+1) / 6n).
pub fn mean_ranks_threshold<T: Scalar>(critical_z: T, m: usize, n: usize) -> T {
    critical_z * mean_ranks_standard_error(m, n)
}

/// Mean-ranks test on a pair from a ranked pool. Rejects when the z
/// statistic reaches z* = Φ⁻¹(1 − α/(2c)). Under Holm the single-pair
/// decision is the first (Bonferroni) step; [`pairwise_report`] runs the full
/// step-down.
pub fn mean_ranks_test<T: Scalar>(
    ranks: &RankMatrix<T>,
    pair: (&str, &str),
    policy: &CorrectionPolicy<T>,
) -> Result<TestOutcome<T>> {
    policy.validate()?;
    let i = ranks.index_of(pair.0)?;
    let j = ranks.index_of(pair.1)?;
    let c = policy.comparisons(ranks.m());
    let z_star = critical_z(policy.alpha, c)?;
    Ok(mean_ranks_outcome(ranks, i, j, z_star, policy.alpha / T::from_count(c), c))
}

fn mean_ranks_outcome<T: Scalar>(
    ranks: &RankMatrix<T>,
    i: usize,
    j: usize,
    z_star: T,
    alpha_effective: T,
    c: usize,
) -> TestOutcome<T> {
    let (m, n) = (ranks.m(), ranks.n());
    let mr = ranks.mean_ranks();
    let statistic = mean_ranks_statistic(mr[i], mr[j], m, n);
    let names = ranks.algorithm_names();
    TestOutcome {
        method: Method::MeanRanks,
        rule: DecisionRule::Threshold,
        statistic,
        p_value: normal_two_sided_p(statistic),
        alpha_effective,
        critical_value: Some(z_star),
        reject: statistic >= z_star,
        detail: Default::default(),
        notes: Vec::new(),
    }
    .with_detail("m", T::from_count(m))
    .with_detail("n", T::from_count(n))
    .with_detail("num_comparisons", T::from_count(c))
    .with_detail(format!("mean_rank[{}]", names[i]), mr[i])
    .with_detail(format!("mean_rank[{}]", names[j]), mr[j])
    .with_detail("mean_rank_difference", (mr[i] - mr[j]).abs())
    .with_detail("standard_error", mean_ranks_standard_error(m, n))
    .with_detail("difference_threshold", mean_ranks_threshold(z_star, m, n))
}

/// Sign test on two algorithms' rows.
///
/// Zero differences are discarded. Exact mode reports the win count of the
/// first algorithm as statistic; normal mode reports the signed
/// z = (wins − losses)/√n_eff and rejects when |z| ≥ Φ⁻¹(1 − α/2).
pub fn sign_test<T: Scalar>(
    perf: &PerformanceMatrix<T>,
    pair: (&str, &str),
    alpha: T,
    mode: SignMode,
) -> Result<TestOutcome<T>> {
    sign_test_rows(perf.row_of(pair.0)?, perf.row_of(pair.1)?, alpha, mode)
}

pub fn sign_test_rows<T: Scalar>(x: &[T], y: &[T], alpha: T, mode: SignMode) -> Result<TestOutcome<T>> {
    check_alpha(alpha)?;
    let (mut wins, mut losses) = (0usize, 0usize);
    for (a, b) in x.iter().zip(y) {
        if a > b {
            wins += 1;
        } else if a < b {
            losses += 1;
        }
    }
    let n_eff = wins + losses;
    if n_eff == 0 {
        return Err(Error::Degenerate(
            "all paired differences are zero; the sign test has no information".into(),
        ));
    }
    let ties = x.len() - n_eff;
    let outcome = match mode {
        SignMode::Exact => {
            let p = binomial_two_sided_p(wins as u64, n_eff as u64)?;
            TestOutcome::by_p_value(Method::SignExact, T::from_count(wins), p, alpha)
        }
        SignMode::NormalApprox => {
            let n_t = T::from_count(n_eff);
            let z = (T::from_count(wins) - T::from_count(losses)) / n_t.sqrt();
            let z_star = normal_quantile(T::one() - alpha / T::two())?;
            TestOutcome {
                method: Method::SignNormalApprox,
                rule: DecisionRule::Threshold,
                statistic: z,
                p_value: normal_two_sided_p(z),
                alpha_effective: alpha,
                critical_value: Some(z_star),
                reject: z.abs() >= z_star,
                detail: Default::default(),
                notes: Vec::new(),
            }
            .with_detail(
                "mean_rank_difference",
                (T::from_count(wins) - T::from_count(losses)).abs() / n_t,
            )
            .with_detail("difference_threshold", z_star / n_t.sqrt())
        }
    };
    Ok(outcome
        .with_detail("wins", T::from_count(wins))
        .with_detail("losses", T::from_count(losses))
        .with_detail("zero_differences", T::from_count(ties))
        .with_detail("n_effective", T::from_count(n_eff)))
}

/// Wilcoxon signed-rank test on differences first − second.
///
/// Statistic is W⁺, the rank sum of positive differences. Exact null when
/// there are at most 30 nonzero differences and no ties among their absolute
/// values, otherwise the tie-corrected normal approximation with continuity
/// correction.
pub fn wilcoxon_signed_rank<T: Scalar>(
    perf: &PerformanceMatrix<T>,
    pair: (&str, &str),
    alpha: T,
) -> Result<TestOutcome<T>> {
    wilcoxon_rows(perf.row_of(pair.0)?, perf.row_of(pair.1)?, alpha)
}

pub fn wilcoxon_rows<T: Scalar>(x: &[T], y: &[T], alpha: T) -> Result<TestOutcome<T>> {
    check_alpha(alpha)?;
    let diffs: Vec<T> = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| a - b)
        .filter(|d| *d != T::zero())
        .collect();
    wilcoxon_differences(&diffs, alpha, x.len() - diffs.len())
}

/// Wilcoxon test on already-computed nonzero differences.
pub fn wilcoxon_differences<T: Scalar>(diffs: &[T], alpha: T, zeros: usize) -> Result<TestOutcome<T>> {
    let n = diffs.len();
    if n == 0 {
        return Err(Error::Degenerate(
            "all paired differences are zero; the Wilcoxon test has no information".into(),
        ));
    }
    let abs: Vec<T> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&abs, Direction::HigherIsBetter);
    let w_plus: T = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > T::zero())
        .map(|(_, &r)| r)
        .sum();
    let total = T::from_count(n * (n + 1)) / T::two();

    // tie groups among |d|
    let mut sorted = abs.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite differences"));
    let mut tie_term = 0usize;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && sorted[end] == sorted[start] {
            end += 1;
        }
        let t = end - start;
        tie_term += t * t * t - t;
        start = end;
    }
    let has_ties = tie_term > 0;

    let mut notes = Vec::new();
    let mut outcome = if n <= EXACT_WILCOXON_LIMIT && !has_ties {
        let table = wilcoxon_null_table(n)?;
        let w = w_plus.to_usize().expect("tie-free W+ is a nonnegative integer");
        let p = table.two_sided_p(w);
        TestOutcome::by_p_value(Method::WilcoxonExact, w_plus, p, alpha)
    } else {
        if has_ties && n <= EXACT_WILCOXON_LIMIT {
            notes.push("ties among |differences|: exact table not applicable, normal approximation used".to_string());
        }
        let n_t = T::from_count(n);
        let mean = total / T::two();
        let variance = n_t * (n_t + T::one()) * (T::two() * n_t + T::one()) / T::lit(24.0)
            - T::from_count(tie_term) / T::lit(48.0);
        let excess = (w_plus - mean).abs() - T::half();
        let (z, p) = if excess <= T::zero() {
            (T::zero(), T::one())
        } else {
            let z = excess / variance.sqrt();
            (z, normal_two_sided_p(z))
        };
        TestOutcome::by_p_value(Method::WilcoxonNormalApprox, w_plus, p, alpha)
            .with_detail("z", z)
            .with_detail("variance", variance)
    };
    outcome.notes = notes;
    Ok(outcome
        .with_detail("w_plus", w_plus)
        .with_detail("w_minus", total - w_plus)
        .with_detail("n_effective", T::from_count(n))
        .with_detail("zero_differences", T::from_count(zeros)))
}

/// One row of a [`PosthocReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEntry<T> {
    pub first: String,
    pub second: String,
    /// Raw test result at the per-comparison level; absent when untestable.
    pub outcome: Option<TestOutcome<T>>,
    /// Corrected p-value (Bonferroni min(1, c·p) or Holm step-down).
    pub p_adjusted: Option<T>,
    /// Critical statistic for threshold-form tests.
    pub critical_value: Option<T>,
    /// Family-wise decision.
    pub reject: bool,
    pub untestable: Option<String>,
}

impl<T: Scalar> PairEntry<T> {
    pub fn statistic(&self) -> Option<T> {
        self.outcome.as_ref().map(|o| o.statistic)
    }

    pub fn p_raw(&self) -> Option<T> {
        self.outcome.as_ref().map(|o| o.p_value)
    }

    pub fn involves(&self, a: &str, b: &str) -> bool {
        (self.first == a && self.second == b) || (self.first == b && self.second == a)
    }
}

/// All m(m−1)/2 pairwise comparisons of a pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosthocReport<T> {
    pub test: PosthocTest,
    pub policy: CorrectionPolicy<T>,
    /// Resolved comparison count c.
    pub num_comparisons: usize,
    /// α/c, the first-step per-comparison level.
    pub per_comparison_alpha: T,
    pub algorithm_names: Vec<String>,
    pub entries: Vec<PairEntry<T>>,
}

impl<T: Scalar> PosthocReport<T> {
    /// Entry for an unordered pair.
    pub fn entry(&self, a: &str, b: &str) -> Option<&PairEntry<T>> {
        self.entries.iter().find(|e| e.involves(a, b))
    }

    pub fn rejected_pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries
            .iter()
            .filter(|e| e.reject)
            .map(|e| (e.first.as_str(), e.second.as_str()))
    }
}

/// Raw outcome of `test` for rows i, j of `perf`, at per-comparison level
/// α/c. `ranks` must be the pool ranking when `test` is mean-ranks.
fn raw_outcome<T: Scalar>(
    perf: &PerformanceMatrix<T>,
    ranks: Option<&RankMatrix<T>>,
    i: usize,
    j: usize,
    test: PosthocTest,
    alpha: T,
    c: usize,
) -> Result<TestOutcome<T>> {
    let per_alpha = alpha / T::from_count(c);
    match test {
        PosthocTest::SignExact => sign_test_rows(perf.row(i), perf.row(j), per_alpha, SignMode::Exact),
        PosthocTest::SignNormalApprox => {
            sign_test_rows(perf.row(i), perf.row(j), per_alpha, SignMode::NormalApprox)
        }
        PosthocTest::Wilcoxon => wilcoxon_rows(perf.row(i), perf.row(j), per_alpha),
        PosthocTest::MeanRanks => {
            let ranks = ranks.expect("mean-ranks needs the pool ranking");
            let z_star = critical_z(alpha, c)?;
            Ok(mean_ranks_outcome(ranks, i, j, z_star, per_alpha, c))
        }
    }
}

/// Decision of a raw outcome when the remaining family size is `c`.
fn rejects_at<T: Scalar>(outcome: &TestOutcome<T>, test: PosthocTest, alpha: T, c: usize) -> Result<bool> {
    if test.is_threshold_form() {
        Ok(outcome.statistic.abs() >= critical_z(alpha, c)?)
    } else {
        Ok(outcome.p_value <= alpha / T::from_count(c))
    }
}

/// Runs `test` on every unordered pair of `perf` and applies `policy`.
///
/// Pairs whose data are degenerate (all differences zero) are reported as
/// untestable without aborting the report. Entries are ordered by (i, j)
/// with i < j in pool order.
pub fn pairwise_report<T: Scalar>(
    perf: &PerformanceMatrix<T>,
    test: PosthocTest,
    policy: &CorrectionPolicy<T>,
) -> Result<PosthocReport<T>> {
    policy.validate()?;
    let m = perf.num_algorithms();
    let c = policy.comparisons(m);
    let alpha = policy.alpha;
    let ranks = (test == PosthocTest::MeanRanks).then(|| rank_columns(perf, Direction::HigherIsBetter));
    let names = perf.algorithm_names();

    let mut entries = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            let entry = match raw_outcome(perf, ranks.as_ref(), i, j, test, alpha, c) {
                Ok(outcome) => {
                    let p_adjusted = match policy.kind {
                        CorrectionKind::None => outcome.p_value,
                        _ => (outcome.p_value * T::from_count(c)).min(T::one()),
                    };
                    PairEntry {
                        first: names[i].clone(),
                        second: names[j].clone(),
                        critical_value: outcome.critical_value,
                        reject: outcome.reject,
                        p_adjusted: Some(p_adjusted),
                        outcome: Some(outcome),
                        untestable: None,
                    }
                }
                Err(Error::Degenerate(reason)) => PairEntry {
                    first: names[i].clone(),
                    second: names[j].clone(),
                    outcome: None,
                    p_adjusted: None,
                    critical_value: None,
                    reject: false,
                    untestable: Some(reason),
                },
                Err(e) => return Err(e),
            };
            entries.push(entry);
        }
    }

    if policy.kind == CorrectionKind::Holm {
        apply_holm(&mut entries, test, alpha, c)?;
    }

    Ok(PosthocReport {
        test,
        policy: *policy,
        num_comparisons: c,
        per_comparison_alpha: alpha / T::from_count(c),
        algorithm_names: names.to_vec(),
        entries,
    })
}

/// Holm step-down: the k-th most significant pair (0-based) is tested against
/// a family of c − k; testing stops at the first acceptance.
fn apply_holm<T: Scalar>(entries: &mut [PairEntry<T>], test: PosthocTest, alpha: T, c: usize) -> Result<()> {
    let mut order: Vec<usize> = (0..entries.len())
        .filter(|&k| entries[k].outcome.is_some())
        .collect();
    let key = |e: &PairEntry<T>| {
        let o = e.outcome.as_ref().expect("testable");
        if test.is_threshold_form() {
            -o.statistic.abs()
        } else {
            o.p_value
        }
    };
    // stable sort keeps pair order among equal keys
    order.sort_by(|&a, &b| key(&entries[a]).partial_cmp(&key(&entries[b])).expect("finite"));

    let mut still_rejecting = true;
    let mut running_max = T::zero();
    for (step, &k) in order.iter().enumerate() {
        let family = c.saturating_sub(step).max(1);
        let outcome = entries[k].outcome.as_ref().expect("testable");
        let adjusted = (outcome.p_value * T::from_count(family)).min(T::one());
        running_max = running_max.max(adjusted);
        still_rejecting = still_rejecting && rejects_at(outcome, test, alpha, family)?;
        let critical = if test.is_threshold_form() {
            Some(critical_z(alpha, family)?)
        } else {
            None
        };
        let entry = &mut entries[k];
        entry.p_adjusted = Some(running_max);
        entry.reject = still_rejecting;
        entry.critical_value = critical;
    }
    Ok(())
}

/// Family-wise decision on a single pair, equal to the corresponding entry
/// of [`pairwise_report`]. Only Holm needs the whole family; the other
/// policies evaluate the pair alone (and pool-independent tests never rank).
pub fn decide_pair<T: Scalar>(
    perf: &PerformanceMatrix<T>,
    pair: (&str, &str),
    test: PosthocTest,
    policy: &CorrectionPolicy<T>,
) -> Result<PairEntry<T>> {
    policy.validate()?;
    let i = perf.index_of(pair.0)?;
    let j = perf.index_of(pair.1)?;
    if i == j {
        return Err(Error::validation(format!("pair compares '{}' with itself", pair.0)));
    }
    if policy.kind == CorrectionKind::Holm {
        let report = pairwise_report(perf, test, policy)?;
        let mut entry = report
            .entry(pair.0, pair.1)
            .cloned()
            .expect("every pair has an entry");
        if entry.first != pair.0 {
            std::mem::swap(&mut entry.first, &mut entry.second);
        }
        return Ok(entry);
    }
    let m = perf.num_algorithms();
    let c = policy.comparisons(m);
    let ranks = (test == PosthocTest::MeanRanks).then(|| rank_columns(perf, Direction::HigherIsBetter));
    let entry = match raw_outcome(perf, ranks.as_ref(), i, j, test, policy.alpha, c) {
        Ok(outcome) => PairEntry {
            first: pair.0.to_string(),
            second: pair.1.to_string(),
            p_adjusted: Some(match policy.kind {
                CorrectionKind::None => outcome.p_value,
                _ => (outcome.p_value * T::from_count(c)).min(T::one()),
            }),
            critical_value: outcome.critical_value,
            reject: outcome.reject,
            outcome: Some(outcome),
            untestable: None,
        },
        Err(Error::Degenerate(reason)) => PairEntry {
            first: pair.0.to_string(),
            second: pair.1.to_string(),
            outcome: None,
            p_adjusted: None,
            critical_value: None,
            reject: false,
            untestable: Some(reason),
        },
        Err(e) => return Err(e),
    };
    Ok(entry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reproduce::example1_matrix;
    use proptest::prelude::*;

    fn pair_matrix(diffs: &[f64]) -> PerformanceMatrix<f64> {
        PerformanceMatrix::from_rows(["x", "y"], vec![diffs.to_vec(), vec![0.0; diffs.len()]]).unwrap()
    }

    #[test]
    fn statistic_from_printed_mean_ranks() {
        assert!((mean_ranks_statistic::<f64>(2.676, 1.917, 4, 54) - 3.06).abs() < 0.01);
        assert!((mean_ranks_statistic::<f64>(2.713, 2.102, 4, 54) - 2.46).abs() < 0.01);
        assert_eq!(mean_ranks_statistic::<f64>(2.0, 2.0, 5, 20), 0.0);
    }

    #[test]
    fn example1_mean_ranks_flip() {
        let perf = example1_matrix::<f64>();
        let full = rank_columns(&perf, Direction::HigherIsBetter);
        let out = mean_ranks_test(&full, ("A", "B"), &CorrectionPolicy::bonferroni(0.05)).unwrap();
        assert_eq!(out.detail("mean_rank_difference"), Some(1.5));
        assert!((out.detail("difference_threshold").unwrap() - 1.40350f64).abs() < 5e-4);
        assert!((out.critical_value.unwrap() - 2.807f64).abs() < 1e-3);
        assert_eq!(out.statistic, 3.0);
        assert!(out.reject);
        assert_eq!(out.detail("m"), Some(5.0));

        let ab = rank_columns(&perf.restrict(&["A", "B"]).unwrap(), Direction::HigherIsBetter);
        let out = mean_ranks_test(&ab, ("A", "B"), &CorrectionPolicy::bonferroni(0.05)).unwrap();
        assert_eq!(out.statistic, 0.0);
        assert!(!out.reject);
        assert_eq!(out.detail("num_comparisons"), Some(1.0));
    }

    #[test]
    fn mean_ranks_unknown_pair() {
        let full = rank_columns(&example1_matrix::<f64>(), Direction::HigherIsBetter);
        let err = mean_ranks_test(&full, ("A", "Q"), &CorrectionPolicy::bonferroni(0.05)).unwrap_err();
        assert!(matches!(err, Error::Lookup { .. }));
    }

    #[test]
    fn threshold_ratio_is_sqrt5() {
        let r5: f64 = mean_ranks_threshold(2.0, 5, 20);
        let r2: f64 = mean_ranks_threshold(2.0, 2, 20);
        assert!((r5 / r2 - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sign_examples() {
        let out = sign_test(&example1_matrix::<f64>(), ("A", "B"), 0.05, SignMode::Exact).unwrap();
        assert_eq!(out.p_value, 1.0);
        assert!(!out.reject);

        let all_wins = pair_matrix(&[1.0; 20]);
        let out = sign_test(&all_wins, ("x", "y"), 0.05, SignMode::Exact).unwrap();
        assert!((out.p_value - 1.9073486328125e-6).abs() < 1e-18);
        assert!(out.reject);

        let mut d = vec![1.0; 15];
        d.extend([-1.0; 5]);
        let out = sign_test(&pair_matrix(&d), ("x", "y"), 0.05, SignMode::Exact).unwrap();
        assert!((out.p_value - 0.0414).abs() < 1e-4);
        assert!(out.reject);
        assert_eq!(out.statistic, 15.0);

        // zeros discarded: 15 wins + 5 losses + 3 zeros behaves like n = 20
        d.extend([0.0; 3]);
        let out = sign_test(&pair_matrix(&d), ("x", "y"), 0.05, SignMode::Exact).unwrap();
        assert!((out.p_value - 0.04138946533203125).abs() < 1e-15);
        assert_eq!(out.detail("zero_differences"), Some(3.0));
    }

    #[test]
    fn sign_normal_threshold() {
        // 15 of 20: |15-5|/sqrt(20) = 2.236 >= 1.96
        let mut d = vec![1.0; 15];
        d.extend([-1.0; 5]);
        let out = sign_test(&pair_matrix(&d), ("x", "y"), 0.05, SignMode::NormalApprox).unwrap();
        assert!(out.reject);
        assert_eq!(out.rule, DecisionRule::Threshold);
        // 14 of 20: 8/sqrt(20) = 1.789 < 1.96
        let mut d = vec![1.0; 14];
        d.extend([-1.0; 6]);
        let out = sign_test(&pair_matrix(&d), ("x", "y"), 0.05, SignMode::NormalApprox).unwrap();
        assert!(!out.reject);
    }

    #[test]
    fn degenerate_pairs() {
        let perf = pair_matrix(&[0.0; 4]);
        assert!(matches!(
            sign_test(&perf, ("x", "y"), 0.05, SignMode::Exact),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            wilcoxon_signed_rank(&perf, ("x", "y"), 0.05),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn wilcoxon_examples() {
        let out = wilcoxon_signed_rank(&pair_matrix(&[1.0, 2.0, 3.0, 4.0, 5.0]), ("x", "y"), 0.05).unwrap();
        assert_eq!(out.statistic, 15.0);
        assert_eq!(out.p_value, 0.0625);
        assert_eq!(out.method, Method::WilcoxonExact);
        assert!(!out.reject);

        let out = wilcoxon_signed_rank(&pair_matrix(&[1.0, -2.0, 3.0, -4.0, 5.0]), ("x", "y"), 0.05).unwrap();
        assert_eq!(out.statistic, 9.0);
        assert_eq!(out.p_value, 0.8125);
    }

    #[test]
    fn wilcoxon_ties_fall_back() {
        let out = wilcoxon_signed_rank(&example1_matrix::<f64>(), ("A", "B"), 0.05).unwrap();
        assert_eq!(out.method, Method::WilcoxonNormalApprox);
        assert_eq!(out.statistic, 105.0);
        assert_eq!(out.p_value, 1.0);
        assert!(!out.notes.is_empty());
    }

    #[test]
    fn wilcoxon_large_sample_normal() {
        // 40 distinct positive differences: W+ = 820, far in the tail.
        let d: Vec<f64> = (1..=40).map(f64::from).collect();
        let out = wilcoxon_signed_rank(&pair_matrix(&d), ("x", "y"), 0.05).unwrap();
        assert_eq!(out.method, Method::WilcoxonNormalApprox);
        assert!(out.notes.is_empty());
        let mean = 410.0;
        let sd = (40.0f64 * 41.0 * 81.0 / 24.0).sqrt();
        let z = (820.0 - mean - 0.5) / sd;
        assert!((out.p_value - normal_two_sided_p(z)).abs() < 1e-15);
    }

    #[test]
    fn report_example1() {
        let perf = example1_matrix::<f64>();
        let w = pairwise_report(&perf, PosthocTest::Wilcoxon, &CorrectionPolicy::bonferroni(0.05)).unwrap();
        assert_eq!(w.entries.len(), 10);
        assert_eq!(w.num_comparisons, 10);
        let ab = w.entry("B", "A").unwrap();
        assert!(!ab.reject);
        assert_eq!(ab.p_raw(), Some(1.0));

        let mr = pairwise_report(&perf, PosthocTest::MeanRanks, &CorrectionPolicy::bonferroni(0.05)).unwrap();
        assert!(mr.entry("A", "B").unwrap().reject);

        let pair = perf.restrict(&["A", "B"]).unwrap();
        for test in [PosthocTest::SignExact, PosthocTest::Wilcoxon, PosthocTest::MeanRanks] {
            let r = pairwise_report(&pair, test, &CorrectionPolicy::bonferroni(0.05)).unwrap();
            assert_eq!(r.entries.len(), 1);
            assert_eq!(r.num_comparisons, 1);
        }
    }

    #[test]
    fn report_marks_untestable() {
        let perf = PerformanceMatrix::from_rows(
            ["a", "b", "c"],
            vec![vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0], vec![0.0, 5.0, 1.0]],
        )
        .unwrap();
        let r = pairwise_report(&perf, PosthocTest::SignExact, &CorrectionPolicy::holm(0.05)).unwrap();
        let ab = r.entry("a", "b").unwrap();
        assert!(ab.untestable.is_some());
        assert!(!ab.reject);
        assert!(r.entry("a", "c").unwrap().outcome.is_some());
    }

    #[test]
    fn holm_step_down_example() {
        // three pairs with raw p-values spread so Holm rejects more than Bonferroni
        let x: Vec<f64> = (0..12).map(|k| 10.0 + f64::from(k)).collect();
        let y: Vec<f64> = (0..12).map(|k| f64::from(k) * 0.5).collect();
        let mut z = y.clone();
        for (k, v) in z.iter_mut().enumerate() {
            if k < 2 {
                *v += 100.0;
            }
        }
        let perf = PerformanceMatrix::from_rows(["x", "y", "z"], vec![x, y, z]).unwrap();
        let bonf = pairwise_report(&perf, PosthocTest::SignExact, &CorrectionPolicy::bonferroni(0.05)).unwrap();
        let holm = pairwise_report(&perf, PosthocTest::SignExact, &CorrectionPolicy::holm(0.05)).unwrap();
        for (b, h) in bonf.entries.iter().zip(&holm.entries) {
            assert!(!b.reject || h.reject);
            assert!(h.p_adjusted.unwrap() >= h.p_raw().unwrap());
        }
    }

    #[test]
    fn decide_pair_matches_report() {
        let perf = example1_matrix::<f64>();
        for test in [PosthocTest::SignExact, PosthocTest::SignNormalApprox, PosthocTest::Wilcoxon, PosthocTest::MeanRanks] {
            for policy in [CorrectionPolicy::none(0.05), CorrectionPolicy::bonferroni(0.05), CorrectionPolicy::holm(0.05)] {
                let report = pairwise_report(&perf, test, &policy).unwrap();
                for e in &report.entries {
                    let single = decide_pair(&perf, (&e.first, &e.second), test, &policy).unwrap();
                    assert_eq!(single.reject, e.reject, "{test} {:?} {}-{}", policy.kind, e.first, e.second);
                    assert_eq!(single.p_raw(), e.p_raw());
                }
            }
        }
    }

    #[test]
    fn parse_ids() {
        assert_eq!("sign".parse::<PosthocTest>().unwrap(), PosthocTest::SignExact);
        assert_eq!("mean-ranks".parse::<PosthocTest>().unwrap(), PosthocTest::MeanRanks);
        assert!("t-test".parse::<PosthocTest>().is_err());
        assert_eq!("holm".parse::<CorrectionKind>().unwrap(), CorrectionKind::Holm);
    }

    #[test]
    fn comparisons_resolution() {
        let p = CorrectionPolicy::bonferroni(0.05);
        assert_eq!(p.comparisons(5), 10);
        assert!((p.per_comparison_alpha(5) - 0.005f64).abs() < 1e-18);
        assert_eq!(p.with_comparisons(3).comparisons(5), 3);
        assert_eq!(CorrectionPolicy::none(0.05).comparisons(5), 1);
        assert!((p.critical_z(5).unwrap() - 2.807f64).abs() < 1e-3);
    }

    fn rows_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (3usize..6, 5usize..25).prop_flat_map(|(m, n)| {
            prop::collection::vec(prop::collection::vec((0i32..8).prop_map(f64::from), n), m)
        })
    }

    proptest! {
        #[test]
        fn pairwise_tests_symmetric(rows in rows_strategy()) {
            let m = rows.len();
            let names: Vec<String> = (0..m).map(|i| format!("a{i}")).collect();
            let perf = PerformanceMatrix::from_rows(names, rows).unwrap();
            let ranks = rank_columns(&perf, Direction::HigherIsBetter);
            for mode in [SignMode::Exact, SignMode::NormalApprox] {
                match (sign_test(&perf, ("a0", "a1"), 0.05, mode), sign_test(&perf, ("a1", "a0"), 0.05, mode)) {
                    (Ok(a), Ok(b)) => { prop_assert_eq!(a.p_value, b.p_value); prop_assert_eq!(a.reject, b.reject); }
                    (Err(_), Err(_)) => {}
                    _ => prop_assert!(false, "asymmetric failure"),
                }
            }
            match (wilcoxon_signed_rank(&perf, ("a0", "a2"), 0.05), wilcoxon_signed_rank(&perf, ("a2", "a0"), 0.05)) {
                (Ok(a), Ok(b)) => {
                    prop_assert_eq!(a.p_value, b.p_value);
                    prop_assert_eq!(a.detail("w_plus"), b.detail("w_minus"));
                }
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "asymmetric failure"),
            }
            let policy = CorrectionPolicy::bonferroni(0.05);
            let a = mean_ranks_test(&ranks, ("a0", "a1"), &policy).unwrap();
            let b = mean_ranks_test(&ranks, ("a1", "a0"), &policy).unwrap();
            prop_assert_eq!(a.statistic, b.statistic);
            prop_assert_eq!(a.reject, b.reject);
        }

        #[test]
        fn holm_dominates_bonferroni(rows in rows_strategy()) {
            let m = rows.len();
            let names: Vec<String> = (0..m).map(|i| format!("a{i}")).collect();
            let perf = PerformanceMatrix::from_rows(names, rows).unwrap();
            for test in [PosthocTest::SignExact, PosthocTest::Wilcoxon, PosthocTest::MeanRanks, PosthocTest::SignNormalApprox] {
                let b = pairwise_report(&perf, test, &CorrectionPolicy::bonferroni(0.2)).unwrap();
                let h = pairwise_report(&perf, test, &CorrectionPolicy::holm(0.2)).unwrap();
                for (eb, eh) in b.entries.iter().zip(&h.entries) {
                    prop_assert!(!eb.reject || eh.reject);
                    if let (Some(p), Some(pa)) = (eb.p_raw(), eb.p_adjusted) {
                        prop_assert!(pa >= p);
                    }
                }
            }
        }
    }
}

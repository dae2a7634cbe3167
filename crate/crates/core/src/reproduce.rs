//! Built-in fixtures and canned end-to-end demonstrations.
//!
//! * `1`: a five-algorithm, twenty-dataset matrix where two algorithms tie
//!   head to head, yet the mean-ranks test separates them once three other
//!   algorithms join the pool.
//! * `2`: Gaussian scenario where three dominant algorithms inflate the
//!   mean-ranks critical value and collapse its power on the weaker pair.
//! * `4_4`: family-wise error of mean-ranks versus sign tests when most
//!   algorithms are equivalent.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::{binomial_two_sided_p, normal_cdf};
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_fwer, estimate_power, Generator, PowerScenario, DEFAULT_REPLICATES};
use crate::omnibus::friedman;
use crate::posthoc::{
    mean_ranks_test, sign_test, wilcoxon_signed_rank, CorrectionKind, CorrectionPolicy, PosthocTest, SignMode,
};
use crate::ranking::{rank_columns, Direction, PerformanceMatrix};
use crate::scalar::Scalar;

/// Accuracies of A..E on 20 datasets: ten datasets of one regime, then ten
/// of another.
pub fn example1_matrix<T: Scalar>() -> PerformanceMatrix<T> {
    let regimes: [(&str, f64, f64); 5] = [
        ("A", 50.0, 80.0),
        ("B", 80.0, 50.0),
        ("C", 55.0, 45.0),
        ("D", 60.0, 85.0),
        ("E", 65.0, 90.0),
    ];
    let rows = regimes
        .iter()
        .map(|&(_, first, second)| {
            std::iter::repeat_n(T::lit(first), 10)
                .chain(std::iter::repeat_n(T::lit(second), 10))
                .collect()
        })
        .collect();
    PerformanceMatrix::from_rows(regimes.iter().map(|r| r.0), rows).expect("fixture is valid")
}

/// A ~ N(0,1), B ~ N(1.5,1), C ~ N(5,1), D ~ N(6,1), E ~ N(7,1) on 20
/// datasets; target pair (A, B), α = 0.05, no multiplicity correction.
pub fn example2_scenario<T: Scalar>(test: PosthocTest) -> PowerScenario<T> {
    let gens = [("A", 0.0), ("B", 1.5), ("C", 5.0), ("D", 6.0), ("E", 7.0)];
    PowerScenario {
        algorithms: gens
            .iter()
            .map(|&(n, mu)| Generator::new(n, T::lit(mu), T::one()))
            .collect(),
        n_datasets: 20,
        target_pair: Some(("A".into(), "B".into())),
        equal_mean: Vec::new(),
        test,
        alpha: T::lit(0.05),
        correction: CorrectionKind::None,
        num_comparisons: None,
        replicates: DEFAULT_REPLICATES,
        seed: 20160101,
    }
}

/// Four equivalent algorithms N(0,1) plus one far better N(10,1), n = 20,
/// Bonferroni at α = 0.05; the equal-mean group is A..D.
pub fn max_type_one_scenario<T: Scalar>(test: PosthocTest) -> PowerScenario<T> {
    let gens = [("A", 0.0), ("B", 0.0), ("C", 0.0), ("D", 0.0), ("E", 10.0)];
    PowerScenario {
        algorithms: gens
            .iter()
            .map(|&(n, mu)| Generator::new(n, T::lit(mu), T::one()))
            .collect(),
        n_datasets: 20,
        target_pair: None,
        equal_mean: ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect(),
        test,
        alpha: T::lit(0.05),
        correction: CorrectionKind::Bonferroni,
        num_comparisons: None,
        replicates: DEFAULT_REPLICATES,
        seed: 20160404,
    }
}

/// All five algorithms N(0,1): the complete null.
pub fn all_null_scenario<T: Scalar>(test: PosthocTest) -> PowerScenario<T> {
    let mut s = max_type_one_scenario(test);
    s.algorithms[4].mean = T::zero();
    s.equal_mean = s.algorithm_names();
    s
}

/// Exact power of the two-sided exact sign test when each dataset is a win
/// with probability `q`: Σ over the exact rejection region of the binomial
/// pmf.
pub fn sign_exact_power(n: u64, q: f64, alpha: f64) -> Result<f64> {
    let mut power = 0.0;
    let mut coeff = 1.0f64;
    for k in 0..=n {
        if k > 0 {
            coeff = coeff * (n - k + 1) as f64 / k as f64;
        }
        if binomial_two_sided_p::<f64>(k, n)? <= alpha {
            power += coeff * q.powi(k as i32) * (1.0 - q).powi((n - k) as i32);
        }
    }
    Ok(power)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExampleId {
    #[serde(rename = "1")]
    ArtificialPower,
    #[serde(rename = "2")]
    LostPower,
    #[serde(rename = "4_4")]
    MaxTypeOne,
}

impl FromStr for ExampleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(ExampleId::ArtificialPower),
            "2" => Ok(ExampleId::LostPower),
            "4_4" | "4.4" => Ok(ExampleId::MaxTypeOne),
            other => Err(Error::validation(format!(
                "unknown example '{other}' (expected 1, 2 or 4_4)"
            ))),
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExampleId::ArtificialPower => "1",
            ExampleId::LostPower => "2",
            ExampleId::MaxTypeOne => "4_4",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// |observed − expected| ≤ tolerance
    Absolute,
    /// |observed − expected| ≤ tolerance·|expected|
    Relative,
    /// observed ≤ expected + tolerance
    AtMost,
    /// observed < expected
    Below,
    /// informational, always passes
    Observed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, observed: f64, expected: f64, tolerance: f64, comparison: Comparison) -> Self {
        let pass = match comparison {
            Comparison::Absolute => (observed - expected).abs() <= tolerance,
            Comparison::Relative => (observed - expected).abs() <= tolerance * expected.abs(),
            Comparison::AtMost => observed <= expected + tolerance,
            Comparison::Below => observed < expected,
            Comparison::Observed => true,
        };
        Check {
            name: name.into(),
            observed,
            expected,
            tolerance,
            comparison,
            pass,
        }
    }

    fn flag(name: impl Into<String>, observed: bool, expected: bool) -> Self {
        Check::new(
            name,
            f64::from(u8::from(observed)),
            f64::from(u8::from(expected)),
            0.0,
            Comparison::Absolute,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reproduction {
    pub example: ExampleId,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Reproduction {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs one canned demonstration. `replicates` and `seed` override the Monte
/// Carlo defaults for examples 2 and 4_4.
pub fn reproduce(id: ExampleId, replicates: Option<usize>, seed: Option<u64>) -> Result<Reproduction> {
    match id {
        ExampleId::ArtificialPower => reproduce_example1(),
        ExampleId::LostPower => reproduce_example2(replicates, seed),
        ExampleId::MaxTypeOne => reproduce_max_type_one(replicates, seed),
    }
}

fn reproduce_example1() -> Result<Reproduction> {
    let perf = example1_matrix::<f64>();
    let mut checks = Vec::new();

    let sign = sign_test(&perf, ("A", "B"), 0.05, SignMode::Exact)?;
    checks.push(Check::new("sign_exact_p[A,B]", sign.p_value, 1.0, 0.0, Comparison::Absolute));
    let wilcoxon = wilcoxon_signed_rank(&perf, ("A", "B"), 0.05)?;
    checks.push(Check::new("wilcoxon_p[A,B]", wilcoxon.p_value, 1.0, 0.0, Comparison::Absolute));

    let omnibus = friedman(&perf, 0.05)?;
    checks.push(Check::new("friedman_statistic", omnibus.statistic, 48.0, 0.0, Comparison::Absolute));
    checks.push(Check::new(
        "friedman_p",
        omnibus.p_value,
        25.0 * (-24.0f64).exp(),
        1e-12,
        Comparison::Relative,
    ));
    checks.push(Check::new("friedman_p_below_1e-8", omnibus.p_value, 1e-8, 0.0, Comparison::Below));

    let ranks = rank_columns(&perf, Direction::HigherIsBetter);
    for (name, expected) in [("A", 2.0), ("B", 3.5), ("C", 1.5), ("D", 3.5), ("E", 4.5)] {
        checks.push(Check::new(
            format!("mean_rank[{name}]"),
            ranks.mean_rank_of(name)?,
            expected,
            0.0,
            Comparison::Absolute,
        ));
    }
    let policy = CorrectionPolicy::bonferroni(0.05);
    let full = mean_ranks_test(&ranks, ("A", "B"), &policy)?;
    checks.push(Check::new(
        "mean_ranks_difference[A,B]",
        full.detail("mean_rank_difference").unwrap_or(f64::NAN),
        1.5,
        0.0,
        Comparison::Absolute,
    ));
    checks.push(Check::new("critical_z[m=5]", full.critical_value.unwrap_or(f64::NAN), 2.807, 1e-3, Comparison::Absolute));
    checks.push(Check::new(
        "mean_ranks_threshold[m=5]",
        full.detail("difference_threshold").unwrap_or(f64::NAN),
        1.40350,
        5e-4,
        Comparison::Absolute,
    ));
    checks.push(Check::flag("mean_ranks_reject[pool=ABCDE]", full.reject, true));

    let pair_ranks = rank_columns(&perf.restrict(&["A", "B"])?, Direction::HigherIsBetter);
    let alone = mean_ranks_test(&pair_ranks, ("A", "B"), &policy)?;
    checks.push(Check::flag("mean_ranks_reject[pool=AB]", alone.reject, false));

    Ok(Reproduction {
        example: ExampleId::ArtificialPower,
        checks,
        notes: vec![
            "A and B each win 10 of 20 datasets by the same margin; only the mean-ranks test, \
             fed the whole pool, calls them different."
                .into(),
        ],
    })
}

fn reproduce_example2(replicates: Option<usize>, seed: Option<u64>) -> Result<Reproduction> {
    let configure = |test| {
        let mut s = example2_scenario::<f64>(test);
        if let Some(r) = replicates {
            s.replicates = r;
        }
        if let Some(seed) = seed {
            s.seed = seed;
        }
        s
    };
    let sign_normal = estimate_power(&configure(PosthocTest::SignNormalApprox))?;
    let mean_ranks = estimate_power(&configure(PosthocTest::MeanRanks))?;
    let sign_exact = estimate_power(&configure(PosthocTest::SignExact))?;
    let q = normal_cdf(1.5 / 2f64.sqrt());
    let analytic = sign_exact_power(20, q, 0.05)?;

    let checks = vec![
        Check::new("power_sign_normal_approx", sign_normal.estimate, 0.94, 0.01, Comparison::Absolute),
        Check::new("power_mean_ranks", mean_ranks.estimate, 0.046, 0.005, Comparison::Absolute),
        Check::new(
            "power_sign_exact_vs_closed_form",
            sign_exact.estimate,
            analytic,
            3.0 * sign_exact.std_error,
            Comparison::Absolute,
        ),
    ];
    Ok(Reproduction {
        example: ExampleId::LostPower,
        checks,
        notes: vec![format!(
            "{} replicates, seed {}; std errors: sign-normal {:.4}, mean-ranks {:.4}, sign-exact {:.4}",
            sign_normal.replicates, sign_normal.seed, sign_normal.std_error, mean_ranks.std_error, sign_exact.std_error
        )],
    })
}

fn reproduce_max_type_one(replicates: Option<usize>, seed: Option<u64>) -> Result<Reproduction> {
    let configure = |mut s: PowerScenario<f64>| {
        if let Some(r) = replicates {
            s.replicates = r;
        }
        if let Some(seed) = seed {
            s.seed = seed;
        }
        s
    };
    let null_sign = estimate_fwer(&configure(all_null_scenario(PosthocTest::SignExact)))?;
    let mut checks = vec![Check::new(
        "fwer_sign_exact_all_null",
        null_sign.estimate,
        0.05,
        3.0 * null_sign.std_error,
        Comparison::AtMost,
    )];
    let mut notes = Vec::new();
    for test in [PosthocTest::MeanRanks, PosthocTest::SignExact, PosthocTest::Wilcoxon] {
        let est = estimate_fwer(&configure(max_type_one_scenario(test)))?;
        checks.push(Check::new(
            format!("fwer_{test}_four_equal_one_better"),
            est.estimate,
            0.05,
            0.0,
            Comparison::Observed,
        ));
        notes.push(format!(
            "{test}: {} of {} replicates falsely separated some pair among A..D (std error {:.4})",
            est.rejections, est.replicates, est.std_error
        ));
    }
    Ok(Reproduction {
        example: ExampleId::MaxTypeOne,
        checks,
        notes,
    })
}

pub fn render_reproduction_text(r: &Reproduction) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Example {}", r.example);
    let _ = writeln!(
        s,
        "{:<40} {:>14} {:>14} {:>10}  result",
        "check", "observed", "expected", "tolerance"
    );
    for c in &r.checks {
        let verdict = match (c.comparison, c.pass) {
            (Comparison::Observed, _) => "logged",
            (_, true) => "PASS",
            (_, false) => "FAIL",
        };
        let _ = writeln!(
            s,
            "{:<40} {:>14.6e} {:>14.6e} {:>10.2e}  {}",
            c.name, c.observed, c.expected, c.tolerance, verdict
        );
    }
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_all_checks_pass() {
        let r = reproduce(ExampleId::ArtificialPower, None, None).unwrap();
        for c in &r.checks {
            assert!(c.pass, "{c:?}");
        }
        assert!(render_reproduction_text(&r).contains("PASS"));
    }

    #[test]
    fn closed_form_power_matches_oracle() {
        // 40-digit reference: Φ(1.5/√2) and the exact-region binomial sum
        let q = 0.8555778168267575657994689;
        assert!((sign_exact_power(20, q, 0.05).unwrap() - 0.94234177990535529076).abs() < 1e-13);
    }

    #[test]
    fn ids_parse() {
        assert_eq!("4_4".parse::<ExampleId>().unwrap(), ExampleId::MaxTypeOne);
        assert!("3".parse::<ExampleId>().is_err());
    }
}

//! End-to-end analysis and report rendering.
//!
//! Every report has a human text rendering and a structured rendering. The
//! structured form is a JSON document
//! `{"format": "rankjudge/1", "kind": <kind>, "body": <report>}`; numbers are
//! written with shortest round-trip precision so parsing recovers them
//! exactly. The field layout is described in `STRUCTURED_FORMAT.md`.

use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{PowerEstimate, PowerScenario};
use crate::omnibus::{friedman_from_ranks, TestOutcome};
use crate::posthoc::{pairwise_report, CorrectionPolicy, PosthocReport, PosthocTest};
use crate::ranking::{rank_columns, Direction, PerformanceMatrix};
use crate::scalar::Scalar;
use crate::stability::StabilityReport;

pub const FORMAT_TAG: &str = "rankjudge/1";

pub const MEAN_RANKS_CAUTION: &str = "CAUTION: the mean-ranks test uses ranks computed over the whole pool of \
algorithms, so its verdict on a pair can change when unrelated algorithms are added or removed. \
Prefer the sign test or the Wilcoxon signed-rank test for pairwise comparisons.";

/// Self-describing wrapper around any report body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<B> {
    pub format: String,
    pub kind: String,
    pub body: B,
}

pub fn to_structured<B: Serialize>(kind: &str, body: &B) -> String {
    let doc = Document {
        format: FORMAT_TAG.to_string(),
        kind: kind.to_string(),
        body,
    };
    serde_json::to_string_pretty(&doc).expect("report types serialize") + "\n"
}

pub fn from_structured<B: DeserializeOwned>(text: &str) -> Result<Document<B>> {
    let doc: Document<B> = serde_json::from_str(text).map_err(|e| Error::Parse {
        row: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.format != FORMAT_TAG {
        return Err(Error::validation(format!("unsupported document format '{}'", doc.format)));
    }
    Ok(doc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions<T> {
    pub alpha: T,
    pub test: PosthocTest,
    pub policy: CorrectionPolicy<T>,
    pub direction: Direction,
    /// Run the post-hoc comparisons even if the Friedman test does not reject.
    pub force_posthoc: bool,
}

impl<T: Scalar> AnalysisOptions<T> {
    pub fn new(test: PosthocTest) -> Self {
        AnalysisOptions {
            alpha: T::lit(0.05),
            test,
            policy: CorrectionPolicy::bonferroni(T::lit(0.05)),
            direction: Direction::HigherIsBetter,
            force_posthoc: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanRankRow<T> {
    pub algorithm: String,
    pub mean_rank: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport<T> {
    pub num_algorithms: usize,
    pub num_datasets: usize,
    pub direction: Direction,
    pub mean_ranks: Vec<MeanRankRow<T>>,
    pub omnibus: TestOutcome<T>,
    pub posthoc: Option<PosthocReport<T>>,
    pub posthoc_skipped: Option<String>,
    pub caution: Option<String>,
}

/// Friedman test, then the pairwise report when it rejects (or when forced).
pub fn run_analysis<T: Scalar>(perf: &PerformanceMatrix<T>, options: &AnalysisOptions<T>) -> Result<AnalysisReport<T>> {
    let ranks = rank_columns(perf, options.direction);
    let omnibus = friedman_from_ranks(&ranks, options.alpha)?;
    let (posthoc, posthoc_skipped) = if omnibus.reject || options.force_posthoc {
        (Some(pairwise_report(perf, options.test, &options.policy)?), None)
    } else {
        (
            None,
            Some(format!(
                "Friedman test did not reject at alpha = {} (p = {:.6e}); post-hoc comparisons skipped",
                options.alpha, omnibus.p_value
            )),
        )
    };
    Ok(AnalysisReport {
        num_algorithms: perf.num_algorithms(),
        num_datasets: perf.num_datasets(),
        direction: options.direction,
        mean_ranks: ranks
            .algorithm_names()
            .iter()
            .zip(ranks.mean_ranks())
            .map(|(a, &r)| MeanRankRow {
                algorithm: a.clone(),
                mean_rank: r,
            })
            .collect(),
        omnibus,
        posthoc,
        posthoc_skipped,
        caution: (options.test == PosthocTest::MeanRanks).then(|| MEAN_RANKS_CAUTION.to_string()),
    })
}

fn fmt_opt<T: Scalar>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{:.6}", v))
}

fn fmt_p<T: Scalar>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{:.4e}", v))
}

pub fn render_posthoc_text<T: Scalar>(report: &PosthocReport<T>) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "Post-hoc: {} test, {} correction, alpha = {}, c = {} comparisons (alpha/c = {:.6})",
        report.test, report.policy.kind, report.policy.alpha, report.num_comparisons, report.per_comparison_alpha
    );
    let _ = writeln!(
        s,
        "{:<14} {:<14} {:>12} {:>12} {:>12} {:>10}  decision",
        "first", "second", "statistic", "p_raw", "p_adjusted", "critical"
    );
    for e in &report.entries {
        let decision = match (&e.untestable, e.reject) {
            (Some(reason), _) => format!("untestable ({reason})"),
            (None, true) => "significant".to_string(),
            (None, false) => "not significant".to_string(),
        };
        let _ = writeln!(
            s,
            "{:<14} {:<14} {:>12} {:>12} {:>12} {:>10}  {}",
            e.first,
            e.second,
            fmt_opt(e.statistic()),
            fmt_p(e.p_raw()),
            fmt_p(e.p_adjusted),
            fmt_opt(e.critical_value),
            decision
        );
    }
    s
}

pub fn render_analysis_text<T: Scalar>(report: &AnalysisReport<T>) -> String {
    let mut s = String::new();
    if let Some(c) = &report.caution {
        let _ = writeln!(s, "{c}\n");
    }
    let _ = writeln!(
        s,
        "{} algorithms x {} datasets ({})",
        report.num_algorithms, report.num_datasets, report.direction
    );
    let _ = writeln!(s, "Mean ranks:");
    for row in &report.mean_ranks {
        let _ = writeln!(s, "  {:<14} {:.4}", row.algorithm, row.mean_rank);
    }
    let o = &report.omnibus;
    let _ = writeln!(
        s,
        "Friedman: S = {:.6}, dof = {}, p = {:.6e} -> {} at alpha = {}",
        o.statistic,
        report.num_algorithms - 1,
        o.p_value,
        if o.reject { "reject" } else { "do not reject" },
        o.alpha_effective
    );
    s.push('\n');
    match (&report.posthoc, &report.posthoc_skipped) {
        (Some(p), _) => s.push_str(&render_posthoc_text(p)),
        (None, Some(reason)) => {
            let _ = writeln!(s, "{reason}");
        }
        (None, None) => {}
    }
    s
}

pub fn render_outcome_text<T: Scalar>(outcome: &TestOutcome<T>) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}: statistic = {:.6}, p = {:.6e}, alpha = {} -> {}",
        outcome.method,
        outcome.statistic,
        outcome.p_value,
        outcome.alpha_effective,
        if outcome.reject { "reject" } else { "do not reject" }
    );
    for (k, v) in &outcome.detail {
        let _ = writeln!(s, "  {k} = {v}");
    }
    for n in &outcome.notes {
        let _ = writeln!(s, "  note: {n}");
    }
    s
}

/// A Monte Carlo run: the scenario as executed and its estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct SimulationReport<T> {
    /// `power` or `fwer`.
    pub quantity: String,
    pub scenario: PowerScenario<T>,
    pub estimate: PowerEstimate<T>,
}

pub fn render_simulation_text<T: Scalar>(report: &SimulationReport<T>) -> String {
    let s = &report.scenario;
    let e = &report.estimate;
    let mut out = String::new();
    if s.test == PosthocTest::MeanRanks {
        let _ = writeln!(out, "{MEAN_RANKS_CAUTION}\n");
    }
    let _ = writeln!(out, "Scenario ({} datasets):", s.n_datasets);
    for g in &s.algorithms {
        let _ = writeln!(out, "  {:<14} N({}, {}^2)", g.name, g.mean, g.sd);
    }
    match report.quantity.as_str() {
        "power" => {
            if let Some((a, b)) = &s.target_pair {
                let _ = writeln!(out, "Target pair: {a} vs {b}");
            }
        }
        _ => {
            let _ = writeln!(out, "Equal-mean group: {}", s.equal_mean.join(", "));
        }
    }
    let _ = writeln!(
        out,
        "Test: {}, correction: {}, alpha = {}",
        s.test, s.correction, s.alpha
    );
    let _ = writeln!(
        out,
        "{} = {:.5} +/- {:.5} (std error), {} of {} replicates, seed {}",
        report.quantity, e.estimate, e.std_error, e.rejections, e.replicates, e.seed
    );
    out
}

pub fn render_stability_text<T: Scalar>(reports: &[StabilityReport<T>]) -> String {
    let mut s = String::new();
    let Some(first) = reports.first() else {
        return s;
    };
    if first.test == PosthocTest::MeanRanks {
        let _ = writeln!(s, "{MEAN_RANKS_CAUTION}\n");
    }
    let _ = writeln!(
        s,
        "Pair {} vs {}, {} test, {} correction at alpha = {}",
        first.pair.0, first.pair.1, first.test, first.policy.kind, first.policy.alpha
    );
    let _ = writeln!(s, "{:>11}  {:>11}", "pool size", "significant");
    for r in reports {
        let _ = writeln!(
            s,
            "{:>11}  {:>7}/{:<3}",
            r.pool_cardinality, r.pools_significant, r.pools_evaluated
        );
    }
    s.push('\n');
    for r in reports {
        for p in &r.per_pool {
            let _ = writeln!(
                s,
                "  {{{}}}: statistic = {}, p = {}, c = {}, Friedman p = {:.3e} -> {}",
                p.members.join(","),
                fmt_opt(p.statistic),
                fmt_p(p.p_raw),
                p.num_comparisons,
                p.friedman_p,
                match (&p.untestable, p.reject) {
                    (Some(_), _) => "untestable",
                    (None, true) => "significant",
                    (None, false) => "not significant",
                }
            );
        }
    }
    s
}

//! `rankjudge` command-line interface.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rankjudge::io::{load_csv, Orientation};
use rankjudge::montecarlo::{estimate_fwer, estimate_power, PowerScenario};
use rankjudge::omnibus::friedman_from_ranks;
use rankjudge::posthoc::{CorrectionKind, CorrectionPolicy, PosthocTest};
use rankjudge::ranking::{rank_columns, Direction, PerformanceMatrix};
use rankjudge::report::{
    render_analysis_text, render_outcome_text, render_simulation_text, render_stability_text, run_analysis,
    to_structured, AnalysisOptions, SimulationReport, MEAN_RANKS_CAUTION,
};
use rankjudge::reproduce::{
    example2_scenario, max_type_one_scenario, render_reproduction_text, reproduce, ExampleId,
};
use rankjudge::stability::{stability_profile, subset_stability};
use rankjudge::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Parser)]
#[command(name = "rankjudge", version, about = "Compare algorithms over datasets with rank-based tests")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// CSV file with names in the first row and first column.
    csv: PathBuf,
    /// `rows` when each line is an algorithm, `columns` when each line is a dataset.
    #[arg(long, default_value = "rows")]
    orientation: Orientation,
    /// `higher` or `lower` is better.
    #[arg(long, default_value = "higher")]
    direction: Direction,
}

#[derive(Args)]
struct TestArgs {
    /// sign, sign-normal, wilcoxon or mean-ranks.
    #[arg(long, default_value = "wilcoxon")]
    test: PosthocTest,
    /// none, bonferroni or holm.
    #[arg(long, default_value = "bonferroni")]
    correction: CorrectionKind,
    /// Family-wise significance level.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Fix the number of comparisons instead of m(m-1)/2.
    #[arg(long)]
    comparisons: Option<usize>,
}

impl TestArgs {
    fn policy(&self) -> CorrectionPolicy<f64> {
        CorrectionPolicy {
            kind: self.correction,
            alpha: self.alpha,
            num_comparisons: self.comparisons,
        }
    }
}

#[derive(Args)]
struct SimulationArgs {
    /// TOML scenario file; defaults to the built-in scenario.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Override the scenario's test.
    #[arg(long)]
    test: Option<PosthocTest>,
    /// Override the scenario's correction.
    #[arg(long)]
    correction: Option<CorrectionKind>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long, env = "RANKJUDGE_SEED")]
    seed: Option<u64>,
}

impl SimulationArgs {
    fn scenario(&self, default: impl FnOnce(PosthocTest) -> PowerScenario<f64>) -> Result<PowerScenario<f64>> {
        let mut scenario = match &self.scenario {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                toml::from_str(&text).map_err(|e| Error::Parse {
                    row: 0,
                    column: 0,
                    message: format!("{}: {e}", path.display()),
                })?
            }
            None => default(self.test.unwrap_or(PosthocTest::SignNormalApprox)),
        };
        if let Some(t) = self.test {
            scenario.test = t;
        }
        if let Some(c) = self.correction {
            scenario.correction = c;
        }
        if let Some(a) = self.alpha {
            scenario.alpha = a;
        }
        if let Some(r) = self.replicates {
            scenario.replicates = r;
        }
        if let Some(s) = self.seed {
            scenario.seed = s;
        }
        Ok(scenario)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Friedman omnibus test.
    Friedman {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Friedman test followed by pairwise comparisons.
    Posthoc {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        test: TestArgs,
        /// Run the pairwise comparisons even when the Friedman test does not reject.
        #[arg(long)]
        force_posthoc: bool,
    },
    /// Decision on one pair across every pool that contains it.
    Stability {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        test: TestArgs,
        /// Pair to follow, as `A,B`.
        #[arg(long, value_delimiter = ',', required = true)]
        pair: Vec<String>,
        /// Pool size; all sizes from 2 to m when omitted.
        #[arg(long)]
        cardinality: Option<usize>,
    },
    /// Monte Carlo power on a target pair.
    Power {
        #[command(flatten)]
        sim: SimulationArgs,
    },
    /// Monte Carlo family-wise error within an equal-mean group.
    Fwer {
        #[command(flatten)]
        sim: SimulationArgs,
    },
    /// Rerun a built-in demonstration (1, 2 or 4_4).
    Reproduce {
        id: ExampleId,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long, env = "RANKJUDGE_SEED")]
        seed: Option<u64>,
    },
}

fn load(input: &InputArgs) -> Result<PerformanceMatrix<f64>> {
    load_csv(&input.csv, input.orientation)
}

/// Returns the rendered output and whether the command's own checks passed.
fn run(cli: &Cli) -> Result<(String, bool)> {
    let structured = cli.format == Format::Structured;
    match &cli.command {
        Command::Friedman { input, alpha } => {
            let perf = load(input)?;
            let outcome = friedman_from_ranks(&rank_columns(&perf, input.direction), *alpha)?;
            Ok((
                if structured {
                    to_structured("friedman", &outcome)
                } else {
                    render_outcome_text(&outcome)
                },
                true,
            ))
        }
        Command::Posthoc {
            input,
            test,
            force_posthoc,
        } => {
            let perf = load(input)?;
            let options = AnalysisOptions {
                alpha: test.alpha,
                test: test.test,
                policy: test.policy(),
                direction: input.direction,
                force_posthoc: *force_posthoc,
            };
            let report = run_analysis(&perf, &options)?;
            Ok((
                if structured {
                    to_structured("analysis", &report)
                } else {
                    render_analysis_text(&report)
                },
                true,
            ))
        }
        Command::Stability {
            input,
            test,
            pair,
            cardinality,
        } => {
            let [a, b] = pair.as_slice() else {
                return Err(Error::Validation(format!("--pair takes two names, got {}", pair.len())));
            };
            let perf = load(input)?;
            let pair = (a.as_str(), b.as_str());
            let policy = test.policy();
            let reports = match cardinality {
                Some(k) => vec![subset_stability(&perf, pair, *k, test.test, &policy)?],
                None => stability_profile(&perf, pair, test.test, &policy)?,
            };
            Ok((
                if structured {
                    to_structured("stability", &reports)
                } else {
                    render_stability_text(&reports)
                },
                true,
            ))
        }
        Command::Power { sim } => {
            let scenario = sim.scenario(example2_scenario)?;
            let estimate = estimate_power(&scenario)?;
            let report = SimulationReport {
                quantity: "power".into(),
                scenario,
                estimate,
            };
            Ok((render_simulation(&report, structured), true))
        }
        Command::Fwer { sim } => {
            let scenario = sim.scenario(max_type_one_scenario)?;
            let estimate = estimate_fwer(&scenario)?;
            let report = SimulationReport {
                quantity: "fwer".into(),
                scenario,
                estimate,
            };
            Ok((render_simulation(&report, structured), true))
        }
        Command::Reproduce { id, replicates, seed } => {
            let r = reproduce(*id, *replicates, *seed)?;
            let ok = r.all_pass();
            Ok((
                if structured {
                    to_structured("reproduction", &r)
                } else {
                    render_reproduction_text(&r)
                },
                ok,
            ))
        }
    }
}

fn render_simulation(report: &SimulationReport<f64>, structured: bool) -> String {
    if structured {
        to_structured(&report.quantity, report)
    } else {
        render_simulation_text(report)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.format == Format::Structured && uses_mean_ranks(&cli) {
        eprintln!("{MEAN_RANKS_CAUTION}");
    }
    match run(&cli) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn uses_mean_ranks(cli: &Cli) -> bool {
    match &cli.command {
        Command::Posthoc { test, .. } | Command::Stability { test, .. } => test.test == PosthocTest::MeanRanks,
        Command::Power { sim } | Command::Fwer { sim } => sim.test == Some(PosthocTest::MeanRanks),
        _ => false,
    }
}

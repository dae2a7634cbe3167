//! Monte Carlo power and family-wise error estimation under Gaussian
//! performance scenarios.
//!
//! Every (replicate, algorithm) cell block is drawn from its own ChaCha8
//! stream: the key mixes the scenario seed with the algorithm's position and
//! the stream id is the replicate index. Results are therefore identical for
//! any number of worker threads, and appending algorithms to a scenario leaves
//! the rows of the existing ones untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::posthoc::{decide_pair, pairwise_report, CorrectionKind, CorrectionPolicy, PosthocTest};
use crate::ranking::PerformanceMatrix;
use crate::scalar::Scalar;

pub const DEFAULT_REPLICATES: usize = 100_000;

/// Gaussian performance generator for one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator<T> {
    pub name: String,
    pub mean: T,
    pub sd: T,
}

impl<T: Scalar> Generator<T> {
    pub fn new(name: impl Into<String>, mean: T, sd: T) -> Self {
        Generator {
            name: name.into(),
            mean,
            sd,
        }
    }
}

fn default_alpha<T: Scalar>() -> T {
    T::lit(0.05)
}

fn default_replicates() -> usize {
    DEFAULT_REPLICATES
}

/// Generative setup plus the testing pipeline applied to each replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct PowerScenario<T> {
    pub algorithms: Vec<Generator<T>>,
    pub n_datasets: usize,
    /// Pair whose rejection rate is the power; required by [`estimate_power`].
    #[serde(default)]
    pub target_pair: Option<(String, String)>,
    /// Algorithms declared to share one distribution; required by
    /// [`estimate_fwer`].
    #[serde(default)]
    pub equal_mean: Vec<String>,
    pub test: PosthocTest,
    #[serde(default = "default_alpha")]
    pub alpha: T,
    #[serde(default)]
    pub correction: CorrectionKind,
    /// Overrides the m(m−1)/2 comparison count.
    #[serde(default)]
    pub num_comparisons: Option<usize>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
}

impl<T: Scalar> PowerScenario<T> {
    pub fn policy(&self) -> CorrectionPolicy<T> {
        CorrectionPolicy {
            kind: self.correction,
            alpha: self.alpha,
            num_comparisons: self.num_comparisons,
        }
    }

    pub fn algorithm_names(&self) -> Vec<String> {
        self.algorithms.iter().map(|g| g.name.clone()).collect()
    }

    fn position(&self, name: &str) -> Result<usize> {
        self.algorithms
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::algorithm(name))
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.len() < 2 {
            return Err(Error::validation("scenario needs at least 2 algorithms"));
        }
        if self.n_datasets < 1 {
            return Err(Error::validation("scenario needs n_datasets ≥ 1"));
        }
        if self.replicates < 1 {
            return Err(Error::validation("scenario needs replicates ≥ 1"));
        }
        for g in &self.algorithms {
            if !(g.sd > T::zero() && g.sd.is_finite() && g.mean.is_finite()) {
                return Err(Error::validation(format!(
                    "generator '{}' needs finite mean and sd > 0",
                    g.name
                )));
            }
        }
        if !(self.alpha > T::zero() && self.alpha < T::one()) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }

    /// Performance matrix of replicate `replicate`.
    pub fn simulate(&self, replicate: u64) -> Result<PerformanceMatrix<T>> {
        let rows = self
            .algorithms
            .iter()
            .enumerate()
            .map(|(k, g)| {
                let mut rng = cell_rng(self.seed, k as u64, replicate);
                (0..self.n_datasets)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        g.mean + g.sd * T::lit(z)
                    })
                    .collect()
            })
            .collect();
        PerformanceMatrix::from_rows(self.algorithm_names(), rows)
    }
}

fn cell_rng(seed: u64, algorithm: u64, replicate: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&algorithm.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replicate);
    rng
}

/// Rejection fraction with its binomial standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerEstimate<T> {
    pub rejections: u64,
    pub replicates: u64,
    pub estimate: T,
    pub std_error: T,
    pub seed: u64,
}

impl<T: Scalar> PowerEstimate<T> {
    pub fn from_counts(rejections: u64, replicates: u64, seed: u64) -> Self {
        let r = T::lit(replicates as f64);
        let estimate = T::lit(rejections as f64) / r;
        let std_error = (estimate * (T::one() - estimate) / r).sqrt();
        PowerEstimate {
            rejections,
            replicates,
            estimate,
            std_error,
            seed,
        }
    }
}

fn count_replicates<F>(replicates: usize, hit: F) -> Result<u64>
where
    F: Fn(u64) -> Result<bool> + Sync,
{
    (0..replicates as u64)
        .into_par_iter()
        .map(|r| hit(r).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Fraction of replicates in which the scenario's test rejects on the target
/// pair. Mean-ranks is evaluated on the full simulated pool; the other tests
/// only ever read the pair's two rows.
pub fn estimate_power<T: Scalar>(scenario: &PowerScenario<T>) -> Result<PowerEstimate<T>> {
    scenario.validate()?;
    let (a, b) = scenario
        .target_pair
        .clone()
        .ok_or_else(|| Error::validation("power scenario needs a target_pair"))?;
    scenario.position(&a)?;
    scenario.position(&b)?;
    if a == b {
        return Err(Error::validation("target_pair must name two different algorithms"));
    }
    let policy = scenario.policy();
    let rejections = count_replicates(scenario.replicates, |r| {
        let perf = scenario.simulate(r)?;
        Ok(decide_pair(&perf, (&a, &b), scenario.test, &policy)?.reject)
    })?;
    Ok(PowerEstimate::from_counts(
        rejections,
        scenario.replicates as u64,
        scenario.seed,
    ))
}

/// Fraction of replicates in which the full pairwise report rejects at least
/// one pair inside the declared equal-mean group.
pub fn estimate_fwer<T: Scalar>(scenario: &PowerScenario<T>) -> Result<PowerEstimate<T>> {
    scenario.validate()?;
    if scenario.equal_mean.len() < 2 {
        return Err(Error::validation(
            "FWER scenario needs at least two algorithms declared equal-mean",
        ));
    }
    let first = &scenario.algorithms[scenario.position(&scenario.equal_mean[0])?];
    for name in &scenario.equal_mean {
        let g = &scenario.algorithms[scenario.position(name)?];
        if g.mean != first.mean || g.sd != first.sd {
            return Err(Error::validation(format!(
                "'{}' and '{}' are declared equal-mean but have different generators",
                first.name, g.name
            )));
        }
    }
    let null_group = &scenario.equal_mean;
    let policy = scenario.policy();
    let rejections = count_replicates(scenario.replicates, |r| {
        let perf = scenario.simulate(r)?;
        let report = pairwise_report(&perf, scenario.test, &policy)?;
        Ok(report
            .entries
            .iter()
            .any(|e| e.reject && null_group.contains(&e.first) && null_group.contains(&e.second)))
    })?;
    Ok(PowerEstimate::from_counts(
        rejections,
        scenario.replicates as u64,
        scenario.seed,
    ))
}

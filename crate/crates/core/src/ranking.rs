//! Performance matrices and their column-wise rank matrices.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which end of the performance scale is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// The best value in a column receives rank m (e.g. accuracy).
    #[default]
    HigherIsBetter,
    /// The best value in a column receives rank m (e.g. error rate).
    LowerIsBetter,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "higher" | "higher-is-better" => Ok(Direction::HigherIsBetter),
            "lower" | "lower-is-better" => Ok(Direction::LowerIsBetter),
            other => Err(Error::validation(format!("unknown direction '{other}'"))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::HigherIsBetter => "higher-is-better",
            Direction::LowerIsBetter => "lower-is-better",
        })
    }
}

/// Scores of m algorithms (rows) on n datasets (columns).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerformanceMatrix<T> {
    algorithm_names: Vec<String>,
    dataset_names: Vec<String>,
    values: Vec<Vec<T>>,
}

impl<T: Scalar> PerformanceMatrix<T> {
    /// Validates and builds a matrix. Requires m ≥ 2, n ≥ 1, rectangular rows,
    /// finite values and unique names.
    pub fn new(
        algorithm_names: Vec<String>,
        dataset_names: Vec<String>,
        values: Vec<Vec<T>>,
    ) -> Result<Self> {
        let m = algorithm_names.len();
        let n = dataset_names.len();
        if m < 2 {
            return Err(Error::validation(format!(
                "need at least 2 algorithms, got {m}"
            )));
        }
        if n < 1 {
            return Err(Error::validation("need at least 1 dataset"));
        }
        if values.len() != m {
            return Err(Error::validation(format!(
                "{} value rows for {m} algorithms",
                values.len()
            )));
        }
        check_unique("algorithm", &algorithm_names)?;
        check_unique("dataset", &dataset_names)?;
        for (i, row) in values.iter().enumerate() {
            if row.len() != n {
                return Err(Error::validation(format!(
                    "algorithm '{}' has {} values, expected {n}",
                    algorithm_names[i],
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::validation(format!(
                    "non-finite value {} at algorithm '{}', dataset '{}'",
                    row[j], algorithm_names[i], dataset_names[j]
                )));
            }
        }
        Ok(PerformanceMatrix {
            algorithm_names,
            dataset_names,
            values,
        })
    }

    /// Builds a matrix with generated dataset names `d1..dn`.
    pub fn from_rows<S: Into<String>>(
        algorithm_names: impl IntoIterator<Item = S>,
        values: Vec<Vec<T>>,
    ) -> Result<Self> {
        let n = values.first().map_or(0, Vec::len);
        let datasets = (1..=n).map(|j| format!("d{j}")).collect();
        Self::new(
            algorithm_names.into_iter().map(Into::into).collect(),
            datasets,
            values,
        )
    }

    pub fn num_algorithms(&self) -> usize {
        self.algorithm_names.len()
    }

    pub fn num_datasets(&self) -> usize {
        self.dataset_names.len()
    }

    pub fn algorithm_names(&self) -> &[String] {
        &self.algorithm_names
    }

    pub fn dataset_names(&self) -> &[String] {
        &self.dataset_names
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.algorithm_names
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::algorithm(name))
    }

    /// Row of the named algorithm.
    pub fn row_of(&self, name: &str) -> Result<&[T]> {
        self.index_of(name).map(|i| self.row(i))
    }

    /// Row subset in the order given by `subset`, dataset order preserved.
    pub fn restrict<S: AsRef<str>>(&self, subset: &[S]) -> Result<Self> {
        if subset.len() < 2 {
            return Err(Error::validation(format!(
                "subset must name at least 2 algorithms, got {}",
                subset.len()
            )));
        }
        let mut seen = HashSet::new();
        let mut names = Vec::with_capacity(subset.len());
        let mut rows = Vec::with_capacity(subset.len());
        for s in subset {
            let s = s.as_ref();
            if !seen.insert(s) {
                return Err(Error::validation(format!(
                    "algorithm '{s}' listed twice in subset"
                )));
            }
            let i = self.index_of(s)?;
            names.push(s.to_string());
            rows.push(self.values[i].clone());
        }
        Ok(PerformanceMatrix {
            algorithm_names: names,
            dataset_names: self.dataset_names.clone(),
            values: rows,
        })
    }
}

fn check_unique(kind: &str, names: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for name in names {
        if !seen.insert(name.as_str()) {
            return Err(Error::validation(format!("duplicate {kind} name '{name}'")));
        }
    }
    Ok(())
}

/// Column-wise midranks with row sums and means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankMatrix<T> {
    algorithm_names: Vec<String>,
    ranks: Vec<Vec<T>>,
    rank_sums: Vec<T>,
    mean_ranks: Vec<T>,
}

impl<T: Scalar> RankMatrix<T> {
    /// Number of algorithms.
    pub fn m(&self) -> usize {
        self.ranks.len()
    }

    /// Number of datasets.
    pub fn n(&self) -> usize {
        self.ranks.first().map_or(0, Vec::len)
    }

    pub fn algorithm_names(&self) -> &[String] {
        &self.algorithm_names
    }

    /// `ranks()[i][j]` is the rank of algorithm i on dataset j.
    pub fn ranks(&self) -> &[Vec<T>] {
        &self.ranks
    }

    pub fn rank_sums(&self) -> &[T] {
        &self.rank_sums
    }

    pub fn mean_ranks(&self) -> &[T] {
        &self.mean_ranks
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.algorithm_names
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::algorithm(name))
    }

    pub fn mean_rank_of(&self, name: &str) -> Result<T> {
        self.index_of(name).map(|i| self.mean_ranks[i])
    }
}

/// Midranks of one column: rank 1 goes to the worst value, tied values share
/// the mean of the positions they span.
pub fn midranks<T: Scalar>(column: &[T], direction: Direction) -> Vec<T> {
    let mut order: Vec<usize> = (0..column.len()).collect();
    order.sort_by(|&a, &b| {
        let ord = column[a].partial_cmp(&column[b]).unwrap_or(Ordering::Equal);
        match direction {
            Direction::HigherIsBetter => ord,
            Direction::LowerIsBetter => ord.reverse(),
        }
    });

    let mut ranks = vec![T::zero(); column.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && column[order[end]] == column[order[start]] {
            end += 1;
        }
        // positions start+1..=end, mean is (start+1+end)/2
        let rank = T::from_count(start + 1 + end) / T::two();
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Ranks every dataset column of `perf` independently.
pub fn rank_columns<T: Scalar>(perf: &PerformanceMatrix<T>, direction: Direction) -> RankMatrix<T> {
    let m = perf.num_algorithms();
    let n = perf.num_datasets();
    let mut ranks = vec![vec![T::zero(); n]; m];
    let expected_column_sum = T::from_count(m * (m + 1)) / T::two();
    let mut column = Vec::with_capacity(m);
    for j in 0..n {
        column.clear();
        column.extend(perf.values.iter().map(|row| row[j]));
        let col_ranks = midranks(&column, direction);
        debug_assert!(
            col_ranks.iter().copied().sum::<T>() == expected_column_sum,
            "midranks must preserve the column sum m(m+1)/2"
        );
        for (i, r) in col_ranks.into_iter().enumerate() {
            ranks[i][j] = r;
        }
    }
    let rank_sums: Vec<T> = ranks.iter().map(|row| row.iter().copied().sum()).collect();
    let n_t = T::from_count(n);
    let mean_ranks = rank_sums.iter().map(|&s| s / n_t).collect();
    RankMatrix {
        algorithm_names: perf.algorithm_names.clone(),
        ranks,
        rank_sums,
        mean_ranks,
    }
}

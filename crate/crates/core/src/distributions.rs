//! Probability kernels: standard normal, chi-square survival, exact binomial
//! tails for the sign test and the exact Wilcoxon signed-rank null.
//!
//! The continuous kernels are generic over [`Scalar`] and iterate until the
//! increment drops below the type's epsilon. For `f64` the normal CDF has an
//! absolute error well below 1e-12 over the whole real line.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest number of nonzero differences for which the exact Wilcoxon null
/// distribution is used.
pub const EXACT_WILCOXON_LIMIT: usize = 30;

const MAX_ITER: usize = 2000;
// Below this argument erfc is evaluated through the erf power series, above it
// through the continued fraction.
const ERFC_SWITCH: f64 = 2.0;

fn sqrt_pi<T: Scalar>() -> T {
    T::lit(std::f64::consts::PI).sqrt()
}

/// erf(x) for 0 ≤ x, using the all-positive series
/// erf(x) = 2/√π · e^{−x²} · Σ 2ⁿ x^{2n+1} / (2n+1)!!.
fn erf_series<T: Scalar>(x: T) -> T {
    let two_x2 = T::two() * x * x;
    let mut term = x;
    let mut sum = x;
    for k in 0..MAX_ITER {
        term = term * two_x2 / T::from_count(2 * k + 3);
        sum = sum + term;
        if term <= sum * T::epsilon() {
            break;
        }
    }
    T::two() / sqrt_pi::<T>() * (-x * x).exp() * sum
}

/// erfc(x) for x ≥ ERFC_SWITCH via the Laplace continued fraction, evaluated
/// with the modified Lentz algorithm.
fn erfc_continued_fraction<T: Scalar>(x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let mut f = x;
    let mut c = f;
    let mut d = T::zero();
    for k in 1..MAX_ITER {
        let a = T::from_count(k) / T::two();
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    (-x * x).exp() / (sqrt_pi::<T>() * f)
}

/// Complementary error function.
pub fn erfc<T: Scalar>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x < T::zero() {
        return T::two() - erfc(-x);
    }
    if x < T::lit(ERFC_SWITCH) {
        T::one() - erf_series(x)
    } else if x > T::lit(30.0) {
        T::zero()
    } else {
        erfc_continued_fraction(x)
    }
}

/// Standard normal density.
pub fn normal_pdf<T: Scalar>(z: T) -> T {
    (-z * z / T::two()).exp() / (T::two() * T::lit(std::f64::consts::PI)).sqrt()
}

/// Φ(z), the standard normal CDF.
pub fn normal_cdf<T: Scalar>(z: T) -> T {
    T::half() * erfc(-z / T::lit(std::f64::consts::SQRT_2))
}

/// 1 − Φ(z), computed without cancellation for large z.
pub fn normal_sf<T: Scalar>(z: T) -> T {
    T::half() * erfc(z / T::lit(std::f64::consts::SQRT_2))
}

/// Two-sided normal p-value 2·(1 − Φ(|z|)).
pub fn normal_two_sided_p<T: Scalar>(z: T) -> T {
    erfc(z.abs() / T::lit(std::f64::consts::SQRT_2)).min(T::one())
}

/// Φ⁻¹(p) by safeguarded Newton iteration inside a shrinking bracket, so that
/// `normal_cdf(normal_quantile(p))` reproduces `p` to working precision.
pub fn normal_quantile<T: Scalar>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::Domain(format!(
            "normal quantile needs 0 < p < 1, got {p}"
        )));
    }
    if p == T::half() {
        return Ok(T::zero());
    }
    let mut lo = T::lit(-39.0);
    let mut hi = T::lit(39.0);
    let mut z = T::zero();
    for _ in 0..MAX_ITER {
        let f = normal_cdf(z) - p;
        if f == T::zero() {
            return Ok(z);
        }
        if f < T::zero() {
            lo = z;
        } else {
            hi = z;
        }
        let pdf = normal_pdf(z);
        let newton = z - f / pdf;
        let next = if pdf > T::zero() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / T::two()
        };
        let step = (next - z).abs();
        z = next;
        if step <= T::lit(4.0) * T::epsilon() * z.abs().max(T::one()) || hi - lo <= T::epsilon() {
            break;
        }
    }
    Ok(z)
}

/// ln Γ(dof/2) for a positive integer `dof`, by exact recursion down to Γ(1)
/// or Γ(1/2).
fn ln_gamma_half_integer<T: Scalar>(dof: usize) -> T {
    let mut acc = T::zero();
    if dof.is_multiple_of(2) {
        for i in 1..dof / 2 {
            acc = acc + T::from_count(i).ln();
        }
    } else {
        acc = sqrt_pi::<T>().ln();
        for j in 0..(dof - 1) / 2 {
            acc = acc + (T::from_count(j) + T::half()).ln();
        }
    }
    acc
}

/// Regularized upper incomplete gamma Q(a, x) with a precomputed ln Γ(a).
fn gamma_q<T: Scalar>(a: T, x: T, ln_gamma_a: T) -> T {
    if x <= T::zero() {
        return T::one();
    }
    let prefactor = (-x + a * x.ln() - ln_gamma_a).exp();
    if x < a + T::one() {
        // series for P(a, x)
        let mut denom = a;
        let mut term = T::one() / a;
        let mut sum = term;
        for _ in 0..MAX_ITER {
            denom = denom + T::one();
            term = term * x / denom;
            sum = sum + term;
            if term.abs() <= sum.abs() * T::epsilon() {
                break;
            }
        }
        (T::one() - sum * prefactor).max(T::zero())
    } else {
        // continued fraction for Q(a, x), modified Lentz
        let tiny = T::min_positive_value() / T::epsilon();
        let mut b = x + T::one() - a;
        let mut c = T::one() / tiny;
        let mut d = T::one() / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let i_t = T::from_count(i);
            let an = -i_t * (i_t - a);
            b = b + T::two();
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = d.recip();
            let delta = d * c;
            h = h * delta;
            if (delta - T::one()).abs() <= T::epsilon() {
                break;
            }
        }
        (prefactor * h).min(T::one())
    }
}

/// P(χ²_dof ≥ x).
pub fn chi_square_sf<T: Scalar>(x: T, dof: usize) -> Result<T> {
    if dof < 1 {
        return Err(Error::Domain("chi-square needs dof ≥ 1".into()));
    }
    if x.is_nan() || x < T::zero() {
        return Err(Error::Domain(format!("chi-square needs x ≥ 0, got {x}")));
    }
    if x == T::zero() {
        return Ok(T::one());
    }
    if x.is_infinite() {
        return Ok(T::zero());
    }
    let a = T::from_count(dof) / T::two();
    Ok(gamma_q(a, x / T::two(), ln_gamma_half_integer(dof)))
}

/// Σ_{i=0}^{k} C(n, i) in exact integer arithmetic.
fn binomial_cumulative(k: u64, n: u64) -> BigUint {
    let mut coeff = BigUint::one();
    let mut sum = BigUint::one();
    for i in 0..k {
        coeff = coeff * (n - i) / (i + 1);
        sum += &coeff;
    }
    sum
}

/// Exact two-sided sign-test p-value min(1, 2·min(P(X ≤ k), P(X ≥ k))) for
/// X ~ Binomial(n, 1/2), as an exact rational.
pub fn binomial_two_sided_p_exact(k: u64, n: u64) -> Result<BigRational> {
    if k > n {
        return Err(Error::Domain(format!("binomial needs k ≤ n, got k={k}, n={n}")));
    }
    // The smaller tail is the one on k's side of n/2.
    let tail = binomial_cumulative(k.min(n - k), n);
    let numerator = BigInt::from(tail) * 2;
    let denominator = BigInt::one() << n;
    if numerator >= denominator {
        return Ok(BigRational::one());
    }
    Ok(BigRational::new(numerator, denominator))
}

/// [`binomial_two_sided_p_exact`] rounded to the scalar type.
pub fn binomial_two_sided_p<T: Scalar>(k: u64, n: u64) -> Result<T> {
    if k > n {
        return Err(Error::Domain(format!("binomial needs k ≤ n, got k={k}, n={n}")));
    }
    if n <= 60 {
        // C(60, 30) < 2^60, so the tail and its double fit in u64 exactly;
        // dividing by 2^n is exact, leaving a single rounding.
        let mut coeff = 1u64;
        let mut tail = 1u64;
        for i in 0..k.min(n - k) {
            coeff = coeff * (n - i) / (i + 1);
            tail += coeff;
        }
        let doubled = 2 * tail;
        if doubled >= 1u64 << n {
            return Ok(T::one());
        }
        return Ok(T::lit(doubled as f64 / (1u64 << n) as f64));
    }
    let exact = binomial_two_sided_p_exact(k, n)?;
    let value = exact.to_f64().unwrap_or(0.0);
    Ok(T::lit(value))
}

/// Null distribution of the Wilcoxon signed-rank statistic W⁺ for n tie-free
/// nonzero differences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WilcoxonNullTable {
    n: usize,
    counts: Vec<u64>,
}

impl WilcoxonNullTable {
    fn build(n: usize) -> Self {
        let max = n * (n + 1) / 2;
        let mut counts = vec![0u64; max + 1];
        counts[0] = 1;
        let mut reach = 0;
        for rank in 1..=n {
            reach += rank;
            for w in (rank..=reach).rev() {
                counts[w] += counts[w - rank];
            }
        }
        WilcoxonNullTable { n, counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `counts()[w]` is the number of the 2ⁿ sign patterns with W⁺ = w.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn max_statistic(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn total(&self) -> u64 {
        1u64 << self.n
    }

    /// Number of sign patterns with W⁺ ≤ w.
    pub fn lower_count(&self, w: usize) -> u64 {
        self.counts[..=w.min(self.max_statistic())].iter().sum()
    }

    /// Number of sign patterns with W⁺ ≥ w.
    pub fn upper_count(&self, w: usize) -> u64 {
        self.counts.get(w..).map_or(0, |s| s.iter().sum())
    }

    /// Exact two-sided p-value min(1, 2·min(P(W⁺ ≤ w), P(W⁺ ≥ w))).
    pub fn two_sided_p<T: Scalar>(&self, w: usize) -> T {
        let tail = self.lower_count(w).min(self.upper_count(w));
        let doubled = 2 * tail;
        if doubled >= self.total() {
            return T::one();
        }
        T::lit(doubled as f64 / self.total() as f64)
    }
}

static WILCOXON_TABLES: OnceLock<Vec<WilcoxonNullTable>> = OnceLock::new();

/// Exact W⁺ null table for `n` nonzero differences, 1 ≤ n ≤ [`EXACT_WILCOXON_LIMIT`].
pub fn wilcoxon_null_table(n: usize) -> Result<&'static WilcoxonNullTable> {
    if n == 0 {
        return Err(Error::Domain("Wilcoxon table needs n ≥ 1".into()));
    }
    if n > EXACT_WILCOXON_LIMIT {
        return Err(Error::ExactUnavailable {
            n,
            limit: EXACT_WILCOXON_LIMIT,
        });
    }
    let tables = WILCOXON_TABLES
        .get_or_init(|| (1..=EXACT_WILCOXON_LIMIT).map(WilcoxonNullTable::build).collect());
    Ok(&tables[n - 1])
}

//! The branching process on λ-tuples.
//!
//! A tuple `(λ₁,…,λ_m)` stands for the sorted list of partial sums
//! `X₁, X₁+X₂, …` of independent `EXP(λ_i)` variates. One LDM step removes the two
//! largest entries and inserts their difference `X_m ~ EXP(λ_m)` at one of `m − 1`
//! positions; each position yields a new tuple of length `m − 1`. Starting from
//! `n` ones, the tuple `(λ₁, λ₂)` at the end says the LDM output on the partial sums
//! is `EXP(λ₂)`.
//!
//! [`LambdaTuple`] is generic over [`Scalar`]: exact rationals drive the full
//! enumeration here, floats and log-domain values drive the random walk.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest `n` [`enumerate_pdf`] expands without an explicit override.
pub const DEFAULT_ENUMERATION_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LambdaTuple<T> {
    lambdas: Vec<T>,
}

impl<T: Scalar> LambdaTuple<T> {
    pub fn new(lambdas: Vec<T>) -> Result<Self> {
        if let Some(i) = lambdas.iter().position(|l| !(*l > T::zero())) {
            return Err(Error::InvalidArgument(format!(
                "λ_{} must be positive, got {:?}",
                i + 1,
                lambdas[i]
            )));
        }
        Ok(Self { lambdas })
    }

    /// The starting tuple `(1,…,1)` of length `n`.
    pub fn ones(n: usize) -> Self {
        Self {
            lambdas: vec![T::one(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.lambdas
    }

    pub fn into_inner(self) -> Vec<T> {
        self.lambdas
    }

    /// Rate of the final difference once the tuple is down to `(λ₁, λ₂)`.
    pub fn terminal_rate(&self) -> Option<&T> {
        match self.lambdas.as_slice() {
            [_, l2] => Some(l2),
            _ => None,
        }
    }

    fn check_k(&self, k: usize) -> Result<()> {
        let max = self.len().saturating_sub(1);
        if k == 0 || k > max {
            return Err(Error::IndexOutOfRange { k, max });
        }
        Ok(())
    }

    /// Probability that the new difference lands at position `k` (1-based).
    ///
    /// `λ_m/(λ_k+λ_m) ∏_{i<k} λ_i/(λ_i+λ_m)` for `k ≤ m−2`, and
    /// `∏_{i≤m−2} λ_i/(λ_i+λ_m)` for `k = m−1`.
    pub fn branch_probability(&self, k: usize) -> Result<T> {
        self.check_k(k)?;
        let m = self.len();
        let last = &self.lambdas[m - 1];
        let mut prod = T::one();
        for l in &self.lambdas[..k - 1] {
            prod = prod * (l.clone() / (l.clone() + last.clone()));
        }
        if k == m - 1 {
            return Ok(prod);
        }
        let lk = &self.lambdas[k - 1];
        Ok(prod * (last.clone() / (lk.clone() + last.clone())))
    }

    /// All `m − 1` branch probabilities in one pass.
    pub fn branch_probabilities(&self) -> Vec<T> {
        let m = self.len();
        if m < 2 {
            return Vec::new();
        }
        let last = &self.lambdas[m - 1];
        let mut out = Vec::with_capacity(m - 1);
        let mut prod = T::one();
        for l in &self.lambdas[..m - 2] {
            let denom = l.clone() + last.clone();
            out.push(prod.clone() * (last.clone() / denom.clone()));
            prod = prod * (l.clone() / denom);
        }
        out.push(prod);
        out
    }

    /// Tuple after the difference lands at position `k`:
    /// `(λ₁+λ_m,…,λ_k+λ_m, λ_k,…,λ_{m−2})` for `k ≤ m−2`, and
    /// `(λ₁+λ_m,…,λ_{m−2}+λ_m, λ_m)` for `k = m−1`.
    pub fn transition(&self, k: usize) -> Result<Self> {
        self.check_k(k)?;
        Ok(self.transition_unchecked(k))
    }

    pub(crate) fn transition_unchecked(&self, k: usize) -> Self {
        let m = self.len();
        let last = &self.lambdas[m - 1];
        let mut next = Vec::with_capacity(m - 1);
        let shifted = k.min(m - 2);
        next.extend(self.lambdas[..shifted].iter().map(|l| l.clone() + last.clone()));
        if k == m - 1 {
            next.push(last.clone());
        } else {
            next.extend(self.lambdas[k - 1..m - 2].iter().cloned());
        }
        Self { lambdas: next }
    }
}

pub type RationalTuple = LambdaTuple<BigRational>;

impl RationalTuple {
    pub fn ones_exact(n: usize) -> Self {
        Self::ones(n)
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|&v| BigRational::from_integer(BigInt::from(v)))
                .collect(),
        )
    }
}

/// `p(x) = Σ_k a_k · k e^{−kx}`: the output is `EXP(k)` with probability `a_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpMixture {
    pub coeffs: BTreeMap<BigRational, BigRational>,
}

impl ExpMixture {
    pub fn pure(rate: BigRational) -> Self {
        Self {
            coeffs: BTreeMap::from([(rate, BigRational::one())]),
        }
    }

    pub fn total(&self) -> BigRational {
        self.coeffs.values().fold(BigRational::zero(), |acc, a| acc + a)
    }

    pub fn is_normalized(&self) -> bool {
        self.total().is_one() && self.coeffs.values().all(|a| !a.is_negative())
    }

    /// Coefficient `a_k` for an integer rate `k`, zero when absent.
    pub fn coeff(&self, k: i64) -> BigRational {
        self.coeffs
            .get(&BigRational::from_integer(BigInt::from(k)))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// `P(L̂ ≤ x) = Σ_k a_k (1 − e^{−kx})`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.coeffs
            .iter()
            .map(|(k, a)| a.as_f64() * (1.0 - (-k.as_f64() * x).exp()))
            .sum()
    }
}

impl fmt::Display for ExpMixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, a)| format!("{a}·EXP({k})"))
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// Exact distribution of the terminal rate starting from `n` unit rates.
///
/// Identical tuples reached along different branches are merged level by level.
pub fn enumerate_pdf(n: usize) -> Result<ExpMixture> {
    enumerate_pdf_with_cap(n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_pdf_with_cap(n: usize, cap: usize) -> Result<ExpMixture> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    if n > cap {
        return Err(Error::BranchTreeTooLarge { n, cap });
    }
    let mut level: HashMap<RationalTuple, BigRational> =
        HashMap::from([(RationalTuple::ones(n), BigRational::one())]);
    for _ in 2..n {
        let mut next: HashMap<RationalTuple, BigRational> = HashMap::with_capacity(level.len() * 2);
        for (tuple, p) in &level {
            for (idx, q) in tuple.branch_probabilities().into_iter().enumerate() {
                let child = tuple.transition_unchecked(idx + 1);
                *next.entry(child).or_insert_with(BigRational::zero) += p * q;
            }
        }
        level = next;
    }
    let mut coeffs = BTreeMap::new();
    for (tuple, p) in level {
        let rate = tuple.terminal_rate().expect("length two").clone();
        *coeffs.entry(rate).or_insert_with(BigRational::zero) += p;
    }
    Ok(ExpMixture { coeffs })
}

/// Number of distinct tuples per level of the merged branch tree, from length `n` down to 2.
pub fn level_sizes(n: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut level: HashMap<RationalTuple, ()> = HashMap::from([(RationalTuple::ones(n), ())]);
    sizes.push(1);
    for _ in 2..n {
        let mut next = HashMap::new();
        for tuple in level.keys() {
            for k in 1..tuple.len() {
                next.insert(tuple.transition_unchecked(k), ());
            }
        }
        sizes.push(next.len());
        level = next;
    }
    sizes
}

/// `⟨L̂⟩ = Σ_k a_k / k`.
pub fn mixture_mean(mix: &ExpMixture) -> BigRational {
    mix.coeffs
        .iter()
        .fold(BigRational::zero(), |acc, (k, a)| acc + a / k)
}

/// `⟨L_n⟩ = ⟨L̂_n⟩ / (n + 1)` for uniform inputs.
pub fn mean_uniform_output(mix: &ExpMixture, n: usize) -> BigRational {
    mixture_mean(mix) / BigRational::from_integer(BigInt::from(n + 1))
}

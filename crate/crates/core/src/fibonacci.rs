//! The boundary recursion `λ₁^{t+1} = λ₁ᵗ + λ₁^{2t−n+1}` and the integer sequence
//! `F(n) = F(n−1) + F(⌊n/2⌋)`, `F(1) = 1` it unrolls to (OEIS A033485).
//!
//! Computing `F(n)` needs every `F(j)` with `j ≤ n/2`, so memory, not time, is the
//! limit. [`BigSeq`] keeps that lower half in one flat limb arena.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_MEMORY_BUDGET: usize = 1 << 30;

/// Incremental `F(1), F(2), …` keeping `F(j)` for `j ≤ keep`.
#[derive(Debug, Clone)]
pub struct BigSeq {
    keep: usize,
    arena: Vec<u64>,
    /// `offsets[j]..offsets[j+1]` are the limbs of `F(j+1)`.
    offsets: Vec<usize>,
    current: Vec<u64>,
    n: usize,
}

impl BigSeq {
    /// Sequence positioned at `F(1)`, able to advance up to index `2·keep + 1`.
    pub fn new(keep: usize) -> Self {
        let mut seq = Self {
            keep,
            arena: Vec::new(),
            offsets: vec![0],
            current: vec![1],
            n: 1,
        };
        seq.retain();
        seq
    }

    /// Sequence sized to reach `F(n_max)`, with storage reserved from the size estimate.
    pub fn for_target(n_max: usize) -> Self {
        let keep = n_max / 2;
        let mut seq = Self::new(keep);
        let limbs = limbs_estimate(keep.max(1));
        seq.arena.reserve(keep.saturating_mul(limbs).min(1 << 32));
        seq.offsets.reserve(keep);
        seq
    }

    fn retain(&mut self) {
        if self.n <= self.keep {
            self.arena.extend_from_slice(&self.current);
            self.offsets.push(self.arena.len());
        }
    }

    fn stored(&self, j: usize) -> &[u64] {
        &self.arena[self.offsets[j - 1]..self.offsets[j]]
    }

    pub fn index(&self) -> usize {
        self.n
    }

    /// Step to `F(n+1) = F(n) + F(⌊(n+1)/2⌋)`.
    pub fn advance(&mut self) {
        let half = (self.n + 1) / 2;
        assert!(half <= self.keep.max(1), "index {} beyond retained half", self.n + 1);
        let addend: Vec<u64> = if half == 1 && self.keep == 0 {
            vec![1]
        } else {
            self.stored(half).to_vec()
        };
        add_assign_limbs(&mut self.current, &addend);
        self.n += 1;
        self.retain();
    }

    pub fn value(&self) -> BigUint {
        BigUint::from_slice(
            &self
                .current
                .iter()
                .flat_map(|&l| [l as u32, (l >> 32) as u32])
                .collect::<Vec<_>>(),
        )
    }

    /// `ln F(n)` from the bit length and the top 64 bits.
    pub fn ln_value(&self) -> f64 {
        ln_limbs(&self.current)
    }

    /// Bytes held by the arena, offsets and current value.
    pub fn memory_bytes(&self) -> usize {
        8 * (self.arena.capacity() + self.offsets.capacity() + self.current.capacity())
    }
}

fn add_assign_limbs(acc: &mut Vec<u64>, rhs: &[u64]) {
    if acc.len() < rhs.len() {
        acc.resize(rhs.len(), 0);
    }
    let mut carry = false;
    for (i, a) in acc.iter_mut().enumerate() {
        let b = rhs.get(i).copied().unwrap_or(0);
        if b == 0 && !carry && i >= rhs.len() {
            break;
        }
        let (s1, c1) = a.overflowing_add(b);
        let (s2, c2) = s1.overflowing_add(carry as u64);
        *a = s2;
        carry = c1 || c2;
    }
    if carry {
        acc.push(1);
    }
}

fn ln_limbs(limbs: &[u64]) -> f64 {
    let top = limbs.len() - 1;
    let hi = limbs[top];
    let lead = 64 - hi.leading_zeros() as usize;
    // left-align the leading 64 bits
    let mut mantissa = (hi as u128) << 64;
    if top > 0 {
        mantissa |= limbs[top - 1] as u128;
    }
    let shifted = (mantissa >> lead) as u64;
    let fraction = shifted as f64 / 2f64.powi(64);
    fraction.ln() + (top * 64 + lead) as f64 * std::f64::consts::LN_2
}

/// Upper estimate of the limb count of `F(n)`.
fn limbs_estimate(n: usize) -> usize {
    let ln = (n.max(2) as f64).ln();
    let ln_f = ln * ln / (2.0 * std::f64::consts::LN_2) + ln + 1.0;
    (ln_f / std::f64::consts::LN_2 / 64.0).ceil() as usize + 1
}

/// Estimated peak bytes to compute `F(n)`.
pub fn memory_estimate(n: usize) -> u64 {
    let keep = (n / 2) as u64;
    keep * 8 * (limbs_estimate(n / 2) as u64 + 1) + 64
}

/// Largest `n` whose estimate fits the budget.
pub fn largest_feasible(budget_bytes: usize) -> u64 {
    let (mut lo, mut hi) = (1u64, 1u64 << 40);
    while lo < hi {
        let mid = lo + (hi - lo + 1) / 2;
        if memory_estimate(mid as usize) <= budget_bytes as u64 {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

fn check_budget(n: usize, budget_bytes: usize) -> Result<()> {
    if memory_estimate(n) > budget_bytes as u64 {
        return Err(Error::MemoryBudget {
            budget_bytes,
            largest_feasible: largest_feasible(budget_bytes),
        });
    }
    Ok(())
}

pub fn fib_kk(n: usize) -> Result<BigUint> {
    fib_kk_with_budget(n, DEFAULT_MEMORY_BUDGET)
}

pub fn fib_kk_with_budget(n: usize, budget_bytes: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    check_budget(n, budget_bytes)?;
    let mut seq = BigSeq::for_target(n);
    while seq.index() < n {
        seq.advance();
    }
    Ok(seq.value())
}

/// Iterate `λ₁^{t+1} = λ₁ᵗ + λ₁^{2t−n+1}` from `λ₁ᵗ = 1 (t ≤ 0)` up to `t = n − 1`.
pub fn boundary_unroll(n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut lambda1: Vec<BigUint> = Vec::with_capacity(n);
    lambda1.push(BigUint::one());
    for t in 0..n - 1 {
        let back = 2 * t as i64 - n as i64 + 1;
        let feed = if back <= 0 {
            BigUint::one()
        } else {
            lambda1[back as usize].clone()
        };
        let next = &lambda1[t] + feed;
        lambda1.push(next);
    }
    Ok(lambda1.pop().expect("non-empty"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenfunReport {
    pub order: usize,
    /// `g(z)(1−z) = z + (1+z) g(z²)` coefficient-wise.
    pub functional_equation: bool,
    /// `g = ½((1−z)^{−1}/∏_k(1−z^{2^k}) − 1)` coefficient-wise.
    pub product_form: bool,
    pub first_mismatch: Option<usize>,
}

impl GenfunReport {
    pub fn holds(&self) -> bool {
        self.functional_equation && self.product_form
    }
}

/// Coefficients `g₀ = 0, g_m = F(m)` for `m ≤ order`.
pub fn genfun_coefficients(order: usize) -> Vec<BigUint> {
    let mut g = Vec::with_capacity(order + 1);
    g.push(BigUint::zero());
    if order == 0 {
        return g;
    }
    let mut seq = BigSeq::for_target(order);
    g.push(seq.value());
    while seq.index() < order {
        seq.advance();
        g.push(seq.value());
    }
    g
}

/// Binary-partition counts `b(j)`: coefficients of `∏_{k≥0} 1/(1−z^{2^k})`.
pub fn binary_partitions(order: usize) -> Vec<BigUint> {
    let mut b = vec![BigUint::zero(); order + 1];
    b[0] = BigUint::one();
    let mut part = 1usize;
    while part <= order {
        for j in part..=order {
            let prev = b[j - part].clone();
            b[j] += prev;
        }
        part *= 2;
    }
    b
}

pub fn genfun_check(order: usize) -> Result<GenfunReport> {
    if order > 4096 {
        return Err(Error::InvalidArgument(format!(
            "order {order} exceeds the supported 4096"
        )));
    }
    let g = genfun_coefficients(order);
    let mut first_mismatch = None;
    let mut functional_equation = true;
    // coefficient of z^m: g_m − g_{m−1} = [m=1] + h_m + h_{m−1}, with h = g(z²)
    let h = |m: usize| -> BigUint {
        if m % 2 == 0 {
            g[m / 2].clone()
        } else {
            BigUint::zero()
        }
    };
    for m in 1..=order {
        let unit = if m == 1 { BigUint::one() } else { BigUint::zero() };
        let rhs = &g[m - 1] + unit + h(m) + h(m - 1);
        if g[m] != rhs {
            functional_equation = false;
            first_mismatch.get_or_insert(m);
        }
    }
    let b = binary_partitions(order);
    let mut product_form = true;
    let mut partial = BigUint::zero();
    for (m, bm) in b.iter().enumerate() {
        partial += bm;
        // 2 g_m = Σ_{j≤m} b(j) − [m=0]
        let twice = if m == 0 { &partial - 1u8 } else { partial.clone() };
        if twice != &g[m] * 2u8 {
            product_form = false;
            first_mismatch.get_or_insert(m);
        }
    }
    Ok(GenfunReport {
        order,
        functional_equation,
        product_form,
        first_mismatch,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FibPoint {
    pub n: usize,
    pub ln_f: f64,
    /// `ln(F(n)(n+1)) / ln²n`.
    pub scaled_value: f64,
}

/// `ln(F(n)(n+1))/ln²n` at each requested `n ≥ 2`, in one pass up to the largest.
pub fn fib_scaling_curve(ns: &[usize]) -> Result<Vec<FibPoint>> {
    fib_scaling_curve_with_budget(ns, DEFAULT_MEMORY_BUDGET)
}

pub fn fib_scaling_curve_with_budget(ns: &[usize], budget_bytes: usize) -> Result<Vec<FibPoint>> {
    if let Some(&bad) = ns.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidArgument(format!(
            "scaled value needs n ≥ 2, got {bad}"
        )));
    }
    let Some(&n_max) = ns.iter().max() else {
        return Ok(Vec::new());
    };
    check_budget(n_max, budget_bytes)?;
    let mut sorted: Vec<(usize, usize)> = ns.iter().copied().enumerate().map(|(i, n)| (n, i)).collect();
    sorted.sort_unstable();
    let mut out = vec![None; ns.len()];
    let mut seq = BigSeq::for_target(n_max);
    for (n, slot) in sorted {
        while seq.index() < n {
            seq.advance();
        }
        let ln_f = seq.ln_value();
        let ln_n = (n as f64).ln();
        out[slot] = Some(FibPoint {
            n,
            ln_f,
            scaled_value: (ln_f + ((n + 1) as f64).ln()) / (ln_n * ln_n),
        });
    }
    Ok(out.into_iter().map(|p| p.expect("filled")).collect())
}

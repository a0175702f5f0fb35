//! Continuum limit of the boundary recursion.
//!
//! The similarity solution obeys `γ′(s)/n = γ(2s−1)` with `γ = 1` on `[−1, 0]`.
//! On `[1−2^{1−k}, 1−2^{−k}]` it is the polynomial
//!
//! ```text
//! γ_k(s) = Σ_{j≤k} n^j / (j! 2^{C(j,2)}) · (2^{j−1}s − 2^{j−1} + 1)^j
//! ```
//!
//! and `γ(1) = f(n) = Σ_j n^j / (j! 2^{C(j,2)})`. Everything about `f` is computed
//! from `ln n` in log domain, so `n = 2^2000` is as cheap as `n = 4`.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bigreal::BigReal;
use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::scalar::{ln2, pi, Real};

pub const DEFAULT_PRECISION_BITS: usize = 256;

/// Largest piece index accepted by [`gamma_recursion_check`].
pub const MAX_RECURSION_PIECE: u32 = 20;

/// `γ_k(s)`, evaluated at any `s` (no domain check).
pub fn gamma_piece<T: Real>(k: u32, s: &T, n: &T) -> T {
    let one = T::one();
    let mut coeff = one.clone();
    let mut sum = one.clone();
    let mut half_pow = s.lift(0.5);
    for j in 1..=k {
        half_pow = half_pow * s.lift(2.0); // 2^{j−1}
        // coeff_j = coeff_{j−1} · n / (j 2^{j−1})
        coeff = coeff * n.clone() / (s.lift(j as f64) * half_pow.clone());
        let base = one.clone() + half_pow.clone() * (s.clone() - one.clone());
        sum = sum + coeff.clone() * base.powi(j);
    }
    sum
}

/// Index `k` of the piece containing `s`, or `None` outside `[−1, 1)`.
pub fn piece_index(s: f64) -> Option<u32> {
    if !(-1.0..1.0).contains(&s) {
        return None;
    }
    if s <= 0.0 {
        return Some(0);
    }
    let mut k = 1u32;
    while s > 1.0 - 2f64.powi(-(k as i32)) {
        k += 1;
    }
    Some(k)
}

pub fn gamma_eval<T: Real>(s: &T, n: &T) -> Result<T> {
    let sv = s.as_f64();
    let k = piece_index(sv).ok_or(Error::Domain {
        value: sv,
        domain: "[-1, 1)",
    })?;
    Ok(gamma_piece(k, s, n))
}

/// Largest relative gap between `γ_{k+1}(s)` and
/// `γ_k(1−2^{−k}) + n ∫_{1−2^{−k}}^s γ_k(2ξ−1) dξ` over `samples` points of piece `k+1`.
pub fn gamma_recursion_check(k: u32, n: f64, samples: usize) -> Result<f64> {
    if k > MAX_RECURSION_PIECE {
        return Err(Error::InvalidArgument(format!(
            "piece index {k} exceeds {MAX_RECURSION_PIECE}"
        )));
    }
    let lo = 1.0 - 2f64.powi(-(k as i32));
    let hi = 1.0 - 2f64.powi(-(k as i32) - 1);
    let start = gamma_piece(k, &lo, &n);
    let integrand = |xi: f64| gamma_piece(k, &(2.0 * xi - 1.0), &n);
    let mut worst = 0.0f64;
    for i in 0..samples.max(1) {
        let s = lo + (hi - lo) * (i + 1) as f64 / samples.max(1) as f64;
        let integral = adaptive_simpson(&integrand, lo, s, 1e-12, 50);
        let rhs = start + n * integral;
        let lhs = gamma_piece(k + 1, &s, &n);
        worst = worst.max((lhs - rhs).abs() / lhs.abs());
    }
    Ok(worst)
}

/// `B_0, B_2, B_4, …` as exact rationals, extended on demand and cached.
fn bernoulli_even(count: usize) -> Vec<BigRational> {
    static CACHE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut all = cache.lock().expect("bernoulli cache");
    // all[m] = B_m
    let needed = 2 * count;
    while all.len() <= needed {
        let m = all.len();
        if m == 0 {
            all.push(BigRational::one());
            continue;
        }
        if m > 1 && m % 2 == 1 {
            all.push(BigRational::zero());
            continue;
        }
        // B_m = −1/(m+1) Σ_{k<m} C(m+1, k) B_k
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (k, b) in all.iter().enumerate() {
            if !b.is_zero() {
                acc += BigRational::from_integer(binom.clone()) * b;
            }
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        all.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    all.iter().step_by(2).take(count).cloned().collect()
}

/// `ln j!`: exact accumulation up to a threshold, Stirling series beyond it.
#[derive(Debug, Clone)]
pub struct LnFactorial<T> {
    threshold: u64,
    half_ln_2pi: T,
    /// `B_{2k} / (2k(2k−1))` for `k = 1, 2, …`.
    coeffs: Vec<T>,
    eps: T,
    like: T,
}

impl<T: Real> LnFactorial<T> {
    pub fn new(like: &T) -> Self {
        let bits = like.precision_bits();
        // Stirling's smallest term is about e^{−2πj}
        let threshold = ((bits + 8) as f64 * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI))
            .ceil()
            .max(32.0) as u64;
        let eps = like.lift(2f64.powi(-(bits as i32) - 8));
        let j = like.lift((threshold + 1) as f64);
        let mut coeffs = Vec::new();
        let mut count = 16;
        'grow: loop {
            let b = bernoulli_even(count + 1);
            coeffs.clear();
            let mut jpow = j.clone();
            let j2 = j.clone() * j.clone();
            for (k, b2k) in b.iter().enumerate().skip(1) {
                let denom = BigInt::from(2 * k) * BigInt::from(2 * k - 1) * b2k.denom();
                let c = like.lift_bigint(b2k.numer()) / like.lift_bigint(&denom);
                let term = c.clone() / jpow.clone();
                coeffs.push(c);
                if term.abs() < eps {
                    break 'grow;
                }
                jpow = jpow * j2.clone();
            }
            count *= 2;
            if count > 4096 {
                break;
            }
        }
        let two_pi = like.lift(2.0) * pi(like);
        Self {
            threshold,
            half_ln_2pi: two_pi.ln() * like.lift(0.5),
            coeffs,
            eps,
            like: like.clone(),
        }
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn at(&self, j: u64) -> T {
        if j <= self.threshold {
            self.exact(j)
        } else {
            self.stirling(j)
        }
    }

    pub fn exact(&self, j: u64) -> T {
        (2..=j).fold(T::zero(), |acc, k| acc + self.like.lift(k as f64).ln())
    }

    /// `(j+½) ln j − j + ½ ln 2π + Σ_k B_{2k} / (2k(2k−1) j^{2k−1})`.
    pub fn stirling(&self, j: u64) -> T {
        let jj = self.like.lift(j as f64);
        let ln_j = jj.ln();
        let mut sum = (jj.clone() + self.like.lift(0.5)) * ln_j - jj.clone() + self.half_ln_2pi.clone();
        let j2 = jj.clone() * jj.clone();
        let mut jpow = jj;
        for c in &self.coeffs {
            let term = c.clone() / jpow.clone();
            let small = term.abs() < self.eps;
            sum = sum + term;
            if small {
                break;
            }
            jpow = jpow * j2.clone();
        }
        sum
    }
}

/// `ln f(n)` at the precision of its `ln n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogBigValue<T> {
    pub ln_value: T,
    pub precision: usize,
    pub terms: usize,
}

impl<T: Real> LogBigValue<T> {
    /// `ln[f(n)(n+1)] / ln²n`.
    pub fn scaled_value(&self, ln_n: &T) -> T {
        scaled(&self.ln_value, ln_n)
    }
}

/// `(ln_z + ln(n+1)) / ln²n` without forming `n`.
pub fn scaled<T: Real>(ln_z: &T, ln_n: &T) -> T {
    (ln_z.clone() + ln_one_plus(ln_n)) / (ln_n.clone() * ln_n.clone())
}

/// `ln(n + 1)` from `ln n`.
pub fn ln_one_plus<T: Real>(ln_n: &T) -> T {
    let one = T::one();
    if *ln_n > T::zero() {
        ln_n.clone() + (one.clone() + (-ln_n.clone()).exp()).ln()
    } else {
        (one + ln_n.exp()).ln()
    }
}

/// `ln f(n)` by log-sum-exp over `φ_j = j ln n − ln j! − C(j,2) ln 2`, stopping once
/// terms past the peak fall below `max · 2^{−p−16}` for precision `p`.
pub fn f_series<T: Real>(ln_n: &T) -> Result<LogBigValue<T>> {
    let bits = ln_n.precision_bits();
    let l = ln_n.as_f64();
    if !l.is_finite() {
        return Err(Error::Domain {
            value: l,
            domain: "finite ln n",
        });
    }
    let peak = (l * l / (2.0 * std::f64::consts::LN_2)).max(1.0);
    if peak.log2() + 24.0 > bits as f64 {
        return Err(Error::Precision { bits, ln_n: l });
    }
    let ln_2 = ln2(ln_n);
    let lnfact = LnFactorial::new(ln_n);
    let cutoff = (bits + 16) as f64 * std::f64::consts::LN_2;
    let mut phis: Vec<T> = vec![T::zero()];
    let mut acc_fact = T::zero();
    let mut best = 0.0f64;
    let mut prev = 0.0f64;
    for j in 1u64.. {
        let jj = ln_n.lift(j as f64);
        let ln_fact = if j <= lnfact.threshold() {
            acc_fact = acc_fact + jj.ln();
            acc_fact.clone()
        } else {
            lnfact.stirling(j)
        };
        let pairs = ln_n.lift((j * (j - 1) / 2) as f64);
        let phi = jj * ln_n.clone() - ln_fact - pairs * ln_2.clone();
        let pv = phi.as_f64();
        phis.push(phi);
        best = best.max(pv);
        if pv < prev && pv < best - cutoff {
            break;
        }
        prev = pv;
    }
    let max = phis
        .iter()
        .max_by(|a, b| a.partial_cmp(b).expect("finite"))
        .cloned()
        .expect("non-empty");
    let total = phis
        .iter()
        .fold(T::zero(), |acc, p| acc + (p.clone() - max.clone()).exp());
    Ok(LogBigValue {
        ln_value: max + total.ln(),
        precision: bits,
        terms: phis.len(),
    })
}

/// `ln n` for `n = 2^{log2_n}` at `bits` of precision.
pub fn ln_n_from_log2(log2_n: f64, bits: usize) -> BigReal {
    let x = BigReal::with_precision(log2_n, bits);
    let l2 = ln2(&x);
    x * l2
}

/// `f(n)` for a plain `n ≥ 0`; `f(0) = 1`.
pub fn f_of_n(n: f64, bits: usize) -> Result<LogBigValue<BigReal>> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(Error::Domain {
            value: n,
            domain: "n ≥ 0",
        });
    }
    if n == 0.0 {
        return Ok(LogBigValue {
            ln_value: BigReal::with_precision(0.0, bits),
            precision: bits,
            terms: 1,
        });
    }
    f_series(&Real::ln(&BigReal::with_precision(n, bits)))
}

/// Upper bound on the number of terms [`f_series`] uses at default precision.
pub fn term_bound(ln_n: f64) -> usize {
    (4.0 * (ln_n / std::f64::consts::LN_2 + 10.0)).floor() as usize
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddlePoint {
    /// Root of `j 2^{j−1} = n`.
    pub exact: f64,
    /// `L/ln2 − ln(L/ln2)/ln2 + 1 + ln(L/ln2)/(L ln2) − 1/L` with `L = ln n`.
    pub expansion: f64,
    pub difference: f64,
}

pub fn saddle_expansion(ln_n: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let u = ln_n / ln2;
    u - u.ln() / ln2 + 1.0 + u.ln() / (ln2 * ln_n) - 1.0 / ln_n
}

/// Root of `ln j + (j−1) ln 2 = ln n` by bisection to `1e-12`.
pub fn saddle_root(ln_n: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let g = |j: f64| j.ln() + (j - 1.0) * ln2 - ln_n;
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, ln_n.max(0.0) / ln2 + 2.0);
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn saddle_point(ln_n: f64) -> Result<SaddlePoint> {
    if !(ln_n > 0.0) || !ln_n.is_finite() {
        return Err(Error::Domain {
            value: ln_n,
            domain: "ln n > 0",
        });
    }
    let exact = saddle_root(ln_n);
    let expansion = saddle_expansion(ln_n);
    Ok(SaddlePoint {
        exact,
        expansion,
        difference: exact - expansion,
    })
}

/// The three terms of the expansion with fixed coefficients:
/// `1/(2 ln2) + a₁/L + a₂/L²`.
pub fn fixed_terms<T: Real>(ln_n: &T) -> T {
    let (c0, a1, a2) = fixed_coefficients(ln_n);
    c0 + a1 / ln_n.clone() + a2 / (ln_n.clone() * ln_n.clone())
}

/// `(1/(2 ln2), (ln ln2 + 1)/ln2 + 3/2, (ln2 + 4 ln ln2)/8 − ln²ln2/(2 ln2))`.
pub fn fixed_coefficients<T: Real>(like: &T) -> (T, T, T) {
    let l2 = ln2(like);
    let ll2 = l2.ln();
    let half = like.lift(0.5);
    let c0 = half.clone() / l2.clone();
    let a1 = (ll2.clone() + T::one()) / l2.clone() + like.lift(1.5);
    let a2 = (l2.clone() + like.lift(4.0) * ll2.clone()) / like.lift(8.0)
        - ll2.clone() * ll2 * half / l2;
    (c0, a1, a2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticEval<T> {
    pub ln_n: T,
    pub saddle: SaddlePoint,
    /// `𝒞(n)`.
    pub correction: T,
    /// `ln²n / (2 ln 2)`.
    pub leading: T,
    /// Six-term expansion of `ln[f(n)(n+1)] / ln²n`.
    pub expansion: T,
    /// `ln[(2^{1/8}/√ln2) exp{ln²n/(2 ln2) + 𝒞(n)}]`.
    pub ln_prefactor_form: T,
}

pub fn asympt_expansion<T: Real>(ln_n: &T) -> Result<AsymptoticEval<T>> {
    let l = ln_n.clone();
    let lv = l.as_f64();
    if !(lv > 1.0) {
        return Err(Error::Domain {
            value: lv,
            domain: "ln n > 1",
        });
    }
    let one = T::one();
    let l2 = ln2(&l);
    let half = l.lift(0.5);
    let lnl = l.ln();
    let sq = l.clone() * l.clone();
    let expansion = fixed_terms(&l) - lnl.clone() / (l.clone() * l2.clone()) - lnl.clone() / sq.clone()
        + lnl.clone() * lnl * half.clone() / (sq.clone() * l2.clone());
    let u = l.clone() / l2.clone();
    let lnu = u.ln();
    let correction = -(u * (lnu.clone() - one - l2.clone() * half.clone()))
        + (lnu.clone() * lnu.clone() * half.clone() / l2.clone() - lnu);
    let leading = sq * half.clone() / l2.clone();
    // ln(2^{1/8}/√ln2) = ln2/8 − ½ ln ln2
    let ln_prefactor = l2.clone() / l.lift(8.0) - half * l2.ln();
    Ok(AsymptoticEval {
        ln_n: l,
        saddle: saddle_point(lv)?,
        ln_prefactor_form: ln_prefactor + leading.clone() + correction.clone(),
        correction,
        leading,
        expansion,
    })
}

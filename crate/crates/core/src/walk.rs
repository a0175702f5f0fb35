//! Random walk through the λ-tuple branching process.
//!
//! Each step draws a single uniform and inverts the cumulative branch
//! distribution `P(k ≤ ℓ) = 1 − ∏_{i≤ℓ} λ_i/(λ_i+λ_m)`, so the walk uses the same
//! transition code as the exact enumeration. One walk costs `O(n²)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::LambdaTuple;
use crate::scalar::{LogPositive, Scalar};
use crate::stats::Histogram;

/// Above this value of `ln²n / (2 ln 2)` the walk switches to log-domain rates.
pub const LOG_DOMAIN_THRESHOLD: f64 = 600.0;

/// Branch index (1-based) selected by the uniform `u ∈ [0, 1)`.
pub fn draw_k<T: Scalar>(tuple: &LambdaTuple<T>, u: f64) -> usize {
    let lambdas = tuple.as_slice();
    let m = lambdas.len();
    debug_assert!(m >= 2);
    let last = &lambdas[m - 1];
    // k is the first ℓ with u < 1 − Π_ℓ, i.e. ln Π_ℓ < ln(1 − u)
    let target = (1.0 - u).ln();
    let mut prod = T::one();
    for (i, l) in lambdas[..m - 2].iter().enumerate() {
        prod = prod * (l.clone() / (l.clone() + last.clone()));
        if prod.ln_f64() < target {
            return i + 1;
        }
    }
    m - 1
}

/// One walk from `n` unit rates; returns the terminal rate `λ₂`.
pub fn walk<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<T> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    let mut tuple = LambdaTuple::<T>::ones(n);
    while tuple.len() > 2 {
        let k = draw_k(&tuple, rng.random::<f64>());
        tuple = tuple.transition_unchecked(k);
    }
    Ok(tuple.terminal_rate().expect("length two").clone())
}

/// Whether `n` needs log-domain rates to keep `λ` finite.
pub fn needs_log_domain(n: usize) -> bool {
    let ln = (n as f64).ln();
    ln * ln / (2.0 * std::f64::consts::LN_2) > LOG_DOMAIN_THRESHOLD
}

#[derive(Debug, Clone)]
pub struct WalkSummary {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub log_domain: bool,
    /// `ln λ₂` per trial, in trial order.
    pub ln_lambda2: Vec<f64>,
    /// `ln ⟨λ₂⟩`.
    pub ln_mean: f64,
    /// `⟨λ₂⟩`; infinite when it exceeds the `f64` range.
    pub mean: f64,
    pub stderr: f64,
    /// `stderr / mean`, finite in either domain.
    pub rel_stderr: f64,
}

impl WalkSummary {
    /// `λ₂ / ⟨λ₂⟩` per trial.
    pub fn normalized(&self) -> Vec<f64> {
        self.ln_lambda2
            .iter()
            .map(|l| (l - self.ln_mean).exp())
            .collect()
    }

    pub fn normalized_histogram(&self, bins: usize) -> Histogram {
        Histogram::from_samples(&self.normalized(), bins)
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Terminal rate of a single trial, replayable from `(seed, trial)`.
pub fn walk_trial<T: Scalar>(n: usize, seed: u64, trial: u64) -> Result<T> {
    walk(n, &mut trial_rng(seed, trial))
}

pub fn walk_ensemble(n: usize, trials: u64, seed: u64) -> Result<WalkSummary> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let log_domain = needs_log_domain(n);
    let mut ln_lambda2 = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let ln = if log_domain {
            walk_trial::<LogPositive>(n, seed, trial)?.ln()
        } else {
            walk_trial::<f64>(n, seed, trial)?.ln()
        };
        ln_lambda2.push(ln);
    }
    let count = trials as f64;
    let max = ln_lambda2.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = ln_lambda2.iter().map(|l| (l - max).exp()).collect();
    let scaled_mean = scaled.iter().sum::<f64>() / count;
    let ln_mean = max + scaled_mean.ln();
    let rel_stderr = if trials > 1 {
        let var = scaled
            .iter()
            .map(|x| (x - scaled_mean) * (x - scaled_mean))
            .sum::<f64>()
            / (count - 1.0);
        (var / count).sqrt() / scaled_mean
    } else {
        f64::NAN
    };
    let mean = ln_mean.exp();
    Ok(WalkSummary {
        n,
        trials,
        seed,
        log_domain,
        ln_lambda2,
        ln_mean,
        mean,
        stderr: mean * rel_stderr,
        rel_stderr,
    })
}

//! Monte Carlo sampling of `L_n`, the LDM (or PDM) output on `n` uniform variates.
//!
//! Trial `i` draws its instance from a ChaCha8 stream keyed by `(seed, i)`, so any
//! trial can be replayed on its own and the aggregate does not depend on the order
//! in which trials run. Sums are accumulated exactly as integers.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ldm_discrepancy, pdm, Instance};
use crate::error::{Error, Result};
use crate::stats::Histogram;

/// Fraction of zero discrepancies above which the bit width is flagged as too small.
pub const ZERO_FRACTION_WARNING: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub n: usize,
    pub bits: u32,
    pub trials: u64,
    pub seed: u64,
}

impl SimConfig {
    /// Config with the default bit width for `n`.
    pub fn new(n: usize, trials: u64, seed: u64) -> Self {
        Self {
            n,
            bits: default_bits(n),
            trials,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyInstance);
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.bits == 0 {
            return Err(Error::InvalidArgument("bits must be positive".into()));
        }
        Ok(())
    }
}

/// `max(64, ⌈3 ln²n / (2 ln²2)⌉ + 64)`: three times the bits needed to resolve
/// `n^{−ln n/(2 ln 2)}`, plus 64 guard bits.
pub fn default_bits(n: usize) -> u32 {
    let ln = (n.max(1) as f64).ln();
    let ln2 = std::f64::consts::LN_2;
    let needed = (3.0 * ln * ln / (2.0 * ln2) / ln2).ceil() as u32 + 64;
    needed.max(64)
}

/// Which differencing rule a simulation runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ldm,
    Pdm,
}

#[derive(Debug, Clone)]
pub struct SimSummary {
    pub config: SimConfig,
    /// ⟨L_n⟩ in units of the unit interval.
    pub mean: f64,
    pub stderr: f64,
    /// Fraction of trials that returned discrepancy zero.
    pub zero_fraction: f64,
    /// Set when more than 1% of trials hit zero, i.e. `bits` cannot resolve the scale.
    pub resolution_warning: bool,
    /// Per-trial `L_n` rescaled by `2^{−ℓ}`, in trial order.
    pub samples: Vec<f64>,
}

impl SimSummary {
    /// Histogram of `L_n / ⟨L_n⟩`.
    pub fn normalized_histogram(&self, bins: usize) -> Histogram {
        let normalized: Vec<f64> = self.samples.iter().map(|x| x / self.mean).collect();
        Histogram::from_samples(&normalized, bins)
    }
}

/// Draw the instance for one trial.
pub fn trial_instance(config: &SimConfig, trial: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial);
    Instance::uniform(config.n, config.bits, &mut rng)
}

pub fn sample_mean_ldm(config: &SimConfig) -> Result<SimSummary> {
    sample_mean(config, Method::Ldm)
}

pub fn sample_mean_pdm(config: &SimConfig) -> Result<SimSummary> {
    sample_mean(config, Method::Pdm)
}

pub fn sample_mean(config: &SimConfig, method: Method) -> Result<SimSummary> {
    config.validate()?;
    let mut sum = BigUint::zero();
    let mut sum_sq = BigUint::zero();
    let mut zeros = 0u64;
    let mut samples = Vec::with_capacity(config.trials.min(1 << 24) as usize);
    let scale = 2f64.powi(-(config.bits.min(2000) as i32));
    for trial in 0..config.trials {
        let instance = trial_instance(config, trial)?;
        let d = match method {
            Method::Ldm => ldm_discrepancy(&instance),
            Method::Pdm => pdm(&instance),
        };
        if d.is_zero() {
            zeros += 1;
        }
        samples.push(scaled_to_f64(&d, config.bits, scale));
        sum_sq += &d * &d;
        sum += d;
    }
    let trials = BigUint::from(config.trials);
    let denom = &trials << config.bits as usize;
    let mean = ratio_to_f64(&sum, &denom);
    let stderr = if config.trials > 1 {
        // N Σd² − (Σd)² over N²(N−1) 2^{2ℓ}
        let numer = BigInt::from(&trials * &sum_sq) - BigInt::from(&sum * &sum);
        let numer = numer.to_biguint().unwrap_or_default();
        let denom = (&trials * &trials * (&trials - 1u8)) << (2 * config.bits as usize);
        ratio_to_f64(&numer, &denom).sqrt()
    } else {
        f64::NAN
    };
    let zero_fraction = zeros as f64 / config.trials as f64;
    Ok(SimSummary {
        config: *config,
        mean,
        stderr,
        zero_fraction,
        resolution_warning: zero_fraction > ZERO_FRACTION_WARNING,
        samples,
    })
}

fn scaled_to_f64(d: &BigUint, bits: u32, scale: f64) -> f64 {
    if scale > 0.0 && d.bits() < 1000 {
        d.to_f64().unwrap_or(f64::INFINITY) * scale
    } else {
        ratio_to_f64(d, &(BigUint::from(1u8) << bits as usize))
    }
}

/// `num / den` rounded to `f64` without intermediate overflow.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let n_shift = (nb - 64).max(0);
    let d_shift = (db - 64).max(0);
    let n_top = (num >> n_shift as usize).to_f64().unwrap_or(f64::NAN);
    let d_top = (den >> d_shift as usize).to_f64().unwrap_or(f64::NAN);
    let exponent = n_shift - d_shift;
    (n_top / d_top) * 2f64.powi(exponent.clamp(-1100, 1100) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bits_policy() {
        assert_eq!(default_bits(1), 64);
        assert_eq!(default_bits(2), 64 + 2);
        // n = 20: 3 ln²20 / (2 ln²2) = 28.02
        assert_eq!(default_bits(20), 64 + 29);
        assert!(default_bits(15_000_000) >= 300);
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = SimConfig::new(50, 200, 42);
        let a = sample_mean_ldm(&cfg).unwrap();
        let b = sample_mean_ldm(&cfg).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        let c = sample_mean_ldm(&SimConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn trial_streams_are_independent_of_order() {
        let cfg = SimConfig::new(10, 5, 9);
        let all = sample_mean_ldm(&cfg).unwrap();
        let third = ldm_discrepancy(&trial_instance(&cfg, 3).unwrap());
        assert_eq!(all.samples[3], scaled_to_f64(&third, cfg.bits, 2f64.powi(-(cfg.bits as i32))));
    }

    #[test]
    fn mean_of_single_uniform() {
        let s = sample_mean_ldm(&SimConfig::new(1, 20_000, 3)).unwrap();
        assert!((s.mean - 0.5).abs() < 3.0 * s.stderr, "{} ± {}", s.mean, s.stderr);
    }

    #[test]
    fn mean_of_pair_difference() {
        let s = sample_mean_ldm(&SimConfig::new(2, 20_000, 5)).unwrap();
        assert!((s.mean - 1.0 / 3.0).abs() < 3.0 * s.stderr);
    }

    #[test]
    fn mean_at_four_matches_exact_mixture() {
        let s = sample_mean_ldm(&SimConfig::new(4, 40_000, 11)).unwrap();
        assert!((s.mean - 1.0 / 6.0).abs() < 3.0 * s.stderr);
        assert!(!s.resolution_warning);
    }

    #[test]
    fn small_width_triggers_warning() {
        let cfg = SimConfig {
            n: 200,
            bits: 8,
            trials: 200,
            seed: 1,
        };
        let s = sample_mean_ldm(&cfg).unwrap();
        assert!(s.resolution_warning);
        assert!(s.zero_fraction > 0.01);
    }

    #[test]
    fn config_validation() {
        assert!(sample_mean_ldm(&SimConfig::new(5, 0, 1)).is_err());
        assert!(sample_mean_ldm(&SimConfig::new(0, 5, 1)).is_err());
    }

    #[test]
    fn histogram_is_normalized() {
        let s = sample_mean_ldm(&SimConfig::new(30, 2_000, 8)).unwrap();
        let h = s.normalized_histogram(40);
        let mass: f64 = h.density.iter().map(|d| d * h.width).sum();
        assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ratio_conversion() {
        let num = BigUint::from(3u8) << 2000usize;
        let den = BigUint::from(4u8) << 2000usize;
        assert_eq!(ratio_to_f64(&num, &den), 0.75);
    }
}

//! Mean-field rate equations for the λ-tuple dynamics.
//!
//! Replacing the random position `k` by its expectation turns the branching
//! process into a deterministic map on `(λ₁ᵗ,…,λ_{n−t}ᵗ)`. With
//! `𝒫_i = ∏_{j<i} λ_j/(λ_j+λ_m)` the probability that `k ≥ i`,
//!
//! ```text
//! λ_i^{t+1}     = λ_{i−1}(1 − 𝒫_i) + (λ_i + λ_m) 𝒫_i      1 ≤ i < m−1
//! λ_{m−1}^{t+1} = λ_{m−2}(1 − 𝒫_{m−1}) + λ_m 𝒫_{m−1}
//! ```
//!
//! where `m = n − t`. Since `𝒫₁ = 1` the first entry obeys `λ₁^{t+1} = λ₁ᵗ + λ_mᵗ`.

use num_traits::Float;

use crate::error::{Error, Result};

/// Largest `n` for which [`contour_field`] keeps the full triangle.
pub const FIELD_CAP: usize = 4096;

/// Running products below this are treated as zero.
pub const PROFILE_CUTOFF: f64 = 1e-300;

/// Guard on `ln²n / (2 ln 2)`, the log of the peak magnitude.
pub const FLOAT_RANGE_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RateState<T> {
    pub n: usize,
    pub t: usize,
    pub lambdas: Vec<T>,
}

/// `𝒫_i` for `i = 1..m−1`; entries past the cutoff are stored as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbProfile<T> {
    pub p: Vec<T>,
}

impl<T: Float> ProbProfile<T> {
    pub fn of(state: &RateState<T>) -> Self {
        let m = state.lambdas.len();
        let mut p = vec![T::zero(); m.saturating_sub(1)];
        if m < 2 {
            return Self { p };
        }
        let last = state.lambdas[m - 1];
        let cutoff = T::from(PROFILE_CUTOFF).unwrap_or_else(T::min_positive_value);
        let mut prod = T::one();
        for (i, slot) in p.iter_mut().enumerate() {
            *slot = prod;
            let l = state.lambdas[i];
            prod = prod * (l / (l + last));
            if prod < cutoff {
                break;
            }
        }
        Self { p }
    }
}

impl<T: Float> RateState<T> {
    pub fn initial(n: usize) -> Self {
        Self {
            n,
            t: 0,
            lambdas: vec![T::one(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambda1(&self) -> T {
        self.lambdas[0]
    }

    /// One iteration `t → t+1`. Requires at least two entries.
    pub fn step(&self) -> Result<Self> {
        let m = self.len();
        if m < 2 {
            return Err(Error::InvalidArgument(format!(
                "step needs at least two rates, got {m}"
            )));
        }
        let profile = ProbProfile::of(self);
        let lam = &self.lambdas;
        let last = lam[m - 1];
        let mut next = Vec::with_capacity(m - 1);
        for i in 0..m - 2 {
            let p = profile.p[i];
            let prev = if i == 0 { T::zero() } else { lam[i - 1] };
            next.push(if p == T::zero() {
                prev
            } else {
                prev * (T::one() - p) + (lam[i] + last) * p
            });
        }
        let p = profile.p[m - 2];
        let prev = if m >= 3 { lam[m - 3] } else { T::zero() };
        next.push(prev * (T::one() - p) + last * p);
        Ok(Self {
            n: self.n,
            t: self.t + 1,
            lambdas: next,
        })
    }
}

fn guard<T: Float>(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    let ln = (n as f64).ln();
    let limit = T::max_value().to_f64().map_or(FLOAT_RANGE_LIMIT, f64::ln);
    if ln * ln / (2.0 * std::f64::consts::LN_2) > FLOAT_RANGE_LIMIT.min(limit) {
        return Err(Error::FloatRange { n });
    }
    Ok(())
}

/// `λ₁^{n−1}`, the single entry left after `n − 1` iterations.
pub fn solve<T: Float>(n: usize) -> Result<T> {
    guard::<T>(n)?;
    let mut state = RateState::<T>::initial(n);
    while state.len() > 1 {
        state = state.step()?;
    }
    Ok(state.lambda1())
}

/// `ln λ_iᵗ` over the triangle `0 ≤ t < n`, `1 ≤ i ≤ n − t`; row `t` has `n − t` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourField {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl ContourField {
    /// `ln λ_iᵗ` with 1-based `i`.
    pub fn ln_lambda(&self, t: usize, i: usize) -> Option<f64> {
        self.rows.get(t)?.get(i.checked_sub(1)?).copied()
    }

    pub fn lambda(&self, t: usize, i: usize) -> Option<f64> {
        self.ln_lambda(t, i).map(f64::exp)
    }

    /// `(t, i, ln λ)` triples in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(t, row)| row.iter().enumerate().map(move |(i, &v)| (t, i + 1, v)))
    }
}

pub fn contour_field(n: usize) -> Result<ContourField> {
    contour_field_with_cap(n, FIELD_CAP)
}

pub fn contour_field_with_cap(n: usize, cap: usize) -> Result<ContourField> {
    if n > cap {
        return Err(Error::FieldTooLarge { n, cap });
    }
    guard::<f64>(n)?;
    let mut state = RateState::<f64>::initial(n);
    let mut rows = Vec::with_capacity(n);
    loop {
        rows.push(state.lambdas.iter().map(|l| l.ln()).collect());
        if state.len() == 1 {
            break;
        }
        state = state.step()?;
    }
    Ok(ContourField { n, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(lambdas: Vec<f64>, t: usize) -> RateState<f64> {
        RateState {
            n: lambdas.len() + t,
            t,
            lambdas,
        }
    }

    #[test]
    fn hand_iterated_steps() {
        let s3 = RateState::<f64>::initial(3).step().unwrap();
        assert_eq!(s3.lambdas, vec![2.0, 1.0]);
        let s4 = RateState::<f64>::initial(4).step().unwrap();
        assert_eq!(s4.lambdas, vec![2.0, 1.5, 1.0]);
        let s4b = s4.step().unwrap();
        assert!((s4b.lambdas[0] - 3.0).abs() < 1e-15);
        assert!((s4b.lambdas[1] - 4.0 / 3.0).abs() < 1e-15);
        assert!(RateState::<f64>::initial(1).step().is_err());
    }

    #[test]
    fn solve_anchors() {
        assert_eq!(solve::<f64>(2).unwrap(), 1.0);
        assert!((solve::<f64>(3).unwrap() - 1.0).abs() < 1e-12);
        assert!((solve::<f64>(4).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!((solve::<f32>(4).unwrap() - 4.0 / 3.0).abs() < 1e-6);
        assert!(solve::<f64>(1).is_err());
    }

    #[test]
    fn float_range_guard() {
        // ln²n/(2 ln 2) > 700 once ln n > 31.15
        assert_eq!(solve::<f64>(usize::MAX), Err(Error::FloatRange { n: usize::MAX }));
        assert!(guard::<f64>(1 << 40).is_ok());
        assert!(guard::<f32>(1 << 40).is_err());
    }

    #[test]
    fn first_entry_gains_last_entry() {
        // holds until the final step, which just keeps λ₂
        let mut s = RateState::<f64>::initial(60);
        while s.len() > 2 {
            let next = s.step().unwrap();
            assert_eq!(next.lambdas[0], s.lambdas[0] + s.lambdas[s.len() - 1]);
            assert!(next.lambdas[0] - s.lambdas[0] >= 1.0);
            s = next;
        }
    }

    #[test]
    fn initial_profile_halves() {
        let p = ProbProfile::of(&RateState::<f64>::initial(10)).p;
        for (i, v) in p.iter().enumerate() {
            assert_eq!(*v, 2f64.powi(-(i as i32)));
        }
    }

    #[test]
    fn profile_nonincreasing_and_values_at_least_one() {
        let mut s = RateState::<f64>::initial(300);
        while s.len() > 1 {
            let p = ProbProfile::of(&s).p;
            assert_eq!(p.first().copied(), Some(1.0));
            assert!(p.windows(2).all(|w| w[1] <= w[0]));
            assert!(s.lambdas.iter().all(|&l| l >= 1.0));
            s = s.step().unwrap();
        }
    }

    #[test]
    fn early_exit_matches_full_product() {
        let s = state(vec![1.0; 400].into_iter().chain([1e3]).collect(), 0);
        let p = ProbProfile::of(&s).p;
        assert!(p.iter().skip(101).all(|&v| v == 0.0));
        assert!(p[50] > 0.0);
        let last = s.step().unwrap();
        assert!(last.lambdas[150..].iter().all(|&l| l == 1.0));
    }

    #[test]
    fn field_shape_and_cap() {
        let f = contour_field(16).unwrap();
        assert_eq!(f.rows.len(), 16);
        assert!(f.rows.iter().enumerate().all(|(t, r)| r.len() == 16 - t));
        assert!(f.rows[0].iter().all(|&v| v == 0.0));
        assert_eq!(f.triples().count(), 16 * 17 / 2);
        assert_eq!(f.ln_lambda(15, 1), Some(solve::<f64>(16).unwrap().ln()));
        assert_eq!(f.ln_lambda(0, 0), None);
        assert_eq!(
            contour_field(FIELD_CAP + 1),
            Err(Error::FieldTooLarge { n: FIELD_CAP + 1, cap: FIELD_CAP })
        );
    }
}

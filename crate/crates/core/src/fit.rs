//! Scaling variables and least-squares fits of the correction terms.
//!
//! Every model value `Z(n)` (inverse LDM mean, rate-equation λ₁, `F(n)`, `f(n)`) is
//! compared through `ln[Z(n)(n+1)] / ln²n`, which tends to `1/(2 ln 2)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::series::{fixed_coefficients, ln_one_plus};

/// `1/(2 ln 2)`: the conjectured exponent `c` in `⟨L_n⟩ ~ n^{−c ln n}`, and the lower
/// bound on the proven exponents `a ≤ b`.
pub const SIMPLE_C: f64 = 0.721_347_520_444_481_7;
pub const BOUND_EXPONENT_MIN: f64 = SIMPLE_C;

/// Smallest singular-value ratio accepted before the design is called rank deficient.
pub const MIN_SINGULAR_RATIO: f64 = 1e-12;

pub const MIN_FIT_POINTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// `Z = 1/⟨n L_n⟩` from direct simulation.
    Simulation,
    /// `Z = λ₁^{n−1}` from the rate equation.
    Rate,
    /// `Z = F(n)`.
    Fibonacci,
    /// `Z = f(n)`.
    Series,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Simulation => "simulation",
            Model::Rate => "rate",
            Model::Fibonacci => "fibonacci",
            Model::Series => "series",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "simulation" => Model::Simulation,
            "rate" => Model::Rate,
            "fibonacci" => Model::Fibonacci,
            "series" => Model::Series,
            other => return Err(Error::InvalidArgument(format!("unknown model {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub ln_n: f64,
    pub ln_z: f64,
    pub model: Model,
}

impl ScalingPoint {
    pub fn from_logs(ln_n: f64, ln_z: f64, model: Model) -> Self {
        Self { ln_n, ln_z, model }
    }

    pub fn from_raw(n: f64, z: f64, model: Model) -> Self {
        Self::from_logs(n.ln(), z.ln(), model)
    }

    /// Point for the simulation model from `⟨L_n⟩`: `ln Z = −ln n − ln⟨L_n⟩`.
    pub fn from_mean_output(n: f64, mean_l: f64) -> Self {
        Self::from_logs(n.ln(), -n.ln() - mean_l.ln(), Model::Simulation)
    }

    pub fn n(&self) -> f64 {
        self.ln_n.exp()
    }

    /// `(ln Z + ln(n+1)) / ln²n`.
    pub fn scaled_value(&self) -> Result<f64> {
        if !(self.ln_n >= 3f64.ln() - 1e-12) || !self.ln_z.is_finite() {
            return Err(Error::Domain {
                value: self.ln_n.exp(),
                domain: "n ≥ 3 with finite ln Z",
            });
        }
        Ok((self.ln_z + ln_one_plus(&self.ln_n)) / (self.ln_n * self.ln_n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Euclidean norm of the residual vector.
    pub residual: f64,
    /// Ratio of largest to smallest singular value of the design matrix.
    pub condition: f64,
}

impl FitResult {
    /// Model value of the scaled variable at `ln n`.
    pub fn predict(&self, ln_n: f64) -> f64 {
        let [b1, b2, b3] = basis(ln_n);
        fixed_terms(ln_n) + self.c1 * b1 + self.c2 * b2 + self.c3 * b3
    }
}

/// `1/(2 ln2) + a₁/L + a₂/L²`, the part of the fit with fixed coefficients.
pub fn fixed_terms(ln_n: f64) -> f64 {
    let (c0, a1, a2) = fixed_coefficients(&ln_n);
    c0 + a1 / ln_n + a2 / (ln_n * ln_n)
}

/// `(ln L / L, ln L / L², ln²L / L²)` with `L = ln n`.
pub fn basis(ln_n: f64) -> [f64; 3] {
    let ll = ln_n.ln();
    let sq = ln_n * ln_n;
    [ll / ln_n, ll / sq, ll * ll / sq]
}

/// Least-squares `(c₁, c₂, c₃)` after subtracting the fixed terms.
pub fn fit_loglog(points: &[ScalingPoint]) -> Result<FitResult> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints {
            needed: MIN_FIT_POINTS,
            got: points.len(),
        });
    }
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.ln_n), hi.max(p.ln_n))
    });
    let span = (hi - lo) / std::f64::consts::LN_2;
    if span < 3.0 {
        return Err(Error::InvalidArgument(format!(
            "fit range spans {span:.2} doublings of n, need at least 3"
        )));
    }
    let m = points.len();
    let mut x = DMatrix::<f64>::zeros(m, 3);
    let mut y = DVector::<f64>::zeros(m);
    for (r, p) in points.iter().enumerate() {
        let b = basis(p.ln_n);
        for (c, v) in b.iter().enumerate() {
            x[(r, c)] = *v;
        }
        y[r] = p.scaled_value()? - fixed_terms(p.ln_n);
    }
    // column scaling keeps the condition number about the basis, not its units
    let norms: Vec<f64> = (0..3).map(|c| x.column(c).norm()).collect();
    let mut xs = x.clone();
    for (c, n) in norms.iter().enumerate() {
        if *n == 0.0 {
            return Err(Error::RankDeficient {
                condition: f64::INFINITY,
            });
        }
        xs.column_mut(c).scale_mut(1.0 / n);
    }
    let svd = xs.svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let condition = s_max / s_min;
    if !(s_min / s_max > MIN_SINGULAR_RATIO) {
        return Err(Error::RankDeficient { condition });
    }
    let scaled = svd
        .solve(&y, s_max * MIN_SINGULAR_RATIO)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let coef: Vec<f64> = (0..3).map(|c| scaled[c] / norms[c]).collect();
    let fitted = &x * DVector::from_column_slice(&coef);
    let residual = (&y - fitted).norm();
    Ok(FitResult {
        c1: coef[0],
        c2: coef[1],
        c3: coef[2],
        residual,
        condition,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveFit {
    pub intercept: f64,
    pub slope: f64,
}

/// Ordinary least squares of `−ln⟨L_n⟩` against `ln²n`, from `(ln n, ln⟨L_n⟩)` pairs.
pub fn naive_fit(points: &[(f64, f64)]) -> Result<NaiveFit> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: points.len(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|(l, _)| l * l).collect();
    let ys: Vec<f64> = points.iter().map(|(_, m)| -m).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::RankDeficient {
            condition: f64::INFINITY,
        });
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(NaiveFit {
        intercept: my - slope * mx,
        slope,
    })
}

//! Largest differencing for number partitioning: the algorithm itself, the exact and
//! sampled λ-tuple recursions it maps onto, and the deterministic models
//! (rate equation, Fibonacci recursion, continuum series) used to study the
//! `n^{−c ln n}` scaling of its output.

pub mod bigreal;
pub mod error;
pub mod exact;
pub mod fibonacci;
pub mod fit;
pub mod ldm;
pub mod quad;
pub mod rate;
pub mod scalar;
pub mod series;
pub mod stats;
pub mod walk;

pub use bigreal::BigReal;
pub use error::{Error, Result};
pub use scalar::{LogPositive, Real, Scalar};

/// λ-tuple with exact rational rates, as used by the enumeration.
pub type RationalTuple = exact::LambdaTuple<num_rational::BigRational>;
/// λ-tuple with double-precision rates, as used by the random walk.
pub type FloatTuple = exact::LambdaTuple<f64>;
/// λ-tuple with log-domain rates for sizes beyond the double range.
pub type LogTuple = exact::LambdaTuple<LogPositive>;
/// Rate-equation state in double precision.
pub type RateState64 = rate::RateState<f64>;
/// `ln f(n)` at arbitrary precision.
pub type SeriesValue = series::LogBigValue<BigReal>;
/// Asymptotic evaluation in double precision.
pub type AsymptoticEval64 = series::AsymptoticEval<f64>;
/// Asymptotic evaluation at arbitrary precision.
pub type AsymptoticEvalBig = series::AsymptoticEval<BigReal>;

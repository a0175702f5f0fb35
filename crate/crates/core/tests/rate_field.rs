use ldm_core::fibonacci::fib_scaling_curve;
use ldm_core::fit::ScalingPoint;
use ldm_core::ldm::sim::{sample_mean_ldm, SimConfig};
use ldm_core::rate::{contour_field, solve, ContourField, ProbProfile, RateState};
use ldm_core::series::scaled;
use proptest::prelude::*;

fn worst_below_diagonal(f: &ContourField, margin: usize) -> f64 {
    f.triples()
        .filter(|&(t, i, _)| i > t + margin)
        .map(|(_, _, ln)| ln.exp_m1().abs())
        .fold(0.0, f64::max)
}

#[test]
fn lower_triangle_is_flat() {
    let f = contour_field(256).unwrap();
    assert!(worst_below_diagonal(&f, 50) <= 1e-12);
    // the wavefront ahead of the diagonal decays geometrically
    for d in (10..=40).step_by(10) {
        let near = worst_below_diagonal(&f, d);
        let far = worst_below_diagonal(&f, d + 10);
        assert!(far < near / 100.0, "d={d}: {near} → {far}");
    }
    assert!(f.rows[0].iter().all(|&v| v == 0.0));
}

/// Fraction of points with `|λ_iᵗ − λ_{i−x}^{t−x}| / λ_iᵗ < 10%`, skipping `i = 1`
/// and rows within 4 of the dyadic fronts.
fn similarity_fraction(f: &ContourField, x: usize) -> f64 {
    let n = f.n;
    let fronts = [n / 2, 3 * n / 4, 7 * n / 8];
    let (mut good, mut total) = (0usize, 0usize);
    for t in x..n {
        if fronts.iter().any(|&c| t.abs_diff(c) < 4) {
            continue;
        }
        for i in (x + 1).max(2)..=(n - t) {
            let a = f.lambda(t, i).unwrap();
            let b = f.lambda(t - x, i - x).unwrap();
            total += 1;
            if (a - b).abs() / a < 0.1 {
                good += 1;
            }
        }
    }
    good as f64 / total as f64
}

#[test]
fn diagonal_similarity() {
    let f = contour_field(256).unwrap();
    for x in [1, 2, 5] {
        let frac = similarity_fraction(&f, x);
        assert!(frac >= 0.9, "x={x}: {frac}");
    }
}

#[test]
fn field_ends_in_the_solution() {
    for n in [2, 3, 4, 17, 100] {
        let f = contour_field(n).unwrap();
        assert_eq!(f.lambda(n - 1, 1).unwrap(), solve::<f64>(n).unwrap().ln().exp());
    }
}

#[test]
fn first_rate_grows_along_the_field() {
    let f = contour_field(300).unwrap();
    // up to the last step, which hands over λ₂
    let first: Vec<f64> = (0..299).map(|t| f.lambda(t, 1).unwrap()).collect();
    assert!(first.windows(2).all(|w| w[1] - w[0] >= 1.0 - 1e-9));
}

fn curves(n: usize, trials: u64) -> (f64, f64, f64) {
    let ln_n = (n as f64).ln();
    let rate = scaled(&solve::<f64>(n).unwrap().ln(), &ln_n);
    let fib = fib_scaling_curve(&[n]).unwrap()[0].scaled_value;
    let mean = sample_mean_ldm(&SimConfig::new(n, trials, 17)).unwrap().mean;
    let sim = ScalingPoint::from_mean_output(n as f64, mean).scaled_value().unwrap();
    (fib, sim, rate)
}

#[test]
fn model_curves_keep_their_order() {
    // Fibonacci model lowest, rate equation highest, simulation in between and
    // closer to the rate equation once n ≥ 2^12
    for k in 10..=14 {
        let (fib, sim, rate) = curves(1 << k, 400);
        assert!(fib < sim && sim < rate, "n=2^{k}: F {fib}, sim {sim}, rate {rate}");
        if k >= 12 {
            assert!(rate - sim < sim - fib, "n=2^{k}: F {fib}, sim {sim}, rate {rate}");
        }
    }
}

fn arb_state() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1.0f64..50.0, 2..40)
}

proptest! {
    #[test]
    fn profile_is_a_decreasing_probability(v in arb_state()) {
        let s = RateState { n: v.len(), t: 0, lambdas: v };
        let p = ProbProfile::of(&s).p;
        prop_assert_eq!(p[0], 1.0);
        prop_assert!(p.windows(2).all(|w| w[1] <= w[0] && w[1] >= 0.0));
    }

    #[test]
    fn step_keeps_rates_at_least_one(v in arb_state()) {
        let s = RateState { n: v.len() + 3, t: 3, lambdas: v };
        let next = s.step().unwrap();
        prop_assert_eq!(next.len(), s.len() - 1);
        prop_assert_eq!(next.t, 4);
        prop_assert!(next.lambdas.iter().all(|&l| l >= 1.0 - 1e-12));
        if s.len() >= 3 {
            prop_assert_eq!(next.lambdas[0], s.lambdas[0] + s.lambdas[s.len() - 1]);
        }
    }

    #[test]
    fn solution_is_finite_and_at_least_one(n in 2usize..600) {
        let l = solve::<f64>(n).unwrap();
        prop_assert!(l.is_finite() && l >= 1.0);
    }
}

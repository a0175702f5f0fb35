use ldm_core::fibonacci::{
    boundary_unroll, fib_kk, fib_scaling_curve, genfun_check, genfun_coefficients, BigSeq,
};
use num_bigint::BigUint;
use proptest::prelude::*;

#[test]
fn unroll_equals_sequence_up_to_ten_thousand() {
    let n_max = 10_000;
    let mut seq = BigSeq::for_target(n_max);
    let mut prev = BigUint::from(0u8);
    loop {
        let n = seq.index();
        let f = seq.value();
        assert_eq!(boundary_unroll(n).unwrap(), f, "n={n}");
        assert!(f > prev, "strictly increasing at {n}");
        prev = f;
        if n == n_max {
            break;
        }
        seq.advance();
    }
    assert_eq!(fib_kk(n_max).unwrap(), prev);
}

#[test]
fn generating_function_to_order_4096() {
    let r = genfun_check(4096).unwrap();
    assert!(r.functional_equation && r.product_form, "{r:?}");
    assert_eq!(r.first_mismatch, None);
    let g = genfun_coefficients(16);
    assert_eq!(g[1], BigUint::from(1u8));
    assert_eq!(g[8], BigUint::from(18u8));
}

#[test]
fn successive_ratios_shrink_over_dyadic_ranges() {
    // F(2^k)/F(2^k − 1) = 1 + F(2^{k−1})/F(2^k − 1)
    let ks: Vec<usize> = (3..=20).collect();
    let ns: Vec<usize> = ks.iter().flat_map(|&k| [(1 << k) - 1, 1 << k]).collect();
    let pts = fib_scaling_curve(&ns).unwrap();
    let ln_ratios: Vec<f64> = pts.chunks(2).map(|p| p[1].ln_f - p[0].ln_f).collect();
    assert!(ln_ratios.windows(2).all(|w| w[1] < w[0]), "{ln_ratios:?}");
    assert!(*ln_ratios.last().unwrap() < 1e-3);
}

#[test]
fn scaling_curve_decreases_over_the_desk_range() {
    let ns: Vec<usize> = (3..=22).map(|k| 1usize << k).collect();
    let pts = fib_scaling_curve(&ns).unwrap();
    assert!(pts.windows(2).all(|w| w[1].scaled_value < w[0].scaled_value));
    assert!(pts.iter().all(|p| p.ln_f > 0.0 && p.scaled_value > 0.5));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn defining_relation(n in 2usize..3000) {
        let f = fib_kk(n).unwrap();
        let prev = fib_kk(n - 1).unwrap();
        let half = fib_kk(n / 2).unwrap();
        prop_assert_eq!(f - prev, half);
    }

    #[test]
    fn log_value_tracks_the_integer(n in 2usize..5000) {
        let mut seq = BigSeq::for_target(n);
        while seq.index() < n {
            seq.advance();
        }
        let exact = seq.value();
        let bits = exact.bits();
        let top = (&exact >> bits.saturating_sub(60) as usize).to_string().parse::<f64>().unwrap();
        let ln = top.ln() + bits.saturating_sub(60) as f64 * std::f64::consts::LN_2;
        prop_assert!((seq.ln_value() - ln).abs() < 1e-12 * ln.max(1.0));
    }
}

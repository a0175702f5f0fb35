//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::sync::OnceLock;
use std::time::Instant;

use ldm_core::exact::{enumerate_pdf, mean_uniform_output};
use ldm_core::fibonacci::{boundary_unroll, genfun_check, BigSeq};
use ldm_core::fit::{fit_loglog, naive_fit, Model, ScalingPoint, SIMPLE_C};
use ldm_core::ldm::sim::{sample_mean, sample_mean_ldm, Method, SimConfig, SimSummary};
use ldm_core::ldm::{brute_force_optimum, ldm, Instance};
use ldm_core::rate::{contour_field, solve};
use ldm_core::series::{
    asympt_expansion, f_of_n, f_series, ln_n_from_log2, saddle_point, DEFAULT_PRECISION_BITS,
};
use ldm_core::stats::ks_two_sample;
use ldm_core::{BigReal, Real, Scalar};
use ldm_lab::cli::ExactPdfArgs;
use ldm_lab::{dispatch, Command, ExperimentSpec};
use num_bigint::BigUint;
use num_traits::ToPrimitive;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

const TABLE: [(usize, &[&str]); 5] = [
    (4, &["2/3", "1/3"]),
    (5, &["13/24", "1/6", "7/24"]),
    (6, &["41/120", "5/18", "7/72", "41/180", "1/18"]),
    (7, &["49/180", "1/8", "1073/4320", "47/720", "53/360", "7/72", "161/4320", "1/135"]),
    (
        8,
        &[
            "431/2520",
            "527/3456",
            "3079/38880",
            "1229/5600",
            "149/2100",
            "486359/5443200",
            "343/4320",
            "11/144",
            "26083/604800",
            "859/77760",
            "941/155520",
            "1/1050",
            "1/1800",
        ],
    ),
];

fn table_exactness() -> Outcome {
    let mut matched = 0;
    let mut bad = Vec::new();
    for (n, row) in TABLE {
        let spec = ExperimentSpec::new(Command::ExactPdf(ExactPdfArgs { n, max_n_override: false }), 0);
        let payload = dispatch(&spec).map_err(|e| e.to_string())?.record.payload;
        let coeffs = payload["coeffs"].as_object().ok_or("no coeffs")?;
        if coeffs.len() != row.len() {
            bad.push(format!("n={n}: support size {}", coeffs.len()));
        }
        for (k, want) in row.iter().enumerate() {
            match coeffs.get(&(k + 1).to_string()).and_then(|v| v.as_str()) {
                Some(got) if got == *want => matched += 1,
                got => bad.push(format!("a_{}^({n}) = {got:?}, want {want}", k + 1)),
            }
        }
    }
    check(bad.is_empty(), format!("{matched}/31 fractions equal {bad:?}"))
}

fn worked_example() -> Outcome {
    let inst = Instance::from_u64(&[4, 5, 6, 7, 8], 8).map_err(|e| e.to_string())?;
    let p = ldm(&inst);
    let mut a: Vec<BigUint> = p.subset(&inst, true);
    let mut b: Vec<BigUint> = p.subset(&inst, false);
    a.sort();
    b.sort();
    if a.len() > b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    let small: Vec<u64> = a.iter().map(|x| x.to_u64().unwrap()).collect();
    let large: Vec<u64> = b.iter().map(|x| x.to_u64().unwrap()).collect();
    let opt = brute_force_optimum(&inst).map_err(|e| e.to_string())?;
    check(
        p.discrepancy == BigUint::from(2u8)
            && small == [6, 8]
            && large == [4, 5, 7]
            && opt.discrepancy == BigUint::from(0u8),
        format!("LDM {} with {large:?}/{small:?}, optimum {}", p.discrepancy, opt.discrepancy),
    )
}

fn cross_model() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for n in 2..=8 {
        let exact = mean_uniform_output(&enumerate_pdf(n).map_err(|e| e.to_string())?, n);
        if n == 4 && exact.to_string() != "1/6" {
            ok = false;
        }
        let exact = exact.to_f64().unwrap();
        let s = sample_mean_ldm(&SimConfig::new(n, 1_000_000, 1000 + n as u64)).map_err(|e| e.to_string())?;
        let z = (s.mean - exact) / s.stderr;
        ok &= z.abs() < 3.0;
        lines.push(format!("n={n} z={z:+.2}"));
    }
    check(ok, lines.join(", "))
}

fn fibonacci_identities() -> Outcome {
    let n_max = 10_000;
    let mut seq = BigSeq::for_target(n_max);
    loop {
        let n = seq.index();
        let unrolled = boundary_unroll(n).map_err(|e| e.to_string())?;
        if unrolled != seq.value() {
            return Err(format!("mismatch at n={n}"));
        }
        if n == n_max {
            break;
        }
        seq.advance();
    }
    let g = genfun_check(4096).map_err(|e| e.to_string())?;
    check(
        g.functional_equation && g.first_mismatch.is_none(),
        format!("unroll equal for n ≤ {n_max}; generating function to order 4096: {g:?}"),
    )
}

fn rate_anchors() -> Outcome {
    let s3 = solve::<f64>(3).map_err(|e| e.to_string())?;
    let s4 = solve::<f64>(4).map_err(|e| e.to_string())?;
    let f = contour_field(256).map_err(|e| e.to_string())?;
    let worst = |margin: usize| {
        f.triples()
            .filter(|&(t, i, _)| i > t + margin)
            .map(|(_, _, ln)| ln.exp_m1().abs())
            .fold(0.0, f64::max)
    };
    let (beyond, whole) = (worst(50), worst(0));
    check(
        (s3 - 1.0).abs() < 1e-12 && (s4 - 4.0 / 3.0).abs() < 1e-12 && beyond <= 1e-12,
        format!(
            "solve(3)−1 = {:.1e}, solve(4)−4/3 = {:.1e}, |λ−1| ≤ {beyond:.1e} for i > t+50 \
             (≤ {whole:.1e} on the whole i > t triangle)",
            s3 - 1.0,
            s4 - 4.0 / 3.0
        ),
    )
}

fn series_asymptotics() -> Outcome {
    let bits = DEFAULT_PRECISION_BITS;
    // direct sum of n^j / (j! 2^{j(j−1)/2}) at n = 1
    let mut oracle = 0.0;
    let mut term = 1.0;
    for j in 0..20 {
        oracle += term;
        term /= (j + 1) as f64 * 2f64.powi(j);
    }
    let f1 = f_of_n(1.0, bits).map_err(|e| e.to_string())?.ln_value.exp().as_f64();
    let at_one = (f1 - oracle).abs();

    let mut deriv_worst: f64 = 0.0;
    for n in [4.0, 10.0, 100.0] {
        let h = 1e-4 * n;
        let up = f_of_n(n + h, bits).map_err(|e| e.to_string())?.ln_value;
        let down = f_of_n(n - h, bits).map_err(|e| e.to_string())?.ln_value;
        let half = f_of_n(n / 2.0, bits).map_err(|e| e.to_string())?.ln_value.exp();
        let d = (up.exp() - down.exp()) / BigReal::with_precision(2.0 * h, bits);
        deriv_worst = deriv_worst.max(((d - half.clone()) / half).abs().as_f64());
    }

    let mut residuals = Vec::new();
    for m in 1..=8u32 {
        let ln_n = ln_n_from_log2((50 * m) as f64, bits);
        let f = f_series(&ln_n).map_err(|e| e.to_string())?;
        let a = asympt_expansion(&ln_n).map_err(|e| e.to_string())?;
        residuals.push((f.scaled_value(&ln_n) - a.expansion).abs().as_f64());
    }
    let decreasing = residuals.windows(2).all(|w| w[1] < w[0]);
    check(
        at_one < 1e-10 && deriv_worst < 1e-4 && decreasing && residuals[3] < 1e-2,
        format!(
            "|f(1) − oracle| = {at_one:.1e}, derivative rel {deriv_worst:.1e}, residuals {:?}",
            residuals.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>()
        ),
    )
}

fn saddle() -> Outcome {
    let diffs: Vec<f64> = (1..=12)
        .map(|m| saddle_point(25.0 * m as f64 * std::f64::consts::LN_2).map(|s| s.difference.abs()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let at_100 = diffs[3];
    check(
        at_100 < 0.05 && diffs.windows(2).all(|w| w[1] < w[0]),
        format!("|root − expansion| = {at_100:.4} at 2^100, monotone over 2^25..2^300"),
    )
}

static COLLAPSE: OnceLock<Result<(SimSummary, SimSummary), String>> = OnceLock::new();

fn collapse_runs() -> Result<&'static (SimSummary, SimSummary), String> {
    COLLAPSE
        .get_or_init(|| {
            let small = sample_mean_ldm(&SimConfig::new(1_000, 100_000, 31)).map_err(|e| e.to_string())?;
            let large = sample_mean_ldm(&SimConfig::new(10_000, 100_000, 32)).map_err(|e| e.to_string())?;
            Ok((small, large))
        })
        .as_ref()
        .map_err(Clone::clone)
}

fn fit_reproduction() -> Outcome {
    let pts: Vec<ScalingPoint> = (50..=500)
        .step_by(10)
        .map(|l2| {
            let ln_n = ln_n_from_log2(l2 as f64, DEFAULT_PRECISION_BITS);
            let f = f_series(&ln_n)?;
            Ok(ScalingPoint::from_logs(ln_n.as_f64(), f.ln_value.as_f64(), Model::Series))
        })
        .collect::<ldm_core::Result<_>>()
        .map_err(|e| e.to_string())?;
    let r = fit_loglog(&pts).map_err(|e| e.to_string())?;

    let (small, large) = collapse_runs()?;
    let mut means = vec![(1_000usize, small.mean), (10_000, large.mean)];
    for (n, trials) in [(3_000usize, 4_000u64), (30_000, 1_000), (100_000, 300)] {
        let s = sample_mean_ldm(&SimConfig::new(n, trials, 33)).map_err(|e| e.to_string())?;
        means.push((n, s.mean));
    }
    means.sort_by_key(|p| p.0);
    let logs: Vec<(f64, f64)> = means.iter().map(|&(n, m)| ((n as f64).ln(), m.ln())).collect();
    let naive = naive_fit(&logs).map_err(|e| e.to_string())?;
    check(
        (-1.50..=-1.38).contains(&r.c1)
            && (0.62..=0.82).contains(&r.c3)
            && (0.55..=0.72).contains(&naive.slope)
            && naive.slope < SIMPLE_C,
        format!(
            "series fit c1 = {:.4}, c2 = {:.4}, c3 = {:.4}; naive slope {:.4} on n ∈ [1e3, 1e5]",
            r.c1, r.c2, r.c3, naive.slope
        ),
    )
}

fn pdm_band() -> Outcome {
    let mut scaled = Vec::new();
    for k in 6..=12 {
        let n = 1usize << k;
        let s = sample_mean(&SimConfig::new(n, 10_000, 50 + k as u64), Method::Pdm).map_err(|e| e.to_string())?;
        scaled.push(n as f64 * s.mean);
    }
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().cloned().fold(0.0, f64::max);
    check(
        hi / lo <= 3.0,
        format!(
            "n⟨PDM⟩ = {:?}, max/min {:.2}",
            scaled.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>(),
            hi / lo
        ),
    )
}

fn data_collapse() -> Outcome {
    let (small, large) = collapse_runs()?;
    let norm = |s: &SimSummary| s.samples.iter().map(|x| x / s.mean).collect::<Vec<_>>();
    let d = ks_two_sample(&norm(small), &norm(large));
    check(d < 0.05, format!("KS distance {d:.4} between n = 1e3 and n = 1e4"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact mixture table", table_exactness),
        ("worked example", worked_example),
        ("cross-model mean at small n", cross_model),
        ("Fibonacci identities", fibonacci_identities),
        ("rate-equation anchors", rate_anchors),
        ("series and asymptotics", series_asymptotics),
        ("saddle point", saddle),
        ("data collapse", data_collapse),
        ("fit reproduction", fit_reproduction),
        ("PDM scaling band", pdm_band),
    ];
    let order = [1, 2, 3, 4, 5, 6, 7, 10, 8, 9];
    let mut failed = 0;
    for ((name, f), id) in criteria.iter().zip(order) {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}

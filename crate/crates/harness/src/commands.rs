//! One function per computational subcommand.

use std::path::{Path, PathBuf};

use ldm_core::exact::{self, DEFAULT_ENUMERATION_CAP};
use ldm_core::fibonacci::{self, DEFAULT_MEMORY_BUDGET};
use ldm_core::fit::{self, Model, ScalingPoint};
use ldm_core::ldm::sim::{self, Method, SimConfig};
use ldm_core::series::{self, MAX_RECURSION_PIECE};
use ldm_core::stats::Histogram;
use ldm_core::{rate, walk, Real, Scalar};
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::cli::*;
use crate::error::{invalid, HarnessError, Result};
use crate::output::{num, write_atomic, Table};

/// Side effects of a run: files written and warnings raised.
#[derive(Debug, Default)]
pub struct Ctx {
    /// Skip all file writes (used when replaying).
    pub dry_run: bool,
    pub warnings: Vec<String>,
    pub outputs: Vec<PathBuf>,
}

impl Ctx {
    pub fn new(dry_run: bool) -> Self {
        Self {
            dry_run,
            ..Self::default()
        }
    }

    pub fn emit(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        if !self.dry_run {
            write_atomic(path, bytes)?;
        }
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }
}

/// Main output of a subcommand in both renderings.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub json: Value,
    pub table: Table,
    pub default_format: Format,
}

impl Rendered {
    fn csv(table: Table) -> Self {
        Self {
            json: table.to_json(),
            table,
            default_format: Format::Csv,
        }
    }
}

pub fn run(command: &Command, seed: u64, ctx: &mut Ctx) -> Result<Rendered> {
    match command {
        Command::LdmSim(a) => ldm_sim(a, seed, ctx),
        Command::ExactPdf(a) => exact_pdf(a),
        Command::LambdaWalk(a) => lambda_walk(a, seed, ctx),
        Command::RateEq(a) => rate_eq(a, ctx),
        Command::Fibonacci(a) => fibonacci(a),
        Command::Series(a) => series(a),
        Command::Gamma(a) => gamma(a),
        Command::Fit(a) => fit(a),
        Command::Figure(_) | Command::Replay(_) => {
            invalid(format!("{} is not a single computation", command.name()))
        }
    }
}

pub fn histogram_table(h: &Histogram) -> Table {
    let mut t = Table::new(&["bin_center", "density"]);
    for (c, d) in h.centers.iter().zip(&h.density) {
        t.push(vec![num(*c), num(*d)]);
    }
    t
}

fn ldm_sim(a: &LdmSimArgs, seed: u64, ctx: &mut Ctx) -> Result<Rendered> {
    if a.n == 0 || a.trials == 0 || a.bins == 0 {
        return invalid("n, trials and bins must be positive");
    }
    let bits = match a.bits {
        Bits::Auto => sim::default_bits(a.n),
        Bits::Fixed(0) => return invalid("bits must be positive"),
        Bits::Fixed(b) => b,
    };
    let config = SimConfig {
        n: a.n,
        bits,
        trials: a.trials,
        seed,
    };
    let method = match a.method {
        MethodArg::Ldm => Method::Ldm,
        MethodArg::Pdm => Method::Pdm,
    };
    let s = sim::sample_mean(&config, method)?;
    if s.resolution_warning {
        ctx.warn(format!(
            "{:.2}% of trials returned zero: {bits} bits do not resolve the discrepancy scale",
            100.0 * s.zero_fraction
        ));
    }
    if let Some(path) = &a.hist_out {
        let bytes = histogram_table(&s.normalized_histogram(a.bins)).to_csv();
        ctx.emit(path, &bytes)?;
    }
    let mut t = Table::new(&["n", "trials", "bits", "seed", "mean_L", "stderr_L"]);
    t.push(vec![
        a.n.to_string(),
        a.trials.to_string(),
        bits.to_string(),
        seed.to_string(),
        num(s.mean),
        num(s.stderr),
    ]);
    Ok(Rendered::csv(t))
}

/// `p/q` with no decimal point, `q = 1` included.
pub fn ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn exact_pdf(a: &ExactPdfArgs) -> Result<Rendered> {
    if a.n < 2 {
        return invalid(format!("exact-pdf needs n ≥ 2, got {}", a.n));
    }
    let cap = if a.max_n_override {
        usize::MAX
    } else {
        DEFAULT_ENUMERATION_CAP
    };
    let mix = exact::enumerate_pdf_with_cap(a.n, cap)?;
    let mut coeffs = Map::new();
    let mut t = Table::new(&["k", "a_k"]);
    for (k, c) in &mix.coeffs {
        coeffs.insert(k.to_string(), Value::String(ratio(c)));
        t.push(vec![k.to_string(), ratio(c)]);
    }
    let json = json!({
        "n": a.n,
        "coeffs": coeffs,
        "mean_Lhat": ratio(&exact::mixture_mean(&mix)),
        "mean_L": ratio(&exact::mean_uniform_output(&mix, a.n)),
    });
    Ok(Rendered {
        json,
        table: t,
        default_format: Format::Json,
    })
}

fn lambda_walk(a: &LambdaWalkArgs, seed: u64, ctx: &mut Ctx) -> Result<Rendered> {
    if a.n < 2 || a.trials == 0 || a.bins == 0 {
        return invalid("lambda-walk needs n ≥ 2 and positive trials and bins");
    }
    let s = walk::walk_ensemble(a.n, a.trials, seed)?;
    if s.log_domain {
        ctx.warn(format!(
            "rates exceed double range; ln ⟨λ₂⟩ = {} and relative stderr {}",
            num(s.ln_mean),
            num(s.rel_stderr)
        ));
    }
    if let Some(path) = &a.hist_out {
        let bytes = histogram_table(&s.normalized_histogram(a.bins)).to_csv();
        ctx.emit(path, &bytes)?;
    }
    let mut t = Table::new(&["n", "trials", "mean_lambda2", "stderr"]);
    t.push(vec![
        a.n.to_string(),
        a.trials.to_string(),
        num(s.mean),
        num(s.stderr),
    ]);
    Ok(Rendered::csv(t))
}

fn rate_eq(a: &RateEqArgs, ctx: &mut Ctx) -> Result<Rendered> {
    let lambda1 = match &a.field_out {
        Some(path) => {
            let field = rate::contour_field(a.n)?;
            let mut dump = Table::new(&["t", "i", "ln_lambda"]);
            for (t, i, v) in field.triples() {
                dump.push(vec![t.to_string(), i.to_string(), num(v)]);
            }
            ctx.emit(path, &dump.to_csv())?;
            field.lambda(a.n - 1, 1).expect("last row has one entry")
        }
        None => rate::solve::<f64>(a.n)?,
    };
    let mut t = Table::new(&["n", "lambda1_final", "log_lambda1"]);
    t.push(vec![a.n.to_string(), num(lambda1), num(lambda1.ln())]);
    Ok(Rendered::csv(t))
}

/// Powers of two from 4 up to `n_max`, plus `n_max` itself.
pub fn dyadic_points(n_max: usize) -> Vec<usize> {
    let mut ns: Vec<usize> = (2..usize::BITS)
        .map(|k| 1usize << k)
        .take_while(|&n| n <= n_max)
        .collect();
    if n_max >= 3 && ns.last() != Some(&n_max) {
        ns.push(n_max);
    }
    ns
}

fn fibonacci(a: &FibonacciArgs) -> Result<Rendered> {
    let ns = match a.sample {
        Sample::Dyadic => {
            let Some(n_max) = a.n_max else {
                return invalid("--sample dyadic needs --n-max");
            };
            if n_max < 3 {
                return invalid("--n-max must be at least 3");
            }
            dyadic_points(n_max)
        }
        Sample::List => {
            if a.list.is_empty() {
                return invalid("--sample list needs --list n1,n2,...");
            }
            if let Some(&bad) = a.list.iter().find(|&&n| n < 3 || a.n_max.is_some_and(|m| n > m)) {
                return invalid(format!("list entry {bad} outside 3..=n-max"));
            }
            a.list.clone()
        }
    };
    let budget = a.memory_budget.unwrap_or(DEFAULT_MEMORY_BUDGET);
    let curve = fibonacci::fib_scaling_curve_with_budget(&ns, budget)?;
    let mut t = Table::new(&["n", "ln_F", "scaled_value"]);
    for p in curve {
        t.push(vec![p.n.to_string(), num(p.ln_f), num(p.scaled_value)]);
    }
    Ok(Rendered::csv(t))
}

pub fn series_table(log2s: &[u32], precision: usize) -> Result<Table> {
    if precision < 64 {
        return invalid("precision must be at least 64 bits");
    }
    let mut t = Table::new(&["log2_n", "ln_f", "scaled_value", "asympt_value", "residual"]);
    for &l2 in log2s {
        if l2 < 2 {
            return invalid(format!("log2_n must be at least 2, got {l2}"));
        }
        let ln_n = series::ln_n_from_log2(l2 as f64, precision);
        let f = series::f_series(&ln_n)?;
        let scaled = f.scaled_value(&ln_n);
        let asympt = series::asympt_expansion(&ln_n)?.expansion;
        let residual = (scaled.clone() - asympt.clone()).abs();
        t.push(vec![
            l2.to_string(),
            num(f.ln_value.as_f64()),
            num(scaled.as_f64()),
            num(asympt.as_f64()),
            num(residual.as_f64()),
        ]);
    }
    Ok(t)
}

fn series(a: &SeriesArgs) -> Result<Rendered> {
    Ok(Rendered::csv(series_table(&a.log2_n, a.precision)?))
}

fn gamma(a: &GammaArgs) -> Result<Rendered> {
    if !(a.n.is_finite() && a.n >= 0.0) {
        return invalid("gamma needs a finite n ≥ 0");
    }
    if a.k_max > MAX_RECURSION_PIECE {
        return invalid(format!("--k-max is limited to {MAX_RECURSION_PIECE}"));
    }
    let mut t = Table::new(&["k", "s_right", "gamma_right", "recursion_residual"]);
    for k in 0..=a.k_max {
        let s = 1.0 - 2f64.powi(-(k as i32));
        let g = series::gamma_piece(k, &s, &a.n);
        let r = series::gamma_recursion_check(k, a.n, a.samples)?;
        t.push(vec![k.to_string(), num(s), num(g), num(r)]);
    }
    Ok(Rendered::csv(t))
}

/// `ln n` bounds from `nmin:nmax`; bounds are plain numbers or `b^e`.
pub fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bound = |b: &str| -> Option<f64> {
        let b = b.trim();
        let ln = match b.split_once('^') {
            Some((base, exp)) => base.parse::<f64>().ok()?.ln() * exp.parse::<f64>().ok()?,
            None => b.parse::<f64>().ok()?.ln(),
        };
        ln.is_finite().then_some(ln)
    };
    let parsed = s
        .split_once(':')
        .and_then(|(lo, hi)| Some((bound(lo)?, bound(hi)?)));
    match parsed {
        Some((lo, hi)) if lo <= hi => Ok((lo, hi)),
        _ => invalid(format!("bad range {s:?}: expected nmin:nmax with 0 < nmin ≤ nmax")),
    }
}

fn read_points(path: &Path, value_col: &str) -> Result<Vec<(f64, f64)>> {
    let bad = |e: csv::Error| HarnessError::Validation(format!("{}: {e}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(bad)?;
    let headers = rdr.headers().map_err(bad)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (n_col, to_ln): (usize, fn(f64) -> f64) = if let Some(i) = col("ln_n") {
        (i, |x| x)
    } else if let Some(i) = col("log2_n") {
        (i, |x| x * std::f64::consts::LN_2)
    } else if let Some(i) = col("n") {
        (i, f64::ln)
    } else {
        return invalid(format!("{}: no n, log2_n or ln_n column", path.display()));
    };
    let Some(v_col) = col(value_col) else {
        return invalid(format!("{}: no {value_col} column", path.display()));
    };
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(bad)?;
        let field = |i: usize| -> Result<f64> {
            let cell = rec.get(i).unwrap_or("");
            cell.parse::<f64>().map_err(|_| {
                HarnessError::Validation(format!("{}: bad number {cell:?}", path.display()))
            })
        };
        out.push((to_ln(field(n_col)?), field(v_col)?));
    }
    Ok(out)
}

fn fit(a: &FitArgs) -> Result<Rendered> {
    let (lo, hi) = parse_range(&a.range)?;
    let inside = |ln_n: f64| ln_n >= lo - 1e-9 && ln_n <= hi + 1e-9;
    let (json, table) = match a.model {
        FitKind::Fit => {
            let model = match a.source {
                Source::Simulation => Model::Simulation,
                Source::Rate => Model::Rate,
                Source::Fibonacci => Model::Fibonacci,
                Source::Series => Model::Series,
            };
            let points: Vec<ScalingPoint> = read_points(&a.input, "scaled_value")?
                .into_iter()
                .filter(|(l, _)| inside(*l))
                .map(|(l, s)| ScalingPoint::from_logs(l, s * l * l - series::ln_one_plus(&l), model))
                .collect();
            let r = fit::fit_loglog(&points)?;
            let mut t = Table::new(&["c1", "c2", "c3", "residual", "condition", "points"]);
            t.push(vec![
                num(r.c1),
                num(r.c2),
                num(r.c3),
                num(r.residual),
                num(r.condition),
                points.len().to_string(),
            ]);
            let json = json!({
                "c1": r.c1, "c2": r.c2, "c3": r.c3, "residual": r.residual,
                "condition": r.condition, "points": points.len(),
            });
            (json, t)
        }
        FitKind::Naive => {
            let mut points = Vec::new();
            for (l, mean) in read_points(&a.input, "mean_L")? {
                if !inside(l) {
                    continue;
                }
                if !(mean > 0.0) {
                    return invalid(format!("mean_L must be positive, got {mean}"));
                }
                points.push((l, mean.ln()));
            }
            let r = fit::naive_fit(&points)?;
            let mut t = Table::new(&["intercept", "slope", "points"]);
            t.push(vec![num(r.intercept), num(r.slope), points.len().to_string()]);
            let json = json!({"intercept": r.intercept, "slope": r.slope, "points": points.len()});
            (json, t)
        }
    };
    Ok(Rendered {
        json,
        table,
        default_format: Format::Json,
    })
}

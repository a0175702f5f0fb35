//! Named presets that emit the data behind each figure as plain CSV files.

use std::path::{Path, PathBuf};

use ldm_core::fibonacci;
use ldm_core::fit::{naive_fit, ScalingPoint};
use ldm_core::ldm::sim::{sample_mean_ldm, SimConfig};
use ldm_core::{rate, walk};
use serde_json::{json, Value};

use crate::cli::{FigureArgs, FigureName, Format, Profile};
use crate::commands::{histogram_table, series_table, Ctx, Rendered};
use crate::error::{invalid, HarnessError, Result};
use crate::output::{num, Table};

pub const HISTOGRAM_BINS: usize = 50;

/// `(n, trials)` pairs for the simulation points of the naive-fit figure.
pub fn fig2_points(profile: Profile) -> Vec<(usize, u64)> {
    match profile {
        Profile::Desk => vec![
            (1_000, 2000),
            (2_000, 2000),
            (5_000, 2000),
            (10_000, 1000),
            (20_000, 500),
            (50_000, 300),
            (100_000, 200),
        ],
        Profile::Smoke => vec![(100, 100), (300, 100), (1_000, 50)],
    }
}

pub fn fig3_points(profile: Profile) -> Vec<(usize, u64)> {
    let trials = match profile {
        Profile::Desk => 10_000,
        Profile::Smoke => 200,
    };
    vec![(1_000, trials), (10_000, trials)]
}

pub fn fig5_points(profile: Profile) -> Vec<(usize, u64)> {
    match profile {
        Profile::Desk => vec![(100, 10_000), (1_000, 10_000), (10_000, 1_000)],
        Profile::Smoke => vec![(16, 300), (64, 300), (256, 300)],
    }
}

struct Fig6Preset {
    simulation: Vec<(usize, u64)>,
    rate_log2: std::ops::RangeInclusive<u32>,
    fib_log2: std::ops::RangeInclusive<u32>,
    series_log2: Vec<u32>,
}

fn fig6_preset(profile: Profile) -> Fig6Preset {
    match profile {
        Profile::Desk => Fig6Preset {
            simulation: [16, 64, 256, 1024, 4096, 16384]
                .into_iter()
                .map(|n| (n, 2000))
                .collect(),
            rate_log2: 3..=14,
            fib_log2: 3..=22,
            series_log2: (3..=60).collect(),
        },
        Profile::Smoke => Fig6Preset {
            simulation: vec![(16, 200), (64, 200), (256, 100)],
            rate_log2: 3..=10,
            fib_log2: 3..=12,
            series_log2: (3..=20).collect(),
        },
    }
}

fn file(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn scaled_table(points: &[(f64, f64)]) -> Table {
    let mut t = Table::new(&["n", "scaled_value"]);
    for (n, s) in points {
        t.push(vec![num(*n), num(*s)]);
    }
    t
}

pub fn run(a: &FigureArgs, out: Option<&Path>, seed: u64, ctx: &mut Ctx) -> Result<Rendered> {
    let Some(dir) = out else {
        return invalid("figure needs --out <directory>");
    };
    if !ctx.dry_run {
        std::fs::create_dir_all(dir).map_err(HarnessError::io(dir))?;
    }
    let summary = match a.name {
        FigureName::Fig2 => fig2(a.profile, dir, seed, ctx)?,
        FigureName::Fig3 => fig3(a.profile, dir, seed, ctx)?,
        FigureName::Fig5 => fig5(a.profile, dir, seed, ctx)?,
        FigureName::Fig6 => fig6(a.profile, dir, seed, ctx)?,
    };
    let mut files = Table::new(&["file"]);
    for p in &ctx.outputs {
        files.push(vec![p.display().to_string()]);
    }
    Ok(Rendered {
        json: summary,
        table: files,
        default_format: Format::Json,
    })
}

fn fig2(profile: Profile, dir: &Path, seed: u64, ctx: &mut Ctx) -> Result<Value> {
    let mut t = Table::new(&[
        "n",
        "trials",
        "bits",
        "mean_L",
        "stderr_L",
        "ln2_n",
        "neg_ln_mean_L",
    ]);
    let mut pts = Vec::new();
    for (n, trials) in fig2_points(profile) {
        let s = sample_mean_ldm(&SimConfig::new(n, trials, seed))?;
        let ln_n = (n as f64).ln();
        pts.push((ln_n, s.mean.ln()));
        t.push(vec![
            n.to_string(),
            trials.to_string(),
            s.config.bits.to_string(),
            num(s.mean),
            num(s.stderr),
            num(ln_n * ln_n),
            num(-s.mean.ln()),
        ]);
    }
    let fit = naive_fit(&pts)?;
    let mut f = Table::new(&["intercept", "slope"]);
    f.push(vec![num(fit.intercept), num(fit.slope)]);
    ctx.emit(&file(dir, "fig2_points.csv"), &t.to_csv())?;
    ctx.emit(&file(dir, "fig2_fit.csv"), &f.to_csv())?;
    Ok(json!({"figure": "fig2", "intercept": fit.intercept, "slope": fit.slope}))
}

fn fig3(profile: Profile, dir: &Path, seed: u64, ctx: &mut Ctx) -> Result<Value> {
    let mut masses = Vec::new();
    for (n, trials) in fig3_points(profile) {
        let s = sample_mean_ldm(&SimConfig::new(n, trials, seed))?;
        let h = s.normalized_histogram(HISTOGRAM_BINS);
        masses.push(json!({"n": n, "mean_L": s.mean, "mass": h.mass()}));
        ctx.emit(&file(dir, &format!("fig3_n{n}.csv")), &histogram_table(&h).to_csv())?;
    }
    Ok(json!({"figure": "fig3", "histograms": masses}))
}

fn fig5(profile: Profile, dir: &Path, seed: u64, ctx: &mut Ctx) -> Result<Value> {
    let mut means = Vec::new();
    for (n, trials) in fig5_points(profile) {
        let s = walk::walk_ensemble(n, trials, seed)?;
        let h = s.normalized_histogram(HISTOGRAM_BINS);
        means.push(json!({"n": n, "ln_mean_lambda2": s.ln_mean, "mass": h.mass()}));
        ctx.emit(&file(dir, &format!("fig5_n{n}.csv")), &histogram_table(&h).to_csv())?;
    }
    Ok(json!({"figure": "fig5", "histograms": means}))
}

fn fig6(profile: Profile, dir: &Path, seed: u64, ctx: &mut Ctx) -> Result<Value> {
    let p = fig6_preset(profile);

    let mut sim = Vec::new();
    for &(n, trials) in &p.simulation {
        let s = sample_mean_ldm(&SimConfig::new(n, trials, seed))?;
        sim.push((n as f64, ScalingPoint::from_mean_output(n as f64, s.mean).scaled_value()?));
    }

    let mut rate_pts = Vec::new();
    for k in p.rate_log2.clone() {
        let n = 1usize << k;
        let l1 = rate::solve::<f64>(n)?;
        let ln_n = (n as f64).ln();
        rate_pts.push((n as f64, ldm_core::series::scaled(&l1.ln(), &ln_n)));
    }

    let ns: Vec<usize> = p.fib_log2.clone().map(|k| 1usize << k).collect();
    let fib: Vec<(f64, f64)> = fibonacci::fib_scaling_curve(&ns)?
        .into_iter()
        .map(|pt| (pt.n as f64, pt.scaled_value))
        .collect();

    let st = series_table(&p.series_log2, ldm_core::series::DEFAULT_PRECISION_BITS)?;
    let series: Vec<(f64, f64)> = p
        .series_log2
        .iter()
        .zip(&st.rows)
        .map(|(&l2, row)| (2f64.powi(l2 as i32), row[2].parse().expect("numeric cell")))
        .collect();

    let sets = [
        ("simulation", &sim),
        ("rate", &rate_pts),
        ("fibonacci", &fib),
        ("series", &series),
    ];
    let mut counts = serde_json::Map::new();
    for (name, pts) in sets {
        ctx.emit(&file(dir, &format!("fig6_{name}.csv")), &scaled_table(pts).to_csv())?;
        counts.insert(name.to_string(), json!(pts.len()));
    }
    Ok(json!({"figure": "fig6", "points": counts}))
}

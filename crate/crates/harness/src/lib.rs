//! Command-line harness for `ldm-core`: one subcommand per computation, figure
//! presets, atomic CSV/JSON outputs and replayable run records.

pub mod cli;
pub mod commands;
pub mod error;
pub mod figure;
pub mod output;
pub mod record;

use std::io::Write;
use std::path::Path;
use std::time::Instant;

pub use cli::{Cli, Command, Format};
pub use error::{HarnessError, Result};
pub use record::{ExperimentSpec, RunRecord};

use commands::Ctx;
use output::{json_pretty, write_atomic};

/// A finished run: its record and the main output bytes.
#[derive(Debug, Clone)]
pub struct Dispatched {
    pub record: RunRecord,
    pub main: Vec<u8>,
}

pub fn dispatch(spec: &ExperimentSpec) -> Result<Dispatched> {
    dispatch_with(spec, false)
}

fn dispatch_with(spec: &ExperimentSpec, dry_run: bool) -> Result<Dispatched> {
    let start = Instant::now();
    let mut ctx = Ctx::new(dry_run);
    let is_figure = matches!(spec.command, Command::Figure(_));
    let rendered = match &spec.command {
        Command::Figure(a) => figure::run(a, spec.out.as_deref(), spec.seed, &mut ctx)?,
        other => commands::run(other, spec.seed, &mut ctx)?,
    };
    let main = match spec.format.unwrap_or(rendered.default_format) {
        Format::Csv => rendered.table.to_csv(),
        Format::Json => json_pretty(&rendered.json),
    };
    if let (Some(out), false) = (&spec.out, is_figure) {
        ctx.emit(out, &main)?;
        // main output first
        ctx.outputs.rotate_right(1);
    }
    let record = RunRecord {
        spec: spec.clone(),
        wall_time_secs: start.elapsed().as_secs_f64(),
        payload: rendered.json,
        warnings: ctx.warnings,
        outputs: ctx.outputs,
    };
    Ok(Dispatched { record, main })
}

/// Rerun the spec embedded in a saved record without writing files; errors if
/// the payload differs.
pub fn replay(path: &Path) -> Result<RunRecord> {
    let bytes = std::fs::read(path).map_err(HarnessError::io(path))?;
    let saved = RunRecord::from_json(&bytes)?;
    let again = dispatch_with(&saved.spec, true)?;
    if again.record.payload != saved.payload {
        return Err(HarnessError::ReplayMismatch);
    }
    Ok(again.record)
}

/// Entry point behind the binary.
pub fn run(cli: Cli) -> Result<()> {
    if let Command::Replay(r) = &cli.command {
        replay(&r.record_path)?;
        println!("payload identical");
        return Ok(());
    }
    let spec = ExperimentSpec::from_cli(&cli);
    let done = dispatch(&spec)?;
    for w in &done.record.warnings {
        eprintln!("warning: {w}");
    }
    if spec.out.is_none() || matches!(spec.command, Command::Figure(_)) {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(&done.main)
            .map_err(HarnessError::io("<stdout>"))?;
    }
    if let Some(path) = &cli.record {
        write_atomic(path, &done.record.to_json())?;
    }
    Ok(())
}

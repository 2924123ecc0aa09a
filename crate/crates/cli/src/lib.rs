//! Configured experiment runs over the `specinv` library, with JSON and CSV
//! reports.

pub mod config;
pub mod run;

use std::fs;
use std::path::Path;

use anyhow::Context;
use serde_json::{json, Value};

pub use config::ExperimentConfig;
pub use run::{run, run_one, Command, Outcome, Table};

pub const SCHEMA: u32 = 1;

/// The versioned JSON document for one outcome. Contains nothing that varies
/// between runs of the same config and seed.
pub fn envelope(cfg: &ExperimentConfig, outcome: &Outcome) -> Value {
    let mut echo = serde_json::to_value(cfg).expect("config serializes");
    if let Some(map) = echo.as_object_mut() {
        map.remove("output");
    }
    json!({
        "schema": SCHEMA,
        "experiment": cfg.experiment,
        "subcommand": outcome.command.name(),
        "seed": cfg.seed,
        "verdict": if outcome.pass { "pass" } else { "fail" },
        "config": echo,
        "report": outcome.report,
    })
}

pub fn write_table(path: &Path, table: &Table) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<name>.json`, `<name>.meta.json` and, when asked, `<name>.csv`
/// into `dir`.
pub fn write_artifacts(dir: &Path, cfg: &ExperimentConfig, outcome: &Outcome, seconds: f64, with_csv: bool) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = outcome.command.name();
    let doc = serde_json::to_string_pretty(&envelope(cfg, outcome))?;
    fs::write(dir.join(format!("{name}.json")), doc + "\n")?;
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = json!({
        "schema": SCHEMA,
        "subcommand": name,
        "seed": cfg.seed,
        "elapsed_seconds": seconds,
        "unix_time": stamp,
        "version": env!("CARGO_PKG_VERSION"),
    });
    fs::write(dir.join(format!("{name}.meta.json")), serde_json::to_string_pretty(&meta)? + "\n")?;
    if with_csv {
        if let Some(t) = &outcome.table {
            write_table(&dir.join(format!("{name}.csv")), t)?;
        }
    }
    Ok(())
}

/// Stable line-oriented summary.
pub fn summary(outcome: &Outcome) -> Vec<String> {
    let head = format!("{}: {}", outcome.command.name(), if outcome.pass { "PASS" } else { "FAIL" });
    std::iter::once(head)
        .chain(outcome.lines.iter().map(|l| format!("  {l}")))
        .collect()
}

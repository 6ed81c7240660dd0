//! Run artifacts: `series.csv`, `summary.json` and `verdict.json`.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::LawResiduals;
use crate::error::{Error, Result};
use crate::grid::Direction;
use crate::scenarios::{TheoremVerdict, VerdictStatus};
use crate::stepper::{Halt, RunOutcome, SimConfig};

/// Column order of `series.csv`.
pub const SERIES_COLUMNS: [&str; 18] = [
    "t",
    "M",
    "Q",
    "E",
    "Qu",
    "Qv",
    "E1",
    "E2",
    "w_u1",
    "w_v1",
    "w_u2",
    "eta",
    "eta_d2_fd",
    "eta_d2_rhs",
    "P",
    "r_mass",
    "r_moment",
    "r_energy",
];

/// Rows in [`SERIES_COLUMNS`] order. A run sampled only at its two end
/// points has no flux history; its rows carry NaN in the derived columns.
pub fn series_rows(out: &RunOutcome) -> Vec<[f64; 18]> {
    if !out.records.is_empty() {
        return out
            .records
            .iter()
            .map(|r| {
                [
                    r.t,
                    r.mass,
                    r.moment,
                    r.energy,
                    r.fluxes.qu,
                    r.fluxes.qv,
                    r.fluxes.e1,
                    r.fluxes.e2,
                    r.w_u1,
                    r.w_v1,
                    r.w_u2,
                    r.eta,
                    r.eta_d2_fd,
                    r.eta_d2_rhs,
                    r.p,
                    r.r_mass,
                    r.r_moment,
                    r.r_energy,
                ]
            })
            .collect();
    }
    let nan = f64::NAN;
    out.snapshots
        .iter()
        .map(|s| {
            [
                s.t,
                s.mass,
                s.moment,
                s.energy,
                nan,
                nan,
                nan,
                nan,
                s.w_u1,
                s.w_v1,
                s.w_u2,
                nan,
                nan,
                s.eta_d2_rhs,
                s.p,
                nan,
                nan,
                nan,
            ]
        })
        .collect()
}

/// Writes the series with shortest round-trip formatting of every value.
pub fn write_series_csv(path: &Path, out: &RunOutcome) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(SERIES_COLUMNS).map_err(csv_error)?;
    for row in series_rows(out) {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub tag: String,
    pub direction: Direction,
    pub length: f64,
    pub cells: usize,
    pub dt: f64,
    pub t_final: f64,
    pub steps_taken: usize,
    pub samples: usize,
    pub halt: Option<Halt>,
    pub warnings: Vec<String>,
    /// max |M(t) − M(0)| / max(1, |M(0)|)
    pub mass_drift: f64,
    pub residuals: Option<LawResiduals>,
    pub eta0: Option<f64>,
    pub eta_d1_0: Option<f64>,
    pub verdict: Option<VerdictStatus>,
    pub margin: Option<f64>,
    /// The configuration as run; absent when it holds closures.
    pub config: Option<serde_json::Value>,
}

pub fn summarize(config: &SimConfig, out: &RunOutcome, verdict: Option<&TheoremVerdict>) -> RunSummary {
    let m0 = out.snapshots.first().map_or(0.0, |s| s.mass);
    let mass_drift = out.snapshots.iter().map(|s| (s.mass - m0).abs() / m0.abs().max(1.0)).fold(0.0, f64::max);
    RunSummary {
        tag: config.tag.clone(),
        direction: out.grid.direction(),
        length: out.grid.length(),
        cells: out.grid.cells(),
        dt: config.time.dt,
        t_final: config.time.t_final,
        steps_taken: out.steps_taken,
        samples: out.snapshots.len(),
        halt: out.halt.clone(),
        warnings: out.warnings.clone(),
        mass_drift,
        residuals: out.residuals,
        eta0: out.initial_virial.map(|v| v.0),
        eta_d1_0: out.initial_virial.map(|v| v.1),
        verdict: verdict.map(|v| v.status),
        margin: verdict.and_then(|v| v.margin),
        config: serde_json::to_value(config).ok(),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes `series.csv` and `summary.json` for a run, and `verdict.json`
/// when a verdict is given. A verdict without a run writes only the verdict.
pub fn write_artifacts(
    dir: &Path,
    config: &SimConfig,
    out: Option<&RunOutcome>,
    verdict: Option<&TheoremVerdict>,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    if let Some(out) = out {
        write_series_csv(&dir.join("series.csv"), out)?;
        write_json(&dir.join("summary.json"), &summarize(config, out, verdict))?;
    }
    if let Some(v) = verdict {
        write_json(&dir.join("verdict.json"), v)?;
    }
    Ok(())
}

/// Writes any serializable report as pretty JSON.
pub fn write_report<T: Serialize>(path: &Path, report: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    write_json(path, report)
}

//! Run directories: `series.csv`, one `snap_NNNN.csv` per record, `manifest.json`
//! and `verdicts.json`. Everything except the manifest's timings is a pure
//! function of the config, so reruns reproduce those files byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::monitors::Verdict;
use crate::report::{parse_series, AbortRecord, RunReport, Snapshot};

pub const SERIES_FILE: &str = "series.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const VERDICTS_FILE: &str = "verdicts.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub t: f64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: SolverConfig,
    pub config_hash: String,
    pub version: String,
    pub eps: f64,
    pub dx: f64,
    pub dt_max: f64,
    pub steps: usize,
    pub halvings: usize,
    pub psi_min: f64,
    pub psi_max: f64,
    pub seed: Option<u64>,
    pub threads: usize,
    pub snapshots: Vec<SnapshotEntry>,
    pub abort: Option<AbortRecord>,
    pub timings: Vec<(String, f64)>,
}

impl Manifest {
    pub fn for_report(report: &RunReport, seed: Option<u64>) -> Self {
        Self {
            config: report.config.clone(),
            config_hash: report.config.canonical_hash(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            eps: report.eps,
            dx: report.dx,
            dt_max: report.dt_max,
            steps: report.steps,
            halvings: report.halvings,
            psi_min: report.psi_min,
            psi_max: report.psi_max,
            seed,
            threads: rayon::current_num_threads(),
            snapshots: report
                .snapshots
                .iter()
                .enumerate()
                .map(|(k, s)| SnapshotEntry {
                    t: s.t,
                    file: format!("snap_{k:04}.csv"),
                })
                .collect(),
            abort: report.abort.clone(),
            timings: report.timings.clone(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Writes a complete run directory, creating it if needed.
pub fn write_run(dir: &Path, report: &RunReport, verdicts: &[Verdict]) -> Result<Manifest> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(SERIES_FILE), report.series_csv())?;
    let manifest = Manifest::for_report(report, None);
    for (entry, snap) in manifest.snapshots.iter().zip(&report.snapshots) {
        snap.f.write_csv(&dir.join(&entry.file))?;
    }
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    write_json(&dir.join(VERDICTS_FILE), &verdicts)?;
    Ok(manifest)
}

/// Reads a run directory back into a report (timings included, verdicts not).
pub fn load_run(dir: &Path) -> Result<RunReport> {
    let text = std::fs::read_to_string(dir.join(MANIFEST_FILE))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let series = std::fs::read_to_string(dir.join(SERIES_FILE))?;
    let records = parse_series(&series).ok_or_else(|| Error::Csv {
        line: 0,
        message: format!("{} is not a series file", dir.join(SERIES_FILE).display()),
    })?;
    let snapshots = manifest
        .snapshots
        .iter()
        .map(|e| {
            Ok(Snapshot {
                t: e.t,
                f: GridFunction::read_csv(&dir.join(&e.file))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if snapshots.len() != records.len() {
        return Err(Error::Mismatch(format!(
            "{}: {} records but {} snapshots",
            dir.display(),
            records.len(),
            snapshots.len()
        )));
    }
    Ok(RunReport {
        config: manifest.config,
        eps: manifest.eps,
        dx: manifest.dx,
        dt_max: manifest.dt_max,
        steps: manifest.steps,
        halvings: manifest.halvings,
        psi_min: manifest.psi_min,
        psi_max: manifest.psi_max,
        records,
        snapshots,
        abort: manifest.abort,
        timings: manifest.timings,
    })
}

//! Trajectory records produced by a run and consumed by the monitors.

use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::grid::GridFunction;

/// One sample of the diagnostic series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub t: f64,
    /// `||f||_{tH^3_gamma}`.
    pub tilde_h3_gamma: f64,
    /// `||f||_{C^{2,gamma}_gamma}`.
    pub c2_gamma_gamma: f64,
    pub sup: f64,
    pub inf: f64,
    /// `||f_t||_inf`.
    pub rhs_sup: f64,
    /// `||f_x||^4_{C^{1,gamma}}`.
    pub blowup_integrand: f64,
    /// `tL2` norms of `f'`, `f''`, `f'''`.
    pub tl2_d1: f64,
    pub tl2_d2: f64,
    pub tl2_d3: f64,
}

impl Record {
    pub const CSV_HEADER: &'static str =
        "t,tilde_h3_gamma,c2_gamma_gamma,sup,inf,rhs_sup,blowup_integrand,tl2_d1,tl2_d2,tl2_d3";

    pub fn csv_row(&self) -> String {
        [
            self.t,
            self.tilde_h3_gamma,
            self.c2_gamma_gamma,
            self.sup,
            self.inf,
            self.rhs_sup,
            self.blowup_integrand,
            self.tl2_d1,
            self.tl2_d2,
            self.tl2_d3,
        ]
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(",")
    }

    pub fn from_csv_row(row: &str) -> Option<Self> {
        let v: Vec<f64> = row
            .split(',')
            .map(|s| s.trim().parse().ok())
            .collect::<Option<_>>()?;
        if v.len() != 10 {
            return None;
        }
        Some(Self {
            t: v[0],
            tilde_h3_gamma: v[1],
            c2_gamma_gamma: v[2],
            sup: v[3],
            inf: v[4],
            rhs_sup: v[5],
            blowup_integrand: v[6],
            tl2_d1: v[7],
            tl2_d2: v[8],
            tl2_d3: v[9],
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub f: GridFunction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortKind {
    RangeBreach,
    DtCollapse,
    NonFinite,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbortRecord {
    pub t: f64,
    pub kind: AbortKind,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: SolverConfig,
    pub eps: f64,
    pub dx: f64,
    /// Largest step actually taken.
    pub dt_max: f64,
    pub steps: usize,
    /// Step halvings performed by the adaptive guard.
    pub halvings: usize,
    pub psi_min: f64,
    pub psi_max: f64,
    pub records: Vec<Record>,
    pub snapshots: Vec<Snapshot>,
    pub abort: Option<AbortRecord>,
    /// Wall-clock seconds per phase.
    pub timings: Vec<(String, f64)>,
}

impl RunReport {
    pub fn final_state(&self) -> Option<&GridFunction> {
        self.snapshots.last().map(|s| &s.f)
    }

    pub fn completed(&self) -> bool {
        self.abort.is_none()
    }

    pub fn series_csv(&self) -> String {
        let mut out = String::from(Record::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }
}

/// Parses the `series.csv` layout written by [`RunReport::series_csv`].
pub fn parse_series(text: &str) -> Option<Vec<Record>> {
    let mut lines = text.lines();
    if lines.next()?.trim() != Record::CSV_HEADER {
        return None;
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(Record::from_csv_row)
        .collect()
}

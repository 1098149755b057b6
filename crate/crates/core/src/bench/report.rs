//! Benchmark result rows and their CSV form.
//!
//! The column layout is documented in `docs/csv-schema.md`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use crate::error::Result;
use crate::fsi::{PhaseTimings, SolveCounts};

pub const CSV_MAGIC: &str = "# ifed-report v1";

pub const COLUMNS: [&str; 24] = [
    "benchmark",
    "scheme",
    "kernel",
    "element",
    "mfac",
    "mfac_actual",
    "n",
    "m",
    "dofs",
    "dx",
    "dX",
    "dt",
    "steps",
    "final_time",
    "error_l1",
    "error_l2",
    "error_linf",
    "qoi",
    "mass_solves",
    "mass_iterations",
    "viscous_iterations",
    "poisson_iterations",
    "params",
    "status",
];

pub const TIMING_COLUMNS: [&str; 10] = [
    "benchmark",
    "scheme",
    "element",
    "mfac",
    "n",
    "assembly_s",
    "projection_s",
    "coupling_s",
    "fluid_s",
    "total_s",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportRow {
    pub benchmark: String,
    pub scheme: String,
    pub kernel: String,
    pub element: String,
    pub mfac: f64,
    pub mfac_actual: f64,
    pub n: usize,
    pub m: usize,
    pub dofs: usize,
    pub dx: f64,
    pub dx_structure: f64,
    pub dt: f64,
    pub steps: usize,
    pub final_time: f64,
    pub error_l1: Option<f64>,
    pub error_l2: Option<f64>,
    pub error_linf: Option<f64>,
    pub qoi: Option<f64>,
    pub counts: SolveCounts,
    pub viscous_iterations: usize,
    pub poisson_iterations: usize,
    /// Remaining parameters as `key=value` pairs joined by `;`.
    pub params: String,
    /// `ok` or an error message.
    pub status: String,
    pub timings: PhaseTimings,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Report {
    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    /// Deterministic CSV: no timing columns.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{CSV_MAGIC}").unwrap();
        writeln!(s, "{}", COLUMNS.join(",")).unwrap();
        for r in &self.rows {
            let cells = [
                field(&r.benchmark),
                field(&r.scheme),
                field(&r.kernel),
                field(&r.element),
                num(r.mfac),
                num(r.mfac_actual),
                r.n.to_string(),
                r.m.to_string(),
                r.dofs.to_string(),
                num(r.dx),
                num(r.dx_structure),
                num(r.dt),
                r.steps.to_string(),
                num(r.final_time),
                opt(r.error_l1),
                opt(r.error_l2),
                opt(r.error_linf),
                opt(r.qoi),
                r.counts.mass_solves.to_string(),
                r.counts.mass_iterations.to_string(),
                r.viscous_iterations.to_string(),
                r.poisson_iterations.to_string(),
                field(&r.params),
                field(&r.status),
            ];
            writeln!(s, "{}", cells.join(",")).unwrap();
        }
        s
    }

    /// Wall-clock timings per phase, one row per run.
    pub fn timings_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", TIMING_COLUMNS.join(",")).unwrap();
        for r in &self.rows {
            let t = &r.timings;
            writeln!(
                s,
                "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6}",
                field(&r.benchmark),
                field(&r.scheme),
                field(&r.element),
                num(r.mfac),
                r.n,
                t.assembly.as_secs_f64(),
                t.projection.as_secs_f64(),
                t.coupling.as_secs_f64(),
                t.fluid.as_secs_f64(),
                r.wall_time.as_secs_f64()
            )
            .unwrap();
        }
        s
    }
}

/// Writes `report` to `path` as CSV.
pub fn emit_csv(report: &Report, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(report.to_csv().as_bytes())?;
    Ok(())
}

/// Writes the timing companion file.
pub fn emit_timings(report: &Report, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(report.timings_csv().as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_header_only() {
        let csv = Report::default().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines, vec![CSV_MAGIC, &COLUMNS.join(",")]);
    }

    #[test]
    fn rows_have_every_column_and_ignore_timings() {
        let mut r = Report::default();
        let row = ReportRow {
            benchmark: "channel_flow".into(),
            params: "a=1;b=x,y".into(),
            error_l2: Some(0.5),
            ..Default::default()
        };
        r.push(row.clone());
        let mut slow = row;
        slow.wall_time = Duration::from_secs(9);
        let mut r2 = Report::default();
        r2.push(slow);
        assert_eq!(r.to_csv(), r2.to_csv());
        let line = r.to_csv().lines().nth(2).unwrap().to_string();
        assert!(line.contains("\"a=1;b=x,y\""));
        assert!(line.contains("5.000000000000e-1"));
    }
}

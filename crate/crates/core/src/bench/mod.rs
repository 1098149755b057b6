//! Benchmark definitions, error norms, sweeps, the coupling property suite and CSV
//! reporting.

pub mod band;
pub mod channel;
pub mod config;
pub mod quasi_static;
pub mod report;
pub mod properties;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::coupling::{mesh_factor, Kernel, Scheme};
use crate::error::{IfedError, Result};
use crate::fsi::Simulation;
use crate::grid::{MacGrid, StaggeredField};
use crate::linalg::Vec2;
use crate::mesh::ElementKind;

pub use report::{emit_csv, emit_timings, Report, ReportRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    ChannelFlow,
    ElasticBand,
    CompressedBlock,
    CooksMembrane,
}

impl Benchmark {
    pub const ALL: [Benchmark; 4] = [
        Benchmark::ChannelFlow,
        Benchmark::ElasticBand,
        Benchmark::CompressedBlock,
        Benchmark::CooksMembrane,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::ChannelFlow => "channel_flow",
            Benchmark::ElasticBand => "elastic_band",
            Benchmark::CompressedBlock => "compressed_block",
            Benchmark::CooksMembrane => "cooks_membrane",
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = IfedError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "channel_flow" | "channel" => Ok(Benchmark::ChannelFlow),
            "elastic_band" | "band" => Ok(Benchmark::ElasticBand),
            "compressed_block" | "block" => Ok(Benchmark::CompressedBlock),
            "cooks_membrane" | "cook" | "cooks" => Ok(Benchmark::CooksMembrane),
            _ => Err(IfedError::Parse(format!("unknown benchmark '{s}'"))),
        }
    }
}

/// Knobs shared by every benchmark run; `None` falls back to the
/// benchmark's configuration file.
#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub scheme: Option<Scheme>,
    pub kernel: Option<Kernel>,
    pub element: Option<ElementKind>,
    pub mfac: Option<f64>,
    /// Grid cells per unit length scale (channel, band) or per domain side
    /// (quasi-static).
    pub n: Option<usize>,
    /// Elements along the longest structure edge (quasi-static).
    pub m: Option<usize>,
    pub final_time: Option<f64>,
    pub dt_factor: Option<f64>,
}

/// Runs one benchmark with the given configuration and overrides.
pub fn run(benchmark: Benchmark, cfg: &config::BenchConfig, o: &RunOverrides) -> Result<ReportRow> {
    match benchmark {
        Benchmark::ChannelFlow => channel::run(&cfg.channel_flow, o),
        Benchmark::ElasticBand => band::run(&cfg.elastic_band, o),
        Benchmark::CompressedBlock => quasi_static::run_block(&cfg.compressed_block, o),
        Benchmark::CooksMembrane => quasi_static::run_cook(&cfg.cooks_membrane, o),
    }
}

/// Runs `benchmark` once per M_FAC value. Failed runs are reported in the
/// `status` column instead of aborting the sweep.
pub fn sweep(benchmark: Benchmark, cfg: &config::BenchConfig, base: &RunOverrides, mfacs: &[f64]) -> Report {
    let mut report = Report::default();
    for &m in mfacs {
        let o = RunOverrides {
            mfac: Some(m),
            ..base.clone()
        };
        let row = run(benchmark, cfg, &o).unwrap_or_else(|e| failed_row(benchmark, &o, &e));
        report.push(row);
    }
    report
}

pub fn failed_row(benchmark: Benchmark, o: &RunOverrides, e: &IfedError) -> ReportRow {
    ReportRow {
        benchmark: benchmark.name().into(),
        scheme: o.scheme.map(|s| s.to_string()).unwrap_or_default(),
        kernel: o.kernel.map(|k| k.to_string()).unwrap_or_default(),
        element: o.element.map(|k| k.to_string()).unwrap_or_default(),
        mfac: o.mfac.unwrap_or(f64::NAN),
        n: o.n.unwrap_or(0),
        m: o.m.unwrap_or(0),
        status: format!("error: {e}"),
        ..Default::default()
    }
}

/// Fills the bookkeeping columns of a row from a finished simulation.
pub(crate) fn base_row(benchmark: Benchmark, sim: &Simulation, mfac: f64, n: usize, m: usize, started: Instant) -> ReportRow {
    let grid = sim.grid();
    ReportRow {
        benchmark: benchmark.name().into(),
        scheme: sim.config.coupling.scheme.to_string(),
        kernel: sim.config.coupling.kernel.to_string(),
        element: sim.mesh.kind().to_string(),
        mfac,
        mfac_actual: mesh_factor(&sim.mesh, grid.dx),
        n,
        m,
        dofs: sim.mesh.dof_count(),
        dx: grid.dx,
        dx_structure: sim.mesh.longest_edge(),
        dt: sim.config.dt,
        steps: sim.state.step,
        final_time: sim.state.t,
        counts: sim.counts,
        viscous_iterations: sim.fluid.stats.viscous_iterations,
        poisson_iterations: sim.fluid.stats.poisson_iterations,
        status: "ok".into(),
        timings: sim.timings,
        wall_time: started.elapsed(),
        ..Default::default()
    }
}

/// Velocity at cell `(i, j)` as the average of its faces.
pub fn cell_velocity(grid: &MacGrid, u: &StaggeredField, i: usize, j: usize) -> Vec2 {
    [
        0.5 * (u.u[grid.u_index(i, j)] + u.u[grid.u_index(i + 1, j)]),
        0.5 * (u.v[grid.v_index(i, j)] + u.v[grid.v_index(i, j + 1)]),
    ]
}

/// Discrete L¹, L² and L∞ norms of a vector error sampled at cell centers,
/// each normalized by the sampled area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub cells: usize,
}

/// Norms of `|e|` over the cells where `error_at` returns a value.
pub fn cell_error_norms(grid: &MacGrid, mut error_at: impl FnMut(usize, usize) -> Option<Vec2>) -> ErrorNorms {
    let (mut l1, mut l2, mut linf, mut cells) = (0.0, 0.0, 0.0f64, 0usize);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if let Some(e) = error_at(i, j) {
                let m = (e[0] * e[0] + e[1] * e[1]).sqrt();
                l1 += m;
                l2 += m * m;
                linf = linf.max(m);
                cells += 1;
            }
        }
    }
    let c = cells.max(1) as f64;
    ErrorNorms {
        l1: l1 / c,
        l2: (l2 / c).sqrt(),
        linf,
        cells,
    }
}

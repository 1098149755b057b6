use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ifed::bench::config::BenchConfig;
use ifed::bench::{self, channel, emit_csv, emit_timings, properties, Benchmark, Report, RunOverrides};
use ifed::coupling::{Kernel, Scheme};
use ifed::mesh::ElementKind;

#[derive(Parser)]
#[command(name = "ifed", version, about = "Immersed FE-FD fluid-structure benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one benchmark.
    Run {
        benchmark: Benchmark,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run one benchmark for each mesh factor in a list.
    Sweep {
        benchmark: Benchmark,
        #[arg(long, value_delimiter = ',', required = true)]
        mfac_list: Vec<f64>,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run the coupling property suite.
    Verify {
        #[arg(long, default_value_t = properties::DEFAULT_SEED)]
        seed: u64,
    },
    /// Convergence studies.
    Convergence {
        #[command(subcommand)]
        study: Study,
    },
}

#[derive(Subcommand)]
enum Study {
    /// Lumped force projection of a manufactured stress on refined P1 meshes.
    ForceProjection {
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        levels: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunOpts {
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    kernel: Option<Kernel>,
    #[arg(long)]
    mfac: Option<f64>,
    /// Grid cells per unit length (channel, band).
    #[arg(long)]
    n: Option<usize>,
    /// Elements along the longest structure edge (block, Cook).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long = "elem")]
    element: Option<ElementKind>,
    #[arg(long)]
    final_time: Option<f64>,
    /// Multiplies the configured time step.
    #[arg(long)]
    dt_factor: Option<f64>,
    /// Directory with `<benchmark>.toml` files overriding the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for `report.csv` and `timings.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunOpts {
    fn overrides(&self) -> RunOverrides {
        RunOverrides {
            scheme: self.scheme,
            kernel: self.kernel,
            element: self.element,
            mfac: self.mfac,
            n: self.n,
            m: self.m,
            final_time: self.final_time,
            dt_factor: self.dt_factor,
        }
    }
}

fn finish(report: &Report, out: Option<&PathBuf>) -> ifed::Result<bool> {
    print!("{}", report.to_csv());
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        emit_csv(report, &dir.join("report.csv"))?;
        emit_timings(report, &dir.join("timings.csv"))?;
    }
    Ok(report.rows.iter().all(|r| r.status == "ok"))
}

fn execute(cli: Cli) -> ifed::Result<bool> {
    match cli.command {
        Command::Run { benchmark, opts } => {
            let cfg = BenchConfig::load(opts.config.as_deref())?;
            let o = opts.overrides();
            let row = bench::run(benchmark, &cfg, &o).unwrap_or_else(|e| bench::failed_row(benchmark, &o, &e));
            finish(&Report { rows: vec![row] }, opts.out.as_ref())
        }
        Command::Sweep {
            benchmark,
            mfac_list,
            opts,
        } => {
            let cfg = BenchConfig::load(opts.config.as_deref())?;
            let o = opts.overrides();
            let mut report = bench::sweep(benchmark, &cfg, &o, &mfac_list);
            if benchmark == Benchmark::ChannelFlow {
                let row = channel::control_row(&cfg.channel_flow, &o).unwrap_or_else(|e| bench::failed_row(benchmark, &o, &e));
                report.push(row);
            }
            finish(&report, opts.out.as_ref())
        }
        Command::Verify { seed } => {
            let checks = properties::run_suite(seed)?;
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {} failed", checks.len(), failed);
            Ok(failed == 0)
        }
        Command::Convergence {
            study: Study::ForceProjection { levels, out },
        } => {
            let (rows, orders) = properties::force_projection_study(&levels)?;
            let mut csv = String::from("cells,dX,dofs,error,order\n");
            for (k, r) in rows.iter().enumerate() {
                let order = if k == 0 { String::new() } else { format!("{:.6}", orders[k - 1]) };
                csv.push_str(&format!("{},{:.12e},{},{:.12e},{}\n", r.cells, r.dx_structure, r.dofs, r.error, order));
            }
            print!("{csv}");
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("force_projection.csv"), &csv)?;
            }
            Ok(orders.iter().all(|&p| p >= 0.9))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("ifed: {e}");
            ExitCode::from(2)
        }
    }
}

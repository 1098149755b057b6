//! Short mesh-factor sweep of the slanted channel through the benchmark API,
//! written as a report CSV.
//!
//! ```text
//! cargo run --release --example mfac_sweep [out.csv]
//! ```

use ifed::bench::config::BenchConfig;
use ifed::bench::{self, channel, Benchmark, RunOverrides};
use ifed::coupling::Scheme;

fn main() -> ifed::Result<()> {
    let cfg = BenchConfig::defaults();
    let base = RunOverrides {
        scheme: Some(Scheme::Nodal),
        n: Some(32),
        final_time: Some(4.0),
        ..RunOverrides::default()
    };
    let mut report = bench::sweep(Benchmark::ChannelFlow, &cfg, &base, &[1.0, 2.0, 4.0]);
    report.push(channel::control_row(&cfg.channel_flow, &base)?);
    for r in &report.rows {
        println!(
            "{:>9} mfac {:<4} dofs {:>5}  error l2 {:.3e}  {}",
            r.scheme,
            r.mfac,
            r.dofs,
            r.error_l2.unwrap_or(f64::NAN),
            r.status
        );
    }
    if let Some(path) = std::env::args().nth(1) {
        bench::emit_csv(&report, path.as_ref())?;
        println!("wrote {path}");
    }
    Ok(())
}

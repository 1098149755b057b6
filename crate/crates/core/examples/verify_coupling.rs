//! Runs the coupling property suite with a seed from the command line.
//!
//! ```text
//! cargo run --release --example verify_coupling [seed]
//! ```

use ifed::bench::properties;

fn main() -> ifed::Result<()> {
    let seed = std::env::args().nth(1).map_or(properties::DEFAULT_SEED, |s| s.parse().expect("seed must be an integer"));
    let checks = properties::run_suite(seed)?;
    for c in &checks {
        println!("{c}");
    }
    let (levels, orders) = properties::force_projection_study(&[8, 16, 32, 64])?;
    for (k, l) in levels.iter().enumerate() {
        let order = if k == 0 { String::new() } else { format!("order {:.3}", orders[k - 1]) };
        println!("force projection {:>3} cells  error {:.3e}  {order}", l.cells, l.error);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
    Ok(())
}

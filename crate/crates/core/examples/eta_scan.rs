//! Effective dimension η of the Mott state as a function of the bin width.
//!
//! cargo run --release --example eta_scan -- [N realizations]

use boson_chaos::experiments::{delta_e_values, run_eta_scan};
use boson_chaos::output::OutputDir;
use boson_chaos::{FockState, RunConfig};

fn main() -> boson_chaos::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let n = args.first().copied().unwrap_or(7);
    let r = args.get(1).copied().unwrap_or(40);
    let cfg = RunConfig::new(n as u32, n, 0.6).with_realizations(r);
    let scan = run_eta_scan(
        &cfg,
        &FockState::mott(n),
        &delta_e_values(0.2, 1.8, 0.1)?,
        None,
    )?;
    for r in &scan.rows {
        println!(
            "  ΔE = {:.2}  eta = {:.1}  (per realization {:.1}, pooled {:.1})",
            r.delta_e, r.eta, r.eta_per_realization, r.eta_pooled
        );
    }
    println!(
        "mean over [{}, {}]: {:.1} ± {:.1} ({:.2} %), dim {}",
        scan.stable_range.0,
        scan.stable_range.1,
        scan.stable_mean,
        scan.stable_dispersion,
        100.0 * scan.relative_dispersion(),
        scan.dim
    );
    let dir = OutputDir::create("target/example-output/eta_scan")?;
    scan.write(&dir)?;
    Ok(())
}

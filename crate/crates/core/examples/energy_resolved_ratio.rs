//! Spacing ratio resolved in energy, with the density of states.
//!
//! cargo run --release --example energy_resolved_ratio -- [N realizations window]

use boson_chaos::experiments::run_ratio_energy;
use boson_chaos::output::OutputDir;
use boson_chaos::RunConfig;

fn main() -> boson_chaos::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let n = args.first().copied().unwrap_or(7);
    let r = args.get(1).copied().unwrap_or(40);
    let mut cfg = RunConfig::new(n as u32, n, 0.6).with_realizations(r);
    cfg.energy_window = args.get(2).copied();
    let res = run_ratio_energy(&cfg, None)?;
    println!(
        "{} levels per window, {} windows",
        res.window_levels,
        res.windows.len()
    );
    for w in &res.windows {
        println!(
            "  E/N = {:7.3}  r = {:.4}  ({} spacings)",
            w.energy_per_particle, w.mean_ratio, w.spacings
        );
    }
    let dir = OutputDir::create("target/example-output/energy_resolved_ratio")?;
    res.write(&dir)?;
    Ok(())
}

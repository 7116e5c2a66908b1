//! Crowding, diagonal energy and participation ratio of every Fock state.
//!
//! cargo run --release --example classify_states -- [N realizations]

use boson_chaos::classify::{crowding_values, extremes_per_cluster};
use boson_chaos::experiments::run_classify;
use boson_chaos::output::OutputDir;
use boson_chaos::stats::linear_fit;
use boson_chaos::RunConfig;

fn main() -> boson_chaos::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let n = args.first().copied().unwrap_or(7);
    let r = args.get(1).copied().unwrap_or(10);
    let cfg = RunConfig::new(n as u32, n, 0.6).with_realizations(r);
    let c = run_classify(&cfg, None)?;

    let mott = c.profiles.iter().filter(|p| p.crowding == 1.0).count();
    println!("dim {}, states with C = 1: {mott}", c.profiles.len());
    println!("crowding values: {:?}", crowding_values(&c.profiles));

    let x: Vec<f64> = c.profiles.iter().map(|p| p.crowding).collect();
    let y: Vec<f64> = c.profiles.iter().map(|p| p.energy_per_particle).collect();
    let fit = linear_fit(&x, &y);
    let u = cfg.params(0.6, 0.0).interaction;
    println!(
        "E/N vs C: slope {:.5} (U/2 = {:.5}), R² {:.5}",
        fit.slope,
        u / 2.0,
        fit.r_squared
    );

    println!("highest and lowest PR per crowding bin in [2, 3):");
    for (lo, hi, low) in extremes_per_cluster(&c.profiles, 2.0, 3.0, cfg.cluster_width)? {
        println!(
            "  C ≥ {lo:.2}: {} PR {:.0} | {} PR {:.0}",
            hi.state, hi.pr, low.state, low.pr
        );
    }
    let dir = OutputDir::create("target/example-output/classify_states")?;
    c.write(&dir)?;
    Ok(())
}

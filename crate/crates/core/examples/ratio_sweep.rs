//! Mean spacing ratio against disorder strength.
//!
//! cargo run --release --example ratio_sweep -- [N L realizations]

use boson_chaos::experiments::run_ratio_sweep;
use boson_chaos::output::OutputDir;
use boson_chaos::spectrum::{GOE_RATIO, POISSON_RATIO};
use boson_chaos::RunConfig;

fn main() -> boson_chaos::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let (n, l, r) = match args[..] {
        [n, l, r, ..] => (n as u32, l, r),
        _ => (7, 7, 10),
    };
    let mut cfg = RunConfig::new(n, l, 0.6).with_realizations(r);
    cfg.disorder = vec![0.2, 0.6, 1.0, 2.0, 4.0, 8.0];
    let sweep = run_ratio_sweep(&cfg, None)?;
    println!("N = {n}, L = {l}, {r} realizations (GOE {GOE_RATIO}, Poisson {POISSON_RATIO:.4})");
    for p in &sweep.points {
        println!(
            "  W = {:4.1}  r = {:.4} ± {:.4}",
            p.disorder, p.mean_ratio, p.stderr
        );
    }
    let dir = OutputDir::create("target/example-output/ratio_sweep")?;
    sweep.write(&dir)?;
    println!("written to {}", dir.path().display());
    Ok(())
}

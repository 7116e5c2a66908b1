//! States of one crowding cluster at evenly spaced PR: the correlation hole
//! deepens as PR grows.
//!
//! cargo run --release --example pr_sweep -- [N realizations count]

use boson_chaos::experiments::run_pr_sweep;
use boson_chaos::output::OutputDir;
use boson_chaos::RunConfig;

fn main() -> boson_chaos::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let n = args.first().copied().unwrap_or(7);
    let r = args.get(1).copied().unwrap_or(20);
    let count = args.get(2).copied().unwrap_or(5);
    let cfg = RunConfig::new(n as u32, n, 0.6).with_realizations(r);
    // C = 2.25 needs N divisible by 4 for Σn² = 2.25 N; fall back to the
    // most populated cluster otherwise
    let c = if n % 4 == 0 { 2.25 } else { 17.0 / n as f64 };
    let sweep = run_pr_sweep(&cfg, c, count, None)?;
    println!(
        "C = {c:.4}: {} states, PR from {:.0} to {:.0}",
        sweep.cluster_size, sweep.pr_range.0, sweep.pr_range.1
    );
    for a in &sweep.analyses {
        let d = a.hole.as_ref().map_or(f64::NAN, |h| h.depth_over_max);
        println!(
            "  {:>12}  PR {:7.1}  depth·eta {d:.3}",
            a.state.to_string(),
            a.pr
        );
    }
    println!("depth non-decreasing with PR: {}", sweep.depth_monotone);
    let dir = OutputDir::create("target/example-output/pr_sweep")?;
    sweep.write(&dir)?;
    Ok(())
}

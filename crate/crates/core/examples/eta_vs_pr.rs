//! η against PR for every Fock state.
//!
//! cargo run --release --example eta_vs_pr -- [N realizations]

use boson_chaos::experiments::run_eta_vs_pr;
use boson_chaos::output::OutputDir;
use boson_chaos::RunConfig;

fn main() -> boson_chaos::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let n = args.first().copied().unwrap_or(7);
    let r = args.get(1).copied().unwrap_or(10);
    let cfg = RunConfig::new(n as u32, n, 0.6).with_realizations(r);
    let res = run_eta_vs_pr(&cfg, None)?;
    let low: Vec<f64> = res
        .rows
        .iter()
        .filter(|x| x.pr < 400.0)
        .map(|x| x.eta / x.pr)
        .collect();
    if !low.is_empty() {
        println!(
            "PR < 400: mean eta/PR = {:.2} over {} states",
            boson_chaos::stats::mean(&low),
            low.len()
        );
    }
    let high: Vec<f64> = res
        .rows
        .iter()
        .filter(|x| x.pr > 800.0 && x.crowding <= 4.0)
        .map(|x| x.eta)
        .collect();
    if !high.is_empty() {
        let (lo, hi) = high
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |a, &v| {
                (a.0.min(v), a.1.max(v))
            });
        println!(
            "PR > 800, C ≤ 4: eta from {lo:.0} to {hi:.0} over {} states",
            high.len()
        );
    }
    let dir = OutputDir::create("target/example-output/eta_vs_pr")?;
    res.write(&dir)?;
    println!(
        "{} rows written to {}",
        res.rows.len(),
        dir.path().display()
    );
    Ok(())
}

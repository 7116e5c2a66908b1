//! Highest- and lowest-PR states in a crowding band: the hole appears for
//! delocalized states and fades for localized ones.
//!
//! cargo run --release --example correlation_hole -- [N realizations k]

use boson_chaos::experiments::{run_survival_selected, StateSelector};
use boson_chaos::output::OutputDir;
use boson_chaos::RunConfig;

fn main() -> boson_chaos::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let n = args.first().copied().unwrap_or(7);
    let r = args.get(1).copied().unwrap_or(40);
    let k = args.get(2).copied().unwrap_or(3);
    let cfg = RunConfig::new(n as u32, n, 0.6).with_realizations(r);
    let run = run_survival_selected(
        &cfg,
        &StateSelector::Extremes {
            lo: 2.0,
            hi: 3.0,
            k,
        },
        None,
    )?;
    for a in &run.analyses {
        let hole = a.hole.as_ref().map_or("n/a".to_string(), |h| {
            format!("{:.3} ({})", h.depth_over_max, h.present)
        });
        let alpha = a.power_law.as_ref().map_or(f64::NAN, |p| p.exponent);
        let ramp = a.ramp_deviation().unwrap_or(f64::NAN);
        println!(
            "{:>12}  C {:.3}  PR {:7.1}  eta {:7.1}  depth·eta {hole}  exponent {alpha:.3}  ramp dev {ramp:.3}",
            a.state.to_string(), a.crowding, a.pr, a.eta
        );
    }
    let dir = OutputDir::create("target/example-output/correlation_hole")?;
    run.write(&dir)?;
    Ok(())
}

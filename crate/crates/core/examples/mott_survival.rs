//! Survival probability of the Mott state: Gaussian decay, correlation hole
//! and saturation, with the random-matrix overlay.
//!
//! cargo run --release --example mott_survival -- [N realizations]

use boson_chaos::experiments::run_survival;
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
    let mott = FockState::mott(n);
    let a = run_survival(&cfg, std::slice::from_ref(&mott), None)?.remove(0);

    println!(
        "{}: PR {:.1}, IPR {:.4e}, eta {:.1} (pooled {:.1})",
        a.state, a.pr, a.asymptote, a.eta, a.eta_pooled
    );
    println!(
        "LDoS centre {:.4}, sigma {:.4}; mean level density {:.2}; t_H {:.1}",
        a.ldos_fit.center, a.ldos_fit.sigma, a.nu_bar, a.heisenberg_time
    );
    match &a.hole {
        Some(h) => println!(
            "hole: depth·eta {:.3} at t = {:.1}, present {}",
            h.depth_over_max, h.t_min, h.present
        ),
        None => println!("hole: {}", a.hole_error.as_deref().unwrap_or("?")),
    }
    if let Some(p) = &a.power_law {
        println!(
            "power law exponent {:.3} on [{:.2}, {:.2}]",
            p.exponent, p.t_range.0, p.t_range.1
        );
    }
    let dir = OutputDir::create("target/example-output/mott_survival")?;
    boson_chaos::experiments::write_survival(&dir, &cfg, &a)?;
    println!("written to {}", dir.path().display());
    Ok(())
}

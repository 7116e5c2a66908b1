//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any fails.
//!
//! Runs the full-size η reproduction (N = L = 8, 40 dense solves at
//! dim 6435), which dominates the runtime.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use boson_chaos::basis::{BasisTable, FockState};
use boson_chaos::dynamics::{self, b2, TimeGrid};
use boson_chaos::experiments::{
    delta_e_values, run_classify, run_eta_scan, run_ratio_energy, run_ratio_sweep,
    run_survival_selected, StateSelector,
};
use boson_chaos::hamiltonian::{assemble, ModelParams};
use boson_chaos::spectrum::{
    dense_eigenvalues, diagonalize, trimmed_ratios, GOE_RATIO, POISSON_RATIO,
};
use boson_chaos::stats::{self, linear_fit};
use boson_chaos::RunConfig;

// ratio limits of synthetic surrogates
const SURROGATE_TOL: f64 = 0.02;
const MIN_POOLED_SPACINGS: usize = 10_000;
// disorder sweep at N = L = 7
const CHAOTIC_BAND: (f64, f64) = (0.51, 0.55);
const POISSON_BAND: (f64, f64) = (0.37, 0.41);
// energy-resolved ratio
const CHAOTIC_WINDOW: (f64, f64) = (-0.2, 0.8);
const CHAOTIC_MIN_R: f64 = 0.50;
const EDGE_E_PER_N: f64 = 1.5;
const EDGE_MAX_R: f64 = 0.43;
// the top of the N=7 spectrum holds only a few dozen levels per realization
const EDGE_WINDOW_LEVELS: usize = 24;
// classification
const SLOPE_REL_TOL: f64 = 0.05;
// survival oracle
const SP_ORACLE_TOL: f64 = 1e-8;
const SP_ZERO_TOL: f64 = 1e-12;
const IPR_REL_TOL: f64 = 0.05;
// effective dimension
const ETA_TARGET: f64 = 3960.0;
const ETA_REL_TOL: f64 = 0.05;
const ETA_MAX_DISPERSION: f64 = 0.02;
// correlation hole
const HOLE_FRACTION: f64 = 0.3;
const RAMP_REL_TOL: f64 = 0.20;
const EXPONENT_BAND: (f64, f64) = (0.35, 0.65);
// form factor
const B2_CONTINUITY_TOL: f64 = 1e-12;
const B2_AT_100: f64 = 2e-5;

const REALIZATIONS: usize = 40;
const W_CHAOTIC: f64 = 0.6;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ratio_limits() -> Outcome {
    // GOE: central half of 200×200 spectra; 120 matrices give > 10⁴ ratios
    let mut runner = TestRunner::new(Config {
        cases: 3,
        failure_persistence: None,
        ..Config::default()
    });
    let worst = std::cell::Cell::new((0.0f64, 0.0f64));
    let result = runner.run(&any::<u64>(), |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 200;
        let mut goe = Vec::new();
        while goe.len() < MIN_POOLED_SPACINGS {
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let x: f64 = StandardNormal.sample(&mut rng);
                    let v = if i == j { x } else { x / 2f64.sqrt() };
                    a[i * n + j] = v;
                    a[j * n + i] = v;
                }
            }
            let e = dense_eigenvalues(n, &a).unwrap();
            goe.extend(trimmed_ratios(&e, 0.25).unwrap().ratios);
        }
        let mut level = 0.0;
        let poisson: Vec<f64> = (0..MIN_POOLED_SPACINGS + 2)
            .map(|_| {
                let s: f64 = Exp1.sample(&mut rng);
                level += s;
                level
            })
            .collect();
        let p = trimmed_ratios(&poisson, 0.0).unwrap().mean();
        let g = stats::mean(&goe);
        let (wg, wp) = worst.get();
        worst.set((
            wg.max((g - GOE_RATIO).abs()),
            wp.max((p - POISSON_RATIO).abs()),
        ));
        prop_assert!((g - GOE_RATIO).abs() < SURROGATE_TOL, "GOE {}", g);
        prop_assert!((p - POISSON_RATIO).abs() < SURROGATE_TOL, "Poisson {}", p);
        Ok(())
    });
    let worst = worst.get();
    check(
        result.is_ok(),
        format!(
            "max |r - {GOE_RATIO}| = {:.4} (GOE), max |r - {POISSON_RATIO:.4}| = {:.4} (Poisson)",
            worst.0, worst.1
        ),
    )
}

fn disorder_sweep() -> Outcome {
    let mut cfg = RunConfig::new(7, 7, W_CHAOTIC).with_realizations(REALIZATIONS);
    cfg.disorder = vec![W_CHAOTIC, 4.0];
    let s = run_ratio_sweep(&cfg, None).map_err(|e| e.to_string())?;
    let (a, b) = (&s.points[0], &s.points[1]);
    check(
        (CHAOTIC_BAND.0..=CHAOTIC_BAND.1).contains(&a.mean_ratio)
            && (POISSON_BAND.0..=POISSON_BAND.1).contains(&b.mean_ratio),
        format!(
            "r(W=0.6) = {:.4} ± {:.4}, r(W=4) = {:.4} ± {:.4}",
            a.mean_ratio, a.stderr, b.mean_ratio, b.stderr
        ),
    )
}

fn energy_resolved() -> Outcome {
    let mut cfg = RunConfig::new(7, 7, W_CHAOTIC).with_realizations(REALIZATIONS);
    cfg.energy_window = Some(EDGE_WINDOW_LEVELS);
    let res = run_ratio_energy(&cfg, None).map_err(|e| e.to_string())?;
    let inside: Vec<_> = res
        .windows
        .iter()
        .filter(|w| (CHAOTIC_WINDOW.0..=CHAOTIC_WINDOW.1).contains(&w.energy_per_particle))
        .collect();
    let edge: Vec<_> = res
        .windows
        .iter()
        .filter(|w| w.energy_per_particle >= EDGE_E_PER_N)
        .collect();
    let min_in = inside
        .iter()
        .map(|w| w.mean_ratio)
        .fold(f64::INFINITY, f64::min);
    let max_edge = edge
        .iter()
        .map(|w| w.mean_ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    check(
        !inside.is_empty() && !edge.is_empty() && min_in >= CHAOTIC_MIN_R && max_edge <= EDGE_MAX_R,
        format!(
            "{} windows of {} levels; min r = {min_in:.4} over {} windows in [{}, {}], max r = {max_edge:.4} over {} windows at E/N ≥ {EDGE_E_PER_N}",
            res.windows.len(), res.window_levels, inside.len(), CHAOTIC_WINDOW.0, CHAOTIC_WINDOW.1, edge.len()
        ),
    )
}

fn classification() -> Outcome {
    let cfg = RunConfig::new(7, 7, W_CHAOTIC).with_realizations(REALIZATIONS);
    let c = run_classify(&cfg, None).map_err(|e| e.to_string())?;
    let mott: Vec<_> = c.profiles.iter().filter(|p| p.crowding == 1.0).collect();
    let x: Vec<f64> = c.profiles.iter().map(|p| p.crowding).collect();
    let y: Vec<f64> = c.profiles.iter().map(|p| p.energy_per_particle).collect();
    let slope = linear_fit(&x, &y).slope;
    let u_half = cfg.params(W_CHAOTIC, 0.0).interaction / 2.0;
    let columns = boson_chaos::classify::crowding_values(&c.profiles).len();
    check(
        mott.len() == 1 && mott[0].state == FockState::mott(7) && (slope / u_half - 1.0).abs() < SLOPE_REL_TOL,
        format!("{} state(s) with C = 1; slope {slope:.5} vs U/2 = {u_half:.5}; {columns} discrete C values", mott.len()),
    )
}

/// `exp(−iHt)` by scaling and squaring a Taylor series, in split complex form.
fn propagator(h: &[f64], n: usize, t: f64) -> (Vec<f64>, Vec<f64>) {
    let norm = (0..n)
        .map(|i| (0..n).map(|j| h[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
        * t;
    let s = if norm > 2.0 {
        (norm / 2.0).log2().ceil() as i32
    } else {
        0
    };
    let tau = t / 2f64.powi(s);
    let matmul = |a: &[f64], b: &[f64]| {
        let mut c = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let x = a[i * n + k];
                for j in 0..n {
                    c[i * n + j] += x * b[k * n + j];
                }
            }
        }
        c
    };
    let ht: Vec<f64> = h.iter().map(|v| v * tau).collect();
    let mut re = vec![0.0; n * n];
    let mut im = vec![0.0; n * n];
    let mut term = vec![0.0; n * n];
    for i in 0..n {
        term[i * n + i] = 1.0;
    }
    for k in 0..40 {
        // (−i)^k cycles through 1, −i, −1, i
        let (target, sign) = match k % 4 {
            0 => (&mut re, 1.0),
            1 => (&mut im, -1.0),
            2 => (&mut re, -1.0),
            _ => (&mut im, 1.0),
        };
        for (t, v) in target.iter_mut().zip(&term) {
            *t += sign * v;
        }
        term = matmul(&term, &ht)
            .into_iter()
            .map(|v| v / (k + 1) as f64)
            .collect();
    }
    for _ in 0..s {
        let rr = matmul(&re, &re);
        let ii = matmul(&im, &im);
        let ri = matmul(&re, &im);
        let ir = matmul(&im, &re);
        re = rr.iter().zip(&ii).map(|(a, b)| a - b).collect();
        im = ri.iter().zip(&ir).map(|(a, b)| a + b).collect();
    }
    (re, im)
}

fn survival_oracle() -> Outcome {
    let table = BasisTable::build(3, 3).unwrap();
    let phase = boson_chaos::ensemble::phase_for(1, 0);
    let params = ModelParams::standard(3, 3, W_CHAOTIC).with_phase(phase);
    let h = assemble(&params, &table).unwrap();
    let n = h.dim();
    let dense: Vec<f64> = h.to_dense().concat();
    let d = diagonalize(&h).unwrap();
    let grid = TimeGrid::standard();
    let mut worst = 0.0f64;
    let mut at_zero = 0.0f64;
    let mut ipr_dev = 0.0f64;
    for k in 0..n {
        let w: Vec<f64> = d.components(k).iter().map(|c| c * c).collect();
        let sp = dynamics::survival_probability(&w, d.eigenvalues(), grid.points());
        for (t, v) in grid.points().iter().zip(&sp) {
            let (re, im) = propagator(&dense, n, *t);
            let direct = re[k * n + k].powi(2) + im[k * n + k].powi(2);
            worst = worst.max((direct - v).abs());
        }
        at_zero = at_zero
            .max((dynamics::survival_probability(&w, d.eigenvalues(), &[0.0])[0] - 1.0).abs());
        // long-time mean from dense uniform sampling of [10⁵, 10⁶]
        let late: Vec<f64> = (0..20_000)
            .map(|i| 1e5 + 9e5 * (i as f64 + 0.5) / 20_000.0)
            .collect();
        let mean = stats::mean(&dynamics::survival_probability(&w, d.eigenvalues(), &late));
        let ipr: f64 = w.iter().map(|x| x * x).sum();
        ipr_dev = ipr_dev.max((mean / ipr - 1.0).abs());
    }
    check(
        worst < SP_ORACLE_TOL && at_zero < SP_ZERO_TOL && ipr_dev < IPR_REL_TOL,
        format!("max |SP_eig - SP_direct| = {worst:.2e}, |SP(0) - 1| = {at_zero:.1e}, long-time mean vs IPR {:.2} %", 100.0 * ipr_dev),
    )
}

fn eta_full() -> Outcome {
    let cfg = RunConfig::new(8, 8, W_CHAOTIC).with_realizations(REALIZATIONS);
    let scan = run_eta_scan(
        &cfg,
        &FockState::mott(8),
        &delta_e_values(0.3, 1.8, 0.1).unwrap(),
        None,
    )
    .map_err(|e| e.to_string())?;
    let rel = scan.relative_dispersion();
    check(
        (scan.stable_mean / ETA_TARGET - 1.0).abs() < ETA_REL_TOL && rel < ETA_MAX_DISPERSION,
        format!(
            "eta = {:.1} ± {:.1} ({:.2} %) vs {ETA_TARGET}; Mott PR/dim = {:.3}",
            scan.stable_mean,
            scan.stable_dispersion,
            100.0 * rel,
            scan.pr / scan.dim as f64
        ),
    )
}

fn eta_smoke() -> Outcome {
    let cfg = RunConfig::new(7, 7, W_CHAOTIC).with_realizations(REALIZATIONS);
    let scan = run_eta_scan(
        &cfg,
        &FockState::mott(7),
        &delta_e_values(0.3, 1.8, 0.1).unwrap(),
        None,
    )
    .map_err(|e| e.to_string())?;
    let in_range = scan
        .rows
        .iter()
        .all(|r| r.eta > 1.0 && r.eta <= scan.dim as f64);
    check(
        in_range && scan.relative_dispersion() < ETA_MAX_DISPERSION,
        format!(
            "N = 7: eta = {:.1} ± {:.1} ({:.2} %), dim {}",
            scan.stable_mean,
            scan.stable_dispersion,
            100.0 * scan.relative_dispersion(),
            scan.dim
        ),
    )
}

fn correlation_hole() -> Outcome {
    let cfg = RunConfig::new(7, 7, W_CHAOTIC).with_realizations(REALIZATIONS);
    let run = run_survival_selected(
        &cfg,
        &StateSelector::Extremes {
            lo: 2.0,
            hi: 3.0,
            k: 3,
        },
        None,
    )
    .map_err(|e| e.to_string())?;
    let top = &run.analyses[0];
    let bottom = &run.analyses[3];
    let top_hole = top
        .hole
        .as_ref()
        .ok_or_else(|| format!("top state: {:?}", top.hole_error))?;
    let ramp = top.ramp_deviation().unwrap_or(f64::INFINITY);
    let bottom_depth = bottom.hole.as_ref().map(|h| h.depth_over_max);
    let alpha = bottom.power_law.as_ref().map_or(f64::NAN, |p| p.exponent);
    let top_ok = top_hole.depth_over_max > HOLE_FRACTION && ramp < RAMP_REL_TOL;
    let bottom_ok = bottom_depth.is_none_or(|d| d < HOLE_FRACTION)
        && (EXPONENT_BAND.0..=EXPONENT_BAND.1).contains(&alpha);
    check(
        top_ok && bottom_ok,
        format!(
            "top {} (PR {:.0}): depth·eta {:.3}, ramp deviation {:.1} %; bottom {} (PR {:.0}): depth·eta {}, exponent {alpha:.3}",
            top.state,
            top.pr,
            top_hole.depth_over_max,
            100.0 * ramp,
            bottom.state,
            bottom.pr,
            bottom_depth.map_or("n/a".into(), |d| format!("{d:.3}")),
        ),
    )
}

fn form_factor() -> Outcome {
    let lower = 1.0 - 2.0 + 3f64.ln();
    let upper = 3f64.ln() - 1.0;
    let at1 = b2(1.0);
    let above = b2(1.0 + 1e-13);
    check(
        b2(0.0) == 1.0
            && (at1 - upper).abs() < B2_CONTINUITY_TOL
            && (lower - upper).abs() < B2_CONTINUITY_TOL
            && (above - upper).abs() < B2_CONTINUITY_TOL
            && b2(100.0) < B2_AT_100,
        format!(
            "b2(0) = {}, b2(1) = {at1:.15}, b2(1+) = {above:.15}, b2(100) = {:.3e}",
            b2(0.0),
            b2(100.0)
        ),
    )
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 7] = [
        &["ratio-sweep", "--n", "5", "--l", "5", "--w", "0.6,4"],
        &["ratio-energy", "--n", "5", "--l", "5", "--window", "20"],
        &["classify", "--n", "5", "--l", "5"],
        &[
            "survival",
            "--n",
            "5",
            "--l",
            "5",
            "--state",
            "1,1,1,1,1",
            "--tmax",
            "1e4",
        ],
        &[
            "pr-sweep", "--n", "5", "--l", "5", "--c", "1.8", "--count", "4", "--tmax", "1e4",
        ],
        &["eta-scan", "--n", "5", "--l", "5"],
        &["eta-pr", "--n", "5", "--l", "5"],
    ];
    let tmp = tempfile::tempdir().unwrap();
    let mut compared = 0;
    for args in runs {
        let mut outputs = Vec::new();
        for threads in ["1", "3"] {
            let out = tmp.path().join(format!("{}-{threads}", args[0]));
            let status = Command::new(env!("CARGO_BIN_EXE_boson-chaos"))
                .args(args)
                .args([
                    "--realizations",
                    "6",
                    "--seed",
                    "77",
                    "--threads",
                    threads,
                    "--out",
                ])
                .arg(&out)
                .output()
                .unwrap();
            if !status.status.success() {
                return Err(format!(
                    "{} failed: {}",
                    args[0],
                    String::from_utf8_lossy(&status.stderr)
                ));
            }
            outputs.push(files(&out));
        }
        if outputs[0] != outputs[1] {
            return Err(format!(
                "{}: outputs differ between 1 and 3 workers",
                args[0]
            ));
        }
        compared += outputs[0].len();
    }
    Ok(format!(
        "7 subcommands, {compared} files byte-identical across 1 and 3 workers"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("GOE/Poisson ratio limits of surrogates", ratio_limits),
        ("disorder sweep N=L=7", disorder_sweep),
        ("energy-resolved chaos window N=L=7", energy_resolved),
        ("classification by crowding", classification),
        (
            "survival probability vs direct propagation",
            survival_oracle,
        ),
        ("eta smoke variant N=L=7", eta_smoke),
        ("correlation hole for PR extremes", correlation_hole),
        ("form factor unit properties", form_factor),
        ("determinism across worker counts", determinism),
        ("eta of the Mott state N=L=8", eta_full),
    ];
    // optional substring filters, e.g. `cargo test --test acceptance -- hole`
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let selected: Vec<_> = criteria
        .into_iter()
        .filter(|(name, _)| filters.is_empty() || filters.iter().any(|f| name.contains(f.as_str())))
        .collect();
    let mut failed = 0;
    for &(name, f) in &selected {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS  {name}: {d} [{secs:.0} s]"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name}: {d} [{secs:.0} s]");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        selected.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use boson_chaos::config::{EtaAveraging, RunConfig};
use boson_chaos::experiments::{self, StateSelector};
use boson_chaos::output::OutputDir;
use boson_chaos::{Error, FockState, Result};

#[derive(Parser)]
#[command(
    name = "boson-chaos",
    version,
    about = "Chaos diagnostics for interacting bosons in an Aubry-André chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean spacing ratio against disorder strength.
    RatioSweep(Common),
    /// Spacing ratio resolved in energy, plus the density of states.
    RatioEnergy(Common),
    /// Crowding, diagonal energy and PR of every Fock state.
    Classify(Common),
    /// Survival probability of given states, or of PR extremes in a crowding band.
    Survival {
        #[command(flatten)]
        common: Common,
        /// Initial state as comma-separated occupations; repeat for several.
        #[arg(long)]
        state: Vec<FockState>,
        /// Crowding band `lo,hi` for extreme-PR selection.
        #[arg(long, value_parser = parse_pair)]
        c_range: Option<(f64, f64)>,
        /// States taken from each end of the PR ranking.
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Survival of states at evenly spaced PR within one crowding cluster.
    PrSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Effective dimension η of a state against the bin width.
    EtaScan {
        #[command(flatten)]
        common: Common,
        /// Defaults to the Mott state.
        #[arg(long)]
        state: Option<FockState>,
        /// `lo,hi,step` of the bin widths.
        #[arg(long, value_parser = parse_triple, default_value = "0.2,1.8,0.1")]
        de_range: (f64, f64, f64),
    },
    /// η against PR for every Fock state.
    EtaPr(Common),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    l: usize,
    /// Disorder strength(s), comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "0.6")]
    w: Vec<f64>,
    #[arg(long, default_value_t = boson_chaos::config::DEFAULT_REALIZATIONS)]
    realizations: usize,
    #[arg(long, default_value_t = boson_chaos::config::DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    delta_e: Option<f64>,
    #[arg(long)]
    trim: Option<f64>,
    /// Levels per energy window (ratio-energy) or rolling-average points (survival).
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    tmin: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    ppd: Option<usize>,
    /// Bins of the DOS histogram.
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    hopping: Option<f64>,
    #[arg(long)]
    interaction: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_enum)]
    eta_averaging: Option<EtaMode>,
    /// Power-law fit interval `lo,hi`; chosen from the curve when absent.
    #[arg(long, value_parser = parse_pair)]
    fit_range: Option<(f64, f64)>,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory (default `out/<subcommand>`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum EtaMode {
    PerRealization,
    Pooled,
}

fn parse_floats(s: &str, n: usize) -> std::result::Result<Vec<f64>, String> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers"));
    }
    Ok(v)
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    parse_floats(s, 2).map(|v| (v[0], v[1]))
}

fn parse_triple(s: &str) -> std::result::Result<(f64, f64, f64), String> {
    parse_floats(s, 3).map(|v| (v[0], v[1], v[2]))
}

/// The options that make up the run config, with survival's meaning of `--window`.
fn config(c: &Common, window_is_levels: bool) -> RunConfig {
    let mut cfg = RunConfig::new(c.n, c.l, 0.0)
        .with_realizations(c.realizations)
        .with_seed(c.seed);
    cfg.disorder = c.w.clone();
    cfg.hopping = c.hopping;
    cfg.interaction = c.interaction;
    cfg.beta = c.beta;
    cfg.fit_range = c.fit_range;
    if let Some(v) = c.delta_e {
        cfg.delta_e = v;
    }
    if let Some(v) = c.trim {
        cfg.trim = v;
    }
    if let Some(v) = c.tmin {
        cfg.t_min = v;
    }
    if let Some(v) = c.tmax {
        cfg.t_max = v;
    }
    if let Some(v) = c.ppd {
        cfg.points_per_decade = v;
    }
    if let Some(v) = c.bins {
        cfg.dos_bins = v;
    }
    if let Some(m) = c.eta_averaging {
        cfg.eta_averaging = match m {
            EtaMode::PerRealization => EtaAveraging::PerRealization,
            EtaMode::Pooled => EtaAveraging::Pooled,
        };
    }
    match (c.window, window_is_levels) {
        (Some(w), true) => cfg.energy_window = Some(w),
        (Some(w), false) => cfg.rolling_window = w,
        (None, _) => {}
    }
    cfg
}

fn out_dir(c: &Common, name: &str) -> Result<OutputDir> {
    OutputDir::create(
        c.out
            .clone()
            .unwrap_or_else(|| PathBuf::from("out").join(name)),
    )
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    match cli.command {
        Command::RatioSweep(c) => {
            let res = experiments::run_ratio_sweep(&config(&c, true), c.threads)?;
            for p in &res.points {
                eprintln!(
                    "W = {}: r = {:.4} ± {:.4}",
                    p.disorder, p.mean_ratio, p.stderr
                );
            }
            res.write(&out_dir(&c, "ratio-sweep")?)
        }
        Command::RatioEnergy(c) => experiments::run_ratio_energy(&config(&c, true), c.threads)?
            .write(&out_dir(&c, "ratio-energy")?),
        Command::Classify(c) => experiments::run_classify(&config(&c, true), c.threads)?
            .write(&out_dir(&c, "classify")?),
        Command::Survival {
            common: c,
            state,
            c_range,
            k,
        } => {
            let selector = match (state.is_empty(), c_range) {
                (false, None) => StateSelector::Explicit(state),
                (true, Some((lo, hi))) => StateSelector::Extremes { lo, hi, k },
                (true, None) => return Err(Error::Config("give --state or --c-range".into())),
                (false, Some(_)) => {
                    return Err(Error::Config("--state and --c-range are exclusive".into()))
                }
            };
            let res = experiments::run_survival_selected(&config(&c, false), &selector, c.threads)?;
            for a in &res.analyses {
                eprintln!("{}: PR {:.1}, eta {:.1}", a.state, a.pr, a.eta);
            }
            res.write(&out_dir(&c, "survival")?)
        }
        Command::PrSweep {
            common: c,
            c: crowding,
            count,
        } => experiments::run_pr_sweep(&config(&c, false), crowding, count, c.threads)?
            .write(&out_dir(&c, "pr-sweep")?),
        Command::EtaScan {
            common: c,
            state,
            de_range,
        } => {
            let state = state.unwrap_or_else(|| FockState::mott(c.l));
            let des = experiments::delta_e_values(de_range.0, de_range.1, de_range.2)?;
            let res = experiments::run_eta_scan(&config(&c, false), &state, &des, c.threads)?;
            eprintln!(
                "eta = {:.1} ± {:.1} over [{}, {}]",
                res.stable_mean, res.stable_dispersion, res.stable_range.0, res.stable_range.1
            );
            res.write(&out_dir(&c, "eta-scan")?)
        }
        Command::EtaPr(c) => experiments::run_eta_vs_pr(&config(&c, false), c.threads)?
            .write(&out_dir(&c, "eta-pr")?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! End-to-end experiments over a disorder ensemble, and their output files.
//!
//! Every experiment takes a [`RunConfig`] and a worker count. The worker
//! count only changes wall time: realizations are collected in index order
//! and reduced with fixed pairwise trees.

use std::path::PathBuf;

use serde::Serialize;

use crate::basis::{BasisTable, FockState};
use crate::classify::{self, StateProfile, StateSample};
use crate::config::{EtaAveraging, RunConfig};
use crate::dynamics::{
    self, AnalyticInputs, EnergyBins, GaussianLdosFit, HoleReport, LdosHistogram, LongTimeAverage,
    PowerLawFit, RevivalPeak,
};
use crate::ensemble::{self, Realization};
use crate::error::{Error, Result};
use crate::hamiltonian::assemble;
use crate::output::{Cell, OutputDir, Table, SCHEMA_VERSION};
use crate::spectrum::{self, DensityHistogram, EnergyWindow};
use crate::stats;

/// Linear time grid used for the single-realization revival trace.
const REVIVAL_DT: f64 = 0.1;
const REVIVAL_POINTS: usize = 2001;
/// Sub-range of `Δ𝓔` over which η is averaged in a scan.
pub const ETA_STABLE_RANGE: (f64, f64) = (0.3, 1.8);

struct Context {
    cfg: RunConfig,
    table: BasisTable,
    list: Vec<Realization>,
    workers: usize,
}

impl Context {
    fn new(cfg: &RunConfig, threads: Option<usize>) -> Result<Self> {
        cfg.validate()?;
        let table = BasisTable::build_with_cap(cfg.particles, cfg.sites, cfg.dim_cap)
            .map_err(|e| Error::config(e.to_string()))?;
        let list = ensemble::realizations(cfg.seed, cfg.realizations)?;
        let workers = ensemble::worker_count(threads, list.len(), table.dim(), cfg.memory_budget);
        Ok(Context {
            cfg: cfg.clone(),
            table,
            list,
            workers,
        })
    }

    fn run<T: Send>(&self, task: impl Fn(&Realization) -> Result<T> + Sync) -> Result<Vec<T>> {
        ensemble::run_realizations(self.cfg.seed, &self.list, self.workers, task)
    }

    fn phases(&self) -> Vec<f64> {
        self.list.iter().map(|r| r.phase).collect()
    }

    fn disorder(&self) -> Result<f64> {
        self.cfg.single_disorder()
    }
}

#[derive(Serialize)]
struct Snapshot<'a, T: Serialize> {
    schema_version: u32,
    code_version: &'static str,
    experiment: &'a str,
    config: &'a RunConfig,
    phases: &'a [f64],
    summary: T,
}

fn write_config<T: Serialize>(
    dir: &OutputDir,
    experiment: &str,
    config: &RunConfig,
    phases: &[f64],
    summary: T,
) -> Result<PathBuf> {
    dir.write_json(
        "config.json",
        &Snapshot {
            schema_version: SCHEMA_VERSION,
            code_version: env!("CARGO_PKG_VERSION"),
            experiment,
            config,
            phases,
            summary,
        },
    )
}

fn refuse_clean_limit(ws: &[f64]) -> Result<()> {
    if ws.contains(&0.0) {
        return Err(Error::config(
            "W = 0 is refused: the clean Bose-Hubbard chain has invariant subspaces whose \
             level statistics must be analysed sector by sector",
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------- ratios

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioPoint {
    pub disorder: f64,
    pub mean_ratio: f64,
    pub stderr: f64,
    pub degenerate: usize,
    pub per_realization: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioSweep {
    pub config: RunConfig,
    pub phases: Vec<f64>,
    pub points: Vec<RatioPoint>,
}

/// Trimmed mean spacing ratio ± standard error for every disorder strength.
pub fn run_ratio_sweep(cfg: &RunConfig, threads: Option<usize>) -> Result<RatioSweep> {
    refuse_clean_limit(&cfg.disorder)?;
    let ctx = Context::new(cfg, threads)?;
    let mut points = Vec::new();
    for &w in &cfg.disorder {
        let per = ctx.run(|r| {
            let h = assemble(&cfg.params(w, r.phase), &ctx.table)?;
            let levels = spectrum::eigenvalues(&h)?;
            let series = spectrum::trimmed_ratios(&levels, cfg.trim)?;
            Ok((series.mean(), series.degenerate))
        })?;
        let means: Vec<f64> = per.iter().map(|p| p.0).collect();
        points.push(RatioPoint {
            disorder: w,
            mean_ratio: stats::mean(&means),
            stderr: stats::std_err(&means),
            degenerate: per.iter().map(|p| p.1).sum(),
            per_realization: means,
        });
    }
    Ok(RatioSweep {
        config: cfg.clone(),
        phases: ctx.phases(),
        points,
    })
}

impl RatioSweep {
    pub fn write(&self, dir: &OutputDir) -> Result<Vec<PathBuf>> {
        let mut t = Table::new(&["W", "mean_r", "stderr", "degenerate_spacings"]);
        for p in &self.points {
            t.push(vec![
                p.disorder.into(),
                p.mean_ratio.into(),
                p.stderr.into(),
                p.degenerate.into(),
            ]);
        }
        Ok(vec![
            dir.write_table("ratios_vs_W.csv", &t)?,
            write_config(dir, "ratio-sweep", &self.config, &self.phases, &self.points)?,
        ])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioEnergy {
    pub config: RunConfig,
    pub phases: Vec<f64>,
    pub window_levels: usize,
    pub windows: Vec<EnergyWindow>,
    pub dos: DensityHistogram,
    pub degenerate: usize,
}

/// Energy-resolved spacing ratio and the pooled DOS histogram.
pub fn run_ratio_energy(cfg: &RunConfig, threads: Option<usize>) -> Result<RatioEnergy> {
    refuse_clean_limit(&cfg.disorder)?;
    let ctx = Context::new(cfg, threads)?;
    let w = ctx.disorder()?;
    let spectra =
        ctx.run(|r| spectrum::eigenvalues(&assemble(&cfg.params(w, r.phase), &ctx.table)?))?;
    let window_levels = cfg
        .energy_window
        .unwrap_or_else(|| spectrum::default_energy_window(ctx.table.dim()));
    let windows = spectrum::ratio_vs_energy(&spectra, cfg.particles, window_levels)?;
    let dos = spectrum::dos_histogram(&spectra, cfg.particles, cfg.dos_bins)?;
    let degenerate = spectra
        .iter()
        .map(|s| spectrum::spacing_ratios(s).map(|r| r.degenerate))
        .sum::<Result<usize>>()?;
    Ok(RatioEnergy {
        config: cfg.clone(),
        phases: ctx.phases(),
        window_levels,
        windows,
        dos,
        degenerate,
    })
}

impl RatioEnergy {
    pub fn write(&self, dir: &OutputDir) -> Result<Vec<PathBuf>> {
        let mut t = Table::new(&["E_per_N", "mean_r", "spacings"]);
        for w in &self.windows {
            t.push(vec![
                w.energy_per_particle.into(),
                w.mean_ratio.into(),
                w.spacings.into(),
            ]);
        }
        let mut d = Table::new(&["E_per_N", "density"]);
        for (c, v) in self.dos.centers.iter().zip(&self.dos.density) {
            d.push(vec![(*c).into(), (*v).into()]);
        }
        #[derive(Serialize)]
        struct Summary {
            window_levels: usize,
            degenerate_spacings: usize,
        }
        Ok(vec![
            dir.write_table("ratio_vs_energy.csv", &t)?,
            dir.write_table("dos.csv", &d)?,
            write_config(
                dir,
                "ratio-energy",
                &self.config,
                &self.phases,
                Summary {
                    window_levels: self.window_levels,
                    degenerate_spacings: self.degenerate,
                },
            )?,
        ])
    }
}

// -------------------------------------------------------- classification

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub config: RunConfig,
    pub phases: Vec<f64>,
    pub profiles: Vec<StateProfile>,
}

pub fn run_classify(cfg: &RunConfig, threads: Option<usize>) -> Result<Classification> {
    let ctx = Context::new(cfg, threads)?;
    let profiles = classify_in(&ctx)?;
    Ok(Classification {
        config: cfg.clone(),
        phases: ctx.phases(),
        profiles,
    })
}

fn classify_in(ctx: &Context) -> Result<Vec<StateProfile>> {
    let w = ctx.disorder()?;
    let samples = ctx.run(|r| {
        let params = ctx.cfg.params(w, r.phase);
        let decomp = spectrum::diagonalize(&assemble(&params, &ctx.table)?)?;
        StateSample::measure(&ctx.table, &params, &decomp)
    })?;
    classify::classify_all(&ctx.table, &samples)
}

fn profiles_table(profiles: &[StateProfile]) -> Table {
    let mut t = Table::new(&[
        "state",
        "rank",
        "C",
        "E_per_N",
        "E_per_N_stderr",
        "PR",
        "PR_over_dim",
        "PR_from_mean_IPR",
    ]);
    for p in profiles {
        t.push(vec![
            p.state.label().into(),
            p.rank.into(),
            p.crowding.into(),
            p.energy_per_particle.into(),
            p.energy_stderr.into(),
            p.pr.into(),
            p.pr_over_dim().into(),
            p.pr_from_mean_ipr.into(),
        ]);
    }
    t
}

impl Classification {
    pub fn write(&self, dir: &OutputDir) -> Result<Vec<PathBuf>> {
        #[derive(Serialize)]
        struct Summary {
            dim: usize,
            crowding_values: Vec<f64>,
        }
        Ok(vec![
            dir.write_table("profiles.csv", &profiles_table(&self.profiles))?,
            write_config(
                dir,
                "classify",
                &self.config,
                &self.phases,
                Summary {
                    dim: self.profiles.len(),
                    crowding_values: classify::crowding_values(&self.profiles),
                },
            )?,
        ])
    }

    pub fn select_extremes(&self, lo: f64, hi: f64, k: usize) -> Result<classify::Extremes> {
        classify::select_extremes(&self.profiles, lo, hi, k)
    }
}

// --------------------------------------------------------------- survival

struct StateRun {
    sp: Vec<f64>,
    lta: LongTimeAverage,
    ldos: LdosHistogram,
    eta: f64,
    first: Option<(Vec<(f64, f64)>, Vec<f64>)>,
}

struct RealizationRun {
    eigenvalues: Vec<f64>,
    dos: LdosHistogram,
    states: Vec<StateRun>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurvivalAnalysis {
    pub state: FockState,
    pub rank: usize,
    pub crowding: f64,
    pub dim: usize,
    pub times: Vec<f64>,
    pub sp_mean: Vec<f64>,
    pub sp_rolled: Vec<f64>,
    pub sp_analytic: Vec<f64>,
    /// Realization 0 alone.
    pub sp_single: Vec<f64>,
    pub ipr: f64,
    /// Degeneracy-corrected long-time average, used as the asymptote.
    pub asymptote: f64,
    pub pr: f64,
    pub degenerate_levels: usize,
    pub eta: f64,
    pub eta_per_realization: f64,
    pub eta_pooled: f64,
    pub nu_bar: f64,
    pub heisenberg_time: f64,
    pub grid_covers_heisenberg: bool,
    pub ldos_fit: GaussianLdosFit,
    pub ldos_mean: LdosHistogram,
    /// Realization 0 at full resolution.
    pub exact_ldos: Vec<(f64, f64)>,
    pub hole: Option<HoleReport>,
    pub hole_error: Option<String>,
    pub power_law: Option<PowerLawFit>,
    pub power_law_error: Option<String>,
    pub revival_times: Vec<f64>,
    pub revival_trace: Vec<f64>,
    pub revival: Option<RevivalPeak>,
}

impl SurvivalAnalysis {
    pub fn analytic_inputs(&self) -> AnalyticInputs {
        AnalyticInputs {
            ipr: self.asymptote,
            eta: self.eta,
            nu_bar: self.nu_bar,
            ldos_fit: self.ldos_fit.clone(),
        }
    }

    pub fn label(&self) -> String {
        self.state.label()
    }

    /// Largest relative deviation `|rolled − analytic| / analytic` over the
    /// ramp, from the hole minimum to the Heisenberg time.
    pub fn ramp_deviation(&self) -> Option<f64> {
        let h = self.hole.as_ref()?;
        self.times
            .iter()
            .zip(self.sp_rolled.iter().zip(&self.sp_analytic))
            .filter(|(t, _)| **t >= h.t_min && **t <= self.heisenberg_time)
            .map(|(_, (r, a))| (r - a).abs() / a)
            .max_by(f64::total_cmp)
    }
}

fn combine_eta(
    per: &[f64],
    ldos: &[LdosHistogram],
    dos: &[LdosHistogram],
    how: EtaAveraging,
) -> Result<(f64, f64, f64)> {
    let mean = stats::mean(per);
    let pooled = dynamics::eta_from_histograms(
        &LdosHistogram::average(ldos)?,
        &LdosHistogram::average(dos)?,
    )?;
    let chosen = match how {
        EtaAveraging::PerRealization => mean,
        EtaAveraging::Pooled => pooled,
    };
    Ok((chosen, mean, pooled))
}

/// Full dynamics pipeline for each state.
pub fn run_survival(
    cfg: &RunConfig,
    states: &[FockState],
    threads: Option<usize>,
) -> Result<Vec<SurvivalAnalysis>> {
    let ctx = Context::new(cfg, threads)?;
    survival_in(&ctx, states)
}

fn survival_in(ctx: &Context, states: &[FockState]) -> Result<Vec<SurvivalAnalysis>> {
    if states.is_empty() {
        return Err(Error::domain("no initial states given"));
    }
    let ranks = states
        .iter()
        .map(|s| ctx.table.rank(s))
        .collect::<Result<Vec<_>>>()?;
    let cfg = &ctx.cfg;
    let w = ctx.disorder()?;
    let grid = cfg.grid()?;
    let bins = EnergyBins::new(cfg.delta_e)?;
    let linear: Vec<f64> = (0..REVIVAL_POINTS).map(|i| i as f64 * REVIVAL_DT).collect();

    let runs = ctx.run(|r| {
        let decomp = spectrum::diagonalize(&assemble(&cfg.params(w, r.phase), &ctx.table)?)?;
        let energies = decomp.eigenvalues().to_vec();
        let dos = bins.level_counts(&energies);
        let states = ranks
            .iter()
            .map(|&k| {
                let weights: Vec<f64> = decomp.components(k).iter().map(|c| c * c).collect();
                let norm: f64 = weights.iter().sum();
                if (norm - 1.0).abs() > 1e-10 {
                    return Err(Error::Numeric(format!(
                        "state components not normalized: {norm}"
                    )));
                }
                let ldos = bins.histogram(&energies, &weights);
                let eta = dynamics::eta_from_histograms(&ldos, &dos)?;
                let first = (r.index == 0).then(|| {
                    (
                        dynamics::exact_ldos(&weights, &energies),
                        dynamics::survival_probability(&weights, &energies, &linear),
                    )
                });
                Ok(StateRun {
                    sp: dynamics::survival_probability(&weights, &energies, grid.points()),
                    lta: dynamics::long_time_average(&weights, &energies),
                    ldos,
                    eta,
                    first,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RealizationRun {
            eigenvalues: energies,
            dos,
            states,
        })
    })?;

    let dos_all: Vec<LdosHistogram> = runs.iter().map(|r| r.dos.clone()).collect();
    let mut out = Vec::with_capacity(states.len());
    for (j, (state, &rank)) in states.iter().zip(&ranks).enumerate() {
        let per: Vec<&StateRun> = runs.iter().map(|r| &r.states[j]).collect();
        let series: Vec<Vec<f64>> = per.iter().map(|s| s.sp.clone()).collect();
        let sp_mean = stats::pairwise_mean_series(&series);
        let sp_rolled = dynamics::rolling_average(&sp_mean, cfg.rolling_window)?;
        let iprs: Vec<f64> = per.iter().map(|s| s.lta.ipr).collect();
        let asymptotes: Vec<f64> = per.iter().map(|s| s.lta.asymptote).collect();
        let prs: Vec<f64> = iprs.iter().map(|x| 1.0 / x).collect();
        let etas: Vec<f64> = per.iter().map(|s| s.eta).collect();
        let ldos_all: Vec<LdosHistogram> = per.iter().map(|s| s.ldos.clone()).collect();
        let (eta, eta_per_realization, eta_pooled) =
            combine_eta(&etas, &ldos_all, &dos_all, cfg.eta_averaging)?;
        let ldos_mean = LdosHistogram::average(&ldos_all)?;
        let ldos_fit = dynamics::fit_gaussian(&ldos_mean)?;
        let nus = runs
            .iter()
            .map(|r| dynamics::mean_level_density(&r.eigenvalues, &ldos_fit, cfg.nu_bar_sigmas))
            .collect::<Result<Vec<_>>>()?;
        let nu_bar = stats::mean(&nus);
        let asymptote = stats::mean(&asymptotes);
        let inputs = AnalyticInputs {
            ipr: asymptote,
            eta,
            nu_bar,
            ldos_fit: ldos_fit.clone(),
        };
        let sp_analytic = dynamics::analytic_sp(&inputs, grid.points())?;
        let times = grid.points().to_vec();

        let window = (
            hole_search_start(eta, ldos_fit.sigma),
            inputs.heisenberg_time(),
        );
        let (hole, hole_error) = match dynamics::detect_hole(
            &times,
            &sp_rolled,
            asymptote,
            eta,
            cfg.hole_threshold,
            window,
        ) {
            Ok(h) => (Some(h), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let (t_lo, t_hi) = cfg
            .fit_range
            .unwrap_or_else(|| auto_fit_range(&times, &sp_rolled, asymptote, ldos_fit.sigma));
        let (power_law, power_law_error) =
            match dynamics::fit_power_law(&times, &sp_rolled, t_lo, t_hi) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
        let (exact_ldos, revival_trace) =
            per[0].first.clone().expect("realization 0 keeps its trace");
        let revival = dynamics::revival_peak(&revival_trace[1..], REVIVAL_DT);

        out.push(SurvivalAnalysis {
            state: state.clone(),
            rank,
            crowding: classify::crowding(state),
            dim: ctx.table.dim(),
            sp_single: per[0].sp.clone(),
            times,
            sp_mean,
            sp_rolled,
            sp_analytic,
            ipr: stats::mean(&iprs),
            asymptote,
            pr: stats::mean(&prs),
            degenerate_levels: per.iter().map(|s| s.lta.degenerate_levels).sum(),
            eta,
            eta_per_realization,
            eta_pooled,
            nu_bar,
            heisenberg_time: inputs.heisenberg_time(),
            grid_covers_heisenberg: grid.covers_heisenberg(inputs.heisenberg_time()),
            ldos_fit,
            ldos_mean,
            exact_ldos,
            hole,
            hole_error,
            power_law,
            power_law_error,
            revival_times: linear.clone(),
            revival_trace,
            revival,
        });
    }
    Ok(out)
}

/// Three times the end of the Gaussian decay, where `η e^{−σ²t²}` drops to 1.
pub fn hole_search_start(eta: f64, sigma: f64) -> f64 {
    3.0 * eta.max(1.0).ln().sqrt() / sigma
}

/// Power-law window: from the end of the Gaussian decay (`S_bc < 10⁻³`) to
/// the first time the curve comes within 50 % of its asymptote.
pub fn auto_fit_range(times: &[f64], sp: &[f64], asymptote: f64, sigma: f64) -> (f64, f64) {
    let t_lo = (1000f64.ln()).sqrt() / sigma;
    let t_hi = times
        .iter()
        .zip(sp)
        .find(|(t, v)| **t > t_lo && **v <= 1.5 * asymptote)
        .map_or(*times.last().unwrap_or(&t_lo), |(t, _)| *t);
    (t_lo, t_hi)
}

#[derive(Serialize)]
struct AnalysisSummary<'a> {
    state: String,
    occupations: &'a [u32],
    crowding: f64,
    dim: usize,
    ipr: f64,
    asymptote: f64,
    pr: f64,
    degenerate_levels: usize,
    eta: f64,
    eta_per_realization: f64,
    eta_pooled: f64,
    nu_bar: f64,
    heisenberg_time: f64,
    grid_covers_heisenberg: bool,
    gaussian_fit: &'a GaussianLdosFit,
    hole: &'a Option<HoleReport>,
    hole_error: &'a Option<String>,
    power_law: &'a Option<PowerLawFit>,
    power_law_error: &'a Option<String>,
    revival: &'a Option<RevivalPeak>,
    delta_e: f64,
    rolling_window: usize,
    seed: u64,
    config: &'a RunConfig,
}

pub fn write_survival(
    dir: &OutputDir,
    cfg: &RunConfig,
    a: &SurvivalAnalysis,
) -> Result<Vec<PathBuf>> {
    let label = a.label();
    let mut s = Table::new(&["t", "sp_mean", "sp_rolled", "sp_analytic", "sp_single"]);
    for i in 0..a.times.len() {
        s.push(vec![
            a.times[i].into(),
            a.sp_mean[i].into(),
            a.sp_rolled[i].into(),
            a.sp_analytic[i].into(),
            a.sp_single[i].into(),
        ]);
    }
    let mut l = Table::new(&["kind", "E", "mass"]);
    for (e, m) in &a.exact_ldos {
        l.push(vec!["exact".into(), (*e).into(), (*m).into()]);
    }
    for (e, m) in a.ldos_mean.centers().iter().zip(&a.ldos_mean.masses) {
        l.push(vec!["smoothed".into(), (*e).into(), (*m).into()]);
    }
    let mut rv = Table::new(&["t", "sp"]);
    for (t, v) in a.revival_times.iter().zip(&a.revival_trace) {
        rv.push(vec![(*t).into(), (*v).into()]);
    }
    let summary = AnalysisSummary {
        state: label.clone(),
        occupations: a.state.occupations(),
        crowding: a.crowding,
        dim: a.dim,
        ipr: a.ipr,
        asymptote: a.asymptote,
        pr: a.pr,
        degenerate_levels: a.degenerate_levels,
        eta: a.eta,
        eta_per_realization: a.eta_per_realization,
        eta_pooled: a.eta_pooled,
        nu_bar: a.nu_bar,
        heisenberg_time: a.heisenberg_time,
        grid_covers_heisenberg: a.grid_covers_heisenberg,
        gaussian_fit: &a.ldos_fit,
        hole: &a.hole,
        hole_error: &a.hole_error,
        power_law: &a.power_law,
        power_law_error: &a.power_law_error,
        revival: &a.revival,
        delta_e: cfg.delta_e,
        rolling_window: cfg.rolling_window,
        seed: cfg.seed,
        config: cfg,
    };
    Ok(vec![
        dir.write_table(&format!("survival_{label}.csv"), &s)?,
        dir.write_table(&format!("ldos_{label}.csv"), &l)?,
        dir.write_table(&format!("revivals_{label}.csv"), &rv)?,
        dir.write_json(&format!("analysis_{label}.json"), &summary)?,
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurvivalRun {
    pub config: RunConfig,
    pub phases: Vec<f64>,
    pub analyses: Vec<SurvivalAnalysis>,
}

impl SurvivalRun {
    pub fn write(&self, dir: &OutputDir) -> Result<Vec<PathBuf>> {
        let mut paths = Vec::new();
        for a in &self.analyses {
            paths.extend(write_survival(dir, &self.config, a)?);
        }
        let labels: Vec<String> = self.analyses.iter().map(SurvivalAnalysis::label).collect();
        paths.push(write_config(
            dir,
            "survival",
            &self.config,
            &self.phases,
            labels,
        )?);
        Ok(paths)
    }
}

/// Which initial states a survival run evolves.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSelector {
    Explicit(Vec<FockState>),
    /// Top-`k` and bottom-`k` PR states with `C ∈ [lo, hi)`.
    Extremes {
        lo: f64,
        hi: f64,
        k: usize,
    },
}

pub fn run_survival_selected(
    cfg: &RunConfig,
    selector: &StateSelector,
    threads: Option<usize>,
) -> Result<SurvivalRun> {
    let ctx = Context::new(cfg, threads)?;
    let states = match selector {
        StateSelector::Explicit(s) => s.clone(),
        StateSelector::Extremes { lo, hi, k } => {
            let profiles = classify_in(&ctx)?;
            let e = classify::select_extremes(&profiles, *lo, *hi, *k)?;
            e.high
                .iter()
                .chain(&e.low)
                .map(|p| p.state.clone())
                .collect()
        }
    };
    let analyses = survival_in(&ctx, &states)?;
    Ok(SurvivalRun {
        config: cfg.clone(),
        phases: ctx.phases(),
        analyses,
    })
}

// --------------------------------------------------------------- PR sweep

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrSweep {
    pub config: RunConfig,
    pub phases: Vec<f64>,
    pub crowding: f64,
    pub cluster_size: usize,
    pub pr_range: (f64, f64),
    pub selected: Vec<StateProfile>,
    pub analyses: Vec<SurvivalAnalysis>,
    /// Whether hole depth never decreases along increasing PR.
    pub depth_monotone: bool,
}

/// Survival of `count` states of the cluster `C = crowding`, at evenly spaced
/// PR targets from the cluster's lowest to its highest PR.
pub fn run_pr_sweep(
    cfg: &RunConfig,
    crowding: f64,
    count: usize,
    threads: Option<usize>,
) -> Result<PrSweep> {
    let ctx = Context::new(cfg, threads)?;
    let profiles = classify_in(&ctx)?;
    let mut members: Vec<StateProfile> = classify::cluster(&profiles, crowding)
        .into_iter()
        .cloned()
        .collect();
    if members.len() < 4 || members.len() < count {
        return Err(Error::domain(format!(
            "cluster C = {crowding} has {} states; need at least max(4, {count})",
            members.len()
        )));
    }
    if count < 2 {
        return Err(Error::domain("a PR sweep needs at least 2 states"));
    }
    members.sort_by(|a, b| a.pr.total_cmp(&b.pr).then(a.rank.cmp(&b.rank)));
    let lo = members[0].pr;
    let hi = members[members.len() - 1].pr;
    let mut used = vec![false; members.len()];
    let mut selected = Vec::with_capacity(count);
    for j in 0..count {
        let target = lo + (hi - lo) * j as f64 / (count - 1) as f64;
        let best = (0..members.len())
            .filter(|&i| !used[i])
            .min_by(|&a, &b| {
                (members[a].pr - target)
                    .abs()
                    .total_cmp(&(members[b].pr - target).abs())
            })
            .expect("count <= cluster size");
        used[best] = true;
        selected.push(members[best].clone());
    }
    selected.sort_by(|a, b| a.pr.total_cmp(&b.pr).then(a.rank.cmp(&b.rank)));
    let states: Vec<FockState> = selected.iter().map(|p| p.state.clone()).collect();
    let analyses = survival_in(&ctx, &states)?;
    let depths: Vec<f64> = analyses
        .iter()
        .map(|a| {
            a.hole
                .as_ref()
                .map_or(f64::NEG_INFINITY, |h| h.depth_over_max)
        })
        .collect();
    let depth_monotone = depths.windows(2).all(|w| w[1] >= w[0]);
    Ok(PrSweep {
        config: cfg.clone(),
        phases: ctx.phases(),
        crowding,
        cluster_size: members.len(),
        pr_range: (lo, hi),
        selected,
        analyses,
        depth_monotone,
    })
}

impl PrSweep {
    pub fn write(&self, dir: &OutputDir) -> Result<Vec<PathBuf>> {
        let mut paths = Vec::new();
        let mut t = Table::new(&[
            "state",
            "PR",
            "eta",
            "IPR",
            "hole_depth_times_eta",
            "hole_present",
        ]);
        for a in &self.analyses {
            paths.extend(write_survival(dir, &self.config, a)?);
            let (depth, present) = a.hole.as_ref().map_or((f64::NAN, "unknown"), |h| {
                (h.depth_over_max, if h.present { "true" } else { "false" })
            });
            t.push(vec![
                a.label().into(),
                a.pr.into(),
                a.eta.into(),
                a.asymptote.into(),
                depth.into(),
                present.into(),
            ]);
        }
        paths.push(dir.write_table("pr_sweep.csv", &t)?);
        #[derive(Serialize)]
        struct Summary {
            crowding: f64,
            cluster_size: usize,
            pr_range: (f64, f64),
            depth_monotone: bool,
        }
        paths.push(write_config(
            dir,
            "pr-sweep",
            &self.config,
            &self.phases,
            Summary {
                crowding: self.crowding,
                cluster_size: self.cluster_size,
                pr_range: self.pr_range,
                depth_monotone: self.depth_monotone,
            },
        )?);
        Ok(paths)
    }
}

// -------------------------------------------------------------------- eta

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaScanRow {
    pub delta_e: f64,
    /// Under the configured averaging.
    pub eta: f64,
    pub eta_per_realization: f64,
    pub eta_pooled: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaScan {
    pub config: RunConfig,
    pub phases: Vec<f64>,
    pub state: FockState,
    pub dim: usize,
    /// Ensemble-mean participation ratio of the state.
    pub pr: f64,
    pub rows: Vec<EtaScanRow>,
    pub stable_range: (f64, f64),
    pub stable_mean: f64,
    /// Population standard deviation over the stable range.
    pub stable_dispersion: f64,
}

impl EtaScan {
    pub fn relative_dispersion(&self) -> f64 {
        self.stable_dispersion / self.stable_mean
    }
}

/// Δ𝓔 values `lo, lo + step, …` up to `hi` (inclusive within rounding).
pub fn delta_e_values(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && step > 0.0) {
        return Err(Error::domain(format!(
            "invalid Δ𝓔 scan [{lo}, {hi}] step {step}"
        )));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

/// η of one state as a function of the bin width.
pub fn run_eta_scan(
    cfg: &RunConfig,
    state: &FockState,
    delta_es: &[f64],
    threads: Option<usize>,
) -> Result<EtaScan> {
    let ctx = Context::new(cfg, threads)?;
    let rank = ctx.table.rank(state)?;
    if delta_es.is_empty() {
        return Err(Error::domain("empty Δ𝓔 scan"));
    }
    let w = ctx.disorder()?;
    let runs = ctx.run(|r| {
        let decomp = spectrum::diagonalize(&assemble(&cfg.params(w, r.phase), &ctx.table)?)?;
        let weights: Vec<f64> = decomp.components(rank).iter().map(|c| c * c).collect();
        Ok((decomp.into_eigenvalues(), weights))
    })?;
    let span = runs
        .iter()
        .map(|(e, _)| e[e.len() - 1] - e[0])
        .fold(f64::INFINITY, f64::min);
    if let Some(bad) = delta_es.iter().find(|&&d| !(d > 0.0 && d < span)) {
        return Err(Error::domain(format!(
            "Δ𝓔 = {bad} outside (0, spectral span {span})"
        )));
    }
    let rows = delta_es
        .iter()
        .map(|&de| {
            let bins = EnergyBins::new(de)?;
            let mut per = Vec::with_capacity(runs.len());
            let mut ldos = Vec::with_capacity(runs.len());
            let mut dos = Vec::with_capacity(runs.len());
            for (e, wts) in &runs {
                let l = bins.histogram(e, wts);
                let d = bins.level_counts(e);
                per.push(dynamics::eta_from_histograms(&l, &d)?);
                ldos.push(l);
                dos.push(d);
            }
            let (eta, eta_per_realization, eta_pooled) =
                combine_eta(&per, &ldos, &dos, cfg.eta_averaging)?;
            Ok(EtaScanRow {
                delta_e: de,
                eta,
                eta_per_realization,
                eta_pooled,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let stable: Vec<f64> = rows
        .iter()
        .filter(|r| {
            r.delta_e >= ETA_STABLE_RANGE.0 - 1e-12 && r.delta_e <= ETA_STABLE_RANGE.1 + 1e-12
        })
        .map(|r| r.eta)
        .collect();
    let stable = if stable.is_empty() {
        rows.iter().map(|r| r.eta).collect()
    } else {
        stable
    };
    Ok(EtaScan {
        config: cfg.clone(),
        phases: ctx.phases(),
        state: state.clone(),
        dim: ctx.table.dim(),
        pr: stats::mean(
            &runs
                .iter()
                .map(|(_, w)| 1.0 / w.iter().map(|x| x * x).sum::<f64>())
                .collect::<Vec<_>>(),
        ),
        stable_mean: stats::mean(&stable),
        stable_dispersion: stats::population_std(&stable),
        rows,
        stable_range: ETA_STABLE_RANGE,
    })
}

impl EtaScan {
    pub fn write(&self, dir: &OutputDir) -> Result<Vec<PathBuf>> {
        let mut t = Table::new(&["delta_e", "eta", "eta_per_realization", "eta_pooled"]);
        for r in &self.rows {
            t.push(vec![
                r.delta_e.into(),
                r.eta.into(),
                r.eta_per_realization.into(),
                r.eta_pooled.into(),
            ]);
        }
        #[derive(Serialize)]
        struct Summary {
            state: String,
            dim: usize,
            pr: f64,
            stable_range: (f64, f64),
            stable_mean: f64,
            stable_dispersion: f64,
            relative_dispersion: f64,
        }
        Ok(vec![
            dir.write_table(&format!("eta_scan_{}.csv", self.state.label()), &t)?,
            write_config(
                dir,
                "eta-scan",
                &self.config,
                &self.phases,
                Summary {
                    state: self.state.label(),
                    dim: self.dim,
                    pr: self.pr,
                    stable_range: self.stable_range,
                    stable_mean: self.stable_mean,
                    stable_dispersion: self.stable_dispersion,
                    relative_dispersion: self.relative_dispersion(),
                },
            )?,
        ])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaPrRow {
    pub state: FockState,
    pub crowding: f64,
    pub pr: f64,
    pub eta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaVsPr {
    pub config: RunConfig,
    pub phases: Vec<f64>,
    pub rows: Vec<EtaPrRow>,
}

/// `(PR, η, C)` for every basis state.
pub fn run_eta_vs_pr(cfg: &RunConfig, threads: Option<usize>) -> Result<EtaVsPr> {
    let ctx = Context::new(cfg, threads)?;
    let w = ctx.disorder()?;
    let bins = EnergyBins::new(cfg.delta_e)?;
    let dim = ctx.table.dim();
    let runs = ctx.run(|r| {
        let params = cfg.params(w, r.phase);
        let decomp = spectrum::diagonalize(&assemble(&params, &ctx.table)?)?;
        let sample = StateSample::measure(&ctx.table, &params, &decomp)?;
        let dos = bins.level_counts(decomp.eigenvalues());
        let ldos = (0..dim)
            .map(|k| {
                let wts: Vec<f64> = decomp.components(k).iter().map(|c| c * c).collect();
                bins.histogram(decomp.eigenvalues(), &wts)
            })
            .collect::<Vec<_>>();
        let etas = ldos
            .iter()
            .map(|l| dynamics::eta_from_histograms(l, &dos))
            .collect::<Result<Vec<_>>>()?;
        let keep = (cfg.eta_averaging == EtaAveraging::Pooled).then_some(ldos);
        Ok((sample, dos, etas, keep))
    })?;
    let samples: Vec<StateSample> = runs.iter().map(|r| r.0.clone()).collect();
    let profiles = classify::classify_all(&ctx.table, &samples)?;
    let dos_all: Vec<LdosHistogram> = runs.iter().map(|r| r.1.clone()).collect();
    let dos_mean = LdosHistogram::average(&dos_all)?;
    let rows = profiles
        .into_iter()
        .enumerate()
        .map(|(k, p)| {
            let eta = match cfg.eta_averaging {
                EtaAveraging::PerRealization => {
                    stats::mean(&runs.iter().map(|r| r.2[k]).collect::<Vec<_>>())
                }
                EtaAveraging::Pooled => {
                    let l: Vec<LdosHistogram> = runs
                        .iter()
                        .map(|r| r.3.as_ref().expect("kept")[k].clone())
                        .collect();
                    dynamics::eta_from_histograms(&LdosHistogram::average(&l)?, &dos_mean)?
                }
            };
            Ok(EtaPrRow {
                state: p.state,
                crowding: p.crowding,
                pr: p.pr,
                eta,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EtaVsPr {
        config: cfg.clone(),
        phases: ctx.phases(),
        rows,
    })
}

impl EtaVsPr {
    pub fn write(&self, dir: &OutputDir) -> Result<Vec<PathBuf>> {
        let mut t = Table::new(&["state", "C", "PR", "eta"]);
        for r in &self.rows {
            t.push(vec![
                Cell::S(r.state.label()),
                r.crowding.into(),
                r.pr.into(),
                r.eta.into(),
            ]);
        }
        Ok(vec![
            dir.write_table("eta_pr.csv", &t)?,
            write_config(dir, "eta-pr", &self.config, &self.phases, self.rows.len())?,
        ])
    }
}

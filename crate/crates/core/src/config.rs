use serde::{Deserialize, Serialize};

use crate::basis::DEFAULT_DIM_CAP;
use crate::classify::DEFAULT_CLUSTER_WIDTH;
use crate::dynamics::{
    TimeGrid, DEFAULT_DELTA_E, DEFAULT_HOLE_THRESHOLD, DEFAULT_NU_BAR_SIGMAS,
    DEFAULT_ROLLING_WINDOW,
};
use crate::ensemble::DEFAULT_MEMORY_BUDGET;
use crate::error::{Error, Result};
use crate::hamiltonian::ModelParams;
use crate::spectrum::{DEFAULT_DOS_BINS, DEFAULT_TRIM};

pub const DEFAULT_REALIZATIONS: usize = 40;
pub const DEFAULT_SEED: u64 = 20_240_601;

/// How per-realization LDoS/DOS pairs are combined into one η.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaAveraging {
    /// η of every realization, then the mean.
    #[default]
    PerRealization,
    /// η of the realization-averaged LDoS against the averaged DOS.
    Pooled,
}

/// Everything that determines an experiment's numeric output. Worker count
/// and output location are deliberately not part of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub particles: u32,
    pub sites: usize,
    pub disorder: Vec<f64>,
    pub hopping: Option<f64>,
    pub interaction: Option<f64>,
    pub beta: Option<f64>,
    pub realizations: usize,
    pub seed: u64,
    pub delta_e: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_decade: usize,
    pub rolling_window: usize,
    pub trim: f64,
    pub dos_bins: usize,
    /// Levels per window for the energy-resolved ratio (`None`: dim / 12).
    pub energy_window: Option<usize>,
    pub nu_bar_sigmas: f64,
    pub hole_threshold: f64,
    pub cluster_width: f64,
    pub eta_averaging: EtaAveraging,
    /// Power-law fit interval; `None` picks it from the curve.
    pub fit_range: Option<(f64, f64)>,
    pub dim_cap: usize,
    pub memory_budget: u64,
}

impl RunConfig {
    pub fn new(particles: u32, sites: usize, disorder: f64) -> Self {
        RunConfig {
            particles,
            sites,
            disorder: vec![disorder],
            hopping: None,
            interaction: None,
            beta: None,
            realizations: DEFAULT_REALIZATIONS,
            seed: DEFAULT_SEED,
            delta_e: DEFAULT_DELTA_E,
            t_min: TimeGrid::DEFAULT_T_MIN,
            t_max: TimeGrid::DEFAULT_T_MAX,
            points_per_decade: TimeGrid::DEFAULT_PPD,
            rolling_window: DEFAULT_ROLLING_WINDOW,
            trim: DEFAULT_TRIM,
            dos_bins: DEFAULT_DOS_BINS,
            energy_window: None,
            nu_bar_sigmas: DEFAULT_NU_BAR_SIGMAS,
            hole_threshold: DEFAULT_HOLE_THRESHOLD,
            cluster_width: DEFAULT_CLUSTER_WIDTH,
            eta_averaging: EtaAveraging::default(),
            fit_range: None,
            dim_cap: DEFAULT_DIM_CAP,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }

    pub fn with_realizations(mut self, n: usize) -> Self {
        self.realizations = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::config("realizations must be at least 1"));
        }
        if self.disorder.is_empty() {
            return Err(Error::config("no disorder strength given"));
        }
        if self.disorder.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::config(
                "disorder strengths must be finite and non-negative",
            ));
        }
        if !(self.delta_e > 0.0) {
            return Err(Error::config("delta-e must be positive"));
        }
        if !(0.0..0.5).contains(&self.trim) {
            return Err(Error::config("trim must lie in [0, 0.5)"));
        }
        if self.rolling_window == 0 {
            return Err(Error::config("rolling window must be at least 1"));
        }
        if !(self.nu_bar_sigmas > 0.0)
            || !(self.hole_threshold > 0.0)
            || !(self.cluster_width > 0.0)
        {
            return Err(Error::config(
                "nu-bar window, hole threshold and cluster width must be positive",
            ));
        }
        self.grid()?;
        for &w in &self.disorder {
            self.params(w, 0.0).validate()?;
        }
        Ok(())
    }

    /// The single disorder strength of a non-sweep experiment.
    pub fn single_disorder(&self) -> Result<f64> {
        match self.disorder.as_slice() {
            [w] => Ok(*w),
            _ => Err(Error::config(
                "this experiment takes exactly one disorder strength",
            )),
        }
    }

    pub fn params(&self, disorder: f64, phase: f64) -> ModelParams {
        let mut p = ModelParams::standard(self.particles, self.sites, disorder).with_phase(phase);
        if let Some(j) = self.hopping {
            p.hopping = j;
        }
        if let Some(u) = self.interaction {
            p.interaction = u;
        }
        if let Some(b) = self.beta {
            p.beta = b;
        }
        p
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::logarithmic(self.t_min, self.t_max, self.points_per_decade)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_roundtrip() {
        let c = RunConfig::new(7, 7, 0.6);
        c.validate().unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let p = c.params(0.6, 1.0);
        assert_eq!((p.hopping, p.beta), (0.5, 1.618));
        assert!((p.interaction - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = RunConfig::new(7, 7, 0.6);
        c.realizations = 0;
        assert!(c.validate().is_err());
        let mut c = RunConfig::new(7, 7, 0.6);
        c.disorder = vec![0.6, -1.0];
        assert!(c.validate().is_err());
        let mut c = RunConfig::new(7, 7, 0.6);
        c.t_max = 0.01;
        assert!(c.validate().is_err());
        assert!(RunConfig {
            disorder: vec![0.1, 0.2],
            ..RunConfig::new(3, 3, 0.1)
        }
        .single_disorder()
        .is_err());
    }
}

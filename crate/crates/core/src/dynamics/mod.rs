//! Survival-probability dynamics of an initial state and the random-matrix
//! description of its long-time behaviour.

mod analytic;
mod curve;
mod grid;
mod ldos;
mod survival;

pub use analytic::{
    analytic_sp, analytic_sp_with, b2, sp_bc_gaussian, sp_bc_histogram, sp_bc_quadrature,
    AnalyticInputs,
};
pub use curve::{
    detect_hole, fit_power_law, revival_peak, rolling_average, HoleReport, PowerLawFit,
    RevivalPeak, DEFAULT_HOLE_THRESHOLD, DEFAULT_ROLLING_WINDOW,
};
pub use grid::TimeGrid;
pub use ldos::{
    estimate_eta, eta_from_histograms, exact_ldos, fit_gaussian, mean_level_density,
    moment_gaussian, smooth_ldos, EnergyBins, GaussianLdosFit, LdosHistogram, DEFAULT_DELTA_E,
    DEFAULT_NU_BAR_SIGMAS,
};
pub use survival::{long_time_average, survival_probability, LongTimeAverage};

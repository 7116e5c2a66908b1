use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Logarithmic time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_decade: usize,
    #[serde(skip)]
    points: Vec<f64>,
}

impl TimeGrid {
    pub const DEFAULT_T_MIN: f64 = 0.1;
    pub const DEFAULT_T_MAX: f64 = 1e6;
    pub const DEFAULT_PPD: usize = 100;

    /// `10^(log t_min + i / ppd)` up to and including `t_max` (rounded to
    /// a whole number of grid steps).
    pub fn logarithmic(t_min: f64, t_max: f64, points_per_decade: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) || points_per_decade == 0 {
            return Err(Error::config(format!(
                "invalid time grid: tmin = {t_min}, tmax = {t_max}, ppd = {points_per_decade}"
            )));
        }
        let lo = t_min.log10();
        let steps = ((t_max.log10() - lo) * points_per_decade as f64).round() as usize;
        let points = (0..=steps)
            .map(|i| 10f64.powf(lo + i as f64 / points_per_decade as f64))
            .collect();
        Ok(TimeGrid {
            t_min,
            t_max,
            points_per_decade,
            points,
        })
    }

    pub fn standard() -> Self {
        Self::logarithmic(Self::DEFAULT_T_MIN, Self::DEFAULT_T_MAX, Self::DEFAULT_PPD)
            .expect("default grid is valid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Whether the grid spans `[0.1, 10 t_H]`.
    pub fn covers_heisenberg(&self, t_heisenberg: f64) -> bool {
        let first = self.points.first().copied().unwrap_or(f64::INFINITY);
        let last = self.points.last().copied().unwrap_or(0.0);
        first <= 0.1 * (1.0 + 1e-12) && last >= 10.0 * t_heisenberg
    }
}

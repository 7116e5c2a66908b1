//! Post-processing of averaged survival curves.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats;

/// Quarter decade on the default 100-points-per-decade grid.
pub const DEFAULT_ROLLING_WINDOW: usize = 25;
/// Hole counts as present when deeper than this fraction of `1/η`.
pub const DEFAULT_HOLE_THRESHOLD: f64 = 0.3;

/// Centred moving mean over `window` consecutive points; windows are
/// truncated at the ends.
pub fn rolling_average(series: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::domain("rolling window must be at least 1 point"));
    }
    let left = (window - 1) / 2;
    let right = window - 1 - left;
    let n = series.len();
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(left);
            let hi = (i + right).min(n.saturating_sub(1));
            stats::mean(&series[lo..=hi])
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    /// `SP ∝ t^(−exponent)`.
    pub exponent: f64,
    pub prefactor: f64,
    /// RMS residual of `ln SP` about the fitted line.
    pub rms_residual: f64,
    pub points: usize,
    /// False when too few local maxima existed and every point was fitted.
    pub peaks_only: bool,
    pub poor_fit: bool,
    pub t_range: (f64, f64),
}

const POOR_FIT_RMS: f64 = 0.1;

/// Fits `ln SP = ln A − α ln t` through the local maxima of `values` with
/// `t ∈ [t_lo, t_hi]`.
pub fn fit_power_law(times: &[f64], values: &[f64], t_lo: f64, t_hi: f64) -> Result<PowerLawFit> {
    assert_eq!(times.len(), values.len());
    let idx: Vec<usize> = (0..times.len())
        .filter(|&i| times[i] >= t_lo && times[i] <= t_hi)
        .collect();
    if idx.len() < 10 {
        return Err(Error::domain(format!(
            "power-law fit needs >= 10 grid points in [{t_lo}, {t_hi}], found {}",
            idx.len()
        )));
    }
    if idx.iter().any(|&i| !(values[i] > 0.0)) {
        return Err(Error::domain(
            "power-law fit range contains non-positive values",
        ));
    }
    let peaks: Vec<usize> = idx
        .iter()
        .copied()
        .filter(|&i| {
            i > 0 && i + 1 < values.len() && values[i] > values[i - 1] && values[i] >= values[i + 1]
        })
        .collect();
    let (chosen, peaks_only) = if peaks.len() >= 3 {
        (peaks, true)
    } else {
        (idx, false)
    };
    let x: Vec<f64> = chosen.iter().map(|&i| times[i].ln()).collect();
    let y: Vec<f64> = chosen.iter().map(|&i| values[i].ln()).collect();
    let fit = stats::linear_fit(&x, &y);
    Ok(PowerLawFit {
        exponent: -fit.slope,
        prefactor: fit.intercept.exp(),
        rms_residual: fit.rms,
        points: chosen.len(),
        peaks_only,
        poor_fit: fit.rms > POOR_FIT_RMS,
        t_range: (t_lo, t_hi),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HoleReport {
    /// `IPR − min SP`; negative when the curve never dips below the asymptote.
    pub depth: f64,
    /// `depth · η`, the depth in units of the maximal RMT depth `1/η`.
    pub depth_over_max: f64,
    pub t_min: f64,
    pub sp_min: f64,
    /// First time after `t_min` where the curve is back within 10 % of the
    /// depth from the asymptote.
    pub t_end: Option<f64>,
    pub present: bool,
    pub threshold: f64,
}

/// Locates the correlation hole of a (rolled) ensemble-averaged curve.
///
/// The minimum is searched in `window = (t_from, t_to)`, starting at the
/// first point from `t_from` on where the curve has decayed to `ipr`. Giving
/// `t_from` past the initial decay keeps its oscillation zeros out; `t_to`
/// near the Heisenberg time keeps plateau noise out.
pub fn detect_hole(
    times: &[f64],
    sp: &[f64],
    ipr: f64,
    eta: f64,
    threshold: f64,
    window: (f64, f64),
) -> Result<HoleReport> {
    assert_eq!(times.len(), sp.len());
    let Some(&t_last) = times.last() else {
        return Err(Error::domain("empty curve"));
    };
    let tail: Vec<f64> = times
        .iter()
        .zip(sp)
        .filter(|(t, _)| **t >= t_last / 10.0)
        .map(|(_, v)| *v)
        .collect();
    let tail_mean = stats::mean(&tail);
    if tail.len() < 2 || (tail_mean - ipr).abs() > 0.25 * ipr {
        return Err(Error::domain(format!(
            "curve does not equilibrate on the grid (last-decade mean {tail_mean:.4e} vs IPR {ipr:.4e}); extend tmax"
        )));
    }
    let (t_from, t_to) = window;
    let first = times.partition_point(|&t| t < t_from);
    let stop = times.partition_point(|&t| t <= t_to);
    if first >= stop {
        return Err(Error::domain(format!(
            "no grid points in [{t_from}, {t_to}]"
        )));
    }
    let start = (first..stop).find(|&i| sp[i] <= ipr).unwrap_or(first);
    let (imin, &sp_min) = sp[..stop]
        .iter()
        .enumerate()
        .skip(start)
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty range");
    let depth = ipr - sp_min;
    let t_end = (depth > 0.0)
        .then(|| {
            (imin..sp.len())
                .find(|&i| sp[i] >= ipr - 0.1 * depth)
                .map(|i| times[i])
        })
        .flatten();
    Ok(HoleReport {
        depth,
        depth_over_max: depth * eta,
        t_min: times[imin],
        sp_min,
        t_end,
        present: depth > threshold / eta,
        threshold,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RevivalPeak {
    /// Lag of the strongest autocorrelation maximum, in time units.
    pub period: f64,
    /// Normalized autocorrelation at that lag.
    pub strength: f64,
}

/// Strongest non-trivial maximum of the autocorrelation of `sp` sampled on a
/// uniform grid with step `dt`. `None` when the autocorrelation has no
/// positive local maximum after its first minimum.
pub fn revival_peak(sp: &[f64], dt: f64) -> Option<RevivalPeak> {
    let n = sp.len();
    if n < 8 {
        return None;
    }
    let m = stats::mean(sp);
    let x: Vec<f64> = sp.iter().map(|v| v - m).collect();
    let c0: f64 = x.iter().map(|v| v * v).sum();
    if c0 == 0.0 {
        return None;
    }
    let acf: Vec<f64> = (0..n / 2)
        .map(|lag| {
            x[..n - lag]
                .iter()
                .zip(&x[lag..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / c0
        })
        .collect();
    let first_min = (1..acf.len() - 1).find(|&i| acf[i] <= acf[i - 1] && acf[i] < acf[i + 1])?;
    (first_min + 1..acf.len() - 1)
        .filter(|&i| acf[i] > acf[i - 1] && acf[i] >= acf[i + 1] && acf[i] > 0.0)
        .max_by(|&a, &b| acf[a].total_cmp(&acf[b]))
        .map(|i| RevivalPeak {
            period: i as f64 * dt,
            strength: acf[i],
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rolling_basics() {
        let s = vec![1.0, 5.0, 2.0, 8.0];
        assert_eq!(rolling_average(&s, 1).unwrap(), s);
        assert!(rolling_average(&vec![0.3; 50], 7)
            .unwrap()
            .iter()
            .all(|v| (v - 0.3).abs() < 1e-15));
        assert_eq!(rolling_average(&s, 3).unwrap()[0], 3.0);
        assert!(rolling_average(&s, 0).is_err());
        // cos²(ωt) averaged over many periods
        let osc: Vec<f64> = (0..5000).map(|i| (0.37 * i as f64).cos().powi(2)).collect();
        let r = rolling_average(&osc, 401).unwrap();
        assert!(r[1000..4000].iter().all(|v| (v - 0.5).abs() < 0.05));
    }

    #[test]
    fn exact_power_law() {
        let t: Vec<f64> = (0..200).map(|i| 10f64.powf(i as f64 / 100.0)).collect();
        let v: Vec<f64> = t.iter().map(|x| x.powf(-0.5)).collect();
        let f = fit_power_law(&t, &v, 1.0, 100.0).unwrap();
        assert!((f.exponent - 0.5).abs() < 0.01);
        assert!(!f.poor_fit);
        assert!(fit_power_law(&t, &v, 1.0, 1.05).is_err());
        let mut z = v.clone();
        z[50] = 0.0;
        assert!(fit_power_law(&t, &z, 1.0, 100.0).is_err());
    }

    #[test]
    fn exponential_is_flagged() {
        let t: Vec<f64> = (0..=100).map(|i| 10f64.powf(i as f64 / 100.0)).collect();
        let v: Vec<f64> = t.iter().map(|x| (-x).exp()).collect();
        assert!(fit_power_law(&t, &v, 1.0, 10.0).unwrap().poor_fit);
    }

    #[test]
    fn hole_on_synthetic_dip() {
        let t: Vec<f64> = (0..600)
            .map(|i| 10f64.powf(-1.0 + i as f64 / 100.0))
            .collect();
        let ipr = 0.01;
        let eta = 500.0;
        let sp: Vec<f64> = t
            .iter()
            .map(|&x| {
                ipr - (1.0 / eta) * (-(x.ln() - 100f64.ln()).powi(2) / 2.0).exp()
                    + 0.99 * (-(x * x)).exp()
            })
            .collect();
        let h = detect_hole(&t, &sp, ipr, eta, DEFAULT_HOLE_THRESHOLD, (0.0, 1e6)).unwrap();
        // starting past the dip finds only the recovery
        assert!(
            detect_hole(&t, &sp, ipr, eta, 0.3, (1e4, 1e6))
                .unwrap()
                .depth
                * eta
                < 0.05
        );
        assert!(h.present);
        assert!((h.t_min / 100.0 - 1.0).abs() < 0.05);
        assert!((h.depth * eta - 1.0).abs() < 1e-3);
        assert!(h.t_end.unwrap() > 100.0);
        let flat = vec![0.5; t.len()];
        assert!(detect_hole(&t, &flat, ipr, eta, 0.3, (0.0, 1e6)).is_err());
        assert!(detect_hole(&t, &sp, ipr, eta, 0.3, (2e5, 1e5)).is_err());
    }

    #[test]
    fn periodic_revivals_found() {
        let dt = 0.05;
        let sp: Vec<f64> = (0..4000)
            .map(|i| 0.5 + 0.4 * (2.0 * std::f64::consts::PI * i as f64 * dt / 3.0).cos())
            .collect();
        let p = revival_peak(&sp, dt).unwrap();
        assert!(((p.period / 3.0).round() - p.period / 3.0).abs() < 0.02);
        assert!(revival_peak(&[0.1; 100], dt).is_none());
    }
}

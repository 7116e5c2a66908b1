use std::f64::consts::TAU;

use serde::Serialize;

use super::ldos::{GaussianLdosFit, LdosHistogram};
use crate::error::{Error, Result};

/// GOE two-level form factor
/// `b₂(τ) = [1 − 2τ + τ ln(2τ + 1)] Θ(1 − τ) + [τ ln((2τ + 1)/(2τ − 1)) − 1] Θ(τ − 1)`.
pub fn b2(tau: f64) -> f64 {
    assert!(tau >= 0.0, "b2 is defined for tau >= 0");
    if tau <= 1.0 {
        1.0 - 2.0 * tau + tau * (2.0 * tau).ln_1p()
    } else {
        // ln((2τ+1)/(2τ−1)) = ln(1 + 2/(2τ−1)), stable for large τ
        tau * (2.0 / (2.0 * tau - 1.0)).ln_1p() - 1.0
    }
}

/// `|∫ρ(E) e^{−iEt} dE|²` for a Gaussian LDoS of width σ.
pub fn sp_bc_gaussian(sigma: f64, t: f64) -> f64 {
    (-(sigma * t).powi(2)).exp()
}

/// `|∫ρ(E) e^{−iEt} dE|²` by the trapezoidal rule on `n` intervals of `[lo, hi]`.
pub fn sp_bc_quadrature(
    density: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    n: usize,
    times: &[f64],
) -> Vec<f64> {
    assert!(n >= 1 && hi > lo);
    let h = (hi - lo) / n as f64;
    let nodes: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let e = lo + i as f64 * h;
            let w = if i == 0 || i == n { 0.5 * h } else { h };
            (e, w * density(e))
        })
        .collect();
    times
        .iter()
        .map(|&t| {
            let (mut re, mut im) = (0.0, 0.0);
            for &(e, w) in &nodes {
                let (s, c) = (e * t).sin_cos();
                re += w * c;
                im -= w * s;
            }
            re * re + im * im
        })
        .collect()
}

/// Quadrature path for a non-Gaussian LDoS: the histogram density, piecewise
/// constant, sampled at ten points per bin.
pub fn sp_bc_histogram(hist: &LdosHistogram, times: &[f64]) -> Vec<f64> {
    let centers = hist.centers();
    let half = hist.width / 2.0;
    let lo = centers[0] - half;
    let hi = centers[centers.len() - 1] + half;
    let dens = hist.densities();
    let total = hist.total();
    let density = |e: f64| {
        let j = (((e - lo) / hist.width) as usize).min(dens.len() - 1);
        dens[j] / total
    };
    sp_bc_quadrature(density, lo, hi, 10 * dens.len(), times)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticInputs {
    pub ipr: f64,
    pub eta: f64,
    /// Mean level density in the LDoS core (levels per unit energy).
    pub nu_bar: f64,
    pub ldos_fit: GaussianLdosFit,
}

impl AnalyticInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 1.0) {
            return Err(Error::domain(format!(
                "eta must exceed 1, got {}",
                self.eta
            )));
        }
        if !(self.ipr > 0.0 && self.ipr <= 1.0) {
            return Err(Error::domain(format!(
                "IPR must lie in (0, 1], got {}",
                self.ipr
            )));
        }
        if !(self.nu_bar > 0.0) {
            return Err(Error::domain("mean level density must be positive"));
        }
        if !(self.ldos_fit.sigma > 0.0) {
            return Err(Error::domain("LDoS width must be positive"));
        }
        Ok(())
    }

    /// `2π ν̄`, the time at which `b₂` reaches its argument 1.
    pub fn heisenberg_time(&self) -> f64 {
        TAU * self.nu_bar
    }

    /// Depth of the analytic hole below the asymptote at scaled time `τ`
    /// once the initial decay is over.
    pub fn hole_depth(&self, tau: f64) -> f64 {
        (1.0 - self.ipr) / (self.eta - 1.0) * b2(tau)
    }
}

/// `⟨SP(t)⟩ = (1 − IPR)/(η − 1) · [η S_bc(t) − b₂(t / 2πν̄)] + IPR`
/// with the Gaussian-fit `S_bc`.
pub fn analytic_sp(inputs: &AnalyticInputs, times: &[f64]) -> Result<Vec<f64>> {
    inputs.validate()?;
    let sbc: Vec<f64> = times
        .iter()
        .map(|&t| sp_bc_gaussian(inputs.ldos_fit.sigma, t))
        .collect();
    Ok(analytic_sp_with(inputs, &sbc, times))
}

/// Same as [`analytic_sp`] with a caller-supplied `S_bc(t)` series.
pub fn analytic_sp_with(inputs: &AnalyticInputs, sbc: &[f64], times: &[f64]) -> Vec<f64> {
    let pref = (1.0 - inputs.ipr) / (inputs.eta - 1.0);
    let th = inputs.heisenberg_time();
    times
        .iter()
        .zip(sbc)
        .map(|(&t, &s)| pref * (inputs.eta * s - b2(t / th)) + inputs.ipr)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b2_values() {
        assert_eq!(b2(0.0), 1.0);
        let lower = 1.0 - 2.0 + 3f64.ln();
        let upper = 3f64.ln() - 1.0;
        assert!((lower - upper).abs() < 1e-15);
        assert!((b2(1.0) - upper).abs() < 1e-12);
        assert!((b2(1.0 + 1e-12) - upper).abs() < 1e-10);
        assert!(b2(100.0) < 2e-5 && b2(100.0) > 0.0);
    }

    #[test]
    fn sbc_scaling() {
        assert_eq!(sp_bc_gaussian(0.7, 0.0), 1.0);
        // doubling σ halves the 1/e time
        let t1 = 1.0 / 0.7;
        let t2 = 1.0 / 1.4;
        assert!((sp_bc_gaussian(0.7, t1) - (-1f64).exp()).abs() < 1e-15);
        assert!((sp_bc_gaussian(1.4, t2) - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn analytic_limits() {
        let inputs = AnalyticInputs {
            ipr: 1e-3,
            eta: 800.0,
            nu_bar: 50.0,
            ldos_fit: GaussianLdosFit {
                center: 0.0,
                sigma: 2.0,
                rss: 0.0,
                moment_fallback: false,
            },
        };
        let v = analytic_sp(&inputs, &[0.0, 1e9]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14);
        assert!((v[1] - inputs.ipr).abs() < 1e-12);
        let bad = AnalyticInputs { eta: 1.0, ..inputs };
        assert!(analytic_sp(&bad, &[0.0]).is_err());
    }
}

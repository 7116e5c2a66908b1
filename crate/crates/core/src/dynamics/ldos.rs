use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats;

/// Energy window used to smooth the LDoS and to evaluate η.
pub const DEFAULT_DELTA_E: f64 = 0.74;
/// Half-width, in units of the fitted σ, of the window that defines ν̄.
pub const DEFAULT_NU_BAR_SIGMAS: f64 = 1.0;

/// Equally spaced energy bins of width `width` centred on `i · width`.
/// Anchoring at zero makes bins from different realizations line up.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyBins {
    pub width: f64,
}

impl EnergyBins {
    pub fn new(width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::domain(format!(
                "bin width must be positive, got {width}"
            )));
        }
        Ok(EnergyBins { width })
    }

    /// Index `i` with `|i·width − e| < width/2` (ties go up).
    pub fn index(&self, e: f64) -> i64 {
        (e / self.width + 0.5).floor() as i64
    }

    pub fn center(&self, i: i64) -> f64 {
        i as f64 * self.width
    }

    /// Sums `weights` into bins.
    pub fn histogram(&self, energies: &[f64], weights: &[f64]) -> LdosHistogram {
        assert_eq!(energies.len(), weights.len());
        if energies.is_empty() {
            return LdosHistogram {
                width: self.width,
                first: 0,
                masses: Vec::new(),
            };
        }
        let idx: Vec<i64> = energies.iter().map(|&e| self.index(e)).collect();
        let first = *idx.iter().min().unwrap();
        let last = *idx.iter().max().unwrap();
        let mut masses = vec![0.0; (last - first + 1) as usize];
        for (i, w) in idx.iter().zip(weights) {
            masses[(i - first) as usize] += w;
        }
        LdosHistogram {
            width: self.width,
            first,
            masses,
        }
    }

    /// Level counts per bin (an unnormalized density of states).
    pub fn level_counts(&self, energies: &[f64]) -> LdosHistogram {
        self.histogram(energies, &vec![1.0; energies.len()])
    }
}

/// Binned weights over energy: bin `j` is centred at `(first + j) · width`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LdosHistogram {
    pub width: f64,
    pub first: i64,
    pub masses: Vec<f64>,
}

impl LdosHistogram {
    pub fn centers(&self) -> Vec<f64> {
        (0..self.masses.len())
            .map(|j| (self.first + j as i64) as f64 * self.width)
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass per unit energy.
    pub fn densities(&self) -> Vec<f64> {
        self.masses.iter().map(|m| m / self.width).collect()
    }

    pub fn mass_at(&self, index: i64) -> f64 {
        let j = index - self.first;
        if j < 0 {
            return 0.0;
        }
        self.masses.get(j as usize).copied().unwrap_or(0.0)
    }

    fn last(&self) -> i64 {
        self.first + self.masses.len() as i64 - 1
    }

    /// Bin-wise mean of equally wide histograms.
    pub fn average(hists: &[LdosHistogram]) -> Result<LdosHistogram> {
        let Some(h0) = hists.first() else {
            return Err(Error::domain("no histograms to average"));
        };
        if hists.iter().any(|h| h.width != h0.width) {
            return Err(Error::domain("histograms have different bin widths"));
        }
        let first = hists.iter().map(|h| h.first).min().unwrap();
        let last = hists.iter().map(|h| h.last()).max().unwrap();
        let mut column = vec![0.0; hists.len()];
        let masses = (first..=last)
            .map(|i| {
                for (c, h) in column.iter_mut().zip(hists) {
                    *c = h.mass_at(i);
                }
                stats::mean(&column)
            })
            .collect();
        Ok(LdosHistogram {
            width: h0.width,
            first,
            masses,
        })
    }
}

/// Full-resolution LDoS: `(E_m, |c_m|²)` pairs.
pub fn exact_ldos(weights: &[f64], energies: &[f64]) -> Vec<(f64, f64)> {
    energies
        .iter()
        .copied()
        .zip(weights.iter().copied())
        .collect()
}

/// LDoS histogram `ρ(𝓔ᵢ) = Σ_{|𝓔ᵢ − E_m| < Δ𝓔/2} |c_m|²`.
pub fn smooth_ldos(exact: &[(f64, f64)], delta_e: f64) -> Result<LdosHistogram> {
    let bins = EnergyBins::new(delta_e)?;
    let (e, w): (Vec<f64>, Vec<f64>) = exact.iter().copied().unzip();
    Ok(bins.histogram(&e, &w))
}

/// `η = 1 / Σᵢ Δ𝓔 ρ(𝓔ᵢ)² / ν(𝓔ᵢ)` with `ρ` and `ν` given as densities on a
/// common grid of spacing `delta_e`.
pub fn estimate_eta(rho: &[f64], nu: &[f64], delta_e: f64) -> Result<f64> {
    if rho.len() != nu.len() {
        return Err(Error::domain("LDoS and DOS are not on a common grid"));
    }
    let mut sum = 0.0;
    let mut overlap = false;
    for (r, n) in rho.iter().zip(nu) {
        if *r <= 0.0 {
            continue;
        }
        if *n <= 0.0 {
            return Err(Error::domain("LDoS has weight where the DOS vanishes"));
        }
        overlap = true;
        sum += delta_e * r * r / n;
    }
    if !overlap {
        return Err(Error::domain("LDoS and DOS supports do not overlap"));
    }
    Ok(1.0 / sum)
}

/// η from an LDoS histogram (masses) and level counts on the same bins.
pub fn eta_from_histograms(ldos: &LdosHistogram, dos: &LdosHistogram) -> Result<f64> {
    if ldos.width != dos.width {
        return Err(Error::domain("LDoS and DOS bins differ"));
    }
    let first = ldos.first.min(dos.first);
    let last = ldos.last().max(dos.last());
    let rho: Vec<f64> = (first..=last)
        .map(|i| ldos.mass_at(i) / ldos.width)
        .collect();
    let nu: Vec<f64> = (first..=last).map(|i| dos.mass_at(i) / dos.width).collect();
    estimate_eta(&rho, &nu, ldos.width)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussianLdosFit {
    pub center: f64,
    pub sigma: f64,
    /// Residual sum of squares of the density fit.
    pub rss: f64,
    /// True when least squares failed and moments were used instead.
    pub moment_fallback: bool,
}

impl GaussianLdosFit {
    pub fn density(&self, e: f64) -> f64 {
        gaussian(e, self.center, self.sigma)
    }
}

fn gaussian(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

fn moments(x: &[f64], m: &[f64]) -> (f64, f64) {
    let total: f64 = m.iter().sum();
    let mu = x.iter().zip(m).map(|(a, w)| a * w).sum::<f64>() / total;
    let var = x
        .iter()
        .zip(m)
        .map(|(a, w)| w * (a - mu).powi(2))
        .sum::<f64>()
        / total;
    (mu, var.sqrt())
}

fn rss(x: &[f64], y: &[f64], mu: f64, sigma: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (b - gaussian(*a, mu, sigma)).powi(2))
        .sum()
}

/// Gaussian with the histogram's mean and standard deviation; what
/// [`fit_gaussian`] falls back to.
pub fn moment_gaussian(hist: &LdosHistogram) -> GaussianLdosFit {
    let x = hist.centers();
    let (mu, sigma) = moments(&x, &hist.masses);
    GaussianLdosFit {
        center: mu,
        sigma: unbinned(sigma, hist.width),
        rss: rss(&x, &hist.densities(), mu, sigma),
        moment_fallback: true,
    }
}

/// Sheppard's correction: binning at width `w` adds `w²/12` to the variance.
fn unbinned(sigma: f64, width: f64) -> f64 {
    let v = sigma * sigma - width * width / 12.0;
    if v > 0.0 {
        v.sqrt()
    } else {
        sigma
    }
}

/// Least-squares fit of a normalized Gaussian to the histogram density
/// (Levenberg-Marquardt on `(E₀, ln σ)`, started from the moments). The
/// reported σ is corrected for the bin width.
pub fn fit_gaussian(hist: &LdosHistogram) -> Result<GaussianLdosFit> {
    let mut fit = fit_binned(hist)?;
    fit.sigma = unbinned(fit.sigma, hist.width);
    Ok(fit)
}

fn fit_binned(hist: &LdosHistogram) -> Result<GaussianLdosFit> {
    let nonzero = hist.masses.iter().filter(|m| **m > 0.0).count();
    if nonzero < 4 {
        return Err(Error::domain(format!(
            "Gaussian fit needs >= 4 nonzero bins, got {nonzero}"
        )));
    }
    let x = hist.centers();
    let y = hist.densities();
    let (mu0, sigma0) = moments(&x, &hist.masses);
    let fallback = |mu: f64, sigma: f64| GaussianLdosFit {
        center: mu,
        sigma,
        rss: rss(&x, &y, mu, sigma),
        moment_fallback: true,
    };
    if !(sigma0 > 0.0) {
        return Ok(fallback(mu0, hist.width / 12f64.sqrt()));
    }

    let (mut mu, mut ls) = (mu0, sigma0.ln());
    let mut cost = rss(&x, &y, mu, ls.exp());
    let mut lambda = 1e-3;
    for _ in 0..500 {
        let sigma = ls.exp();
        // normal equations for the two parameters
        let (mut a11, mut a12, mut a22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (xi, yi) in x.iter().zip(&y) {
            let g = gaussian(*xi, mu, sigma);
            let z = (xi - mu) / sigma;
            let d_mu = g * z / sigma;
            let d_ls = g * (z * z - 1.0);
            let r = yi - g;
            a11 += d_mu * d_mu;
            a12 += d_mu * d_ls;
            a22 += d_ls * d_ls;
            g1 += d_mu * r;
            g2 += d_ls * r;
        }
        let (b11, b22) = (a11 * (1.0 + lambda), a22 * (1.0 + lambda));
        let det = b11 * b22 - a12 * a12;
        if !(det.is_finite() && det != 0.0) {
            return Ok(fallback(mu0, sigma0));
        }
        let step_mu = (b22 * g1 - a12 * g2) / det;
        let step_ls = (b11 * g2 - a12 * g1) / det;
        let trial = rss(&x, &y, mu + step_mu, (ls + step_ls).exp());
        if trial.is_finite() && trial <= cost {
            mu += step_mu;
            ls += step_ls;
            let improvement = cost - trial;
            cost = trial;
            lambda = (lambda * 0.3).max(1e-12);
            let small = step_mu.abs() <= 1e-12 * sigma.max(mu.abs()) && step_ls.abs() <= 1e-12;
            if small || improvement <= 1e-15 * cost {
                return Ok(GaussianLdosFit {
                    center: mu,
                    sigma: ls.exp(),
                    rss: cost,
                    moment_fallback: false,
                });
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                // stuck at a point no step improves: that is the minimum
                return Ok(GaussianLdosFit {
                    center: mu,
                    sigma: ls.exp(),
                    rss: cost,
                    moment_fallback: false,
                });
            }
        }
    }
    Ok(fallback(mu0, sigma0))
}

/// Mean level density (levels per unit energy) in `[E₀ − kσ, E₀ + kσ]`.
pub fn mean_level_density(energies: &[f64], fit: &GaussianLdosFit, sigmas: f64) -> Result<f64> {
    let half = sigmas * fit.sigma;
    if !(half > 0.0) {
        return Err(Error::domain("ν̄ window has zero width"));
    }
    let count = energies
        .iter()
        .filter(|e| (*e - fit.center).abs() <= half)
        .count();
    if count == 0 {
        return Err(Error::domain("no levels inside the ν̄ window"));
    }
    Ok(count as f64 / (2.0 * half))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binning_conserves_mass() {
        let e = [-1.3, -0.2, 0.1, 0.36, 0.38, 2.9];
        let w = [0.1, 0.2, 0.3, 0.15, 0.05, 0.2];
        for de in [0.05, 0.3, 0.74, 5.0] {
            let h = smooth_ldos(&exact_ldos(&w, &e), de).unwrap();
            assert!((h.total() - 1.0).abs() < 1e-12);
            assert!(h.masses.iter().all(|m| *m >= 0.0));
        }
        // finer than the smallest spacing: one level per occupied bin
        let h = smooth_ldos(&exact_ldos(&w, &e), 0.01).unwrap();
        let occupied: Vec<f64> = h.masses.iter().copied().filter(|m| *m > 0.0).collect();
        assert_eq!(occupied, w.to_vec());
        assert!(smooth_ldos(&exact_ldos(&w, &e), 0.0).is_err());
    }

    #[test]
    fn eta_of_maximally_spread_state() {
        let energies: Vec<f64> = (0..500).map(|i| (i as f64 * 0.37).sin() * 3.0).collect();
        let dim = energies.len() as f64;
        let bins = EnergyBins::new(0.74).unwrap();
        let ldos = bins.histogram(&energies, &vec![1.0 / dim; energies.len()]);
        let dos = bins.level_counts(&energies);
        let eta = eta_from_histograms(&ldos, &dos).unwrap();
        assert!((eta - dim).abs() < 1e-9 * dim);
    }

    #[test]
    fn eta_domain_errors() {
        assert!(estimate_eta(&[0.0, 0.0], &[1.0, 1.0], 0.5).is_err());
        assert!(estimate_eta(&[1.0, 0.0], &[0.0, 1.0], 0.5).is_err());
        assert!(estimate_eta(&[1.0], &[1.0, 1.0], 0.5).is_err());
    }

    #[test]
    fn symmetric_histogram_is_centred() {
        let masses = vec![0.05, 0.1, 0.2, 0.3, 0.2, 0.1, 0.05];
        let h = LdosHistogram {
            width: 0.5,
            first: 2,
            masses,
        };
        let fit = fit_gaussian(&h).unwrap();
        assert!((fit.center - 2.5).abs() < 0.05);
        assert!(!fit.moment_fallback);
        let sparse = LdosHistogram {
            width: 1.0,
            first: 0,
            masses: vec![0.5, 0.0, 0.5],
        };
        assert!(fit_gaussian(&sparse).is_err());
    }

    #[test]
    fn averaging_aligns_bins() {
        let a = LdosHistogram {
            width: 1.0,
            first: 0,
            masses: vec![1.0, 1.0],
        };
        let b = LdosHistogram {
            width: 1.0,
            first: 1,
            masses: vec![1.0, 1.0],
        };
        let m = LdosHistogram::average(&[a, b]).unwrap();
        assert_eq!(m.first, 0);
        assert_eq!(m.masses, vec![0.5, 1.0, 0.5]);
    }
}

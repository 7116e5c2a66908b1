use serde::Serialize;

/// `SP(t) = |Σ_m |c_m|² e^{−iE_m t}|²` at each time. `weights` are `|c_m|²`.
/// `t = 0` maps to exactly 1; roundoff is clamped into `[0, 1]`.
pub fn survival_probability(weights: &[f64], energies: &[f64], times: &[f64]) -> Vec<f64> {
    assert_eq!(weights.len(), energies.len());
    // a global energy shift only changes the phase; centring keeps E·t small
    let shift = weights
        .iter()
        .zip(energies)
        .map(|(w, e)| w * e)
        .sum::<f64>();
    let shifted: Vec<(f64, f64)> = weights
        .iter()
        .zip(energies)
        .filter(|(w, _)| **w != 0.0)
        .map(|(&w, &e)| (w, e - shift))
        .collect();
    times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return 1.0;
            }
            let (mut re, mut im) = (0.0, 0.0);
            for &(w, e) in &shifted {
                let (s, c) = (e * t).sin_cos();
                re += w * c;
                im += w * s;
            }
            (re * re + im * im).clamp(0.0, 1.0)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LongTimeAverage {
    /// `Σ|c_m|⁴`.
    pub ipr: f64,
    /// `Σ_{E_m = E_n} |c_m|²|c_n|²`; equals `ipr` without degeneracies.
    pub asymptote: f64,
    /// Number of levels sharing their energy with a neighbour.
    pub degenerate_levels: usize,
}

/// Infinite-time average of the survival probability. Levels closer than
/// `1e-10 · max|E|` count as degenerate.
pub fn long_time_average(weights: &[f64], energies: &[f64]) -> LongTimeAverage {
    assert_eq!(weights.len(), energies.len());
    let ipr: f64 = weights.iter().map(|w| w * w).sum();
    let scale = energies.iter().fold(1.0f64, |a, e| a.max(e.abs()));
    let tol = 1e-10 * scale;
    let mut order: Vec<usize> = (0..energies.len()).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
    let mut asymptote = 0.0;
    let mut degenerate_levels = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && energies[order[j]] - energies[order[j - 1]] <= tol {
            j += 1;
        }
        let group: f64 = order[i..j].iter().map(|&m| weights[m]).sum();
        asymptote += group * group;
        if j - i > 1 {
            degenerate_levels += j - i;
        }
        i = j;
    }
    LongTimeAverage {
        ipr,
        asymptote,
        degenerate_levels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_closed_form() {
        let times: Vec<f64> = (0..200).map(|i| 0.05 * i as f64 + 0.013).collect();
        let sp = survival_probability(&[0.5, 0.5], &[0.0, 1.0], &times);
        for (t, s) in times.iter().zip(&sp) {
            assert!((s - (t / 2.0).cos().powi(2)).abs() < 1e-12);
        }
        let at_pi = survival_probability(&[0.5, 0.5], &[0.0, 1.0], &[std::f64::consts::PI]);
        assert!(at_pi[0] < 1e-12);
    }

    #[test]
    fn origin_and_stationary_state() {
        let w = [0.2, 0.3, 0.5];
        let e = [-1.0, 0.4, 2.0];
        assert_eq!(survival_probability(&w, &e, &[0.0])[0], 1.0);
        let sp = survival_probability(&[0.0, 1.0, 0.0], &e, &[0.1, 10.0, 1e6]);
        assert!(sp.iter().all(|&s| s == 1.0));
    }

    #[test]
    fn asymptote() {
        let m = 8;
        let w = vec![1.0 / m as f64; m];
        let e: Vec<f64> = (0..m).map(|i| i as f64).collect();
        let lta = long_time_average(&w, &e);
        assert!((lta.ipr - 1.0 / m as f64).abs() < 1e-15);
        assert_eq!(lta.ipr, lta.asymptote);
        assert_eq!(lta.degenerate_levels, 0);
        assert_eq!(long_time_average(&[1.0], &[3.0]).ipr, 1.0);
        let d = long_time_average(&[0.5, 0.5], &[1.0, 1.0]);
        assert_eq!((d.ipr, d.asymptote, d.degenerate_levels), (0.5, 1.0, 2));
    }
}

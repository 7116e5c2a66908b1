//! Classification of Fock states by crowding `C = Σnᵢ²/N`, mean energy per
//! particle, and participation ratio in the Hamiltonian eigenbasis.

use serde::Serialize;

use crate::basis::{BasisTable, FockState};
use crate::error::{Error, Result};
use crate::hamiltonian::{diagonal_expectation, ModelParams};
use crate::spectrum::SpectralDecomposition;
use crate::stats;

/// Default width of the half-open crowding bins `[c, c + Δc)`.
pub const DEFAULT_CLUSTER_WIDTH: f64 = 0.25;

const NORM_TOLERANCE: f64 = 1e-10;

pub fn crowding(state: &FockState) -> f64 {
    state.sum_of_squares() as f64 / state.particles() as f64
}

/// `Σ|c_m|⁴` after checking `Σ|c_m|² = 1`.
pub fn inverse_participation_ratio(components: &[f64]) -> Result<f64> {
    let norm: f64 = components.iter().map(|c| c * c).sum();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Numeric(format!(
            "eigenbasis components are not normalized (Σ|c|² = {norm})"
        )));
    }
    Ok(components.iter().map(|c| c.powi(4)).sum())
}

/// `PR = 1 / Σ|c_m|⁴`.
pub fn participation_ratio(components: &[f64]) -> Result<f64> {
    Ok(1.0 / inverse_participation_ratio(components)?)
}

/// Participation ratio of basis state `index` in the eigenbasis of `decomp`.
pub fn state_participation_ratio(decomp: &SpectralDecomposition, index: usize) -> Result<f64> {
    participation_ratio(&decomp.components(index))
}

/// Per-state diagonal energy and IPR for one disorder realization.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSample {
    pub energies: Vec<f64>,
    pub iprs: Vec<f64>,
}

impl StateSample {
    pub fn measure(
        table: &BasisTable,
        params: &ModelParams,
        decomp: &SpectralDecomposition,
    ) -> Result<Self> {
        if decomp.dim() != table.dim() {
            return Err(Error::domain("decomposition and basis dimensions differ"));
        }
        let energies = table
            .states()
            .iter()
            .map(|s| diagonal_expectation(s, params))
            .collect();
        let iprs = (0..table.dim())
            .map(|k| inverse_participation_ratio(&decomp.components(k)))
            .collect::<Result<_>>()?;
        Ok(StateSample { energies, iprs })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateProfile {
    pub state: FockState,
    pub rank: usize,
    pub crowding: f64,
    pub energy_per_particle: f64,
    pub energy_stderr: f64,
    /// Mean over realizations of the per-realization PR.
    pub pr: f64,
    pub ipr: f64,
    /// `1 / mean IPR`, the alternative averaging order.
    pub pr_from_mean_ipr: f64,
    pub dim: usize,
}

impl StateProfile {
    pub fn pr_over_dim(&self) -> f64 {
        self.pr / self.dim as f64
    }
}

/// One profile per basis state, averaged over the realizations in `samples`.
pub fn classify_all(table: &BasisTable, samples: &[StateSample]) -> Result<Vec<StateProfile>> {
    if samples.is_empty() {
        return Err(Error::domain(
            "classification needs at least one realization",
        ));
    }
    let n = f64::from(table.particles());
    let mut energies = vec![0.0; samples.len()];
    let mut prs = vec![0.0; samples.len()];
    let mut iprs = vec![0.0; samples.len()];
    let mut out = Vec::with_capacity(table.dim());
    for (k, state) in table.states().iter().enumerate() {
        for (r, s) in samples.iter().enumerate() {
            energies[r] = s.energies[k] / n;
            iprs[r] = s.iprs[k];
            prs[r] = 1.0 / s.iprs[k];
        }
        let ipr = stats::mean(&iprs);
        out.push(StateProfile {
            state: state.clone(),
            rank: k,
            crowding: crowding(state),
            energy_per_particle: stats::mean(&energies),
            energy_stderr: stats::std_err(&energies),
            pr: stats::mean(&prs),
            ipr,
            pr_from_mean_ipr: 1.0 / ipr,
            dim: table.dim(),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extremes {
    /// Highest PR first.
    pub high: Vec<StateProfile>,
    /// Lowest PR first.
    pub low: Vec<StateProfile>,
}

fn in_range(p: &StateProfile, lo: f64, hi: f64) -> bool {
    // crowding is a ratio of integers; absorb its rounding at the edges
    p.crowding >= lo - 1e-12 && p.crowding < hi - 1e-12
}

/// Top-`k` and bottom-`k` states by PR with `C ∈ [lo, hi)`. Ties go to the
/// lower basis rank.
pub fn select_extremes(profiles: &[StateProfile], lo: f64, hi: f64, k: usize) -> Result<Extremes> {
    let mut pool: Vec<&StateProfile> = profiles.iter().filter(|p| in_range(p, lo, hi)).collect();
    if pool.is_empty() {
        return Err(Error::domain(format!("no states with C in [{lo}, {hi})")));
    }
    if k == 0 || pool.len() < 2 * k {
        return Err(Error::domain(format!(
            "need at least {} states with C in [{lo}, {hi}), found {}",
            2 * k,
            pool.len()
        )));
    }
    pool.sort_by(|a, b| b.pr.total_cmp(&a.pr).then(a.rank.cmp(&b.rank)));
    let high = pool[..k].iter().map(|p| (*p).clone()).collect();
    pool.sort_by(|a, b| a.pr.total_cmp(&b.pr).then(a.rank.cmp(&b.rank)));
    let low = pool[..k].iter().map(|p| (*p).clone()).collect();
    Ok(Extremes { high, low })
}

/// Distinct crowding values realized by the profiles, ascending.
pub fn crowding_values(profiles: &[StateProfile]) -> Vec<f64> {
    let mut sums: Vec<u64> = profiles.iter().map(|p| p.state.sum_of_squares()).collect();
    sums.sort_unstable();
    sums.dedup();
    let n = profiles.first().map_or(1, |p| p.state.particles()) as f64;
    sums.into_iter().map(|s| s as f64 / n).collect()
}

/// Profiles whose crowding equals `c` (within rounding of `Σnᵢ²/N`).
pub fn cluster(profiles: &[StateProfile], c: f64) -> Vec<&StateProfile> {
    profiles
        .iter()
        .filter(|p| (p.crowding - c).abs() < 1e-9)
        .collect()
}

/// For every bin `[c, c + width)` inside `[lo, hi)` holding at least two
/// states: the highest-PR and lowest-PR state of that bin.
pub fn extremes_per_cluster(
    profiles: &[StateProfile],
    lo: f64,
    hi: f64,
    width: f64,
) -> Result<Vec<(f64, StateProfile, StateProfile)>> {
    if width <= 0.0 || hi <= lo {
        return Err(Error::domain("invalid crowding bins"));
    }
    let bins = ((hi - lo) / width).ceil() as usize;
    let mut out = Vec::new();
    for b in 0..bins {
        let a = lo + b as f64 * width;
        let z = (a + width).min(hi);
        if let Ok(e) = select_extremes(profiles, a, z, 1) {
            out.push((a, e.high[0].clone(), e.low[0].clone()));
        }
    }
    if out.is_empty() {
        return Err(Error::domain(format!(
            "no populated crowding bins in [{lo}, {hi})"
        )));
    }
    Ok(out)
}

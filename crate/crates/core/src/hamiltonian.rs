//! Interacting Aubry-André Hamiltonian in the Fock basis:
//!
//! ```text
//! H = −J Σ⟨i,j⟩ b†ᵢ bⱼ + (U/2) Σᵢ nᵢ(nᵢ − 1) + W Σᵢ cos(2πβ i + φ) nᵢ
//! ```
//!
//! Sites are numbered `1..=L` inside the cosine. The chain is open: there is
//! no bond between site `L` and site 1.

use std::f64::consts::TAU;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::basis::{BasisTable, FockState};
use crate::error::{Error, Result};

/// Incommensuration of the quasi-periodic potential (a literal decimal, not
/// the golden ratio).
pub const DEFAULT_BETA: f64 = 1.618;
pub const DEFAULT_HOPPING: f64 = 0.5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    /// Reserved; assembly refuses it.
    Periodic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub particles: u32,
    pub sites: usize,
    pub hopping: f64,
    pub interaction: f64,
    pub disorder: f64,
    pub beta: f64,
    pub phase: f64,
    pub boundary: Boundary,
}

impl ModelParams {
    /// `J = 1/2`, `U = 4/(N − 1)`, `β = 1.618`, `φ = 0`.
    pub fn standard(particles: u32, sites: usize, disorder: f64) -> Self {
        let interaction = if particles > 1 {
            4.0 / f64::from(particles - 1)
        } else {
            0.0
        };
        ModelParams {
            particles,
            sites,
            hopping: DEFAULT_HOPPING,
            interaction,
            disorder,
            beta: DEFAULT_BETA,
            phase: 0.0,
            boundary: Boundary::Open,
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.particles == 0 || self.sites == 0 {
            return Err(Error::config("N and L must be at least 1"));
        }
        let finite = [
            self.hopping,
            self.interaction,
            self.disorder,
            self.beta,
            self.phase,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::config("model parameters must be finite"));
        }
        if self.hopping < 0.0 || self.disorder < 0.0 {
            return Err(Error::config("J and W must be non-negative"));
        }
        if self.beta <= 0.0 {
            return Err(Error::config("beta must be positive"));
        }
        if !(0.0..TAU).contains(&self.phase) {
            return Err(Error::config(format!(
                "phase {} outside [0, 2π)",
                self.phase
            )));
        }
        if self.boundary == Boundary::Periodic {
            return Err(Error::config(
                "periodic boundary conditions are not implemented",
            ));
        }
        Ok(())
    }

    /// On-site potential `W cos(2πβ i + φ)` for 1-based site `i`.
    pub fn site_potentials(&self) -> Vec<f64> {
        (1..=self.sites)
            .map(|i| self.disorder * (TAU * self.beta * i as f64 + self.phase).cos())
            .collect()
    }
}

/// `⟨k|H|k⟩` for a single occupation state.
pub fn diagonal_expectation(state: &FockState, params: &ModelParams) -> f64 {
    diagonal_with(state, params.interaction, &params.site_potentials())
}

fn diagonal_with(state: &FockState, interaction: f64, potentials: &[f64]) -> f64 {
    let occ = state.occupations();
    let pairs: u64 = occ
        .iter()
        .map(|&n| u64::from(n) * u64::from(n.saturating_sub(1)))
        .sum();
    let onsite: f64 = occ
        .iter()
        .zip(potentials)
        .map(|(&n, v)| v * f64::from(n))
        .sum();
    0.5 * interaction * pairs as f64 + onsite
}

/// Real symmetric sparse matrix in compressed-row form. Both triangles are
/// stored; each off-diagonal value is computed once and mirrored.
#[derive(Clone, Debug)]
pub struct SparseHamiltonian {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseHamiltonian {
    /// Builds from the diagonal and the strictly-upper triplets `(row < col)`.
    pub fn from_upper(diagonal: Vec<f64>, upper: Vec<(usize, usize, f64)>) -> Self {
        let dim = diagonal.len();
        let mut rows: Vec<Vec<(usize, f64)>> = diagonal
            .into_iter()
            .enumerate()
            .map(|(i, d)| vec![(i, d)])
            .collect();
        for (r, c, v) in upper {
            debug_assert!(r < c);
            rows[r].push((c, v));
            rows[c].push((r, v));
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        SparseHamiltonian {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(c, v)| v * x[c]).sum();
        }
    }

    /// Largest absolute row sum, an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.dim]; self.dim];
        for (i, row) in m.iter_mut().enumerate() {
            for (c, v) in self.row(i) {
                row[c] = v;
            }
        }
        m
    }

    /// Lower triangle including the diagonal as `(row, col, value)`.
    pub fn lower_triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            self.row(i)
                .take_while(move |&(c, _)| c <= i)
                .map(move |(c, v)| (i, c, v))
        })
    }

    /// Symmetric coordinate dump: a `dim nnz_lower` header, then one 1-based
    /// `row col value` line per lower-triangle entry, values at 17 significant digits.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> Result<()> {
        let lower: Vec<_> = self.lower_triplets().collect();
        writeln!(out, "{} {}", self.dim, lower.len())?;
        for (r, c, v) in lower {
            writeln!(out, "{} {} {}", r + 1, c + 1, crate::output::fmt_f64(v))?;
        }
        Ok(())
    }
}

/// Assembles `H` for `params` on `table`.
pub fn assemble(params: &ModelParams, table: &BasisTable) -> Result<SparseHamiltonian> {
    params.validate()?;
    if table.particles() != params.particles || table.sites() != params.sites {
        return Err(Error::domain(format!(
            "basis (N = {}, L = {}) does not match parameters (N = {}, L = {})",
            table.particles(),
            table.sites(),
            params.particles,
            params.sites
        )));
    }
    let potentials = params.site_potentials();
    let mut diagonal = Vec::with_capacity(table.dim());
    let mut upper = Vec::new();
    for (k, state) in table.states().iter().enumerate() {
        diagonal.push(diagonal_with(state, params.interaction, &potentials));
        if params.hopping == 0.0 {
            continue;
        }
        for bond in 0..params.sites.saturating_sub(1) {
            for (from, to) in [(bond, bond + 1), (bond + 1, bond)] {
                let Some((image, amp)) = state.hop_image(from, to) else {
                    continue;
                };
                debug_assert_eq!(image.particles(), state.particles());
                let target = table.rank(&image)?;
                if target > k {
                    upper.push((k, target, -params.hopping * amp));
                }
            }
        }
    }
    Ok(SparseHamiltonian::from_upper(diagonal, upper))
}

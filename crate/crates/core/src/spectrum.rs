//! Full diagonalization and level-spacing-ratio statistics.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::{Mat, Par};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;

/// `4 − 2√3`, the mean ratio of the 3×3 GOE surmise.
pub const GOE_RATIO_SURMISE: f64 = 0.535_898_384_862_245_4;
/// Large-matrix GOE mean ratio.
pub const GOE_RATIO: f64 = 0.5307;
/// `2 ln 2 − 1`, the mean ratio for uncorrelated levels.
pub const POISSON_RATIO: f64 = 0.386_294_361_119_890_6;

pub const DEFAULT_TRIM: f64 = 0.10;

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// (column `m` is `|E_m⟩` in the Fock basis).
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    vectors: Mat<f64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn into_eigenvalues(self) -> Vec<f64> {
        self.eigenvalues
    }

    /// `⟨k|E_m⟩`.
    pub fn component(&self, basis_index: usize, level: usize) -> f64 {
        self.vectors[(basis_index, level)]
    }

    /// Components `c_m = ⟨E_m|k⟩` of basis state `k` over all levels.
    pub fn components(&self, basis_index: usize) -> Vec<f64> {
        (0..self.dim())
            .map(|m| self.vectors[(basis_index, m)])
            .collect()
    }

    pub fn eigenvector(&self, level: usize) -> Vec<f64> {
        self.vectors.col(level).iter().copied().collect()
    }

    /// Largest `‖H v_m − E_m v_m‖₂` over all columns.
    pub fn max_residual(&self, h: &SparseHamiltonian) -> f64 {
        let n = self.dim();
        let mut hv = vec![0.0; n];
        (0..n)
            .map(|m| {
                let v = self.eigenvector(m);
                h.matvec(&v, &mut hv);
                hv.iter()
                    .zip(&v)
                    .map(|(a, b)| (a - self.eigenvalues[m] * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max |VᵀV − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.vectors.transpose() * &self.vectors;
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}

fn lower_dense(h: &SparseHamiltonian) -> Mat<f64> {
    let mut a = Mat::<f64>::zeros(h.dim(), h.dim());
    for (r, c, v) in h.lower_triplets() {
        a[(r, c)] = v;
    }
    a
}

fn solve(a: &Mat<f64>, vectors: bool) -> Result<(Vec<f64>, Option<Mat<f64>>)> {
    let n = a.nrows();
    let compute = if vectors {
        ComputeEigenvectors::Yes
    } else {
        ComputeEigenvectors::No
    };
    // sequential inside: parallelism lives at the realization level so
    // results do not depend on the worker count
    let par = Par::Seq;
    let params = Default::default();
    let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<f64>(
        n, compute, par, params,
    ));
    let stack = MemStack::new(&mut buf);
    let mut s = faer::diag::Diag::<f64>::zeros(n);
    let mut u = vectors.then(|| Mat::<f64>::zeros(n, n));
    evd::self_adjoint_evd(
        a.as_ref(),
        s.as_mut(),
        u.as_mut().map(|u| u.as_mut()),
        par,
        stack,
        params,
    )
    .map_err(|_| Error::NoConvergence { dim: n })?;
    let values: Vec<f64> = s.column_vector().iter().copied().collect();
    if values.windows(2).any(|w| w[0] > w[1]) || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(
            "eigensolver returned unsorted or non-finite values".into(),
        ));
    }
    Ok((values, u))
}

/// All eigenpairs of `h`.
pub fn diagonalize(h: &SparseHamiltonian) -> Result<SpectralDecomposition> {
    let (eigenvalues, vectors) = solve(&lower_dense(h), true)?;
    Ok(SpectralDecomposition {
        eigenvalues,
        vectors: vectors.expect("requested"),
    })
}

/// Eigenvalues only, ascending; cheaper than [`diagonalize`].
pub fn eigenvalues(h: &SparseHamiltonian) -> Result<Vec<f64>> {
    Ok(solve(&lower_dense(h), false)?.0)
}

/// Eigenvalues of a dense symmetric matrix given row-major (only the lower
/// triangle is read).
pub fn dense_eigenvalues(n: usize, row_major: &[f64]) -> Result<Vec<f64>> {
    if row_major.len() != n * n {
        return Err(Error::domain("matrix data length is not n²"));
    }
    let a = Mat::<f64>::from_fn(n, n, |i, j| row_major[i * n + j]);
    Ok(solve(&a, false)?.0)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RatioSeries {
    /// `r_n` for `n = 2 … d − 1`.
    pub ratios: Vec<f64>,
    /// Middle level `E_n` of each ratio.
    pub energies: Vec<f64>,
    /// Ratios touching a zero spacing (set to 0).
    pub degenerate: usize,
}

impl RatioSeries {
    pub fn mean(&self) -> f64 {
        self.ratios.iter().sum::<f64>() / self.ratios.len() as f64
    }
}

/// `r_n = min(s_n, s_{n−1}) / max(s_n, s_{n−1})` with `s_n = E_{n+1} − E_n`.
pub fn spacing_ratios(levels: &[f64]) -> Result<RatioSeries> {
    if levels.len() < 3 {
        return Err(Error::domain(format!(
            "need at least 3 levels, got {}",
            levels.len()
        )));
    }
    let mut out = RatioSeries::default();
    for w in levels.windows(3) {
        let (a, b) = (w[1] - w[0], w[2] - w[1]);
        if a < 0.0 || b < 0.0 {
            return Err(Error::domain("levels are not sorted ascending"));
        }
        let hi = a.max(b);
        let r = if hi == 0.0 { 0.0 } else { a.min(b) / hi };
        if a == 0.0 || b == 0.0 {
            out.degenerate += 1;
        }
        out.ratios.push(r);
        out.energies.push(w[1]);
    }
    Ok(out)
}

/// Spacing ratios over the central `1 − 2·trim` fraction of the spectrum.
pub fn trimmed_ratios(levels: &[f64], trim: f64) -> Result<RatioSeries> {
    if !(0.0..0.5).contains(&trim) {
        return Err(Error::domain(format!(
            "trim fraction {trim} outside [0, 0.5)"
        )));
    }
    let cut = (trim * levels.len() as f64).floor() as usize;
    let central = &levels[cut..levels.len() - cut];
    if central.len() < 3 {
        return Err(Error::domain(format!(
            "only {} levels remain after trimming {} levels from each end",
            central.len(),
            cut
        )));
    }
    spacing_ratios(central)
}

/// Mean spacing ratio of the central part of one spectrum.
pub fn mean_ratio_trimmed(levels: &[f64], trim: f64) -> Result<f64> {
    Ok(trimmed_ratios(levels, trim)?.mean())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyWindow {
    pub energy_per_particle: f64,
    pub mean_ratio: f64,
    pub spacings: usize,
}

/// Default window size for [`ratio_vs_energy`]: `dim / 12` levels.
pub fn default_energy_window(dim: usize) -> usize {
    (dim / 12).max(3)
}

/// Energy-resolved mean ratio. Each spectrum is cut into consecutive blocks
/// of `window` levels; block `j` of every spectrum is pooled into one point.
/// A trailing block shorter than `window` is dropped.
pub fn ratio_vs_energy(
    spectra: &[Vec<f64>],
    particles: u32,
    window: usize,
) -> Result<Vec<EnergyWindow>> {
    if spectra.is_empty() {
        return Err(Error::domain("empty ensemble"));
    }
    if window < 3 {
        return Err(Error::domain("energy window needs at least 3 levels"));
    }
    let pooled = (window - 2) * spectra.len();
    if pooled < 50 {
        return Err(Error::domain(format!(
            "window of {window} levels pools only {pooled} spacing ratios (need >= 50)"
        )));
    }
    let blocks = spectra.iter().map(|s| s.len() / window).min().unwrap_or(0);
    let n = f64::from(particles);
    let mut out = Vec::with_capacity(blocks);
    for j in 0..blocks {
        let (mut r_sum, mut e_sum, mut count, mut levels) = (0.0, 0.0, 0usize, 0usize);
        for s in spectra {
            let block = &s[j * window..(j + 1) * window];
            let series = spacing_ratios(block)?;
            r_sum += series.ratios.iter().sum::<f64>();
            count += series.ratios.len();
            e_sum += block.iter().sum::<f64>();
            levels += block.len();
        }
        out.push(EnergyWindow {
            energy_per_particle: e_sum / levels as f64 / n,
            mean_ratio: r_sum / count as f64,
            spacings: count,
        });
    }
    Ok(out)
}

/// Density histogram normalized so that `Σ density · width = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityHistogram {
    pub centers: Vec<f64>,
    pub width: f64,
    pub density: Vec<f64>,
}

pub const DEFAULT_DOS_BINS: usize = 50;

/// Density of states over `E/N`, pooled across spectra.
pub fn dos_histogram(
    spectra: &[Vec<f64>],
    particles: u32,
    bins: usize,
) -> Result<DensityHistogram> {
    if bins < 10 {
        return Err(Error::domain("DOS histogram needs at least 10 bins"));
    }
    let n = f64::from(particles);
    let values: Vec<f64> = spectra.iter().flatten().map(|e| e / n).collect();
    if values.is_empty() {
        return Err(Error::domain("empty ensemble"));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo {
        (hi - lo) / bins as f64
    } else {
        1.0
    };
    let mut counts = vec![0usize; bins];
    for v in &values {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let total = values.len() as f64;
    Ok(DensityHistogram {
        centers: (0..bins).map(|i| lo + (i as f64 + 0.5) * width).collect(),
        width,
        density: counts.iter().map(|&c| c as f64 / (total * width)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisTable;
    use crate::hamiltonian::{assemble, ModelParams};

    #[test]
    fn two_site_spectrum() {
        let table = BasisTable::build(2, 2).unwrap();
        let h = assemble(&ModelParams::standard(2, 2, 0.0), &table).unwrap();
        let d = diagonalize(&h).unwrap();
        let s5 = 5f64.sqrt();
        let expected = [2.0 - s5, 4.0, 2.0 + s5];
        for (a, b) in d.eigenvalues().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn residual_orthonormality_and_trace() {
        let table = BasisTable::build(4, 5).unwrap();
        let h = assemble(&ModelParams::standard(4, 5, 0.6).with_phase(2.1), &table).unwrap();
        let d = diagonalize(&h).unwrap();
        assert!(d.max_residual(&h) <= 1e-10 * h.norm_inf());
        assert!(d.orthonormality_error() <= 1e-10);
        let sum: f64 = d.eigenvalues().iter().sum();
        assert!((sum - h.trace()).abs() <= 1e-9 * h.trace().abs().max(1.0));
        assert_eq!(eigenvalues(&h).unwrap().len(), table.dim());
    }

    #[test]
    fn diagonal_matrix_gives_sorted_diagonal() {
        let table = BasisTable::build(3, 4).unwrap();
        let mut p = ModelParams::standard(3, 4, 0.0);
        p.hopping = 0.0;
        let h = assemble(&p, &table).unwrap();
        let mut diag = h.diagonal();
        diag.sort_by(f64::total_cmp);
        assert_eq!(eigenvalues(&h).unwrap(), diag);
    }

    #[test]
    fn ratio_examples() {
        let r = spacing_ratios(&[0.0, 1.0, 3.0, 4.0]).unwrap();
        assert_eq!(r.ratios, vec![0.5, 0.5]);
        let eq: Vec<f64> = (0..20).map(f64::from).collect();
        assert!(spacing_ratios(&eq)
            .unwrap()
            .ratios
            .iter()
            .all(|&x| x == 1.0));
        let deg = spacing_ratios(&[0.0, 1.0, 1.0, 1.0, 2.0]).unwrap();
        assert_eq!(deg.ratios, vec![0.0, 0.0, 0.0]);
        assert_eq!(deg.degenerate, 3);
        assert!(spacing_ratios(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn trimming() {
        let levels: Vec<f64> = (0..10).map(|i| f64::from(i * i)).collect();
        let t = trimmed_ratios(&levels, 0.1).unwrap();
        assert_eq!(t.ratios.len(), 6);
        assert_eq!(t.energies[0], 4.0);
        assert!(trimmed_ratios(&levels[..4], 0.3).is_err());
        assert!(trimmed_ratios(&levels, 0.5).is_err());
    }

    #[test]
    fn dos_is_normalized() {
        let spectra = vec![vec![-1.0, 0.0, 0.5, 2.0], vec![0.1, 0.2, 0.3, 3.0]];
        let h = dos_histogram(&spectra, 2, 10).unwrap();
        let mass: f64 = h.density.iter().sum::<f64>() * h.width;
        assert!((mass - 1.0).abs() < 1e-12);
        assert!(h.centers[0] - h.width / 2.0 >= -0.5 - 1e-12);
        assert!(dos_histogram(&spectra, 2, 5).is_err());
    }
}

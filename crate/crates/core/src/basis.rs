//! Occupation-number (Fock) basis for `N` bosons on `L` sites.
//!
//! States are kept in lexicographically descending order of their occupation
//! vectors, so `|N,0,…,0⟩` has rank 0 and `|0,…,0,N⟩` has rank `dim − 1`.
//! Ranking uses the combinatorial number system: no hash table is needed and
//! a lookup costs `O(L · N)` in the worst case.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest basis built unless the caller raises the cap explicitly.
pub const DEFAULT_DIM_CAP: usize = 100_000;

/// Occupation vector `|n₁, …, n_L⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FockState(Vec<u32>);

impl FockState {
    pub fn new(occupations: Vec<u32>) -> Self {
        FockState(occupations)
    }

    /// Mott state `|1,1,…,1⟩` on `sites` sites.
    pub fn mott(sites: usize) -> Self {
        FockState(vec![1; sites])
    }

    pub fn occupations(&self) -> &[u32] {
        &self.0
    }

    pub fn sites(&self) -> usize {
        self.0.len()
    }

    pub fn particles(&self) -> u64 {
        self.0.iter().map(|&n| u64::from(n)).sum()
    }

    /// `Σ nᵢ²`, the integer numerator of the crowding parameter.
    pub fn sum_of_squares(&self) -> u64 {
        self.0.iter().map(|&n| u64::from(n) * u64::from(n)).sum()
    }

    /// Compact label used in file names: digits run together when every
    /// occupation is a single digit, dash-separated otherwise.
    pub fn label(&self) -> String {
        if self.0.iter().all(|&n| n < 10) {
            self.0.iter().map(|n| n.to_string()).collect()
        } else {
            self.0
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join("-")
        }
    }

    /// Bosonic hop `b†_to b_from`. Returns the image state and the matrix
    /// element `√(n_from · (n_to + 1))`, or `None` when the source site is empty.
    pub fn hop_image(&self, from: usize, to: usize) -> Option<(FockState, f64)> {
        assert!(from != to, "hop_image: from and to must differ");
        let n_from = *self.0.get(from)?;
        let n_to = *self.0.get(to)?;
        if n_from == 0 {
            return None;
        }
        let mut occ = self.0.clone();
        occ[from] -= 1;
        occ[to] += 1;
        let amp = ((u64::from(n_from) * (u64::from(n_to) + 1)) as f64).sqrt();
        Some((FockState(occ), amp))
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

impl std::str::FromStr for FockState {
    type Err = Error;

    /// Parses comma-separated occupations (`"2,2,0,0"`), or a bare digit
    /// string (`"2200"`) where each character is one site.
    fn from_str(s: &str) -> Result<Self> {
        let s = s
            .trim()
            .trim_start_matches('|')
            .trim_end_matches(['⟩', '>']);
        let parse = |tok: &str| {
            tok.trim()
                .parse::<u32>()
                .map_err(|_| Error::domain(format!("invalid occupation {tok:?} in state {s:?}")))
        };
        let occ = if s.contains(',') {
            s.split(',').map(parse).collect::<Result<Vec<_>>>()?
        } else {
            s.chars()
                .map(|c| parse(&c.to_string()))
                .collect::<Result<Vec<_>>>()?
        };
        if occ.is_empty() {
            return Err(Error::domain("empty occupation list"));
        }
        Ok(FockState(occ))
    }
}

/// Number of compositions of `n` into `parts` non-negative parts.
pub fn composition_count(n: u64, parts: u64) -> Option<u128> {
    if parts == 0 {
        return Some(u128::from(n == 0));
    }
    binomial(n + parts - 1, parts - 1)
}

fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// Every composition of `N` into `L` parts together with its inverse map.
#[derive(Clone, Debug)]
pub struct BasisTable {
    particles: u32,
    sites: usize,
    states: Vec<FockState>,
    // counts[r][p] = compositions of r particles into p sites
    counts: Vec<Vec<usize>>,
}

impl BasisTable {
    pub fn build(particles: u32, sites: usize) -> Result<Self> {
        Self::build_with_cap(particles, sites, DEFAULT_DIM_CAP)
    }

    pub fn build_with_cap(particles: u32, sites: usize, cap: usize) -> Result<Self> {
        if particles == 0 || sites == 0 {
            return Err(Error::domain(format!(
                "basis needs N >= 1 and L >= 1 (got N = {particles}, L = {sites})"
            )));
        }
        let dim = composition_count(u64::from(particles), sites as u64)
            .filter(|&d| d <= cap as u128)
            .ok_or_else(|| {
                Error::domain(format!(
                    "basis dimension for N = {particles}, L = {sites} exceeds the cap of {cap}"
                ))
            })? as usize;

        let n = particles as usize;
        let mut counts = vec![vec![0usize; sites + 1]; n + 1];
        for (r, row) in counts.iter_mut().enumerate() {
            for (p, c) in row.iter_mut().enumerate() {
                // bounded by dim, which fits
                *c = composition_count(r as u64, p as u64).unwrap() as usize;
            }
        }

        let mut states = Vec::with_capacity(dim);
        let mut occ = vec![0u32; sites];
        occ[0] = particles;
        loop {
            states.push(FockState(occ.clone()));
            if !next_descending(&mut occ) {
                break;
            }
        }
        debug_assert_eq!(states.len(), dim);

        Ok(BasisTable {
            particles,
            sites,
            states,
            counts,
        })
    }

    pub fn particles(&self) -> u32 {
        self.particles
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> &FockState {
        &self.states[index]
    }

    pub fn check(&self, state: &FockState) -> Result<()> {
        if state.sites() != self.sites {
            return Err(Error::domain(format!(
                "state {state} has {} sites, basis has L = {}",
                state.sites(),
                self.sites
            )));
        }
        if state.particles() != u64::from(self.particles) {
            return Err(Error::domain(format!(
                "state {state} holds {} particles, basis has N = {}",
                state.particles(),
                self.particles
            )));
        }
        Ok(())
    }

    /// Position of `state` in the canonical order.
    pub fn rank(&self, state: &FockState) -> Result<usize> {
        self.check(state)?;
        let mut rank = 0usize;
        let mut remaining = self.particles as usize;
        for (i, &n) in state.occupations().iter().enumerate().take(self.sites - 1) {
            let rest = self.sites - i - 1;
            // states with a larger occupation at site i come first
            for v in (n as usize + 1)..=remaining {
                rank += self.counts[remaining - v][rest];
            }
            remaining -= n as usize;
        }
        Ok(rank)
    }

    /// Inverse of [`rank`](Self::rank), computed combinatorially.
    pub fn unrank(&self, mut rank: usize) -> Result<FockState> {
        if rank >= self.dim() {
            return Err(Error::domain(format!(
                "rank {rank} out of range for dim {}",
                self.dim()
            )));
        }
        let mut occ = vec![0u32; self.sites];
        let mut remaining = self.particles as usize;
        for (i, slot) in occ.iter_mut().enumerate().take(self.sites - 1) {
            let rest = self.sites - i - 1;
            let mut v = remaining;
            loop {
                let block = self.counts[remaining - v][rest];
                if rank < block {
                    break;
                }
                rank -= block;
                v -= 1;
            }
            *slot = v as u32;
            remaining -= v;
        }
        occ[self.sites - 1] = remaining as u32;
        Ok(FockState(occ))
    }
}

/// Advances `occ` to the next composition in descending lexicographic order.
fn next_descending(occ: &mut [u32]) -> bool {
    let len = occ.len();
    if len < 2 {
        return false;
    }
    // rightmost position (excluding the last site) with a particle to give away
    let Some(i) = (0..len - 1).rev().find(|&i| occ[i] > 0) else {
        return false;
    };
    let tail: u32 = occ[i + 1..].iter().sum();
    occ[i] -= 1;
    for x in &mut occ[i + 1..] {
        *x = 0;
    }
    occ[i + 1] = tail + 1;
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_dimensions() {
        assert_eq!(BasisTable::build(7, 7).unwrap().dim(), 1716);
        assert_eq!(BasisTable::build(9, 9).unwrap().dim(), 24310);
    }

    #[test]
    fn two_bosons_two_sites() {
        let t = BasisTable::build(2, 2).unwrap();
        let got: Vec<_> = t
            .states()
            .iter()
            .map(|s| s.occupations().to_vec())
            .collect();
        assert_eq!(got, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn rank_endpoints_and_roundtrip() {
        let t = BasisTable::build(7, 7).unwrap();
        assert_eq!(
            t.rank(&FockState::new(vec![7, 0, 0, 0, 0, 0, 0])).unwrap(),
            0
        );
        assert_eq!(
            t.rank(&FockState::new(vec![0, 0, 0, 0, 0, 0, 7])).unwrap(),
            1715
        );
        for (i, s) in t.states().iter().enumerate() {
            assert_eq!(t.rank(s).unwrap(), i);
            assert_eq!(&t.unrank(i).unwrap(), s);
        }
    }

    #[test]
    fn states_strictly_descending() {
        let t = BasisTable::build(5, 4).unwrap();
        assert!(t.states().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(BasisTable::build(0, 3), Err(Error::Domain(_))));
        assert!(matches!(BasisTable::build(3, 0), Err(Error::Domain(_))));
        assert!(BasisTable::build_with_cap(9, 9, 1000).is_err());
        let t = BasisTable::build(3, 3).unwrap();
        assert!(t.rank(&FockState::new(vec![1, 1, 0])).is_err());
        assert!(t.rank(&FockState::new(vec![1, 1, 1, 0])).is_err());
        assert!(t.unrank(10).is_err());
    }

    #[test]
    fn hop_examples() {
        let (s, a) = FockState::new(vec![1, 1]).hop_image(1, 0).unwrap();
        assert_eq!(s.occupations(), &[2, 0]);
        assert_eq!(a, 2f64.sqrt());
        let (s, a) = FockState::new(vec![2, 0]).hop_image(0, 1).unwrap();
        assert_eq!(s.occupations(), &[1, 1]);
        assert_eq!(a, 2f64.sqrt());
        assert!(FockState::new(vec![0, 2]).hop_image(0, 1).is_none());
    }

    #[test]
    fn parse_and_label() {
        let a: FockState = "2,2,0,0,0,0,2,2".parse().unwrap();
        let b: FockState = "|22000022⟩".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.label(), "22000022");
        assert_eq!(FockState::new(vec![10, 0]).label(), "10-0");
        assert!("1,x".parse::<FockState>().is_err());
    }
}

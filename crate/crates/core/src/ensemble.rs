//! Seeded disorder ensembles.
//!
//! Phase `φᵢ` of realization `i` comes from its own ChaCha stream keyed by
//! `(master seed, i)`, so adding realizations never changes earlier phases.
//! Realizations run on a dedicated rayon pool and are always collected in
//! index order; every downstream reduction is therefore independent of the
//! worker count.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One disorder realization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub index: u64,
    pub phase: f64,
}

/// `φ` of realization `index`, uniform on `[0, 2π)`.
pub fn phase_for(master_seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    let u: f64 = rng.random();
    let phi = u * TAU;
    // u < 1 but the product can round up to 2π
    if phi >= TAU {
        0.0
    } else {
        phi
    }
}

pub fn sample_phases(master_seed: u64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::domain("need at least one realization"));
    }
    Ok((0..count as u64)
        .map(|i| phase_for(master_seed, i))
        .collect())
}

pub fn realizations(master_seed: u64, count: usize) -> Result<Vec<Realization>> {
    Ok(sample_phases(master_seed, count)?
        .into_iter()
        .enumerate()
        .map(|(i, phase)| Realization {
            index: i as u64,
            phase,
        })
        .collect())
}

/// Default memory allowed for concurrent dense eigensolves.
pub const DEFAULT_MEMORY_BUDGET: u64 = 4 << 30;

/// Worker count for dense problems of dimension `dim`: the request (or the
/// available cores), capped by the task count and by how many
/// `~4·dim²·8`-byte solves fit in `memory_budget`.
pub fn worker_count(
    requested: Option<usize>,
    tasks: usize,
    dim: usize,
    memory_budget: u64,
) -> usize {
    let cores = requested
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    let per_solve = 4 * (dim as u64).pow(2) * 8;
    let by_memory = (memory_budget / per_solve.max(1)).max(1) as usize;
    cores.min(tasks.max(1)).min(by_memory)
}

/// Runs `task` for every realization on `workers` threads and returns the
/// outputs in realization order. Failures carry the realization's phase.
pub fn run_realizations<T, F>(
    master_seed: u64,
    list: &[Realization],
    workers: usize,
    task: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Realization) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        list.par_iter()
            .map(|r| {
                task(r).map_err(|source| match source {
                    e @ Error::Realization { .. } => e,
                    source => Error::Realization {
                        index: r.index,
                        phi: r.phase,
                        seed: master_seed,
                        source: Box::new(source),
                    },
                })
            })
            .collect()
    })
}

/// Keyed collector: insertion order and grouping never affect the output.
#[derive(Clone, Debug)]
pub struct EnsembleAccumulator<T> {
    items: BTreeMap<u64, T>,
}

impl<T> Default for EnsembleAccumulator<T> {
    fn default() -> Self {
        EnsembleAccumulator {
            items: BTreeMap::new(),
        }
    }
}

impl<T> EnsembleAccumulator<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, index: u64, item: T) -> Result<()> {
        if self.items.insert(index, item).is_some() {
            return Err(Error::domain(format!("realization {index} inserted twice")));
        }
        Ok(())
    }

    pub fn merge(mut self, other: Self) -> Result<Self> {
        for (k, v) in other.items {
            self.insert(k, v)?;
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Items in realization order.
    pub fn into_ordered(self) -> Vec<T> {
        self.items.into_values().collect()
    }
}

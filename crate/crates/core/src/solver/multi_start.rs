use rayon::prelude::*;

use super::{run_seeded, RunResult, SolverConfig};
use crate::error::Result;
use crate::signal::Observations;

/// Final divergences further apart than `DISAGREEMENT_THRESHOLD * sum y`
/// are flagged as disagreeing starts.
pub const DISAGREEMENT_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct MultiStartResult {
    /// One run per start, ordered by seed.
    pub runs: Vec<RunResult>,
    pub best_index: usize,
    /// Largest minus smallest final divergence.
    pub agreement: f64,
    /// `agreement > DISAGREEMENT_THRESHOLD * sum y`.
    pub disagreement: bool,
}

impl MultiStartResult {
    pub fn best(&self) -> &RunResult {
        &self.runs[self.best_index]
    }
}

/// Runs `cfg.n_starts` independent starts with seeds `seed, seed + 1, ...`
/// and keeps the one with the lowest final divergence.
///
/// Starts execute in parallel; the result does not depend on scheduling.
pub fn multi_start(y: &Observations, cfg: &SolverConfig) -> Result<MultiStartResult> {
    cfg.validate()?;
    let runs = (0..cfg.n_starts as u64)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i);
            let x0 = cfg.init.initial_point(y, seed)?;
            run_seeded(y, &x0, cfg, Some(seed))
        })
        .collect::<Result<Vec<_>>>()?;

    // strict < keeps the earliest seed on ties
    let mut best_index = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.divergence < runs[best_index].divergence {
            best_index = i;
        }
    }
    let lo = runs[best_index].divergence;
    let hi = runs.iter().map(|r| r.divergence).fold(lo, f64::max);
    let agreement = hi - lo;
    Ok(MultiStartResult {
        disagreement: agreement > DISAGREEMENT_THRESHOLD * y.total(),
        runs,
        best_index,
        agreement,
    })
}

//! Constrained-memory streaming pipeline emulating the measure-then-model
//! loop on a sensor node.
//!
//! Instead of retaining raw samples, the node keeps one compound
//! observation per parameter constellation: the running mean sending delay
//! and its observation count, charged at (3 parameters + mean + count) * 4
//! = 20 bytes per constellation regardless of how many packets stream
//! through. Model fitting then runs over the per-constellation means. A
//! running squared-deviation term is tracked beside the paper budget so
//! variances stay available; it is accounted separately.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::experiment::{ParamPoint, RunResult};
use crate::regress::{
    fit_from_observations, fit_from_observations_weighted, predict, Predictor, RegressError,
    RegressionModel, Response,
};

/// Bytes charged per constellation cell: three parameters, the running
/// mean and the count, four bytes each.
pub const CELL_BYTES: usize = 20;
/// Extra bytes per cell for the variance accumulator, outside the budget.
pub const VARIANCE_EXTRA_BYTES: usize = 4;

/// A parameter constellation acting as storage key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstellationKey {
    pub b_p: u32,
    pub p_s: u32,
    pub n_c: u32,
}

impl ConstellationKey {
    pub fn new(b_p: u32, p_s: u32, n_c: u32) -> Self {
        ConstellationKey { b_p, p_s, n_c }
    }
}

impl From<ParamPoint> for ConstellationKey {
    fn from(p: ParamPoint) -> Self {
        ConstellationKey::new(p.b_p, p.p_s, p.n_c)
    }
}

impl From<ConstellationKey> for ParamPoint {
    fn from(k: ConstellationKey) -> Self {
        ParamPoint::new(k.b_p, k.p_s, k.n_c)
    }
}

/// One compound observation: running mean (and squared deviation) of the
/// sending delay under one constellation.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamCell {
    pub key: ConstellationKey,
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl StreamCell {
    fn new(key: ConstellationKey) -> Self {
        StreamCell {
            key,
            count: 0,
            mean: 0.0,
            m2: 0.0,
        }
    }

    fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    /// Sample variance of the observations seen so far.
    pub fn variance(&self) -> f64 {
        if self.count > 1 {
            self.m2 / (self.count - 1) as f64
        } else {
            0.0
        }
    }
}

#[derive(Debug, Error)]
pub enum MoteError {
    #[error("model does not use B_P; cannot invert it for a backoff budget")]
    BackoffNotInModel,
    #[error(transparent)]
    Regress(#[from] RegressError),
}

/// The node's measurement store: one cell per constellation observed.
#[derive(Debug, Clone, Default)]
pub struct MoteState {
    cells: BTreeMap<ConstellationKey, StreamCell>,
}

impl MoteState {
    pub fn new() -> Self {
        MoteState::default()
    }

    /// Fold one sending-delay sample (microseconds) into the cell of `key`.
    /// No raw sample is retained.
    pub fn observe(&mut self, key: ConstellationKey, psd_us: f64) {
        debug_assert!(psd_us >= 0.0);
        self.cells
            .entry(key)
            .or_insert_with(|| StreamCell::new(key))
            .push(psd_us);
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Per-constellation means in ascending key order.
    pub fn snapshot_means(&self) -> Vec<(ConstellationKey, f64, u64)> {
        self.cells
            .values()
            .map(|c| (c.key, c.mean, c.count))
            .collect()
    }

    /// All cells in ascending key order.
    pub fn cells(&self) -> impl Iterator<Item = &StreamCell> {
        self.cells.values()
    }

    /// Fit a variant over the per-constellation means, each constellation
    /// weighted equally — the fit a node can afford from its 20-byte cells.
    pub fn fit_incremental(
        &self,
        variant: &crate::regress::ModelVariant,
    ) -> Result<RegressionModel, MoteError> {
        let obs: Vec<(ParamPoint, f64)> = self
            .cells
            .values()
            .map(|c| (c.key.into(), c.mean))
            .collect();
        Ok(fit_from_observations(&obs, variant, Response::Psd)?)
    }

    /// Count-weighted alternative: constellations with more observations
    /// pull harder on the fit.
    pub fn fit_incremental_weighted(
        &self,
        variant: &crate::regress::ModelVariant,
    ) -> Result<RegressionModel, MoteError> {
        let mut obs = Vec::with_capacity(self.cells.len());
        let mut weights = Vec::with_capacity(self.cells.len());
        for c in self.cells.values() {
            obs.push((c.key.into(), c.mean));
            weights.push(c.count as f64);
        }
        Ok(fit_from_observations_weighted(
            &obs,
            &weights,
            variant,
            Response::Psd,
        )?)
    }

    /// Storage charge of the state under the 20-byte-per-cell scheme.
    /// Independent of how many samples each cell absorbed.
    pub fn memory_footprint(&self) -> usize {
        self.cells.len() * CELL_BYTES
    }

    /// Storage charge of the variance accumulators kept beside the scheme.
    pub fn variance_extra_bytes(&self) -> usize {
        self.cells.len() * VARIANCE_EXTRA_BYTES
    }

    /// Render the state as mean-only run summaries so it can persist in the
    /// run-summary CSV schema and be refit offline. Loss counters are not
    /// part of the stream, so packets count as received and the loss rate
    /// is zero.
    pub fn to_run_results(&self) -> Vec<RunResult> {
        self.cells
            .values()
            .map(|c| RunResult {
                point: c.key.into(),
                n_sent: c.count as usize,
                n_received: c.count as usize,
                plr: 0.0,
                psd_mean_us: c.mean,
                psd_sd_us: c.variance().sqrt(),
                seed: 0,
                samples: None,
            })
            .collect()
    }
}

/// Backoff periods in 1..=20 whose predicted sending delay stays within
/// `max_psd_us` at the given packet size and contender count. An empty
/// result signals the requirement is infeasible for every backoff setting.
pub fn assess(
    model: &RegressionModel,
    max_psd_us: f64,
    p_s: u32,
    n_c: u32,
) -> Result<Vec<u32>, MoteError> {
    if !model.variant.contains(Predictor::BackoffPeriod) {
        return Err(MoteError::BackoffNotInModel);
    }
    Ok((1..=20)
        .filter(|&b_p| predict(model, &ParamPoint::new(b_p, p_s, n_c)).value <= max_psd_us)
        .collect())
}

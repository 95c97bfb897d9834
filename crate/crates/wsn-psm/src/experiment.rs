//! Parameter-sweep harness: runs trial series over constellations of the
//! three network parameters, aggregates per-run statistics and persists
//! datasets as CSV.
//!
//! A run executes `samples_per_run` independent trials of one constellation
//! (the trigger lag between consecutive trials is long enough that no
//! channel state survives from one trial to the next, so trials share
//! nothing but the derived seed schedule). Node 0 is the node of interest:
//! packet counts and delay statistics are collected for it alone, while the
//! other contenders only shape the channel.

use std::io::{self, BufRead, BufReader, Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{mix_seed, RngStream};
use crate::sim::{run_trial, DelaySample, MacConfig, PpdModel, SimError};

/// One constellation of the three swept network parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParamPoint {
    /// Backoff period in slots.
    pub b_p: u32,
    /// Packet size in bytes, protocol overhead included.
    pub p_s: u32,
    /// Number of contenders, the node of interest included.
    pub n_c: u32,
}

impl ParamPoint {
    pub fn new(b_p: u32, p_s: u32, n_c: u32) -> Self {
        ParamPoint { b_p, p_s, n_c }
    }
}

impl std::fmt::Display for ParamPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(B_P={}, P_S={}, N_C={})", self.b_p, self.p_s, self.n_c)
    }
}

/// Inclusive integer range with a step, e.g. 20:120:5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeSpec {
    pub lo: u32,
    pub hi: u32,
    pub step: u32,
}

impl RangeSpec {
    pub fn new(lo: u32, hi: u32, step: u32) -> Self {
        RangeSpec { lo, hi, step }
    }

    pub fn values(&self) -> Vec<u32> {
        if self.step == 0 || self.lo > self.hi {
            return Vec::new();
        }
        (self.lo..=self.hi).step_by(self.step as usize).collect()
    }

    pub fn len(&self) -> usize {
        self.values().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// How much raw per-trial material a run keeps beside its summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SampleRetention {
    /// Summary statistics only.
    #[default]
    None,
    /// One sample per trial: the node of interest.
    NoiOnly,
    /// Every contender's sample in every trial.
    All,
}

/// Sweep description: axis ranges, per-run sample count, seed and the
/// simulator configuration shared by every run.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub b_p: RangeSpec,
    pub p_s: RangeSpec,
    pub n_c: Vec<u32>,
    pub samples_per_run: usize,
    pub master_seed: u64,
    pub retention: SampleRetention,
    pub mac: MacConfig,
    pub ppd: PpdModel,
}

impl Default for SweepConfig {
    /// The reference sweep: B_P 1..20 by 1, P_S 20..120 by 5,
    /// N_C {1,2,4,8}, 1000 samples per run.
    fn default() -> Self {
        SweepConfig {
            b_p: RangeSpec::new(1, 20, 1),
            p_s: RangeSpec::new(20, 120, 5),
            n_c: vec![1, 2, 4, 8],
            samples_per_run: 1000,
            master_seed: 0xB0FF_CAFE,
            retention: SampleRetention::None,
            mac: MacConfig::default(),
            ppd: PpdModel::default(),
        }
    }
}

impl SweepConfig {
    /// All constellations in deterministic sweep order.
    pub fn points(&self) -> Vec<ParamPoint> {
        let mut pts = Vec::new();
        for b_p in self.b_p.values() {
            for p_s in self.p_s.values() {
                for &n_c in &self.n_c {
                    pts.push(ParamPoint::new(b_p, p_s, n_c));
                }
            }
        }
        pts
    }

    /// Seed of the run at `point`, derived from the master seed and the
    /// constellation alone, so datasets are reproducible and insensitive to
    /// sweep-axis reordering.
    pub fn run_seed(&self, point: &ParamPoint) -> u64 {
        mix_seed(
            self.master_seed,
            point.b_p as u64,
            point.p_s as u64,
            point.n_c as u64,
        )
    }
}

/// Aggregate of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub point: ParamPoint,
    pub n_sent: usize,
    pub n_received: usize,
    /// Packet loss rate of the node of interest.
    pub plr: f64,
    /// Mean packet sending delay of the node of interest, microseconds.
    pub psd_mean_us: f64,
    /// Sample standard deviation of the sending delay, microseconds.
    pub psd_sd_us: f64,
    pub seed: u64,
    /// Raw per-trial samples, present according to the run's retention.
    pub samples: Option<Vec<Vec<DelaySample>>>,
}

/// A sweep's worth of run results.
pub type Dataset = Vec<RunResult>;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("line 1: expected header `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("line {line}: {msg}")]
    Row { line: usize, msg: String },
    #[error("dataset carries no raw samples; rerun the sweep with retention")]
    MissingSamples,
    #[error("loss rate undefined for zero sent packets")]
    ZeroSent,
}

/// Packet loss rate: the fraction of issued packets not received.
pub fn compute_plr(sent: usize, received: usize) -> Result<f64, DataError> {
    if sent == 0 {
        return Err(DataError::ZeroSent);
    }
    debug_assert!(received <= sent);
    Ok((sent - received) as f64 / sent as f64)
}

/// Single-pass mean/variance accumulator.
#[derive(Default)]
struct Running {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Running {
    fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    fn sd(&self) -> f64 {
        if self.count > 1 {
            (self.m2 / (self.count - 1) as f64).sqrt()
        } else {
            0.0
        }
    }
}

/// Execute `n` independent trials of one constellation and aggregate the
/// node of interest's outcomes.
pub fn run_series(
    point: &ParamPoint,
    n: usize,
    seed: u64,
    mac: &MacConfig,
    ppd: &PpdModel,
    retention: SampleRetention,
) -> Result<RunResult, SimError> {
    assert!(n >= 1, "a series needs at least one trial");
    let mac = MacConfig {
        b_p: point.b_p,
        ..mac.clone()
    };
    let series_rng = RngStream::new(seed);
    let mut received = 0usize;
    let mut psd = Running::default();
    let mut kept: Option<Vec<Vec<DelaySample>>> = match retention {
        SampleRetention::None => None,
        _ => Some(Vec::with_capacity(n)),
    };
    for trial in 0..n {
        let samples = run_trial(
            point.n_c as usize,
            point.p_s,
            &mac,
            ppd,
            &series_rng.derive(trial as u64),
        )?;
        let noi = samples[0];
        if noi.delivered {
            received += 1;
        }
        psd.push(noi.psd_us as f64);
        if let Some(kept) = kept.as_mut() {
            match retention {
                SampleRetention::NoiOnly => kept.push(vec![noi]),
                SampleRetention::All => kept.push(samples),
                SampleRetention::None => unreachable!(),
            }
        }
    }
    Ok(RunResult {
        point: *point,
        n_sent: n,
        n_received: received,
        plr: (n - received) as f64 / n as f64,
        psd_mean_us: psd.mean,
        psd_sd_us: psd.sd(),
        seed,
        samples: kept,
    })
}

/// Run every constellation of the sweep, in deterministic order.
///
/// Runs are independent and execute on the current rayon thread pool;
/// results are merged back in constellation order, so the dataset is
/// identical however many worker threads are active.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Dataset, SimError> {
    cfg.points()
        .par_iter()
        .map(|point| {
            run_series(
                point,
                cfg.samples_per_run,
                cfg.run_seed(point),
                &cfg.mac,
                &cfg.ppd,
                cfg.retention,
            )
        })
        .collect()
}

pub const SUMMARY_HEADER: &str = "b_p,p_s,n_c,n_sent,n_received,plr,psd_mean_us,psd_sd_us,seed";
pub const RAW_HEADER: &str = "b_p,p_s,n_c,trial,node,ppd_us,mad_us,ptd_us,psd_us,delivered";

/// Write run summaries as CSV. Floats print in shortest round-trip form,
/// so `import_csv` recovers them bit for bit.
pub fn export_csv<W: Write>(dataset: &[RunResult], mut w: W) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for r in dataset {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.point.b_p,
            r.point.p_s,
            r.point.n_c,
            r.n_sent,
            r.n_received,
            r.plr,
            r.psd_mean_us,
            r.psd_sd_us,
            r.seed
        )?;
    }
    Ok(())
}

/// Write retained raw samples as CSV, one row per (trial, node).
pub fn export_raw_csv<W: Write>(dataset: &[RunResult], mut w: W) -> Result<(), DataError> {
    writeln!(w, "{RAW_HEADER}")?;
    for r in dataset {
        let samples = r.samples.as_ref().ok_or(DataError::MissingSamples)?;
        for (trial, nodes) in samples.iter().enumerate() {
            for (node, s) in nodes.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.point.b_p,
                    r.point.p_s,
                    r.point.n_c,
                    trial,
                    node,
                    s.ppd_us,
                    s.mad_us,
                    s.ptd_us,
                    s.psd_us,
                    s.delivered
                )?;
            }
        }
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(field: &str, name: &str, line: usize) -> Result<T, DataError> {
    field.trim().parse().map_err(|_| DataError::Row {
        line,
        msg: format!("cannot parse {name} from `{field}`"),
    })
}

/// Read a run-summary CSV written by [`export_csv`].
pub fn import_csv<R: Read>(r: R) -> Result<Dataset, DataError> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| DataError::Header {
        expected: SUMMARY_HEADER.into(),
        found: "<empty file>".into(),
    })?;
    let header = header?;
    if header.trim_end() != SUMMARY_HEADER {
        return Err(DataError::Header {
            expected: SUMMARY_HEADER.into(),
            found: header,
        });
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(DataError::Row {
                line: lineno,
                msg: format!("expected 9 fields, found {}", fields.len()),
            });
        }
        let n_sent = parse_field(fields[3], "n_sent", lineno)?;
        let n_received = parse_field(fields[4], "n_received", lineno)?;
        if n_received > n_sent {
            return Err(DataError::Row {
                line: lineno,
                msg: format!("n_received {n_received} exceeds n_sent {n_sent}"),
            });
        }
        out.push(RunResult {
            point: ParamPoint::new(
                parse_field(fields[0], "b_p", lineno)?,
                parse_field(fields[1], "p_s", lineno)?,
                parse_field(fields[2], "n_c", lineno)?,
            ),
            n_sent,
            n_received,
            plr: parse_field(fields[5], "plr", lineno)?,
            psd_mean_us: parse_field(fields[6], "psd_mean_us", lineno)?,
            psd_sd_us: parse_field(fields[7], "psd_sd_us", lineno)?,
            seed: parse_field(fields[8], "seed", lineno)?,
            samples: None,
        });
    }
    Ok(out)
}

/// Read a raw-sample CSV written by [`export_raw_csv`], keeping the node
/// of interest's rows (node 0) in file order — the rows downstream fits
/// consume.
pub fn import_raw_csv<R: Read>(r: R) -> Result<Vec<(ParamPoint, DelaySample)>, DataError> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| DataError::Header {
        expected: RAW_HEADER.into(),
        found: "<empty file>".into(),
    })?;
    let header = header?;
    if header.trim_end() != RAW_HEADER {
        return Err(DataError::Header {
            expected: RAW_HEADER.into(),
            found: header,
        });
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(DataError::Row {
                line: lineno,
                msg: format!("expected 10 fields, found {}", fields.len()),
            });
        }
        let node: usize = parse_field(fields[4], "node", lineno)?;
        if node != 0 {
            continue; // only the node of interest feeds downstream fits
        }
        let point = ParamPoint::new(
            parse_field(fields[0], "b_p", lineno)?,
            parse_field(fields[1], "p_s", lineno)?,
            parse_field(fields[2], "n_c", lineno)?,
        );
        let sample = DelaySample {
            ppd_us: parse_field(fields[5], "ppd_us", lineno)?,
            mad_us: parse_field(fields[6], "mad_us", lineno)?,
            ptd_us: parse_field(fields[7], "ptd_us", lineno)?,
            psd_us: parse_field(fields[8], "psd_us", lineno)?,
            delivered: parse_field(fields[9], "delivered", lineno)?,
        };
        out.push((point, sample));
    }
    Ok(out)
}

/// Regression observations: one row per run, response = mean sending delay.
pub fn psd_run_means(dataset: &[RunResult]) -> Vec<(ParamPoint, f64)> {
    dataset.iter().map(|r| (r.point, r.psd_mean_us)).collect()
}

/// Regression observations: one row per retained trial of the node of
/// interest, response = that packet's sending delay.
pub fn psd_trial_samples(dataset: &[RunResult]) -> Result<Vec<(ParamPoint, f64)>, DataError> {
    let mut rows = Vec::new();
    for r in dataset {
        let samples = r.samples.as_ref().ok_or(DataError::MissingSamples)?;
        for trial in samples {
            rows.push((r.point, trial[0].psd_us as f64));
        }
    }
    Ok(rows)
}

/// Regression observations: one row per run, response = packet loss rate.
pub fn plr_runs(dataset: &[RunResult]) -> Vec<(ParamPoint, f64)> {
    dataset.iter().map(|r| (r.point, r.plr)).collect()
}

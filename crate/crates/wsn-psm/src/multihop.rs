//! Tandem-topology store-and-forward simulation and hop-linear end-to-end
//! delay prediction with confidence-interval validation.
//!
//! A packet crosses `h` hops, one in flight at a time. Each hop costs a
//! full sending process at the forwarder (send-side PPD, initial backoff,
//! transmission) plus the receive-side PPD at the receiving node — the
//! destination included. The enhanced prediction model mirrors that
//! structure: `h * (psd_estimate + ppd_send / 2)`, the halving reflecting
//! that reception-side processing runs at about half the send-side cost.

use std::io::{self, Write};

use thiserror::Error;

use crate::experiment::ParamPoint;
use crate::regress::{predict, t_quantile, Interval, RegressionModel};
use crate::rng::RngStream;
use crate::sim::{compute_ppd, run_trial, Direction, MacConfig, PpdModel, SimError};

/// Tandem scenario description.
#[derive(Debug, Clone)]
pub struct TandemConfig {
    /// Number of hops between source and destination.
    pub hops: u32,
    /// Constellation the senders operate at; only `b_p` and `p_s` shape the
    /// forwarding chain, since a stop-and-wait tandem carries no contention.
    pub point: ParamPoint,
    /// End-to-end packets to simulate.
    pub samples: usize,
    pub mac: MacConfig,
    pub ppd: PpdModel,
}

impl Default for TandemConfig {
    fn default() -> Self {
        TandemConfig {
            hops: 1,
            point: ParamPoint::new(10, 70, 1),
            samples: 1000,
            mac: MacConfig::default(),
            ppd: PpdModel::default(),
        }
    }
}

impl TandemConfig {
    pub fn with_hops(hops: u32) -> Self {
        TandemConfig {
            hops,
            ..TandemConfig::default()
        }
    }
}

/// One hop count's comparison of prediction against measurement.
#[derive(Debug, Clone)]
pub struct HopValidation {
    pub hops: u32,
    pub predicted_us: f64,
    pub measured_mean_us: f64,
    /// 95 % interval of the measured end-to-end delays (mean +- t * sd).
    pub measured_ci: Interval,
    /// True when the prediction falls inside the measured interval.
    pub overlap: bool,
}

/// Per-hop-count validation table.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub rows: Vec<HopValidation>,
}

impl ValidationReport {
    pub fn all_overlap(&self) -> bool {
        self.rows.iter().all(|r| r.overlap)
    }
}

#[derive(Debug, Error)]
pub enum MultihopError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("tandem needs at least one sample")]
    NoSamples,
}

/// Predicted end-to-end delay over `hops` hops, in microseconds:
/// the model's sending-delay estimate plus half the deterministic
/// send-side processing delay, summed per hop.
pub fn predict_e2ed(
    psd_model: &RegressionModel,
    point: &ParamPoint,
    hops: u32,
    ppd: &PpdModel,
) -> f64 {
    let per_hop = predict(psd_model, point).value + 0.5 * ppd.deterministic_send_us(point.p_s);
    hops as f64 * per_hop
}

/// Simulate `cfg.samples` end-to-end deliveries across the tandem and
/// return each packet's measured delay in microseconds.
///
/// Every hop runs the full single-sender channel acquisition (fresh
/// initial backoff; the chain is idle, so no congestion reattempts occur)
/// followed by the receiver's processing delay.
pub fn simulate_tandem(cfg: &TandemConfig, seed: u64) -> Result<Vec<u64>, MultihopError> {
    if cfg.samples == 0 {
        return Err(MultihopError::NoSamples);
    }
    let mac = MacConfig {
        b_p: cfg.point.b_p,
        ..cfg.mac.clone()
    };
    let base = RngStream::new(seed);
    let mut out = Vec::with_capacity(cfg.samples);
    for sample in 0..cfg.samples {
        let sample_rng = base.derive(sample as u64);
        let mut e2ed = 0u64;
        for hop in 0..cfg.hops {
            let hop_rng = sample_rng.derive(hop as u64);
            let sent = run_trial(1, cfg.point.p_s, &mac, &cfg.ppd, &hop_rng)?;
            let mut recv_rng = hop_rng.derive(u64::MAX);
            e2ed += sent[0].psd_us
                + compute_ppd(cfg.point.p_s, &cfg.ppd, Direction::Receive, &mut recv_rng);
        }
        out.push(e2ed);
    }
    Ok(out)
}

/// Mean of `values` and the two-sided interval covering the central
/// `level` share of the measured delays (normal-theory mean +- t * sd).
///
/// The interval is on the delay population, not on its mean: a forecast
/// validates when it lands inside the bulk of what the tandem actually
/// delivers. A systematic per-hop error still fails eventually, since the
/// interval width grows with sqrt(h) while such an error compounds
/// linearly.
fn measured_interval(values: &[u64], level: f64) -> (f64, Interval) {
    let n = values.len();
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n as f64;
    if n < 2 {
        return (
            mean,
            Interval {
                lo: mean,
                hi: mean,
                level,
            },
        );
    }
    let var = values
        .iter()
        .map(|&v| {
            let d = v as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / (n - 1) as f64;
    let half = t_quantile(0.5 + level / 2.0, n - 1) * var.sqrt();
    (
        mean,
        Interval {
            lo: mean - half,
            hi: mean + half,
            level,
        },
    )
}

/// Compare the model's end-to-end forecast against simulated tandem
/// measurements for every hop count 1..=max_hops. A hop count validates
/// when the forecast lies inside the 95 % interval of its measured delays.
pub fn validate(
    psd_model: &RegressionModel,
    max_hops: u32,
    base: &TandemConfig,
    seed: u64,
) -> Result<ValidationReport, MultihopError> {
    let mut rows = Vec::with_capacity(max_hops as usize);
    for hops in 1..=max_hops {
        let cfg = TandemConfig {
            hops,
            ..base.clone()
        };
        let measured = simulate_tandem(&cfg, seed ^ hops as u64)?;
        let (mean, ci) = measured_interval(&measured, 0.95);
        let predicted = predict_e2ed(psd_model, &cfg.point, hops, &cfg.ppd);
        rows.push(HopValidation {
            hops,
            predicted_us: predicted,
            measured_mean_us: mean,
            overlap: ci.contains(predicted),
            measured_ci: ci,
        });
    }
    Ok(ValidationReport { rows })
}

pub const REPORT_HEADER: &str = "h,predicted_us,measured_mean_us,ci_lo_us,ci_hi_us,overlap";

/// Write a validation report as CSV.
pub fn export_report_csv<W: Write>(report: &ValidationReport, mut w: W) -> io::Result<()> {
    writeln!(w, "{REPORT_HEADER}")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.hops,
            r.predicted_us,
            r.measured_mean_us,
            r.measured_ci.lo,
            r.measured_ci.hi,
            r.overlap
        )?;
    }
    Ok(())
}

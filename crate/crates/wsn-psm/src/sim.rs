//! Single-trial simulation of contending senders on a shared ideal channel.
//!
//! A trial models an event shower: `n_c` nodes in mutual radio range are
//! triggered at t = 0 and each tries to send one packet using slotted
//! random-backoff CSMA. The simulator tracks, per node, the three additive
//! components of the packet sending delay:
//!
//! * PPD — in-system packet preparation, linear in packet size plus jitter,
//! * MAD — medium access delay: every backoff wait until the channel is won,
//! * PTD — on-air modulation time at the radio bit rate.
//!
//! Timing model. A node finishes PPD, then waits a backoff of
//! `(r mod (z * b_p)) + b_min` slots. The clear channel assessment occupies
//! the `cca_us` ending one guard (`b_min` slots, the hardware turnaround
//! budget) before the wait expires; a busy verdict triggers a fresh
//! congestion backoff (`z = z_congestion`) appended to the wait. The node
//! therefore radiates exactly at wait expiry, and MAD is the plain sum of
//! its backoff waits. Because a node is committed (deaf) during the final
//! guard, two nodes whose assessments both pass within one guard of each
//! other transmit concurrently — the collision mechanism of interest.
//! Any temporal overlap of two transmissions destroys all packets involved;
//! there is no capture effect, no acknowledgment and no retransmission.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RngStream;

/// Symbol period of the modeled 250 kbit/s transceiver, in microseconds.
pub const SYMBOL_US: u64 = 16;
/// Backoff slot: two symbol periods.
pub const SLOT_US: u64 = 2 * SYMBOL_US;
/// Largest frame the modeled transceiver can hold, in bytes.
pub const MAX_FRAME_BYTES: u32 = 128;

/// Microsecond instant on a trial's timeline.
///
/// The timeline is a 64-bit unsigned microsecond counter starting at the
/// trigger; no floating-point time anywhere. Slot-aligned quantities are
/// multiples of [`SLOT_US`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(pub u64);

impl SimTime {
    pub fn micros(self) -> u64 {
        self.0
    }

    pub fn from_slots(slots: u64, slot_us: u64) -> Self {
        SimTime(slots * slot_us)
    }

    pub fn saturating_sub(self, us: u64) -> Self {
        SimTime(self.0.saturating_sub(us))
    }
}

impl std::ops::Add<u64> for SimTime {
    type Output = SimTime;
    fn add(self, rhs: u64) -> SimTime {
        SimTime(self.0 + rhs)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("packet size {0} exceeds the {MAX_FRAME_BYTES} byte frame limit")]
    PacketTooLarge(u32),
    #[error("invalid MAC configuration: {0}")]
    InvalidConfig(String),
    #[error("a trial needs at least one contender")]
    NoContenders,
}

/// MAC-layer parameters of the slotted CSMA scheme.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MacConfig {
    /// Constant slot offset added to every backoff draw; covers the
    /// hardware guard and turnaround budget.
    pub b_min: u32,
    /// Backoff period, the adjustable span multiplier of the draw interval.
    pub b_p: u32,
    /// Backoff factor for the first transmission attempt.
    pub z_initial: u32,
    /// Backoff factor after a busy channel assessment.
    pub z_congestion: u32,
    /// Slot duration in microseconds.
    pub slot_us: u64,
    /// Clear channel assessment duration in microseconds.
    pub cca_us: u64,
    /// Radio bit rate in bits per microsecond (0.25 = 250 kbit/s).
    pub rate_bits_per_us: f64,
    /// When set, every backoff draw uses this fixed 16-bit value instead of
    /// the random stream; isolates the deterministic delay components.
    pub frozen_r: Option<u16>,
}

impl Default for MacConfig {
    fn default() -> Self {
        MacConfig {
            b_min: 10,
            b_p: 10,
            z_initial: 31,
            z_congestion: 7,
            slot_us: SLOT_US,
            cca_us: 128,
            rate_bits_per_us: 0.25,
            frozen_r: None,
        }
    }
}

impl MacConfig {
    /// Default configuration with the given backoff period.
    pub fn with_backoff_period(b_p: u32) -> Self {
        MacConfig {
            b_p,
            ..MacConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.b_p < 1 {
            return Err(SimError::InvalidConfig("b_p must be >= 1".into()));
        }
        if self.z_congestion == 0 || self.z_initial <= self.z_congestion {
            return Err(SimError::InvalidConfig(
                "need z_initial > z_congestion > 0".into(),
            ));
        }
        if self.slot_us == 0 {
            return Err(SimError::InvalidConfig("slot_us must be > 0".into()));
        }
        if !self.rate_bits_per_us.is_finite() || self.rate_bits_per_us <= 0.0 {
            return Err(SimError::InvalidConfig("rate must be positive".into()));
        }
        Ok(())
    }

    /// Turnaround guard between a passed channel assessment and the start
    /// of radiation, in microseconds.
    fn guard_us(&self) -> u64 {
        self.b_min as u64 * self.slot_us
    }
}

/// Packet processing delay model: linear in packet size, plus jitter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PpdModel {
    /// Send-side fixed cost in microseconds.
    pub c0_send: f64,
    /// Send-side per-byte cost in microseconds.
    pub c1_send: f64,
    /// Receive-side PPD as a fraction of the send-side deterministic part.
    pub recv_factor: f64,
    /// Standard deviation of the per-packet jitter in microseconds.
    pub jitter_sd: f64,
}

impl Default for PpdModel {
    fn default() -> Self {
        PpdModel {
            c0_send: 200.0,
            c1_send: 8.0,
            recv_factor: 0.5,
            jitter_sd: 11.0,
        }
    }
}

impl PpdModel {
    /// Jitter-free variant, for component isolation.
    pub fn deterministic() -> Self {
        PpdModel {
            jitter_sd: 0.0,
            ..PpdModel::default()
        }
    }

    /// Deterministic send-side PPD in microseconds for a `p_s`-byte packet.
    pub fn deterministic_send_us(&self, p_s: u32) -> f64 {
        self.c0_send + self.c1_send * p_s as f64
    }
}

/// Which way the packet crosses the processor/transceiver boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Send,
    Receive,
}

/// One packet's delay decomposition, all in microseconds.
///
/// `psd_us == ppd_us + mad_us + ptd_us` holds exactly for every sample the
/// simulator emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelaySample {
    pub ppd_us: u64,
    pub mad_us: u64,
    pub ptd_us: u64,
    pub psd_us: u64,
    /// False when this packet's transmission overlapped any other.
    pub delivered: bool,
}

/// A backoff draw, in slots and in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackoffDelay {
    pub slots: u32,
    pub us: u64,
}

/// Backoff delay `(r mod (z * b_p)) + b_min` slots.
///
/// `z` is the initial factor on a first attempt and the smaller congestion
/// factor on reattempts after a busy channel assessment.
pub fn draw_backoff(r: u16, z: u32, cfg: &MacConfig) -> BackoffDelay {
    let span = z * cfg.b_p;
    let slots = (r as u32 % span) + cfg.b_min;
    BackoffDelay {
        slots,
        us: slots as u64 * cfg.slot_us,
    }
}

/// Time to modulate a `p_s`-byte packet onto the medium, in microseconds.
pub fn compute_ptd(p_s: u32, cfg: &MacConfig) -> Result<u64, SimError> {
    if p_s > MAX_FRAME_BYTES {
        return Err(SimError::PacketTooLarge(p_s));
    }
    Ok((p_s as f64 * 8.0 / cfg.rate_bits_per_us).round() as u64)
}

/// In-system packet processing delay in microseconds.
///
/// Send side: `c0 + c1 * p_s` plus Gaussian jitter. Receive side: the
/// deterministic send cost scaled by `recv_factor`, plus jitter. Clamped
/// at zero.
pub fn compute_ppd(p_s: u32, model: &PpdModel, direction: Direction, rng: &mut RngStream) -> u64 {
    let det = match direction {
        Direction::Send => model.deterministic_send_us(p_s),
        Direction::Receive => model.recv_factor * model.deterministic_send_us(p_s),
    };
    let v = det + rng.next_gaussian(model.jitter_sd);
    if v <= 0.0 {
        0
    } else {
        v.round() as u64
    }
}

/// Per-node state while contending for the channel.
struct Contender {
    /// Instant radiation starts if the pending assessment passes.
    expiry: SimTime,
    ppd_us: u64,
    rng: RngStream,
}

/// Simulate one event-shower trial: `n_c` nodes triggered at t = 0, each
/// sending one `p_s`-byte packet. Returns one sample per node, indexed by
/// node id. Deterministic for a given `rng` state.
pub fn run_trial(
    n_c: usize,
    p_s: u32,
    cfg: &MacConfig,
    ppd: &PpdModel,
    rng: &RngStream,
) -> Result<Vec<DelaySample>, SimError> {
    if n_c == 0 {
        return Err(SimError::NoContenders);
    }
    cfg.validate()?;
    let ptd_us = compute_ptd(p_s, cfg)?;
    let guard = cfg.guard_us();

    let mut nodes: Vec<Contender> = (0..n_c)
        .map(|id| {
            let mut node_rng = rng.derive(id as u64);
            let ppd_us = compute_ppd(p_s, ppd, Direction::Send, &mut node_rng);
            let r = cfg.frozen_r.unwrap_or_else(|| node_rng.next_r16());
            let wait = draw_backoff(r, cfg.z_initial, cfg);
            Contender {
                expiry: SimTime(ppd_us) + wait.us,
                ppd_us,
                rng: node_rng,
            }
        })
        .collect();

    // Committed transmissions: (start, end, node id).
    let mut transmissions: Vec<(SimTime, SimTime, usize)> = Vec::with_capacity(n_c);
    let mut pending: Vec<usize> = (0..n_c).collect();
    let mut mad = vec![0u64; n_c];

    while !pending.is_empty() {
        // Earliest pending assessment; ties break on node id.
        let (slot, &id) = pending
            .iter()
            .enumerate()
            .min_by_key(|(_, &id)| (nodes[id].expiry, id))
            .expect("pending not empty");
        let expiry = nodes[id].expiry;
        // Sensing window of cca_us ending one guard before radiation.
        let window_end = expiry.saturating_sub(guard);
        let window_start = window_end.saturating_sub(cfg.cca_us);
        let busy = transmissions
            .iter()
            .any(|&(ts, te, _)| ts < window_end && window_start < te);
        if busy {
            let r = cfg.frozen_r.unwrap_or_else(|| nodes[id].rng.next_r16());
            let wait = draw_backoff(r, cfg.z_congestion, cfg);
            // A zero-slot draw (possible only with b_min = 0) must still
            // advance time or the trial would spin on one instant.
            nodes[id].expiry = expiry + wait.us.max(cfg.slot_us);
        } else {
            transmissions.push((expiry, expiry + ptd_us, id));
            mad[id] = expiry.micros() - nodes[id].ppd_us;
            pending.swap_remove(slot);
        }
    }

    let mut samples = Vec::with_capacity(n_c);
    for id in 0..n_c {
        let &(ts, te, _) = transmissions
            .iter()
            .find(|&&(_, _, node)| node == id)
            .expect("every node transmits once");
        let delivered = !transmissions
            .iter()
            .any(|&(os, oe, other)| other != id && os < te && ts < oe);
        let ppd_us = nodes[id].ppd_us;
        samples.push(DelaySample {
            ppd_us,
            mad_us: mad[id],
            ptd_us,
            psd_us: ppd_us + mad[id] + ptd_us,
            delivered,
        });
    }
    Ok(samples)
}

/// Total airtime offered to the channel during a trial: the sum of all
/// transmission durations. Non-decreasing in the number of contenders by
/// construction (every node transmits exactly once).
pub fn total_airtime_us(samples: &[DelaySample]) -> u64 {
    samples.iter().map(|s| s.ptd_us).sum()
}

/// Time the channel carries energy during a trial: the length of the union
/// of all transmission intervals reconstructed from the samples. Unlike
/// [`total_airtime_us`] this can shrink when extra contenders consolidate
/// collided transmissions into overlapping clumps.
pub fn channel_busy_us(samples: &[DelaySample]) -> u64 {
    let mut intervals: Vec<(u64, u64)> = samples
        .iter()
        .map(|s| {
            let start = s.ppd_us + s.mad_us;
            (start, start + s.ptd_us)
        })
        .collect();
    intervals.sort_unstable();
    let mut busy = 0;
    let mut cur: Option<(u64, u64)> = None;
    for (s, e) in intervals {
        match cur {
            Some((cs, ce)) if s <= ce => cur = Some((cs, ce.max(e))),
            Some((cs, ce)) => {
                busy += ce - cs;
                cur = Some((s, e));
            }
            None => cur = Some((s, e)),
        }
    }
    if let Some((cs, ce)) = cur {
        busy += ce - cs;
    }
    busy
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frozen_cfg(r: u16, b_p: u32) -> MacConfig {
        MacConfig {
            b_p,
            frozen_r: Some(r),
            ..MacConfig::default()
        }
    }

    #[test]
    fn backoff_frozen_r100_is_3520_us() {
        let cfg = MacConfig::default();
        let d = draw_backoff(100, cfg.z_initial, &cfg);
        assert_eq!(d.slots, 110);
        assert_eq!(d.us, 3520);
    }

    #[test]
    fn backoff_r0_minimum() {
        let cfg = MacConfig::with_backoff_period(1);
        let d = draw_backoff(0, cfg.z_congestion, &cfg);
        assert_eq!(d.slots, 10);
        assert_eq!(d.us, 320);
    }

    #[test]
    fn backoff_r_max_congestion() {
        let cfg = MacConfig::with_backoff_period(20);
        let d = draw_backoff(65_535, cfg.z_congestion, &cfg);
        // 65535 mod 140 = 15, plus b_min
        assert_eq!(d.slots, 25);
        assert_eq!(d.us, 800);
    }

    #[test]
    fn backoff_range_exhaustive() {
        for &(z, b_p) in &[(31u32, 10u32), (7, 10), (31, 1), (7, 20)] {
            let cfg = MacConfig::with_backoff_period(b_p);
            for r in 0..=u16::MAX {
                let d = draw_backoff(r, z, &cfg);
                assert!(d.slots >= cfg.b_min);
                assert!(d.slots <= z * b_p - 1 + cfg.b_min);
            }
        }
    }

    #[test]
    fn ptd_values() {
        let cfg = MacConfig::default();
        assert_eq!(compute_ptd(20, &cfg).unwrap(), 640);
        assert_eq!(compute_ptd(0, &cfg).unwrap(), 0);
        assert_eq!(compute_ptd(128, &cfg).unwrap(), 4096);
        assert_eq!(
            compute_ptd(129, &cfg).unwrap_err(),
            SimError::PacketTooLarge(129)
        );
    }

    #[test]
    fn ppd_values() {
        let mut rng = RngStream::new(0);
        let det = PpdModel::deterministic();
        assert_eq!(compute_ppd(20, &det, Direction::Send, &mut rng), 360);
        let zero = PpdModel {
            c0_send: 0.0,
            jitter_sd: 0.0,
            ..PpdModel::default()
        };
        assert_eq!(compute_ppd(0, &zero, Direction::Send, &mut rng), 0);
        assert_eq!(compute_ppd(70, &det, Direction::Receive, &mut rng), 380);
    }

    #[test]
    fn frozen_sole_sender_decomposition() {
        let cfg = frozen_cfg(100, 10);
        let s = run_trial(1, 70, &cfg, &PpdModel::deterministic(), &RngStream::new(5)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].ppd_us, 760);
        assert_eq!(s[0].mad_us, 3520);
        assert_eq!(s[0].ptd_us, 2240);
        assert_eq!(s[0].psd_us, 6520);
        assert!(s[0].delivered);
    }

    #[test]
    fn sole_sender_always_delivers() {
        let cfg = MacConfig::default();
        let ppd = PpdModel::default();
        for seed in 0..200 {
            let s = run_trial(1, 40, &cfg, &ppd, &RngStream::new(seed)).unwrap();
            assert!(s[0].delivered);
        }
    }

    /// Search a seed whose two per-node substreams produce the same initial
    /// backoff draw; both nodes must then transmit concurrently and lose.
    #[test]
    fn equal_initial_draws_collide() {
        let cfg = MacConfig::default();
        let ppd = PpdModel::deterministic();
        let span = cfg.z_initial * cfg.b_p;
        let seed = (0u64..)
            .find(|&seed| {
                let rng = RngStream::new(seed);
                let d0 = rng.derive(0).next_r16() as u32 % span;
                let d1 = rng.derive(1).next_r16() as u32 % span;
                d0 == d1
            })
            .expect("seed search");
        let s = run_trial(2, 70, &cfg, &ppd, &RngStream::new(seed)).unwrap();
        assert!(!s[0].delivered);
        assert!(!s[1].delivered);
        assert_eq!(s[0].mad_us, s[1].mad_us);
    }

    #[test]
    fn psd_is_component_sum() {
        let ppd = PpdModel::default();
        for seed in 0..100 {
            let cfg = MacConfig::with_backoff_period(1 + (seed % 20) as u32);
            let n = 1 + (seed % 8) as usize;
            for s in run_trial(n, 60, &cfg, &ppd, &RngStream::new(seed)).unwrap() {
                assert_eq!(s.psd_us, s.ppd_us + s.mad_us + s.ptd_us);
                assert!(s.mad_us >= cfg.b_min as u64 * cfg.slot_us);
                assert_eq!(s.ptd_us, 60 * 32);
            }
        }
    }

    #[test]
    fn trials_are_deterministic() {
        let cfg = MacConfig::with_backoff_period(3);
        let ppd = PpdModel::default();
        let a = run_trial(8, 100, &cfg, &ppd, &RngStream::new(77)).unwrap();
        let b = run_trial(8, 100, &cfg, &ppd, &RngStream::new(77)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sole_sender_mad_matches_uniform_backoff_mean() {
        // Empirical MAD mean within 1% of ((31 * b_p - 1) / 2 + b_min) * 32.
        let cfg = MacConfig::default();
        let ppd = PpdModel::deterministic();
        let trials = 100_000u64;
        let mut sum = 0u64;
        let base = RngStream::new(2024);
        for t in 0..trials {
            let s = run_trial(1, 20, &cfg, &ppd, &base.derive(t)).unwrap();
            sum += s[0].mad_us;
        }
        let mean = sum as f64 / trials as f64;
        let expected = ((31.0 * 10.0 - 1.0) / 2.0 + 10.0) * 32.0;
        assert!(
            (mean - expected).abs() / expected < 0.01,
            "mean {mean} vs {expected}"
        );
    }

    #[test]
    fn offered_load_nondecreasing_in_contenders() {
        // Fixed seed schedule: node k keeps its substream as n_c grows.
        let ppd = PpdModel::default();
        for seed in 0..40u64 {
            for &b_p in &[1u32, 5, 10, 20] {
                let cfg = MacConfig::with_backoff_period(b_p);
                let mut prev = 0u64;
                for n in [1usize, 2, 4, 8] {
                    let s = run_trial(n, 70, &cfg, &ppd, &RngStream::new(seed)).unwrap();
                    let airtime = total_airtime_us(&s);
                    assert!(airtime >= prev, "seed {seed} b_p {b_p} n {n}");
                    prev = airtime;
                }
            }
        }
    }

    #[test]
    fn mean_occupancy_grows_with_contenders() {
        // Union occupancy is not monotone per seed (collided transmissions
        // consolidate), but its mean over many trials must grow with load.
        let ppd = PpdModel::default();
        let cfg = MacConfig::default();
        let base = RngStream::new(31);
        let mut prev = 0.0;
        for n in [1usize, 2, 4, 8] {
            let mut sum = 0u64;
            for t in 0..400u64 {
                let s = run_trial(n, 70, &cfg, &ppd, &base.derive(t)).unwrap();
                sum += channel_busy_us(&s);
            }
            let mean = sum as f64 / 400.0;
            assert!(mean > prev, "n {n}: {mean} <= {prev}");
            prev = mean;
        }
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = MacConfig {
            b_p: 0,
            ..MacConfig::default()
        };
        assert!(run_trial(1, 20, &cfg, &PpdModel::default(), &RngStream::new(0)).is_err());
        assert_eq!(
            run_trial(
                0,
                20,
                &MacConfig::default(),
                &PpdModel::default(),
                &RngStream::new(0)
            )
            .unwrap_err(),
            SimError::NoContenders
        );
    }
}

//! One event-shower trial, decomposed packet by packet.
//!
//! Runs a frozen-backoff trial first (every delay component exactly
//! reproducible), then a contended random trial showing medium access
//! delays stretching and packets colliding.

use wsn_psm::rng::RngStream;
use wsn_psm::sim::{run_trial, MacConfig, PpdModel};

fn print_samples(label: &str, samples: &[wsn_psm::sim::DelaySample]) {
    println!("{label}");
    println!("  node   ppd_us   mad_us   ptd_us   psd_us  delivered");
    for (node, s) in samples.iter().enumerate() {
        println!(
            "  {node:>4} {:>8} {:>8} {:>8} {:>8}  {}",
            s.ppd_us, s.mad_us, s.ptd_us, s.psd_us, s.delivered
        );
    }
}

fn main() {
    // Sole sender, frozen randomness, jitter off: fully deterministic.
    let frozen = MacConfig {
        frozen_r: Some(100),
        ..MacConfig::default()
    };
    let samples = run_trial(
        1,
        70,
        &frozen,
        &PpdModel::deterministic(),
        &RngStream::new(1),
    )
    .expect("trial");
    print_samples("frozen sole sender (70-byte packet):", &samples);

    // Eight contenders, everything random.
    let cfg = MacConfig::default();
    let ppd = PpdModel::default();
    let samples = run_trial(8, 70, &cfg, &ppd, &RngStream::new(42)).expect("trial");
    print_samples("\neight contenders, seed 42:", &samples);
    let lost = samples.iter().filter(|s| !s.delivered).count();
    println!("  {lost} of 8 packets destroyed by overlapping transmissions");
}

//! Backoff interval mechanics: the draw `(r mod (z * B_P)) + B_min`.
//!
//! Shows the frozen-value draw used for component isolation (r = 100 gives
//! a constant 3520 us medium access delay), the draw interval bounds for
//! both backoff factors, and the empirical spread of random draws.

use wsn_psm::rng::RngStream;
use wsn_psm::sim::{draw_backoff, MacConfig};

fn main() {
    let cfg = MacConfig::default();

    let frozen = draw_backoff(100, cfg.z_initial, &cfg);
    println!(
        "frozen r = 100, initial factor {}: {} slots = {} us",
        cfg.z_initial, frozen.slots, frozen.us
    );

    println!(
        "\ndraw interval bounds (B_P = {}, B_min = {}):",
        cfg.b_p, cfg.b_min
    );
    for (name, z) in [("initial", cfg.z_initial), ("congestion", cfg.z_congestion)] {
        let lo = draw_backoff(0, z, &cfg);
        let span = z * cfg.b_p;
        let hi = draw_backoff((span - 1) as u16, z, &cfg);
        println!(
            "  {name:<10} z = {z:>2}: {:>3}..={:<3} slots ({:>5}..={:<5} us)",
            lo.slots, hi.slots, lo.us, hi.us
        );
    }

    let mut rng = RngStream::new(7);
    let draws = 100_000;
    let mut sum = 0u64;
    let mut min = u64::MAX;
    let mut max = 0u64;
    for _ in 0..draws {
        let d = draw_backoff(rng.next_r16(), cfg.z_initial, &cfg);
        sum += d.us;
        min = min.min(d.us);
        max = max.max(d.us);
    }
    println!(
        "\n{draws} random initial draws: mean {:.1} us, observed range [{min}, {max}] us",
        sum as f64 / draws as f64
    );
    println!(
        "uniform-interval mean would be {:.1} us",
        ((cfg.z_initial * cfg.b_p - 1) as f64 / 2.0 + cfg.b_min as f64) * cfg.slot_us as f64
    );
}

//! How contenders shape delay and loss.
//!
//! For each contender count, runs a series at the default constellation
//! and prints the node of interest's mean sending delay and loss rate —
//! delay creeps up with contention while loss climbs steeply once the
//! backoff interval gets crowded.

use wsn_psm::experiment::{run_series, ParamPoint, SampleRetention};
use wsn_psm::sim::{MacConfig, PpdModel};

fn main() {
    let mac = MacConfig::default();
    let ppd = PpdModel::default();
    let trials = 2000;

    println!("B_P = 10, P_S = 70 byte, {trials} trials per row");
    println!("  n_c   mean psd [us]   sd [us]      plr");
    for n_c in [1, 2, 4, 8] {
        let point = ParamPoint::new(10, 70, n_c);
        let run = run_series(
            &point,
            trials,
            0xC0FFEE + n_c as u64,
            &mac,
            &ppd,
            SampleRetention::None,
        )
        .expect("series");
        println!(
            "  {n_c:>3} {:>15.1} {:>9.1} {:>8.4}",
            run.psd_mean_us, run.psd_sd_us, run.plr
        );
    }

    println!("\nnarrow vs wide backoff at 8 contenders, P_S = 20:");
    println!("  b_p   mean psd [us]      plr");
    for b_p in [1, 5, 10, 20] {
        let point = ParamPoint::new(b_p, 20, 8);
        let run =
            run_series(&point, trials, 0xABCD, &mac, &ppd, SampleRetention::None).expect("series");
        println!("  {b_p:>3} {:>15.1} {:>8.4}", run.psd_mean_us, run.plr);
    }
}

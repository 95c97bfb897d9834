//! End-to-end delay forecasting over tandem topologies.
//!
//! Fits the full model variant on a sweep, extends it hop-additively with
//! the receive-side processing cost, and checks the forecast against
//! simulated store-and-forward measurements for one to ten hops.

use wsn_psm::experiment::{psd_run_means, run_sweep, RangeSpec, SweepConfig};
use wsn_psm::multihop::{predict_e2ed, validate, TandemConfig};
use wsn_psm::regress::{fit_from_observations, ModelVariant, Response};
use wsn_psm::sim::PpdModel;

fn main() {
    let cfg = SweepConfig {
        b_p: RangeSpec::new(1, 20, 1),
        p_s: RangeSpec::new(20, 120, 10),
        n_c: vec![1, 2, 4, 8],
        samples_per_run: 400,
        ..SweepConfig::default()
    };
    println!(
        "fitting the full variant on a {}-run sweep...",
        cfg.points().len()
    );
    let dataset = run_sweep(&cfg).expect("sweep");
    let model = fit_from_observations(
        &psd_run_means(&dataset),
        &ModelVariant::from_id(7).unwrap(),
        Response::Psd,
    )
    .expect("fit");

    let base = TandemConfig {
        samples: 1000,
        ..TandemConfig::default()
    };
    println!(
        "forecast per hop at defaults: {:.0} us\n",
        predict_e2ed(&model, &base.point, 1, &PpdModel::default())
    );

    let report = validate(&model, 10, &base, 0x0E2ED).expect("validate");
    println!("  h   predicted [us]   measured mean [us]          95 % CI      overlap");
    for row in &report.rows {
        println!(
            "{:>3} {:>16.0} {:>20.1}   [{:>8.0}, {:>8.0}]   {}",
            row.hops,
            row.predicted_us,
            row.measured_mean_us,
            row.measured_ci.lo,
            row.measured_ci.hi,
            row.overlap
        );
    }
    println!(
        "\nforecast inside the measured interval for {}/{} hop counts",
        report.rows.iter().filter(|r| r.overlap).count(),
        report.rows.len()
    );
}

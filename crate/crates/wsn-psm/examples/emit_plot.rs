//! Render a sweep as an SVG chart.
//!
//! Sweeps the backoff period for each contender count at a fixed packet
//! size, then writes a line chart with 95 % confidence whiskers to
//! `psd_vs_bp.svg` in the working directory.

use wsn_psm::experiment::{run_sweep, RangeSpec, SweepConfig};
use wsn_psm::plot::{render_svg, Chart, Series};
use wsn_psm::regress::t_quantile;

fn main() {
    let cfg = SweepConfig {
        b_p: RangeSpec::new(1, 20, 1),
        p_s: RangeSpec::new(20, 20, 1),
        n_c: vec![1, 2, 4, 8],
        samples_per_run: 500,
        ..SweepConfig::default()
    };
    let dataset = run_sweep(&cfg).expect("sweep");

    let mut series = Vec::new();
    for &n_c in &[1u32, 2, 4, 8] {
        let mut points = Vec::new();
        let mut errs = Vec::new();
        for r in dataset.iter().filter(|r| r.point.n_c == n_c) {
            points.push((r.point.b_p as f64, r.psd_mean_us));
            errs.push(t_quantile(0.975, r.n_sent - 1) * r.psd_sd_us / (r.n_sent as f64).sqrt());
        }
        series.push(Series {
            label: format!("N_C = {n_c}"),
            points,
            error_halfwidths: errs,
            draw_line: true,
        });
    }
    let chart = Chart {
        title: "mean sending delay vs backoff period (P_S = 20 byte)".into(),
        x_label: "backoff period [slots]".into(),
        y_label: "mean packet sending delay [us]".into(),
        series,
    };
    let svg = render_svg(&chart, 860, 520);
    std::fs::write("psd_vs_bp.svg", &svg).expect("write svg");
    println!("wrote psd_vs_bp.svg ({} bytes)", svg.len());
}

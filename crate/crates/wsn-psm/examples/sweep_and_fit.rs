//! Full pipeline: sweep the parameter grid, then fit and rank all seven
//! model variants for both responses.
//!
//! Prints the significance table — coefficient of determination per
//! variant and response, non-zero confidence-interval verdicts, and the
//! pairwise zero-correlation test — the at-a-glance view of which
//! parameters drive sending delay and which drive loss.

use wsn_psm::experiment::{plr_runs, psd_run_means, run_sweep, RangeSpec, SweepConfig};
use wsn_psm::regress::{
    coef_confidence_intervals, fit_from_observations, nonzero_test, predictor_correlation,
    ModelVariant, Response,
};

fn main() {
    let cfg = SweepConfig {
        b_p: RangeSpec::new(1, 20, 1),
        p_s: RangeSpec::new(20, 120, 10),
        n_c: vec![1, 2, 4, 8],
        samples_per_run: 300,
        ..SweepConfig::default()
    };
    println!(
        "sweeping {} constellations at {} trials each...",
        cfg.points().len(),
        cfg.samples_per_run
    );
    let dataset = run_sweep(&cfg).expect("sweep");
    let psd_obs = psd_run_means(&dataset);
    let plr_obs = plr_runs(&dataset);

    println!(
        "\n{:<22} {:>10} {:>10}   {:<9} {:<9} zero-corr",
        "model", "omega_psd", "omega_plr", "non-zero", "non-zero"
    );
    println!(
        "{:<22} {:>10} {:>10}   {:<9} {:<9}",
        "", "[%]", "[%]", "(psd)", "(plr)"
    );
    for variant in ModelVariant::all() {
        let psd = fit_from_observations(&psd_obs, &variant, Response::Psd).expect("psd fit");
        let plr = fit_from_observations(&plr_obs, &variant, Response::Plr).expect("plr fit");
        let marks = |m: &wsn_psm::regress::RegressionModel| -> String {
            coef_confidence_intervals(m, 0.95).expect("cis")[1..]
                .iter()
                .map(|iv| if nonzero_test(iv) { '+' } else { '-' })
                .collect()
        };
        let corr = if variant.predictors().len() < 2 {
            "-".to_string()
        } else {
            let preds = variant.predictors();
            let mut ok = true;
            for i in 0..preds.len() {
                for j in i + 1..preds.len() {
                    let xi: Vec<f64> = psd_obs.iter().map(|(p, _)| preds[i].value(p)).collect();
                    let xj: Vec<f64> = psd_obs.iter().map(|(p, _)| preds[j].value(p)).collect();
                    ok &= predictor_correlation(&xi, &xj).expect("corr").1;
                }
            }
            if ok { "pass" } else { "fail" }.to_string()
        };
        println!(
            "{:<22} {:>10.2} {:>10.2}   {:<9} {:<9} {}",
            variant.to_string(),
            psd.omega * 100.0,
            plr.omega * 100.0,
            marks(&psd),
            marks(&plr),
            corr
        );
    }

    let best = fit_from_observations(&psd_obs, &ModelVariant::from_id(7).unwrap(), Response::Psd)
        .expect("fit");
    println!("\nfull-variant sending-delay coefficients:");
    let names = ["intercept", "B_P", "P_S", "N_C"];
    for (name, c) in names.iter().zip(&best.coefficients) {
        println!("  {name:<9} {c:>12.3}");
    }
}

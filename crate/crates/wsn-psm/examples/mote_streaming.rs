//! The constrained-memory estimator a sensor node can afford.
//!
//! Streams per-packet sending delays into one 20-byte compound observation
//! per constellation, shows the footprint staying flat as samples pour in,
//! re-derives the model from the running means, and inverts it into a
//! feasible backoff range for a delay budget.

use wsn_psm::experiment::{run_series, ParamPoint, SampleRetention};
use wsn_psm::mote::{assess, ConstellationKey, MoteState};
use wsn_psm::regress::ModelVariant;
use wsn_psm::sim::{MacConfig, PpdModel};

fn main() {
    let mac = MacConfig::default();
    let ppd = PpdModel::default();
    let mut state = MoteState::new();

    // Stream a small grid of constellations through the node.
    let mut packets = 0usize;
    for b_p in (2..=20).step_by(2) {
        for p_s in [20, 70, 120] {
            let point = ParamPoint::new(b_p, p_s, 1);
            let run = run_series(
                &point,
                400,
                0xFEED + b_p as u64,
                &mac,
                &ppd,
                SampleRetention::NoiOnly,
            )
            .expect("series");
            for trial in run.samples.as_ref().unwrap() {
                state.observe(ConstellationKey::from(point), trial[0].psd_us as f64);
                packets += 1;
            }
        }
    }
    println!(
        "streamed {packets} packets into {} cells; storage charge {} bytes (+{} for variance tracking)",
        state.cell_count(),
        state.memory_footprint(),
        state.variance_extra_bytes()
    );

    // The running means match what a batch pass would have produced.
    println!("\nfirst cells of the snapshot:");
    println!("  b_p  p_s  n_c    count   mean psd [us]");
    for (key, mean, count) in state.snapshot_means().into_iter().take(5) {
        println!(
            "  {:>3} {:>4} {:>4} {:>8} {:>15.1}",
            key.b_p, key.p_s, key.n_c, count, mean
        );
    }

    let variant = ModelVariant::from_id(4).unwrap();
    let model = state.fit_incremental(&variant).expect("incremental fit");
    println!("\nmodel fitted from the running means ({}):", variant);
    let names = ["intercept", "B_P", "P_S"];
    for (name, c) in names.iter().zip(&model.coefficients) {
        println!("  {name:<9} {c:>12.3}");
    }
    println!("  omega = {:.4}", model.omega);

    // Invert the model: which backoff periods keep PSD under budget?
    for budget in [6000.0, 9000.0, 1e12] {
        let feasible = assess(&model, budget, 70, 1).expect("assess");
        match (feasible.first(), feasible.last()) {
            (Some(lo), Some(hi)) => {
                println!("budget {budget:>8.0} us at P_S = 70: feasible B_P {lo}..={hi}")
            }
            _ => println!("budget {budget:>8.0} us at P_S = 70: infeasible"),
        }
    }
}

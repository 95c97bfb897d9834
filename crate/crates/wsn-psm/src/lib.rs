//! Desk-scale laboratory for contention-based wireless medium access.
//!
//! The crate simulates event showers of slotted-CSMA senders on a shared
//! ideal channel with full per-packet delay decomposition (processing,
//! medium access, transmission), sweeps the three network parameters that
//! drive sending delay and packet loss — backoff period, packet size,
//! contender count — fits the seven linear performance-model variants over
//! them, and validates hop-additive end-to-end delay forecasts against
//! simulated tandem topologies.
//!
//! ## Modules
//!
//! - [`sim`] — single-trial channel simulation and delay decomposition
//! - [`experiment`] — sweep harness, loss-rate accounting, CSV datasets
//! - [`regress`] — least-squares engine, confidence intervals, model JSON
//! - [`mote`] — constrained-memory streaming estimator and model inversion
//! - [`multihop`] — tandem forwarding simulation and forecast validation
//! - [`plot`] — self-contained SVG charts
//! - [`cli`] — the `wsn-psm` command line behind a thin binary
//! - [`rng`] — reproducible random streams everything draws from
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --release --example backoff_draws       # backoff interval mechanics
//! cargo run --release --example single_trial        # one trial, decomposed delays
//! cargo run --release --example contention_and_loss # delay and loss vs contenders
//! cargo run --release --example sweep_and_fit       # sweep + all seven model fits
//! cargo run --release --example mote_streaming      # 20-byte-per-cell estimator
//! cargo run --release --example multihop_forecast   # hop-linear delay validation
//! cargo run --release --example emit_plot           # SVG chart from a sweep
//! ```
//!
//! ## Quick start
//!
//! ```
//! use wsn_psm::experiment::{run_sweep, psd_run_means, RangeSpec, SweepConfig};
//! use wsn_psm::regress::{fit_from_observations, ModelVariant, Response};
//!
//! let cfg = SweepConfig {
//!     b_p: RangeSpec::new(1, 8, 1),
//!     p_s: RangeSpec::new(20, 60, 20),
//!     n_c: vec![1, 2],
//!     samples_per_run: 50,
//!     ..SweepConfig::default()
//! };
//! let dataset = run_sweep(&cfg).unwrap();
//! let model = fit_from_observations(
//!     &psd_run_means(&dataset),
//!     &ModelVariant::from_id(7).unwrap(),
//!     Response::Psd,
//! )
//! .unwrap();
//! assert!(model.omega > 0.5);
//! ```

pub mod cli;
pub mod experiment;
pub mod mote;
pub mod multihop;
pub mod plot;
pub mod regress;
pub mod rng;
pub mod sim;

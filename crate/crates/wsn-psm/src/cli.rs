//! Command-line front end: sweep, fit, report, predict, validate, plot.
//!
//! Every command is deterministic for a given flag set (seeds included),
//! down to the output bytes. Exit codes: 0 success, 2 usage or input
//! problem, 3 numerical failure (singular or otherwise infeasible fit).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::experiment::{
    self, import_csv, import_raw_csv, plr_runs, psd_run_means, DataError, Dataset, ParamPoint,
    RangeSpec, RunResult, SampleRetention, SweepConfig,
};
use crate::multihop::{self, TandemConfig};
use crate::plot::{render_svg, Chart, Series};
use crate::regress::{
    self, coef_confidence_intervals, fit_from_observations, nonzero_test, predict,
    predictor_correlation, r_squared, ModelVariant, RegressError, RegressionModel, Response,
};
use crate::sim::{MacConfig, PpdModel};

/// Thread-count override for sweep parallelism.
pub const THREADS_ENV: &str = "WSN_PSM_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "wsn-psm",
    version,
    about = "Contention-based medium access laboratory: sweep, fit, predict, validate, plot"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a parameter sweep and write run summaries as CSV
    Sweep(SweepArgs),
    /// Fit one model variant on a dataset and print its diagnostics
    Fit(FitArgs),
    /// Print the full diagnostics table over all variants and responses
    Report(ReportArgs),
    /// Evaluate a saved model at a constellation (optionally over hops)
    Predict(PredictArgs),
    /// Compare model forecasts against simulated tandem delays per hop count
    Validate(ValidateArgs),
    /// Render a dataset as an SVG chart plus companion data CSV
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Backoff period range, lo:hi:step
    #[arg(long, default_value = "1:20:1")]
    pub bp: String,
    /// Packet size range in bytes, lo:hi:step
    #[arg(long, default_value = "20:120:5")]
    pub ps: String,
    /// Contender counts, comma separated
    #[arg(long, default_value = "1,2,4,8")]
    pub nc: String,
    /// Trials per constellation
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Master seed; per-run seeds derive from it and the constellation
    #[arg(long, default_value_t = 0xB0FF_CAFE)]
    pub seed: u64,
    /// Run-summary output path
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
    /// Also write raw per-trial samples to this path
    #[arg(long)]
    pub raw: Option<PathBuf>,
    /// Raw retention: noi (node of interest) or all contenders
    #[arg(long, default_value = "noi")]
    pub retain: String,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Run-summary CSV produced by `sweep`
    #[arg(long)]
    pub data: PathBuf,
    /// Response to model: psd or plr
    #[arg(long)]
    pub response: String,
    /// Model variant 1..=7
    #[arg(long)]
    pub variant: u8,
    /// Write the fitted model JSON here
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fit sending delay on raw per-trial samples instead of run means
    #[arg(long, default_value_t = false)]
    pub per_trial: bool,
    /// Raw-sample CSV (required with --per-trial)
    #[arg(long)]
    pub raw: Option<PathBuf>,
    /// Confidence level for coefficient intervals
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Run-summary CSV produced by `sweep`
    #[arg(long)]
    pub data: PathBuf,
    /// Confidence level for the non-zero tests
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// Model JSON produced by `fit`
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub bp: u32,
    #[arg(long)]
    pub ps: u32,
    #[arg(long)]
    pub nc: u32,
    /// Forecast the end-to-end delay over this many hops
    #[arg(long)]
    pub hops: Option<u32>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Sending-delay model JSON produced by `fit`
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub max_hops: u32,
    /// End-to-end packets per hop count
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0xE2ED)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub bp: u32,
    #[arg(long, default_value_t = 70)]
    pub ps: u32,
    #[arg(long, default_value_t = 1)]
    pub nc: u32,
    /// Report CSV path; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    /// Run-summary CSV produced by `sweep`
    #[arg(long)]
    pub data: PathBuf,
    /// Swept axis: bp or ps
    #[arg(long)]
    pub x: String,
    /// Response axis: psd or plr
    #[arg(long)]
    pub y: String,
    /// Series grouping; contender count is the one supported grouping
    #[arg(long, default_value = "nc")]
    pub series: String,
    /// Hold packet size fixed at this value instead of pooling
    #[arg(long)]
    pub fix_ps: Option<u32>,
    /// Hold backoff period fixed at this value instead of pooling
    #[arg(long)]
    pub fix_bp: Option<u32>,
    /// SVG output path; the companion data CSV lands beside it
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 860)]
    pub width: u32,
    #[arg(long, default_value_t = 520)]
    pub height: u32,
}

/// Command failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable input, malformed files: exit 2.
    Usage(String),
    /// The requested computation is numerically infeasible: exit 3.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => write!(f, "{m}"),
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<RegressError> for CliError {
    fn from(e: RegressError) -> Self {
        match e {
            RegressError::Singular(_)
            | RegressError::InsufficientData { .. }
            | RegressError::ConstantResponse => CliError::Numeric(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Parse `lo:hi:step` (or a bare value) into a range.
pub fn parse_range(text: &str) -> Result<RangeSpec, CliError> {
    let bad = || CliError::Usage(format!("bad range `{text}`, expected lo:hi:step"));
    let parts: Vec<&str> = text.split(':').collect();
    let spec = match parts.as_slice() {
        [v] => {
            let v = v.trim().parse().map_err(|_| bad())?;
            RangeSpec::new(v, v, 1)
        }
        [lo, hi, step] => RangeSpec::new(
            lo.trim().parse().map_err(|_| bad())?,
            hi.trim().parse().map_err(|_| bad())?,
            step.trim().parse().map_err(|_| bad())?,
        ),
        _ => return Err(bad()),
    };
    if spec.step == 0 || spec.lo > spec.hi {
        return Err(bad());
    }
    Ok(spec)
}

/// Parse a comma-separated set of positive integers.
pub fn parse_set(text: &str) -> Result<Vec<u32>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let v: u32 = part.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "bad set `{text}`, expected comma-separated integers"
            ))
        })?;
        if v == 0 {
            return Err(CliError::Usage("contender counts must be >= 1".into()));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::Usage("empty parameter set".into()));
    }
    Ok(out)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Report(args) => cmd_report(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Plot(args) => cmd_plot(args),
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    let text = read_to_string(path)?;
    Ok(import_csv(text.as_bytes())?)
}

fn load_model(path: &Path) -> Result<RegressionModel, CliError> {
    let text = read_to_string(path)?;
    Ok(regress::from_json(&text)?)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be >= 1".into()));
    }
    let retention = if args.raw.is_some() {
        match args.retain.as_str() {
            "noi" => SampleRetention::NoiOnly,
            "all" => SampleRetention::All,
            other => {
                return Err(CliError::Usage(format!(
                    "bad --retain `{other}`, expected noi or all"
                )))
            }
        }
    } else {
        SampleRetention::None
    };
    let cfg = SweepConfig {
        b_p: parse_range(&args.bp)?,
        p_s: parse_range(&args.ps)?,
        n_c: parse_set(&args.nc)?,
        samples_per_run: args.samples,
        master_seed: args.seed,
        retention,
        mac: MacConfig::default(),
        ppd: PpdModel::default(),
    };

    let dataset =
        run_in_pool(|| experiment::run_sweep(&cfg)).map_err(|e| CliError::Usage(e.to_string()))?;

    let mut out = Vec::new();
    experiment::export_csv(&dataset, &mut out)?;
    fs::write(&args.out, out)?;
    if let Some(raw_path) = &args.raw {
        let mut raw = Vec::new();
        experiment::export_raw_csv(&dataset, &mut raw)?;
        fs::write(raw_path, raw)?;
    }
    println!(
        "wrote {} runs ({} samples each) to {}",
        dataset.len(),
        cfg.samples_per_run,
        args.out.display()
    );
    Ok(())
}

/// Run `f` on a rayon pool sized by the thread-count env var, when set.
fn run_in_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let threads: usize = v.parse().unwrap_or(0);
            if threads >= 1 {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .expect("thread pool");
                pool.install(f)
            } else {
                f()
            }
        }
        Err(_) => f(),
    }
}

// ---------------------------------------------------------------------------
// fit and report
// ---------------------------------------------------------------------------

fn response_rows(
    response: Response,
    dataset: &Dataset,
    per_trial: bool,
    raw: Option<&Path>,
) -> Result<Vec<(ParamPoint, f64)>, CliError> {
    match response {
        Response::Plr => Ok(plr_runs(dataset)),
        Response::Psd => {
            if per_trial {
                let raw = raw.ok_or_else(|| {
                    CliError::Usage("--per-trial needs --raw <raw-sample csv>".into())
                })?;
                let text = read_to_string(raw)?;
                let rows = import_raw_csv(text.as_bytes())?;
                Ok(rows
                    .into_iter()
                    .map(|(p, s)| (p, s.psd_us as f64))
                    .collect())
            } else {
                Ok(psd_run_means(dataset))
            }
        }
    }
}

fn print_fit_diagnostics(
    model: &RegressionModel,
    obs: &[(ParamPoint, f64)],
    level: f64,
) -> Result<(), CliError> {
    let intervals = coef_confidence_intervals(model, level)?;
    println!("model {} ~ {}", model.variant, model.response.name());
    println!("  n = {}, dof = {}", model.n, model.dof);
    let rows: Vec<(Vec<f64>, f64)> = obs
        .iter()
        .map(|(p, y)| {
            (
                model
                    .variant
                    .predictors()
                    .iter()
                    .map(|pr| pr.value(p))
                    .collect(),
                *y,
            )
        })
        .collect();
    let omega = r_squared(model, &rows)?;
    println!(
        "  omega = {omega:.4} ({:.2} % of response variation explained)",
        omega * 100.0
    );
    println!("  coefficients ({:.0} % CI):", level * 100.0);
    let names: Vec<String> = std::iter::once("intercept".to_string())
        .chain(
            model
                .variant
                .predictors()
                .iter()
                .map(|p| p.name().to_string()),
        )
        .collect();
    for ((name, &coef), interval) in names.iter().zip(&model.coefficients).zip(&intervals) {
        let verdict = if nonzero_test(interval) {
            "non-zero"
        } else {
            "zero not excluded"
        };
        println!(
            "    {name:<9} {coef:>14.6}  [{:.6}, {:.6}]  {verdict}",
            interval.lo, interval.hi
        );
    }
    let predictors = model.variant.predictors();
    if predictors.len() > 1 {
        println!("  predictor correlations:");
        for i in 0..predictors.len() {
            for j in i + 1..predictors.len() {
                let xi: Vec<f64> = obs.iter().map(|(p, _)| predictors[i].value(p)).collect();
                let xj: Vec<f64> = obs.iter().map(|(p, _)| predictors[j].value(p)).collect();
                let (r, uncorrelated) = predictor_correlation(&xi, &xj)?;
                let verdict = if uncorrelated {
                    "passes zero-correlation test"
                } else {
                    "correlated"
                };
                println!(
                    "    {} ~ {}: r = {r:.4}, {verdict}",
                    predictors[i].name(),
                    predictors[j].name()
                );
            }
        }
    }
    Ok(())
}

fn cmd_fit(args: FitArgs) -> Result<(), CliError> {
    let response = Response::parse(&args.response)?;
    let variant = ModelVariant::from_id(args.variant)?;
    if args.per_trial && response != Response::Psd {
        return Err(CliError::Usage(
            "--per-trial applies to the psd response only".into(),
        ));
    }
    let dataset = load_dataset(&args.data)?;
    let obs = response_rows(response, &dataset, args.per_trial, args.raw.as_deref())?;
    let model = fit_from_observations(&obs, &variant, response)?;
    print_fit_diagnostics(&model, &obs, args.level)?;
    if let Some(out) = &args.out {
        fs::write(out, regress::to_json(&model))?;
        println!("  model written to {}", out.display());
    }
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), CliError> {
    let dataset = load_dataset(&args.data)?;
    let psd_obs = psd_run_means(&dataset);
    let plr_obs = plr_runs(&dataset);
    println!(
        "{:<22} {:>10} {:>10}   {:<12} {:<12} zero-corr",
        "model", "omega_psd", "omega_plr", "non-zero", "non-zero"
    );
    println!(
        "{:<22} {:>10} {:>10}   {:<12} {:<12}",
        "", "[%]", "[%]", "(psd)", "(plr)"
    );
    for variant in ModelVariant::all() {
        let psd = fit_from_observations(&psd_obs, &variant, Response::Psd)?;
        let plr = fit_from_observations(&plr_obs, &variant, Response::Plr)?;
        let verdicts = |m: &RegressionModel| -> Result<String, CliError> {
            let iv = coef_confidence_intervals(m, args.level)?;
            // one mark per predictor coefficient, intercept skipped
            Ok(iv[1..]
                .iter()
                .map(|i| if nonzero_test(i) { '+' } else { '-' })
                .collect())
        };
        let corr = if variant.predictors().len() < 2 {
            "-".to_string()
        } else {
            let mut all_pass = true;
            let preds = variant.predictors();
            for i in 0..preds.len() {
                for j in i + 1..preds.len() {
                    let xi: Vec<f64> = psd_obs.iter().map(|(p, _)| preds[i].value(p)).collect();
                    let xj: Vec<f64> = psd_obs.iter().map(|(p, _)| preds[j].value(p)).collect();
                    let (_, ok) = predictor_correlation(&xi, &xj)?;
                    all_pass &= ok;
                }
            }
            if all_pass {
                "pass".into()
            } else {
                "fail".into()
            }
        };
        println!(
            "{:<22} {:>10.2} {:>10.2}   {:<12} {:<12} {}",
            variant.to_string(),
            psd.omega * 100.0,
            plr.omega * 100.0,
            verdicts(&psd)?,
            verdicts(&plr)?,
            corr
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// predict and validate
// ---------------------------------------------------------------------------

fn cmd_predict(args: PredictArgs) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    let point = ParamPoint::new(args.bp, args.ps, args.nc);
    match args.hops {
        None => {
            let p = predict(&model, &point);
            if p.clamped {
                eprintln!("note: raw estimate fell outside [0, 1] and was clamped");
            }
            println!("{}", p.value);
        }
        Some(hops) => {
            if model.response != Response::Psd {
                return Err(CliError::Usage(
                    "--hops forecasts end-to-end delay and needs a psd model".into(),
                ));
            }
            let e2ed = multihop::predict_e2ed(&model, &point, hops, &PpdModel::default());
            println!("{e2ed}");
        }
    }
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    if model.response != Response::Psd {
        return Err(CliError::Usage(
            "validation forecasts end-to-end delay and needs a psd model".into(),
        ));
    }
    if args.samples == 0 || args.max_hops == 0 {
        return Err(CliError::Usage(
            "--samples and --max-hops must be >= 1".into(),
        ));
    }
    let base = TandemConfig {
        hops: 1,
        point: ParamPoint::new(args.bp, args.ps, args.nc),
        samples: args.samples,
        mac: MacConfig::default(),
        ppd: PpdModel::default(),
    };
    let report = multihop::validate(&model, args.max_hops, &base, args.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut buf = Vec::new();
    multihop::export_report_csv(&report, &mut buf)?;
    match &args.out {
        Some(path) => {
            fs::write(path, buf)?;
            println!(
                "validated {} hop counts, {} overlap: {}",
                report.rows.len(),
                report.rows.iter().filter(|r| r.overlap).count(),
                path.display()
            );
        }
        None => {
            std::io::stdout().write_all(&buf)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

/// Pooled cell of the plot selection.
struct PlotCell {
    y: f64,
    err: f64,
}

fn plot_cell(runs: &[&RunResult], response: Response) -> PlotCell {
    match response {
        Response::Plr => {
            let mean = runs.iter().map(|r| r.plr).sum::<f64>() / runs.len() as f64;
            PlotCell { y: mean, err: 0.0 }
        }
        Response::Psd => {
            if runs.len() == 1 {
                let r = runs[0];
                // CI of the run mean from its sample spread
                let err = if r.n_sent > 1 {
                    regress::t_quantile(0.975, r.n_sent - 1) * r.psd_sd_us
                        / (r.n_sent as f64).sqrt()
                } else {
                    0.0
                };
                PlotCell {
                    y: r.psd_mean_us,
                    err,
                }
            } else {
                let n = runs.len() as f64;
                let mean = runs.iter().map(|r| r.psd_mean_us).sum::<f64>() / n;
                let var = runs
                    .iter()
                    .map(|r| (r.psd_mean_us - mean).powi(2))
                    .sum::<f64>()
                    / (n - 1.0);
                PlotCell {
                    y: mean,
                    err: regress::t_quantile(0.975, runs.len() - 1) * (var / n).sqrt(),
                }
            }
        }
    }
}

fn cmd_plot(args: PlotArgs) -> Result<(), CliError> {
    if args.series != "nc" {
        return Err(CliError::Usage(format!(
            "bad --series `{}`; series are grouped by contender count (nc)",
            args.series
        )));
    }
    let x_is_bp = match args.x.as_str() {
        "bp" => true,
        "ps" => false,
        other => {
            return Err(CliError::Usage(format!(
                "bad --x `{other}`, expected bp or ps"
            )))
        }
    };
    let response = Response::parse(&args.y)?;
    let dataset = load_dataset(&args.data)?;
    let selected: Vec<&RunResult> = dataset
        .iter()
        .filter(|r| args.fix_ps.is_none_or(|v| r.point.p_s == v))
        .filter(|r| args.fix_bp.is_none_or(|v| r.point.b_p == v))
        .collect();
    if selected.is_empty() {
        return Err(CliError::Usage(
            "no runs match the requested selection".into(),
        ));
    }

    let mut n_cs: Vec<u32> = selected.iter().map(|r| r.point.n_c).collect();
    n_cs.sort_unstable();
    n_cs.dedup();
    let mut xs: Vec<u32> = selected
        .iter()
        .map(|r| if x_is_bp { r.point.b_p } else { r.point.p_s })
        .collect();
    xs.sort_unstable();
    xs.dedup();

    let mut series = Vec::new();
    let mut companion = String::new();
    companion.push_str("n_c,x,y,err\n");
    for &n_c in &n_cs {
        let mut points = Vec::new();
        let mut errs = Vec::new();
        for &x in &xs {
            let cell_runs: Vec<&RunResult> = selected
                .iter()
                .filter(|r| r.point.n_c == n_c)
                .filter(|r| (if x_is_bp { r.point.b_p } else { r.point.p_s }) == x)
                .copied()
                .collect();
            if cell_runs.is_empty() {
                continue;
            }
            let cell = plot_cell(&cell_runs, response);
            points.push((x as f64, cell.y));
            errs.push(cell.err);
            companion.push_str(&format!("{n_c},{x},{},{}\n", cell.y, cell.err));
        }
        series.push(Series {
            label: format!("N_C = {n_c}"),
            points,
            error_halfwidths: if response == Response::Psd {
                errs
            } else {
                vec![]
            },
            draw_line: true,
        });
    }

    let x_label = if x_is_bp {
        "backoff period [slots]".to_string()
    } else {
        "packet size [byte]".to_string()
    };
    let (y_label, title) = match response {
        Response::Psd => (
            "mean packet sending delay [us]".to_string(),
            format!("mean PSD vs {}", if x_is_bp { "B_P" } else { "P_S" }),
        ),
        Response::Plr => (
            "packet loss rate".to_string(),
            format!("PLR vs {}", if x_is_bp { "B_P" } else { "P_S" }),
        ),
    };
    let chart = Chart {
        title,
        x_label,
        y_label,
        series,
    };
    fs::write(&args.out, render_svg(&chart, args.width, args.height))?;
    let companion_path = args.out.with_extension("csv");
    fs::write(&companion_path, companion)?;
    println!(
        "wrote {} and {}",
        args.out.display(),
        companion_path.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_syntax() {
        assert_eq!(parse_range("1:20:1").unwrap(), RangeSpec::new(1, 20, 1));
        assert_eq!(parse_range("10").unwrap(), RangeSpec::new(10, 10, 1));
        assert!(parse_range("20:1:1").is_err());
        assert!(parse_range("1:20:0").is_err());
        assert!(parse_range("1:20").is_err());
        assert!(parse_range("a:b:c").is_err());
    }

    #[test]
    fn set_syntax() {
        assert_eq!(parse_set("1,2,4,8").unwrap(), vec![1, 2, 4, 8]);
        assert_eq!(parse_set("1").unwrap(), vec![1]);
        assert!(parse_set("").is_err());
        assert!(parse_set("1,0").is_err());
        assert!(parse_set("x").is_err());
    }

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Numeric("x".into()).exit_code(), 3);
        let singular: CliError = RegressError::Singular("B_P".into()).into();
        assert_eq!(singular.exit_code(), 3);
        assert!(singular.to_string().contains("B_P"));
        let unknown: CliError = RegressError::UnknownVariant(9).into();
        assert_eq!(unknown.exit_code(), 2);
    }
}

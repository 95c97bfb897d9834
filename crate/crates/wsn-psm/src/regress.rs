//! Ordinary least-squares engine for the seven linear performance-model
//! variants over the predictor set {B_P, P_S, N_C}, with coefficient of
//! determination, coefficient confidence intervals, non-zero tests and
//! predictor correlation tests.
//!
//! The solver runs two passes over the observations: means first, then
//! centered normal equations, solved by symmetric elimination with a rank
//! check that names the offending column.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::experiment::ParamPoint;

/// Maximum number of predictors in any variant.
const MAX_PREDICTORS: usize = 3;

/// One of the three swept network parameters, acting as an explanatory
/// variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Predictor {
    BackoffPeriod,
    PacketSize,
    Contenders,
}

impl Predictor {
    pub fn name(&self) -> &'static str {
        match self {
            Predictor::BackoffPeriod => "B_P",
            Predictor::PacketSize => "P_S",
            Predictor::Contenders => "N_C",
        }
    }

    pub fn value(&self, point: &ParamPoint) -> f64 {
        match self {
            Predictor::BackoffPeriod => point.b_p as f64,
            Predictor::PacketSize => point.p_s as f64,
            Predictor::Contenders => point.n_c as f64,
        }
    }
}

/// One of the seven predictor subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelVariant {
    id: u8,
    predictors: Vec<Predictor>,
}

impl ModelVariant {
    /// Variant by its conventional index: 1 {B_P}, 2 {P_S}, 3 {N_C},
    /// 4 {B_P,P_S}, 5 {B_P,N_C}, 6 {P_S,N_C}, 7 {B_P,P_S,N_C}.
    pub fn from_id(id: u8) -> Result<Self, RegressError> {
        use Predictor::*;
        let predictors = match id {
            1 => vec![BackoffPeriod],
            2 => vec![PacketSize],
            3 => vec![Contenders],
            4 => vec![BackoffPeriod, PacketSize],
            5 => vec![BackoffPeriod, Contenders],
            6 => vec![PacketSize, Contenders],
            7 => vec![BackoffPeriod, PacketSize, Contenders],
            _ => return Err(RegressError::UnknownVariant(id)),
        };
        Ok(ModelVariant { id, predictors })
    }

    pub fn all() -> Vec<ModelVariant> {
        (1..=7)
            .map(|id| ModelVariant::from_id(id).unwrap())
            .collect()
    }

    pub fn id(&self) -> u8 {
        self.id
    }

    pub fn predictors(&self) -> &[Predictor] {
        &self.predictors
    }

    pub fn contains(&self, p: Predictor) -> bool {
        self.predictors.contains(&p)
    }
}

impl std::fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<&str> = self.predictors.iter().map(|p| p.name()).collect();
        write!(f, "V{} [{}]", self.id, names.join(" + "))
    }
}

/// Which network property a model predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Response {
    Psd,
    Plr,
}

impl Response {
    pub fn name(&self) -> &'static str {
        match self {
            Response::Psd => "psd",
            Response::Plr => "plr",
        }
    }

    pub fn parse(s: &str) -> Result<Self, RegressError> {
        match s.to_ascii_lowercase().as_str() {
            "psd" => Ok(Response::Psd),
            "plr" => Ok(Response::Plr),
            other => Err(RegressError::UnknownResponse(other.into())),
        }
    }
}

/// A fitted linear model.
#[derive(Debug, Clone)]
pub struct RegressionModel {
    pub variant: ModelVariant,
    pub response: Response,
    /// Intercept first, then one coefficient per predictor in variant order.
    pub coefficients: Vec<f64>,
    /// Standard error of each coefficient, same order.
    pub stderr: Vec<f64>,
    /// Coefficient of determination on the training rows.
    pub omega: f64,
    /// Residual variance (squared standard error of the regression).
    /// Not serialized; NaN on models loaded from JSON.
    pub residual_variance: f64,
    pub n: usize,
    pub dof: usize,
}

/// Closed interval with the confidence level it was computed at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// A model evaluation; `clamped` marks loss-rate predictions pulled back
/// into the unit interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub value: f64,
    pub clamped: bool,
}

#[derive(Debug, Error)]
pub enum RegressError {
    #[error("unknown model variant {0}, expected 1..=7")]
    UnknownVariant(u8),
    #[error("unknown response `{0}`, expected psd or plr")]
    UnknownResponse(String),
    #[error("design matrix is singular: column `{0}` carries no independent variation")]
    Singular(String),
    #[error("need more than {needed} observations for {needed} parameters, got {n}")]
    InsufficientData { n: usize, needed: usize },
    #[error("row {row}: expected {expected} predictor values, got {got}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("coefficient of determination undefined: response is constant")]
    ConstantResponse,
    #[error("confidence level {0} outside (0, 1)")]
    InvalidLevel(f64),
    #[error("correlation needs at least 3 paired values, got {0}")]
    SeriesTooShort(usize),
    #[error("correlation undefined for a zero-variance series")]
    ZeroVariance,
    #[error("model document malformed: {0}")]
    BadDocument(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Column label for error messages: 0 is the intercept.
fn column_name(variant: &ModelVariant, idx: usize) -> String {
    if idx == 0 {
        "intercept".into()
    } else {
        variant.predictors[idx - 1].name().into()
    }
}

/// Core weighted fit over padded rows.
#[allow(clippy::needless_range_loop)] // index loops mirror the matrix algebra
fn fit_core(
    xs: &[[f64; MAX_PREDICTORS]],
    ys: &[f64],
    ws: Option<&[f64]>,
    variant: &ModelVariant,
    response: Response,
) -> Result<RegressionModel, RegressError> {
    let m = variant.predictors.len();
    let n = ys.len();
    if n < m + 2 {
        return Err(RegressError::InsufficientData { n, needed: m + 1 });
    }
    let weight = |i: usize| ws.map_or(1.0, |w| w[i]);

    // Pass 1: weighted means.
    let mut wsum = 0.0;
    let mut xbar = [0.0; MAX_PREDICTORS];
    let mut ybar = 0.0;
    for i in 0..n {
        let w = weight(i);
        wsum += w;
        for j in 0..m {
            xbar[j] += w * xs[i][j];
        }
        ybar += w * ys[i];
    }
    if wsum <= 0.0 {
        return Err(RegressError::InsufficientData {
            n: 0,
            needed: m + 1,
        });
    }
    for j in 0..m {
        xbar[j] /= wsum;
    }
    ybar /= wsum;

    // Pass 2: centered moments.
    let mut gram = [[0.0f64; MAX_PREDICTORS]; MAX_PREDICTORS];
    let mut xty = [0.0f64; MAX_PREDICTORS];
    let mut syy = 0.0f64;
    for i in 0..n {
        let w = weight(i);
        let dy = ys[i] - ybar;
        syy += w * dy * dy;
        let mut dx = [0.0; MAX_PREDICTORS];
        for j in 0..m {
            dx[j] = xs[i][j] - xbar[j];
        }
        for j in 0..m {
            xty[j] += w * dx[j] * dy;
            for k in j..m {
                gram[j][k] += w * dx[j] * dx[k];
            }
        }
    }
    for j in 0..m {
        for k in 0..j {
            gram[j][k] = gram[k][j];
        }
    }

    // Symmetric elimination with rank check.
    let scale = (0..m).map(|j| gram[j][j]).fold(0.0f64, f64::max).max(1.0);
    let mut a = gram;
    let mut b = xty;
    for col in 0..m {
        let pivot = a[col][col];
        if pivot.abs() <= 1e-12 * scale {
            return Err(RegressError::Singular(column_name(variant, col + 1)));
        }
        for row in col + 1..m {
            let f = a[row][col] / pivot;
            for k in col..m {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut slope = [0.0f64; MAX_PREDICTORS];
    for row in (0..m).rev() {
        let mut s = b[row];
        for k in row + 1..m {
            s -= a[row][k] * slope[k];
        }
        slope[row] = s / a[row][row];
    }

    let mut coefficients = Vec::with_capacity(m + 1);
    let intercept = ybar - (0..m).map(|j| slope[j] * xbar[j]).sum::<f64>();
    coefficients.push(intercept);
    coefficients.extend_from_slice(&slope[..m]);

    // SSE from the centered identity; tiny negative residue is rounding.
    let explained: f64 = (0..m).map(|j| slope[j] * xty[j]).sum();
    let sse = (syy - explained).max(0.0);
    let omega = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let dof = n - m - 1;
    let residual_variance = sse / dof as f64;

    // Standard errors via the inverse centered Gram matrix.
    let inv = invert(&gram, m, variant)?;
    let mut stderr = Vec::with_capacity(m + 1);
    let mut quad = 1.0 / wsum;
    for j in 0..m {
        for k in 0..m {
            quad += xbar[j] * inv[j][k] * xbar[k];
        }
    }
    stderr.push((residual_variance * quad).max(0.0).sqrt());
    for j in 0..m {
        stderr.push((residual_variance * inv[j][j]).max(0.0).sqrt());
    }

    Ok(RegressionModel {
        variant: variant.clone(),
        response,
        coefficients,
        stderr,
        omega,
        residual_variance,
        n,
        dof,
    })
}

/// Gauss-Jordan inverse of the leading m-by-m block.
#[allow(clippy::needless_range_loop)]
fn invert(
    gram: &[[f64; MAX_PREDICTORS]; MAX_PREDICTORS],
    m: usize,
    variant: &ModelVariant,
) -> Result<[[f64; MAX_PREDICTORS]; MAX_PREDICTORS], RegressError> {
    let mut a = *gram;
    let mut inv = [[0.0f64; MAX_PREDICTORS]; MAX_PREDICTORS];
    let scale = (0..m).map(|j| gram[j][j]).fold(0.0f64, f64::max).max(1.0);
    for (j, row) in inv.iter_mut().enumerate().take(m) {
        row[j] = 1.0;
    }
    for col in 0..m {
        // Partial pivot within remaining rows.
        let piv = (col..m)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        if a[piv][col].abs() <= 1e-12 * scale {
            return Err(RegressError::Singular(column_name(variant, col + 1)));
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for k in 0..m {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for row in 0..m {
            if row != col {
                let f = a[row][col];
                for k in 0..m {
                    a[row][k] -= f * a[col][k];
                    inv[row][k] -= f * inv[col][k];
                }
            }
        }
    }
    Ok(inv)
}

fn pad_rows(
    rows: &[(Vec<f64>, f64)],
    m: usize,
) -> Result<(Vec<[f64; MAX_PREDICTORS]>, Vec<f64>), RegressError> {
    let mut xs = Vec::with_capacity(rows.len());
    let mut ys = Vec::with_capacity(rows.len());
    for (i, (x, y)) in rows.iter().enumerate() {
        if x.len() != m {
            return Err(RegressError::DimensionMismatch {
                row: i,
                expected: m,
                got: x.len(),
            });
        }
        let mut padded = [0.0; MAX_PREDICTORS];
        padded[..m].copy_from_slice(x);
        xs.push(padded);
        ys.push(*y);
    }
    Ok((xs, ys))
}

/// Fit a variant by least squares on explicit predictor rows.
///
/// Each row carries the predictor values in the variant's order plus the
/// observed response. The intercept column is implicit.
pub fn fit_ols(
    rows: &[(Vec<f64>, f64)],
    variant: &ModelVariant,
    response: Response,
) -> Result<RegressionModel, RegressError> {
    let (xs, ys) = pad_rows(rows, variant.predictors.len())?;
    fit_core(&xs, &ys, None, variant, response)
}

/// Fit a variant on `(constellation, response)` observations, extracting
/// the variant's predictor values from each constellation.
pub fn fit_from_observations(
    obs: &[(ParamPoint, f64)],
    variant: &ModelVariant,
    response: Response,
) -> Result<RegressionModel, RegressError> {
    let m = variant.predictors.len();
    let mut xs = Vec::with_capacity(obs.len());
    let mut ys = Vec::with_capacity(obs.len());
    for (point, y) in obs {
        let mut padded = [0.0; MAX_PREDICTORS];
        for (j, p) in variant.predictors.iter().enumerate() {
            padded[j] = p.value(point);
        }
        let _ = m;
        xs.push(padded);
        ys.push(*y);
    }
    fit_core(&xs, &ys, None, variant, response)
}

/// Weighted variant of [`fit_from_observations`]; weights act as relative
/// row precisions (e.g. per-constellation observation counts).
pub fn fit_from_observations_weighted(
    obs: &[(ParamPoint, f64)],
    weights: &[f64],
    variant: &ModelVariant,
    response: Response,
) -> Result<RegressionModel, RegressError> {
    assert_eq!(obs.len(), weights.len());
    let mut xs = Vec::with_capacity(obs.len());
    let mut ys = Vec::with_capacity(obs.len());
    for (point, y) in obs {
        let mut padded = [0.0; MAX_PREDICTORS];
        for (j, p) in variant.predictors.iter().enumerate() {
            padded[j] = p.value(point);
        }
        xs.push(padded);
        ys.push(*y);
    }
    fit_core(&xs, &ys, Some(weights), variant, response)
}

/// Coefficient of determination of `model` on `rows`: the share of the
/// response variation the regression explains.
#[allow(clippy::needless_range_loop)]
pub fn r_squared(model: &RegressionModel, rows: &[(Vec<f64>, f64)]) -> Result<f64, RegressError> {
    let m = model.variant.predictors.len();
    let n = rows.len();
    if n == 0 {
        return Err(RegressError::ConstantResponse);
    }
    let ybar = rows.iter().map(|r| r.1).sum::<f64>() / n as f64;
    let mut sse = 0.0;
    let mut sst = 0.0;
    for (i, (x, y)) in rows.iter().enumerate() {
        if x.len() != m {
            return Err(RegressError::DimensionMismatch {
                row: i,
                expected: m,
                got: x.len(),
            });
        }
        let mut fit = model.coefficients[0];
        for j in 0..m {
            fit += model.coefficients[j + 1] * x[j];
        }
        sse += (y - fit) * (y - fit);
        sst += (y - ybar) * (y - ybar);
    }
    if sst <= 0.0 {
        return Err(RegressError::ConstantResponse);
    }
    Ok(1.0 - sse / sst)
}

/// Two-sided confidence interval for every coefficient at `level`.
pub fn coef_confidence_intervals(
    model: &RegressionModel,
    level: f64,
) -> Result<Vec<Interval>, RegressError> {
    if !(0.0 < level && level < 1.0) {
        return Err(RegressError::InvalidLevel(level));
    }
    let t = t_quantile(0.5 + level / 2.0, model.dof);
    Ok(model
        .coefficients
        .iter()
        .zip(&model.stderr)
        .map(|(&c, &se)| Interval {
            lo: c - t * se,
            hi: c + t * se,
            level,
        })
        .collect())
}

/// True when the interval excludes zero, i.e. the coefficient is
/// statistically non-zero and the regression term significant.
pub fn nonzero_test(interval: &Interval) -> bool {
    !interval.contains(0.0)
}

/// Pearson correlation of two predictor series plus the zero-correlation
/// verdict: true when the t-statistic stays below the two-sided 95 %
/// critical value, i.e. the series pass as uncorrelated.
pub fn predictor_correlation(xs: &[f64], ys: &[f64]) -> Result<(f64, bool), RegressError> {
    let n = xs.len();
    if n != ys.len() || n < 3 {
        return Err(RegressError::SeriesTooShort(n.min(ys.len())));
    }
    let nf = n as f64;
    let xbar = xs.iter().sum::<f64>() / nf;
    let ybar = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = xs[i] - xbar;
        let dy = ys[i] - ybar;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(RegressError::ZeroVariance);
    }
    let r = sxy / (sxx * syy).sqrt();
    let verdict = if r.abs() >= 1.0 {
        false
    } else {
        let t = r.abs() * ((nf - 2.0) / (1.0 - r * r)).sqrt();
        t < t_quantile(0.975, n - 2)
    };
    Ok((r, verdict))
}

/// Evaluate a fitted model at a constellation. Loss-rate predictions are
/// clamped into `[0, 1]` and flagged when the raw value fell outside.
pub fn predict(model: &RegressionModel, point: &ParamPoint) -> Prediction {
    let mut value = model.coefficients[0];
    for (j, p) in model.variant.predictors.iter().enumerate() {
        value += model.coefficients[j + 1] * p.value(point);
    }
    match model.response {
        Response::Plr => {
            let clamped = value.clamp(0.0, 1.0);
            Prediction {
                value: clamped,
                clamped: clamped != value,
            }
        }
        Response::Psd => Prediction {
            value,
            clamped: false,
        },
    }
}

// ---------------------------------------------------------------------------
// Student-t quantiles via the regularized incomplete beta function
// ---------------------------------------------------------------------------

/// Natural log of the gamma function (Lanczos approximation).
fn ln_gamma(x: f64) -> f64 {
    const COF: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_9e-2,
        -0.539_523_938_495_3e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000_000_000_190_015;
    for c in COF {
        y += 1.0;
        ser += c / y;
    }
    -tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_IT: usize = 300;
    const EPS: f64 = 3.0e-14;
    const FPMIN: f64 = 1.0e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_IT {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b).
fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let bt = (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        bt * beta_cf(a, b, x) / a
    } else {
        1.0 - bt * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Student-t cumulative distribution at `t` with `dof` degrees of freedom.
pub fn t_cdf(t: f64, dof: usize) -> f64 {
    let v = dof as f64;
    let ib = beta_inc(v / 2.0, 0.5, v / (v + t * t));
    if t >= 0.0 {
        1.0 - ib / 2.0
    } else {
        ib / 2.0
    }
}

/// Student-t quantile at probability `p`, found by bisection on the
/// regularized incomplete beta function.
pub fn t_quantile(p: f64, dof: usize) -> f64 {
    assert!(0.0 < p && p < 1.0, "probability outside (0,1): {p}");
    assert!(dof >= 1, "need at least one degree of freedom");
    if (p - 0.5).abs() < 1e-15 {
        return 0.0;
    }
    if p < 0.5 {
        return -t_quantile(1.0 - p, dof);
    }
    let mut hi = 1.0f64;
    while t_cdf(hi, dof) < p && hi < 1e12 {
        hi *= 2.0;
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if t_cdf(mid, dof) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

// ---------------------------------------------------------------------------
// Model persistence
// ---------------------------------------------------------------------------

/// On-disk model document; field order is part of the format.
#[derive(Serialize, Deserialize)]
struct ModelDocument {
    variant: u8,
    response: String,
    coefficients: Vec<f64>,
    stderr: Vec<f64>,
    omega: f64,
    n: usize,
    dof: usize,
}

/// Serialize a fitted model to its JSON document.
pub fn to_json(model: &RegressionModel) -> String {
    let doc = ModelDocument {
        variant: model.variant.id,
        response: model.response.name().into(),
        coefficients: model.coefficients.clone(),
        stderr: model.stderr.clone(),
        omega: model.omega,
        n: model.n,
        dof: model.dof,
    };
    serde_json::to_string_pretty(&doc).expect("model document serializes")
}

/// Load a model from its JSON document. The residual variance is not part
/// of the document and comes back as NaN.
pub fn from_json(text: &str) -> Result<RegressionModel, RegressError> {
    let doc: ModelDocument = serde_json::from_str(text)?;
    let variant = ModelVariant::from_id(doc.variant)?;
    let response = Response::parse(&doc.response)?;
    let want = variant.predictors.len() + 1;
    if doc.coefficients.len() != want || doc.stderr.len() != want {
        return Err(RegressError::BadDocument(format!(
            "variant {} expects {want} coefficients and standard errors, found {} and {}",
            doc.variant,
            doc.coefficients.len(),
            doc.stderr.len()
        )));
    }
    if doc.dof == 0 {
        return Err(RegressError::BadDocument("zero degrees of freedom".into()));
    }
    Ok(RegressionModel {
        variant,
        response,
        coefficients: doc.coefficients,
        stderr: doc.stderr,
        omega: doc.omega,
        residual_variance: f64::NAN,
        n: doc.n,
        dof: doc.dof,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(id: u8) -> ModelVariant {
        ModelVariant::from_id(id).unwrap()
    }

    #[test]
    fn exact_line_recovered() {
        let rows = vec![(vec![1.0], 3.0), (vec![2.0], 5.0), (vec![3.0], 7.0)];
        let m = fit_ols(&rows, &v(1), Response::Psd).unwrap();
        assert!((m.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((m.coefficients[1] - 2.0).abs() < 1e-12);
        assert!((m.omega - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_predictor_is_singular() {
        let rows: Vec<(Vec<f64>, f64)> = (0..10).map(|i| (vec![4.0], i as f64)).collect();
        match fit_ols(&rows, &v(1), Response::Psd) {
            Err(RegressError::Singular(col)) => assert_eq!(col, "B_P"),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn insufficient_rows_rejected() {
        let rows = vec![(vec![1.0, 2.0, 3.0], 1.0), (vec![2.0, 1.0, 0.0], 2.0)];
        assert!(matches!(
            fit_ols(&rows, &v(7), Response::Psd),
            Err(RegressError::InsufficientData { .. })
        ));
    }

    #[test]
    fn residuals_sum_to_zero() {
        use crate::rng::RngStream;
        let mut rng = RngStream::new(314);
        let rows: Vec<(Vec<f64>, f64)> = (0..200)
            .map(|_| {
                let x1 = rng.next_f64() * 20.0;
                let x2 = rng.next_f64() * 100.0;
                let y = 5.0 + 2.0 * x1 - 0.3 * x2 + rng.next_gaussian(4.0);
                (vec![x1, x2], y)
            })
            .collect();
        let m = fit_ols(&rows, &v(4), Response::Psd).unwrap();
        let mut sum_e = 0.0;
        let mut sum_ex = [0.0f64; 2];
        let mut scale = 0.0;
        for (x, y) in &rows {
            let fit = m.coefficients[0] + m.coefficients[1] * x[0] + m.coefficients[2] * x[1];
            let e = y - fit;
            sum_e += e;
            sum_ex[0] += e * x[0];
            sum_ex[1] += e * x[1];
            scale += y.abs();
        }
        assert!(sum_e.abs() <= 1e-6 * scale, "sum {sum_e}");
        assert!(sum_ex[0].abs() <= 1e-6 * scale * 20.0);
        assert!(sum_ex[1].abs() <= 1e-6 * scale * 100.0);
    }

    /// Independent route: assemble the full normal equations including the
    /// intercept column and solve by Gaussian elimination with partial
    /// pivoting. Shares no code with the centered fit path.
    #[allow(clippy::needless_range_loop)]
    fn oracle_fit(rows: &[(Vec<f64>, f64)], m: usize) -> Vec<f64> {
        let k = m + 1;
        let mut xtx = vec![vec![0.0f64; k]; k];
        let mut xty = vec![0.0f64; k];
        for (x, y) in rows {
            let mut full = vec![1.0];
            full.extend_from_slice(x);
            for i in 0..k {
                for j in 0..k {
                    xtx[i][j] += full[i] * full[j];
                }
                xty[i] += full[i] * y;
            }
        }
        for col in 0..k {
            let piv = (col..k)
                .max_by(|&r, &s| xtx[r][col].abs().total_cmp(&xtx[s][col].abs()))
                .unwrap();
            xtx.swap(col, piv);
            xty.swap(col, piv);
            for row in col + 1..k {
                let f = xtx[row][col] / xtx[col][col];
                for j in col..k {
                    xtx[row][j] -= f * xtx[col][j];
                }
                xty[row] -= f * xty[col];
            }
        }
        let mut beta = vec![0.0; k];
        for row in (0..k).rev() {
            let mut s = xty[row];
            for j in row + 1..k {
                s -= xtx[row][j] * beta[j];
            }
            beta[row] = s / xtx[row][row];
        }
        beta
    }

    #[test]
    fn matches_normal_equation_oracle() {
        use crate::rng::RngStream;
        let mut rng = RngStream::new(2718);
        for case in 0..100u64 {
            let m = 1 + (case % 3) as usize;
            let n = 6 + (rng.next_u64() % 45) as usize;
            let rows: Vec<(Vec<f64>, f64)> = (0..n)
                .map(|_| {
                    let x: Vec<f64> = (0..m).map(|_| rng.next_f64() * 50.0 - 10.0).collect();
                    let y = 3.0
                        + x.iter()
                            .enumerate()
                            .map(|(j, v)| (j as f64 + 1.0) * v)
                            .sum::<f64>()
                        + rng.next_gaussian(2.0);
                    (x, y)
                })
                .collect();
            let variant = v([1, 4, 7][m - 1]);
            let fitted = fit_ols(&rows, &variant, Response::Psd).unwrap();
            let oracle = oracle_fit(&rows, m);
            for (a, b) in fitted.coefficients.iter().zip(&oracle) {
                let tol = 1e-9 * b.abs().max(1.0);
                assert!((a - b).abs() <= tol, "case {case}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn affine_equivariance() {
        use crate::rng::RngStream;
        let mut rng = RngStream::new(11);
        let rows: Vec<(Vec<f64>, f64)> = (0..80)
            .map(|_| {
                let x1 = rng.next_f64() * 20.0;
                let x2 = rng.next_f64() * 8.0;
                (
                    vec![x1, x2],
                    1.0 + 0.5 * x1 + 3.0 * x2 + rng.next_gaussian(1.0),
                )
            })
            .collect();
        let k = 40.0;
        let scaled: Vec<(Vec<f64>, f64)> = rows
            .iter()
            .map(|(x, y)| (vec![x[0] * k, x[1]], *y))
            .collect();
        let a = fit_ols(&rows, &v(5), Response::Psd).unwrap();
        let b = fit_ols(&scaled, &v(5), Response::Psd).unwrap();
        assert!((a.coefficients[1] - b.coefficients[1] * k).abs() < 1e-9 * a.coefficients[1].abs());
        assert!((a.omega - b.omega).abs() < 1e-9);
        let pa = a.coefficients[0] + a.coefficients[1] * 7.0 + a.coefficients[2] * 2.0;
        let pb = b.coefficients[0] + b.coefficients[1] * 7.0 * k + b.coefficients[2] * 2.0;
        assert!((pa - pb).abs() < 1e-9 * pa.abs().max(1.0));
    }

    #[test]
    fn r_squared_constant_response_errors() {
        let rows: Vec<(Vec<f64>, f64)> = (0..10).map(|i| (vec![i as f64], 4.0)).collect();
        let m = fit_ols(&rows, &v(1), Response::Psd).unwrap();
        assert!(matches!(
            r_squared(&m, &rows),
            Err(RegressError::ConstantResponse)
        ));
    }

    #[test]
    fn r_squared_near_zero_for_pure_noise() {
        use crate::rng::RngStream;
        let mut rng = RngStream::new(404);
        let rows: Vec<(Vec<f64>, f64)> = (0..10_000)
            .map(|i| (vec![(i % 20) as f64], rng.next_gaussian(1.0)))
            .collect();
        let m = fit_ols(&rows, &v(1), Response::Psd).unwrap();
        let omega = r_squared(&m, &rows).unwrap();
        assert!(omega < 0.01, "omega {omega}");
    }

    #[test]
    fn t_quantile_reference_values() {
        assert!((t_quantile(0.975, 488) - 1.9648).abs() <= 1e-3);
        assert!((t_quantile(0.975, 1) - 12.7062).abs() < 1e-3);
        assert!((t_quantile(0.975, 10) - 2.2281).abs() < 1e-3);
        assert!((t_quantile(0.975, 1_000_000) - 1.9600).abs() < 1e-3);
        assert_eq!(t_quantile(0.5, 30), 0.0);
        assert!((t_quantile(0.025, 10) + t_quantile(0.975, 10)).abs() < 1e-9);
    }

    #[test]
    fn confidence_interval_degenerate_when_exact() {
        let rows = vec![(vec![1.0], 3.0), (vec![2.0], 5.0), (vec![3.0], 7.0)];
        let m = fit_ols(&rows, &v(1), Response::Psd).unwrap();
        let cis = coef_confidence_intervals(&m, 0.95).unwrap();
        for (ci, c) in cis.iter().zip(&m.coefficients) {
            assert!((ci.lo - c).abs() < 1e-9 && (ci.hi - c).abs() < 1e-9);
        }
    }

    #[test]
    fn confidence_level_validated() {
        let rows = vec![(vec![1.0], 3.0), (vec![2.0], 5.0), (vec![3.0], 7.1)];
        let m = fit_ols(&rows, &v(1), Response::Psd).unwrap();
        assert!(matches!(
            coef_confidence_intervals(&m, 1.5),
            Err(RegressError::InvalidLevel(_))
        ));
    }

    #[test]
    fn noise_predictor_interval_covers_zero() {
        use crate::rng::RngStream;
        let mut covered = 0;
        for rep in 0..100u64 {
            let mut rng = RngStream::new(5000 + rep);
            let rows: Vec<(Vec<f64>, f64)> = (0..60)
                .map(|_| (vec![rng.next_f64() * 10.0], rng.next_gaussian(1.0)))
                .collect();
            let m = fit_ols(&rows, &v(1), Response::Psd).unwrap();
            let ci = &coef_confidence_intervals(&m, 0.95).unwrap()[1];
            if ci.contains(0.0) {
                covered += 1;
            }
        }
        assert!(covered >= 90, "covered {covered}/100");
    }

    #[test]
    fn nonzero_test_cases() {
        let iv = |lo, hi| Interval {
            lo,
            hi,
            level: 0.95,
        };
        assert!(!nonzero_test(&iv(-1.0, 1.0)));
        assert!(nonzero_test(&iv(0.2, 0.9)));
        assert!(nonzero_test(&iv(-0.9, -0.2)));
    }

    #[test]
    fn correlation_extremes() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let (r, verdict) = predictor_correlation(&xs, &xs).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!(!verdict);
        let neg: Vec<f64> = xs.iter().map(|v| -v).collect();
        let (r, verdict) = predictor_correlation(&xs, &neg).unwrap();
        assert!((r + 1.0).abs() < 1e-12);
        assert!(!verdict);
    }

    #[test]
    fn full_factorial_columns_uncorrelated() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for x in 1..=20 {
            for y in (20..=120).step_by(5) {
                a.push(x as f64);
                b.push(y as f64);
            }
        }
        let (r, verdict) = predictor_correlation(&a, &b).unwrap();
        assert!(r.abs() < 1e-12, "r = {r}");
        assert!(verdict);
    }

    #[test]
    fn correlation_input_validation() {
        assert!(matches!(
            predictor_correlation(&[1.0, 2.0], &[1.0, 2.0]),
            Err(RegressError::SeriesTooShort(2))
        ));
        assert!(matches!(
            predictor_correlation(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(RegressError::ZeroVariance)
        ));
    }

    #[test]
    fn predict_evaluates_the_line() {
        let model = RegressionModel {
            variant: v(1),
            response: Response::Psd,
            coefficients: vec![1.0, 2.0],
            stderr: vec![0.0, 0.0],
            omega: 1.0,
            residual_variance: 0.0,
            n: 3,
            dof: 1,
        };
        let p = predict(&model, &ParamPoint::new(3, 0, 0));
        assert_eq!(p.value, 7.0);
        assert!(!p.clamped);

        let zeros = RegressionModel {
            coefficients: vec![0.0, 0.0],
            ..model.clone()
        };
        assert_eq!(predict(&zeros, &ParamPoint::new(3, 0, 0)).value, 0.0);
    }

    #[test]
    fn plr_prediction_clamps() {
        let model = RegressionModel {
            variant: v(3),
            response: Response::Plr,
            coefficients: vec![-0.5, 0.01],
            stderr: vec![0.0, 0.0],
            omega: 0.5,
            residual_variance: 0.0,
            n: 10,
            dof: 8,
        };
        let p = predict(&model, &ParamPoint::new(0, 0, 1));
        assert_eq!(p.value, 0.0);
        assert!(p.clamped);
    }

    #[test]
    fn json_round_trip_preserves_field_order() {
        let rows = vec![
            (vec![1.0, 2.0], 3.0),
            (vec![2.0, 1.0], 5.0),
            (vec![3.0, 4.0], 7.5),
            (vec![4.0, 2.5], 9.1),
        ];
        let m = fit_ols(&rows, &v(4), Response::Psd).unwrap();
        let json = to_json(&m);
        let order = [
            "variant",
            "response",
            "coefficients",
            "stderr",
            "omega",
            "\"n\"",
            "dof",
        ];
        let mut last = 0;
        for key in order {
            let pos = json.find(key).unwrap_or_else(|| panic!("{key} missing"));
            assert!(pos > last || last == 0, "field {key} out of order");
            last = pos;
        }
        let back = from_json(&json).unwrap();
        assert_eq!(back.coefficients, m.coefficients);
        assert_eq!(back.stderr, m.stderr);
        assert_eq!(back.dof, m.dof);
        assert_eq!(back.response, m.response);
        assert!(back.residual_variance.is_nan());
    }

    #[test]
    fn bad_document_rejected() {
        assert!(from_json("{}").is_err());
        let doc = r#"{"variant":7,"response":"psd","coefficients":[1.0],"stderr":[0.1],"omega":0.5,"n":10,"dof":6}"#;
        assert!(matches!(from_json(doc), Err(RegressError::BadDocument(_))));
    }

    #[test]
    fn nested_omega_monotone_on_synthetic_grid() {
        use crate::rng::RngStream;
        let mut rng = RngStream::new(88);
        let mut obs = Vec::new();
        for b in 1..=10u32 {
            for p in [20u32, 60, 100] {
                for n in [1u32, 2, 4] {
                    let y = 100.0
                        + 45.0 * b as f64
                        + 3.0 * p as f64
                        + 20.0 * n as f64
                        + rng.next_gaussian(30.0);
                    obs.push((ParamPoint::new(b, p, n), y));
                }
            }
        }
        let omega = |id: u8| {
            fit_from_observations(&obs, &v(id), Response::Psd)
                .unwrap()
                .omega
        };
        assert!(omega(7) >= omega(4) && omega(4) >= omega(1).max(omega(2)));
        assert!(omega(7) >= omega(5) && omega(5) >= omega(1).max(omega(3)));
        assert!(omega(7) >= omega(6) && omega(6) >= omega(2).max(omega(3)));
    }

    #[test]
    fn weighted_fit_matches_replicated_rows() {
        let obs = vec![
            (ParamPoint::new(1, 20, 1), 10.0),
            (ParamPoint::new(5, 20, 1), 30.0),
            (ParamPoint::new(9, 20, 1), 55.0),
            (ParamPoint::new(13, 20, 1), 70.0),
        ];
        let weights = [1.0, 2.0, 3.0, 2.0];
        let weighted =
            fit_from_observations_weighted(&obs, &weights, &v(1), Response::Psd).unwrap();
        let mut replicated = Vec::new();
        for (o, &w) in obs.iter().zip(&weights) {
            for _ in 0..w as usize {
                replicated.push(*o);
            }
        }
        let reference = fit_from_observations(&replicated, &v(1), Response::Psd).unwrap();
        for (a, b) in weighted.coefficients.iter().zip(&reference.coefficients) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

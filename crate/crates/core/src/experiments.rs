//! Shape-parameter sweeps: sample a bandlimited function on a node set,
//! interpolate for each shape value, measure the error on a central window of
//! the node hull, and fit the exponential decay rate of the sup error.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandlimited::{synthesize, BandlimitedFunction, FunctionSpec};
use crate::conditions::{check_band_geometry, check_grid, check_interpolator, exponent_for, regularity_row, RateExponent};
use crate::error::{Error, Result};
use crate::geometry::{BodySpec, ConvexBody};
use crate::interpolation::{averaged, solver_tolerance, Interpolant};
use crate::kernels::{Kernel, KernelSpec};
use crate::nodes::{NodeSet, NodeSpec};
use crate::quadrature::GaussLegendre;

/// Allowed excess of the fitted slope over the theoretical exponent.
pub const SLOPE_TOLERANCE: f64 = 0.05;
/// Absolute error floor below which rows are not fitted.
pub const ERROR_FLOOR: f64 = 1e-10;

fn half() -> f64 {
    0.5
}

/// JSON sweep description. The kernel's shape entry (`alpha` or `c`) is
/// replaced by each grid value in turn and may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub body: BodySpec,
    pub kernel: KernelSpec,
    pub function: FunctionSpec,
    pub nodes: NodeSpec,
    /// Shape values, strictly increasing.
    pub grid: Vec<f64>,
    /// Central fraction of the node hull (per axis) on which errors are measured.
    #[serde(default = "half")]
    pub window: f64,
    /// Sup-error grid points per axis (default 2048 / 128 / 32 for d = 1 / 2 / 3).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_points: Option<usize>,
    /// Gauss–Legendre order per axis for the L₂ error (default 200 / 64 / 16).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l2_order: Option<usize>,
    /// Permit `β = δ = 1` (unit ball).
    #[serde(default)]
    pub limiting_case: bool,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn dim(&self) -> usize {
        self.body.dim
    }

    fn sup_points(&self) -> usize {
        self.sup_points.unwrap_or(match self.dim() {
            1 => 2048,
            2 => 128,
            _ => 32,
        })
    }

    fn l2_order(&self) -> usize {
        self.l2_order.unwrap_or(match self.dim() {
            1 => 200,
            2 => 64,
            _ => 16,
        })
    }

    /// Checks everything that does not need computation beyond node generation.
    pub fn validate(&self) -> Result<(ConvexBody, NodeSet)> {
        let body = ConvexBody::from_spec(&self.body)?;
        if self.kernel.dim != body.dim() {
            return Err(Error::Config(format!("kernel dimension {} differs from body dimension {}", self.kernel.dim, body.dim())));
        }
        let limiting = check_band_geometry(&body, self.function.beta).map_err(|e| Error::Config(e.to_string()))?;
        if limiting && !self.limiting_case {
            return Err(Error::Config("β = δ = 1 requires \"limiting_case\": true".into()));
        }
        if self.limiting_case && !limiting {
            return Err(Error::Config("\"limiting_case\" needs the unit ball and β = 1".into()));
        }
        check_grid(&self.grid)?;
        if !(self.window > 0.0 && self.window < 1.0) {
            return Err(Error::Config(format!("window must lie in (0, 1), got {}", self.window)));
        }
        if self.sup_points() < 2 || self.l2_order() < 1 {
            return Err(Error::Config("sup_points must be ≥ 2 and l2_order ≥ 1".into()));
        }
        let nodes = self.nodes.generate()?;
        if nodes.dim() != body.dim() {
            return Err(Error::Config(format!("node dimension {} differs from body dimension {}", nodes.dim(), body.dim())));
        }
        if nodes.len() < 2 {
            return Err(Error::Config("sweeps need at least two nodes".into()));
        }
        // Kernel parameters other than the shape are checked once here.
        Kernel::spectral_only(&self.kernel.with_shape(self.grid[0]))?;
        Ok((body, nodes))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// The kernel failed an interpolator condition on the body.
    Interpolator,
    /// Factorization, residual or quadrature failure.
    Failed,
}

impl RowStatus {
    fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Interpolator => "interpolator",
            RowStatus::Failed => "failed",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "ok" => Some(RowStatus::Ok),
            "interpolator" => Some(RowStatus::Interpolator),
            "failed" => Some(RowStatus::Failed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub sup_error: f64,
    pub l2_error: f64,
    pub node_residual: f64,
    pub jitter: f64,
    pub condition: f64,
    pub ratio_r2: f64,
    pub status: RowStatus,
    /// Failure description; empty for good rows.
    pub note: String,
}

impl SweepRow {
    fn failed(alpha: f64, ratio_r2: f64, status: RowStatus, note: String) -> Self {
        SweepRow {
            alpha,
            sup_error: f64::NAN,
            l2_error: f64::NAN,
            node_residual: f64::NAN,
            jitter: f64::NAN,
            condition: f64::NAN,
            ratio_r2,
            status,
            note,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == RowStatus::Ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub version: String,
    /// Seconds since the Unix epoch; the only field that varies between identical runs.
    pub created: u64,
    pub rows: Vec<SweepRow>,
}

/// Per-axis bounds of the central window.
pub fn evaluation_window(nodes: &NodeSet, fraction: f64) -> Vec<(f64, f64)> {
    nodes
        .hull()
        .into_iter()
        .map(|(lo, hi)| {
            let (c, h) = (0.5 * (lo + hi), 0.5 * fraction * (hi - lo));
            (c - h, c + h)
        })
        .collect()
}

fn product<T: Clone>(axes: &[Vec<T>]) -> Vec<Vec<T>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect()
    })
}

/// Uniform grid with `n` points per axis, endpoints included.
pub fn uniform_grid(window: &[(f64, f64)], n: usize) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> =
        window.iter().map(|&(lo, hi)| (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()).collect();
    product(&axes)
}

/// Tensor Gauss–Legendre points and weights of order `n` per axis.
pub fn legendre_grid(window: &[(f64, f64)], n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let rule = GaussLegendre::new(n);
    let axes: Vec<Vec<(f64, f64)>> = window.iter().map(|&(lo, hi)| rule.mapped(lo, hi).collect()).collect();
    let cells = product(&axes);
    let points = cells.iter().map(|c| c.iter().map(|p| p.0).collect()).collect();
    let weights = cells.iter().map(|c| c.iter().map(|p| p.1).product()).collect();
    (points, weights)
}

/// Precomputed measurement points and reference values of a sweep.
struct Measurement {
    sup_points: Vec<Vec<f64>>,
    sup_values: Vec<f64>,
    l2_points: Vec<Vec<f64>>,
    l2_weights: Vec<f64>,
    l2_values: Vec<f64>,
}

impl Measurement {
    fn new(f: &BandlimitedFunction, window: &[(f64, f64)], sup_n: usize, l2_n: usize) -> Result<Self> {
        let sup_points = uniform_grid(window, sup_n);
        let (l2_points, l2_weights) = legendre_grid(window, l2_n);
        let values = |pts: &[Vec<f64>]| pts.par_iter().map(|p| f.eval(p)).collect::<Result<Vec<_>>>();
        Ok(Measurement { sup_values: values(&sup_points)?, l2_values: values(&l2_points)?, sup_points, l2_points, l2_weights })
    }

    /// `(sup error, L₂ error)` of an approximant on the window.
    fn errors(&self, eval: impl Fn(&[Vec<f64>]) -> Result<Vec<f64>>) -> Result<(f64, f64)> {
        let sup = eval(&self.sup_points)?.iter().zip(&self.sup_values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let l2 = eval(&self.l2_points)?
            .iter()
            .zip(&self.l2_values)
            .zip(&self.l2_weights)
            .map(|((a, b), w)| w * (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        Ok((sup, l2))
    }
}

fn one_line(e: &Error) -> String {
    e.to_string().replace([',', '\n', '\r'], ";")
}

fn sweep_row(
    config: &SweepConfig,
    body: &ConvexBody,
    nodes: &NodeSet,
    samples: &[f64],
    measure: &Measurement,
    alpha: f64,
) -> Result<SweepRow> {
    let spec = config.kernel.with_shape(alpha);
    let r_max = 1.01 * nodes.diameter();
    let ratio_r2 = regularity_row(&Kernel::spectral_only(&spec)?, body, config.function.beta)?.ratio_r2;
    let kernel = match Kernel::from_spec_with_range(&spec, r_max) {
        Ok(k) => k,
        Err(e) if e.is_numerical() => return Ok(SweepRow::failed(alpha, ratio_r2, RowStatus::Failed, one_line(&e))),
        Err(e) => return Err(e),
    };
    match check_interpolator(&kernel, body) {
        Ok(report) if report.pass() => {}
        Ok(_) => {
            return Ok(SweepRow::failed(alpha, ratio_r2, RowStatus::Interpolator, "interpolator conditions fail".into()))
        }
        Err(e) if e.is_numerical() => return Ok(SweepRow::failed(alpha, ratio_r2, RowStatus::Failed, one_line(&e))),
        Err(e) => return Err(e),
    }
    let outcome = Interpolant::fit(&kernel, nodes, samples).and_then(|interp| {
        let (sup, l2) = measure.errors(|pts| interp.evaluate_many(pts))?;
        Ok((interp, sup, l2))
    });
    match outcome {
        Ok((interp, sup_error, l2_error)) => Ok(SweepRow {
            alpha,
            sup_error,
            l2_error,
            node_residual: interp.residual(),
            jitter: interp.jitter(),
            condition: interp.condition(),
            ratio_r2,
            status: RowStatus::Ok,
            note: String::new(),
        }),
        Err(e) if e.is_numerical() => Ok(SweepRow::failed(alpha, ratio_r2, RowStatus::Failed, one_line(&e))),
        Err(e) => Err(e),
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Runs every grid value (in parallel); numerical failures become failed rows.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    let (body, nodes) = config.validate()?;
    let f = synthesize(&config.function, body.dim())?;
    let samples = f.sample(&nodes)?;
    let window = evaluation_window(&nodes, config.window);
    let measure = Measurement::new(&f, &window, config.sup_points(), config.l2_order())?;
    let rows = config
        .grid
        .par_iter()
        .map(|&alpha| sweep_row(config, &body, &nodes, &samples, &measure, alpha))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { config: config.clone(), version: env!("CARGO_PKG_VERSION").to_string(), created: now(), rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedRow {
    pub alpha: f64,
    pub sup_error: f64,
    pub l2_error: f64,
    /// Largest `|Ĩf(x) − f(x)|` over all nodes of all sets.
    pub union_mismatch: f64,
    /// Solver tolerance for the pooled samples.
    pub tolerance: f64,
}

/// Averaged approximant over the config's node spec re-seeded with each seed.
pub fn run_averaged(config: &SweepConfig, seeds: &[u64]) -> Result<Vec<AveragedRow>> {
    let (body, _) = config.validate()?;
    if seeds.is_empty() {
        return Err(Error::Config("averaging needs at least one seed".into()));
    }
    let sets = seeds.iter().map(|&s| config.nodes.with_seed(s).generate()).collect::<Result<Vec<_>>>()?;
    let union = sets.iter().skip(1).try_fold(sets[0].clone(), |acc, x| acc.union(x))?;
    let f = synthesize(&config.function, body.dim())?;
    let union_samples = f.sample(&union)?;
    // Measure on the window common to all sets.
    let windows: Vec<Vec<(f64, f64)>> = sets.iter().map(|x| evaluation_window(x, config.window)).collect();
    let window: Vec<(f64, f64)> = (0..body.dim())
        .map(|a| windows.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi), w| (lo.max(w[a].0), hi.min(w[a].1))))
        .collect();
    let measure = Measurement::new(&f, &window, config.sup_points(), config.l2_order())?;
    let r_max = 1.01 * union.diameter();
    config
        .grid
        .iter()
        .map(|&alpha| {
            let kernel = Kernel::from_spec_with_range(&config.kernel.with_shape(alpha), r_max)?;
            let approx = averaged(&kernel, &sets, &f)?;
            let (sup_error, l2_error) = measure.errors(|pts| approx.evaluate_many(pts))?;
            let at_nodes = approx.evaluate_many(union.points())?;
            let union_mismatch = at_nodes.iter().zip(&union_samples).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            Ok(AveragedRow { alpha, sup_error, l2_error, union_mismatch, tolerance: solver_tolerance(&union_samples) })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Least-squares slope of `ln(sup error)` against the shape parameter.
    pub slope: f64,
    pub intercept: f64,
    /// Shape values used in the fit.
    pub used: Vec<f64>,
    pub theoretical: RateExponent,
    /// `slope ≤ theoretical + 0.05`.
    pub pass: bool,
}

impl RateFit {
    /// Outside the proved parameter region the slope is reported but not judged.
    pub fn rate_exempt(&self) -> bool {
        !self.theoretical.feasible
    }
}

/// Error floor for one row: `max(1e−10, 100 · condition · unit roundoff)`.
pub fn row_floor(row: &SweepRow) -> f64 {
    let cond = if row.condition.is_finite() { row.condition } else { 0.0 };
    ERROR_FLOOR.max(100.0 * cond * f64::EPSILON)
}

pub fn fit_rate(report: &SweepReport) -> Result<RateFit> {
    let usable: Vec<&SweepRow> = report.rows.iter().filter(|r| r.is_ok() && r.sup_error > row_floor(r)).collect();
    if usable.len() < 3 {
        return Err(Error::TooFewRows { needed: 3, found: usable.len() });
    }
    let xs: Vec<f64> = usable.iter().map(|r| r.alpha).collect();
    let ys: Vec<f64> = usable.iter().map(|r| r.sup_error.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let c = &report.config;
    let body = ConvexBody::from_spec(&c.body)?;
    let theoretical = exponent_for(&c.kernel, body.inscribed_radius(), c.function.beta);
    Ok(RateFit { slope, intercept: my - slope * mx, used: xs, theoretical, pass: slope <= theoretical.value + SLOPE_TOLERANCE })
}

/// Pass/fail digest of a sweep, written next to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub name: Option<String>,
    pub rows: usize,
    pub failed_rows: usize,
    pub sup_error_decreasing: bool,
    pub ratio_r2_decreasing: bool,
    pub fit: Option<RateFit>,
    pub fit_error: Option<String>,
    pub rate_exempt: bool,
    pub pass: bool,
}

pub fn summarize(report: &SweepReport) -> SweepSummary {
    let ok: Vec<&SweepRow> = report.rows.iter().filter(|r| r.is_ok()).collect();
    let sup_error_decreasing = ok.len() == report.rows.len() && ok.windows(2).all(|w| w[1].sup_error < w[0].sup_error);
    let ratio_r2_decreasing = report.rows.windows(2).all(|w| w[1].ratio_r2 < w[0].ratio_r2);
    let (fit, fit_error) = match fit_rate(report) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let rate_exempt = fit.as_ref().map_or_else(
        || {
            ConvexBody::from_spec(&report.config.body)
                .map(|b| !exponent_for(&report.config.kernel, b.inscribed_radius(), report.config.function.beta).feasible)
                .unwrap_or(false)
        },
        RateFit::rate_exempt,
    );
    let rate_ok = rate_exempt || fit.as_ref().is_some_and(|f| f.pass);
    SweepSummary {
        name: report.config.name.clone(),
        rows: report.rows.len(),
        failed_rows: report.rows.len() - ok.len(),
        sup_error_decreasing,
        ratio_r2_decreasing,
        pass: rate_ok && ok.len() == report.rows.len(),
        fit,
        fit_error,
        rate_exempt,
    }
}

pub const COLUMNS: [&str; 9] =
    ["alpha", "sup_error", "l2_error", "node_residual", "jitter", "condition", "ratio_r2", "status", "note"];

/// CSV with `# key: value` metadata lines, then a header and one row per shape value.
pub fn write_report(report: &SweepReport, mut out: impl Write) -> Result<()> {
    writeln!(out, "# config: {}", report.config.to_json())?;
    writeln!(out, "# version: {}", report.version)?;
    writeln!(out, "# created: {}", report.created)?;
    writeln!(out, "{}", COLUMNS.join(","))?;
    for r in &report.rows {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            r.alpha,
            r.sup_error,
            r.l2_error,
            r.node_residual,
            r.jitter,
            r.condition,
            r.ratio_r2,
            r.status.as_str(),
            r.note
        )?;
    }
    Ok(())
}

pub fn read_report(input: impl BufRead) -> Result<SweepReport> {
    let mut meta = BTreeMap::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    let parse_err = |line: usize, column: &str, message: String| Error::Parse { line, column: column.to_string(), message };
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        if let Some(rest) = line.strip_prefix("# ") {
            let (key, value) = rest.split_once(": ").ok_or_else(|| parse_err(lineno, "", "malformed metadata".into()))?;
            meta.insert(key.to_string(), value.to_string());
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.splitn(COLUMNS.len().max(1), ',').collect();
        let Some(names) = &header else {
            let names: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
            for c in COLUMNS {
                if !names.iter().any(|n| n == c) {
                    return Err(parse_err(lineno, c, format!("missing column \"{c}\"")));
                }
            }
            header = Some(names);
            continue;
        };
        let fields: Vec<&str> = if names.last().map(String::as_str) == Some("note") {
            fields
        } else {
            line.split(',').collect()
        };
        if fields.len() != names.len() {
            return Err(parse_err(lineno, "", format!("expected {} fields, found {}", names.len(), fields.len())));
        }
        let get = |c: &str| fields[names.iter().position(|n| n == c).expect("checked in header")];
        let num = |c: &str| get(c).trim().parse::<f64>().map_err(|e| parse_err(lineno, c, e.to_string()));
        let status = RowStatus::parse(get("status").trim())
            .ok_or_else(|| parse_err(lineno, "status", format!("unknown status \"{}\"", get("status"))))?;
        rows.push(SweepRow {
            alpha: num("alpha")?,
            sup_error: num("sup_error")?,
            l2_error: num("l2_error")?,
            node_residual: num("node_residual")?,
            jitter: num("jitter")?,
            condition: num("condition")?,
            ratio_r2: num("ratio_r2")?,
            status,
            note: get("note").to_string(),
        });
    }
    if header.is_none() {
        return Err(parse_err(0, "", "no header line".into()));
    }
    let field = |key: &str| meta.get(key).ok_or_else(|| parse_err(0, key, format!("missing metadata \"{key}\"")));
    let config = SweepConfig::from_json(field("config")?)?;
    let created = field("created")?.parse().map_err(|e: std::num::ParseIntError| parse_err(0, "created", e.to_string()))?;
    Ok(SweepReport { config, version: field("version")?.clone(), created, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandlimited::Preset;
    use crate::geometry::BodyKind;
    use approx::assert_relative_eq;

    fn gauss_config(n: i64, grid: Vec<f64>) -> SweepConfig {
        SweepConfig {
            name: Some("gauss-1d".into()),
            body: BodySpec { kind: BodyKind::Ball, dim: 1, size: 0.95 },
            kernel: KernelSpec { family: crate::kernels::Family::Gaussian, alpha: None, c: None, nu: None, p: None, dim: 1 },
            function: FunctionSpec::new(Preset::RandomSmooth, 0.5, 3),
            nodes: NodeSpec::Kadec { h: 0.95, jmin: -n, jmax: n, l: 0.2, seed: 7 },
            grid,
            window: 0.5,
            sup_points: None,
            l2_order: None,
            limiting_case: false,
        }
    }

    fn synthetic(errors: &[(f64, f64)]) -> SweepReport {
        let rows = errors
            .iter()
            .map(|&(alpha, e)| SweepRow {
                alpha,
                sup_error: e,
                l2_error: e,
                node_residual: 0.0,
                jitter: 0.0,
                condition: 1.0,
                ratio_r2: (-alpha).exp(),
                status: RowStatus::Ok,
                note: String::new(),
            })
            .collect();
        SweepReport { config: gauss_config(8, vec![1.0]), version: "0".into(), created: 0, rows }
    }

    #[test]
    fn exact_exponential_slope() {
        let rep = synthetic(&[(1.0, (-0.5f64).exp()), (2.0, (-1.0f64).exp()), (4.0, (-2.0f64).exp()), (8.0, (-4.0f64).exp())]);
        let fit = fit_rate(&rep).unwrap();
        assert_relative_eq!(fit.slope, -0.5, epsilon = 1e-12);
        assert!(fit.pass);
    }

    #[test]
    fn floor_rows_are_excluded() {
        let rep = synthetic(&[(1.0, 1e-2), (2.0, 1e-4), (3.0, 1e-6), (4.0, 1e-12), (5.0, 1e-12)]);
        let fit = fit_rate(&rep).unwrap();
        assert_eq!(fit.used, vec![1.0, 2.0, 3.0]);
        let rep = synthetic(&[(1.0, 1e-2), (2.0, 1e-12), (3.0, 1e-12)]);
        assert!(matches!(fit_rate(&rep), Err(Error::TooFewRows { needed: 3, found: 1 })));
    }

    #[test]
    fn csv_round_trip() {
        let rep = synthetic(&[(1.0, 0.1), (2.5, 1.0 / 3.0), (4.0, 1e-300)]);
        let mut buf = Vec::new();
        write_report(&rep, &mut buf).unwrap();
        let back = read_report(buf.as_slice()).unwrap();
        assert_eq!(back, rep);

        let empty = synthetic(&[]);
        let mut buf = Vec::new();
        write_report(&empty, &mut buf).unwrap();
        assert_eq!(read_report(buf.as_slice()).unwrap(), empty);

        let text = String::from_utf8(buf).unwrap().replace(",ratio_r2", ",ratio");
        match read_report(text.as_bytes()) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, "ratio_r2"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn failed_rows_round_trip() {
        let mut rep = synthetic(&[(1.0, 0.1)]);
        rep.rows.push(SweepRow::failed(2.0, 0.5, RowStatus::Failed, "residual 1e-3 exceeds 1e-8; condition 1e17".into()));
        let mut buf = Vec::new();
        write_report(&rep, &mut buf).unwrap();
        let back = read_report(buf.as_slice()).unwrap();
        assert_eq!(back.rows[1].status, RowStatus::Failed);
        assert!(back.rows[1].sup_error.is_nan());
        assert_eq!(back.rows[1].note, rep.rows[1].note);
    }

    #[test]
    fn config_validation() {
        assert!(gauss_config(8, vec![1.0, 2.0]).validate().is_ok());
        assert!(gauss_config(8, vec![1.0, 1.0]).validate().is_err());
        let mut c = gauss_config(8, vec![1.0]);
        c.function.beta = 0.97;
        assert!(c.validate().is_err());
        let mut c = gauss_config(8, vec![1.0]);
        c.window = 1.0;
        assert!(c.validate().is_err());
        let json = gauss_config(8, vec![1.0]).to_json().replace("\"window\"", "\"windw\"");
        assert!(SweepConfig::from_json(&json).is_err());
    }

    #[test]
    fn zero_function_gives_zero_errors() {
        let mut c = gauss_config(16, vec![1.0, 2.0]);
        c.function.amplitude = 0.0;
        let rep = run_sweep(&c).unwrap();
        for r in &rep.rows {
            assert!(r.is_ok());
            assert_eq!(r.sup_error, 0.0);
            assert_eq!(r.l2_error, 0.0);
        }
    }

    #[test]
    fn sweep_is_deterministic_and_decreasing() {
        let c = gauss_config(64, vec![1.0, 2.0, 4.0, 8.0]);
        let a = run_sweep(&c).unwrap();
        let mut b = run_sweep(&c).unwrap();
        b.created = a.created;
        let (mut x, mut y) = (Vec::new(), Vec::new());
        write_report(&a, &mut x).unwrap();
        write_report(&b, &mut y).unwrap();
        assert_eq!(x, y);
        assert!(a.rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error), "{:#?}", a.rows);
        for r in &a.rows {
            assert!(r.node_residual <= 1e-8 * 2.0);
        }
        // Error stays below a fixed multiple of the regularity ratio.
        let gap: Vec<f64> = a.rows.iter().map(|r| r.sup_error.ln() - r.ratio_r2.ln()).collect();
        assert!(gap.iter().all(|g| *g <= gap[0] + 1.0), "{gap:?}");
    }

    #[test]
    fn wider_window_never_measures_less() {
        // Same spacing and alignment, so the inner grid is a subset of the outer one.
        let mut c = gauss_config(32, vec![2.0]);
        c.window = 0.25;
        c.sup_points = Some(1025);
        let inner = run_sweep(&c).unwrap().rows[0].sup_error;
        c.window = 0.75;
        c.sup_points = Some(3073);
        let outer = run_sweep(&c).unwrap().rows[0].sup_error;
        assert!(outer >= inner, "{outer} < {inner}");
    }
}

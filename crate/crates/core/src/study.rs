//! Convergence studies: run configuration, per-`N` sweeps, observed rates
//! and CSV/text reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ddg::assembly::{assemble, SolveReport};
use crate::ddg::flux::{FluxParams, Schedule};
use crate::error::{Error, Result};
use crate::mesh::ShishkinMesh;
use crate::norms::{energy_error, error_bundle, ErrorBundle, Region};
use crate::problem::{by_name, ProblemSpec, LAYER_PROBLEM};
use crate::projection::{composite_interpolant, gauss_lobatto_interpolate};

/// Errors below this are treated as exact; no rate is reported for them.
pub const RATE_FLOOR: f64 = 1e-11;

pub const CSV_HEADER: &str = "N,e_energy,superclose_energy,rate";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub problem: String,
    pub epsilon: f64,
    pub k: usize,
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    pub sigma: f64,
    pub theta: f64,
    pub beta1: f64,
    pub schedule: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::for_degree(1)
    }
}

impl RunConfig {
    /// Layer problem at `eps = 1e-8` with `theta = 2/3` and `sigma = k + 2`.
    /// Degree 1 uses `beta1 = 0` with the `k1-experiment` schedule, higher
    /// degrees `beta1 = 1/(2k^2 + 2k)` with the full-order schedule.
    pub fn for_degree(k: usize) -> Self {
        let (beta1, schedule) = if k <= 1 {
            (0.0, Schedule::K1Experiment)
        } else {
            (FluxParams::default_beta1(k), Schedule::FullOrder)
        };
        Self {
            problem: LAYER_PROBLEM.to_string(),
            epsilon: 1e-8,
            k,
            n_list: vec![8, 16, 32, 64, 128, 256],
            sigma: (k + 2) as f64,
            theta: 2.0 / 3.0,
            beta1,
            schedule: schedule.to_string(),
            seed: 0,
            output: None,
        }
    }

    pub fn schedule(&self) -> Result<Schedule> {
        self.schedule.parse()
    }

    pub fn flux_params(&self) -> Result<FluxParams> {
        FluxParams::new(self.theta, self.beta1, self.schedule()?)
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        by_name(&self.problem, self.epsilon)
    }

    /// Checks every field; warns when a full-order run uses `sigma < k + 2`.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1], got {}", self.epsilon)));
        }
        if !(self.sigma >= (self.k + 1) as f64) {
            return Err(Error::InvalidParameter(format!("sigma must be at least k + 1 = {}, got {}", self.k + 1, self.sigma)));
        }
        let params = self.flux_params()?;
        if params.schedule == Schedule::FullOrder && self.sigma < (self.k + 2) as f64 {
            warn!("sigma = {} is below k + 2 = {} for the full-order schedule", self.sigma, self.k + 2);
        }
        for &n in &self.n_list {
            if n < 4 || n % 2 != 0 {
                return Err(Error::InvalidParameter(format!("every N must be even and at least 4, got {n}")));
            }
        }
        self.problem_spec()?;
        Ok(())
    }

    /// Sorted `N_list` without duplicates.
    pub fn sorted_n(&self) -> Vec<usize> {
        let mut ns = self.n_list.clone();
        ns.sort_unstable();
        let before = ns.len();
        ns.dedup();
        if ns.len() != before {
            warn!("dropped {} duplicate entries from N_list", before - ns.len());
        }
        ns
    }
}

/// A partially specified [`RunConfig`], as read from a configuration file
/// or the command line. Unset fields fall back to
/// [`RunConfig::for_degree`] of the chosen `k`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub problem: Option<String>,
    pub epsilon: Option<f64>,
    pub k: Option<usize>,
    #[serde(rename = "N_list")]
    pub n_list: Option<Vec<usize>>,
    pub sigma: Option<f64>,
    pub theta: Option<f64>,
    pub beta1: Option<f64>,
    pub schedule: Option<String>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
}

impl ConfigOverrides {
    /// Fields set in `other` win.
    pub fn overlay(self, other: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            problem: other.problem.or(self.problem),
            epsilon: other.epsilon.or(self.epsilon),
            k: other.k.or(self.k),
            n_list: other.n_list.or(self.n_list),
            sigma: other.sigma.or(self.sigma),
            theta: other.theta.or(self.theta),
            beta1: other.beta1.or(self.beta1),
            schedule: other.schedule.or(self.schedule),
            seed: other.seed.or(self.seed),
            output: other.output.or(self.output),
        }
    }

    pub fn resolve(self) -> RunConfig {
        let base = RunConfig::for_degree(self.k.unwrap_or(1));
        RunConfig {
            problem: self.problem.unwrap_or(base.problem),
            epsilon: self.epsilon.unwrap_or(base.epsilon),
            k: base.k,
            n_list: self.n_list.unwrap_or(base.n_list),
            sigma: self.sigma.unwrap_or(base.sigma),
            theta: self.theta.unwrap_or(base.theta),
            beta1: self.beta1.unwrap_or(base.beta1),
            schedule: self.schedule.unwrap_or(base.schedule),
            seed: self.seed.unwrap_or(base.seed),
            output: self.output.or(base.output),
        }
    }
}

/// One line of a convergence table. Error fields are `None` for failed rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub e_energy: Option<f64>,
    pub superclose_energy: Option<f64>,
    pub rate: Option<f64>,
    /// Why the row failed, if it did.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub config: RunConfig,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(|r| r.failure.is_some())
    }
}

/// Everything measured for one mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleRun {
    pub n: usize,
    /// `||G_k w - w_h||_E`.
    pub e_energy: f64,
    /// `||pi w - w_h||_E` with the composite interpolant.
    pub superclose_energy: f64,
    /// Errors of `w_h` against the exact solution.
    pub bundle: ErrorBundle,
    pub solve: SolveReport,
}

/// Builds the mesh for `n`, solves and measures.
pub fn run_single(config: &RunConfig, spec: &ProblemSpec, n: usize) -> Result<SingleRun> {
    let params = config.flux_params()?;
    let k = config.k;
    let exact = spec
        .exact
        .as_ref()
        .ok_or(Error::MissingDerivative("error measurement"))?;
    let mesh = ShishkinMesh::new(n, config.epsilon, config.sigma, spec.alpha)?;
    let system = assemble(spec, &mesh, k, &params)?;
    let (uh, solve) = system.solve_with_report(&mesh)?;
    let lobatto = gauss_lobatto_interpolate(exact, &mesh, k)?;
    let pi = composite_interpolant(exact, &mesh, k, config.theta)?;
    Ok(SingleRun {
        n,
        e_energy: energy_error(&lobatto, &uh, &mesh, k, spec, &params)?,
        superclose_energy: energy_error(&pi, &uh, &mesh, k, spec, &params)?,
        bundle: error_bundle(&uh, exact, &mesh, k, spec, &params, Region::All)?,
        solve,
    })
}

/// Solves for every `N` in the configuration (concurrently) and attaches
/// rates. Configuration errors abort; a failing row is recorded and the
/// sweep continues.
pub fn run_convergence_study(config: &RunConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let spec = config.problem_spec()?;
    let ns = config.sorted_n();
    let results: Vec<Result<SingleRun>> = ns.par_iter().map(|&n| run_single(config, &spec, n)).collect();
    let mut rows: Vec<ConvergenceRow> = ns
        .iter()
        .zip(results)
        .map(|(&n, r)| match r {
            Ok(run) => ConvergenceRow {
                n,
                e_energy: Some(run.e_energy),
                superclose_energy: Some(run.superclose_energy),
                rate: None,
                failure: None,
            },
            Err(e) => {
                warn!("row N = {n} failed: {e}");
                ConvergenceRow { n, e_energy: None, superclose_energy: None, rate: None, failure: Some(e.to_string()) }
            }
        })
        .collect();
    for i in 0..rows.len().saturating_sub(1) {
        let (a, b) = (&rows[i], &rows[i + 1]);
        rows[i].rate = match (a.e_energy, b.e_energy) {
            (Some(e1), Some(e2)) => rate_between(e1, a.n, e2, b.n),
            _ => None,
        };
    }
    Ok(ConvergenceReport { config: config.clone(), rows })
}

/// `(ln e_N - ln e_2N) / ln(2 ln N / ln 2N)`.
pub fn compute_rate(e_n: f64, e_2n: f64, n: usize) -> Option<f64> {
    if !(e_n > 0.0 && e_2n > 0.0) || n < 2 {
        return None;
    }
    let n = n as f64;
    Some((e_n.ln() - e_2n.ln()) / (2.0 * n.ln() / (2.0 * n).ln()).ln())
}

/// Observed order with respect to `h = ln N / N` between two meshes; equal to
/// [`compute_rate`] when `n2 = 2 n1`. `None` when either error is below
/// [`RATE_FLOOR`].
pub fn rate_between(e1: f64, n1: usize, e2: f64, n2: usize) -> Option<f64> {
    if !(e1 >= RATE_FLOOR && e2 >= RATE_FLOOR) || n1 < 2 || n2 < 2 || n1 == n2 {
        return None;
    }
    if n2 == 2 * n1 {
        return compute_rate(e1, e2, n1);
    }
    let h = |n: usize| (n as f64).ln() / n as f64;
    Some((e1 / e2).ln() / (h(n1) / h(n2)).ln())
}

/// Least-squares slope of `ln e` against `ln(ln N / N)`.
pub fn loglog_slope(points: &[(usize, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(_, e)| !(e > 0.0)) {
        return None;
    }
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, e)| (((n as f64).ln() / n as f64).ln(), e.ln()))
        .collect();
    let m = xy.len() as f64;
    let (sx, sy) = xy.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = xy
        .iter()
        .fold((0.0, 0.0), |(n, d), (x, y)| (n + (x - mx) * (y - my), d + (x - mx) * (x - mx)));
    Some(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Csv,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "text" => Ok(Self::Text),
            _ => Err(Error::Unknown { kind: "format", name: s.to_string() }),
        }
    }
}

fn metadata(config: &RunConfig) -> Vec<(&'static str, String)> {
    vec![
        ("problem", config.problem.clone()),
        ("epsilon", format!("{:e}", config.epsilon)),
        ("k", config.k.to_string()),
        ("sigma", config.sigma.to_string()),
        ("theta", config.theta.to_string()),
        ("beta1", config.beta1.to_string()),
        ("schedule", config.schedule.clone()),
        ("seed", config.seed.to_string()),
        ("version", env!("CARGO_PKG_VERSION").to_string()),
    ]
}

fn csv_field(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

fn text_field(v: Option<f64>, precision: usize) -> String {
    v.map(|x| format!("{x:.precision$e}")).unwrap_or_else(|| "-".into())
}

/// Serializes a report. CSV fields carry 17 significant digits; the text
/// table shows three.
pub fn emit_report(report: &ConvergenceReport, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            for (key, value) in metadata(&report.config) {
                let _ = writeln!(out, "# {key} = {value}");
            }
            for row in &report.rows {
                if let Some(f) = &row.failure {
                    let _ = writeln!(out, "# failed N = {}: {}", row.n, f);
                }
            }
            let _ = writeln!(out, "{CSV_HEADER}");
            for row in &report.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    row.n,
                    csv_field(row.e_energy),
                    csv_field(row.superclose_energy),
                    csv_field(row.rate)
                );
            }
        }
        ReportFormat::Text => {
            let meta: Vec<String> = metadata(&report.config).into_iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "{}", meta.join(" "));
            let _ = writeln!(out, "{:>6} {:>10} {:>7} {:>12}", "N", "e^N", "p_N", "superclose");
            for row in &report.rows {
                let rate = row.rate.map(|r| format!("{r:.2}")).unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    out,
                    "{:>6} {:>10} {:>7} {:>12}{}",
                    row.n,
                    text_field(row.e_energy, 2),
                    rate,
                    text_field(row.superclose_energy, 2),
                    if row.failure.is_some() { "  failed" } else { "" }
                );
            }
        }
    }
    out
}

pub fn write_report(report: &ConvergenceReport, format: ReportFormat, path: &Path) -> Result<()> {
    std::fs::write(path, emit_report(report, format))
        .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Reads the rows back from [`emit_report`]'s CSV output; comment lines are
/// skipped and failure notes are not recovered.
pub fn parse_csv(text: &str) -> Result<Vec<ConvergenceRow>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(Error::Format(format!("expected header `{CSV_HEADER}`, found {other:?}"))),
    }
    let field = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| Error::Format(format!("bad number `{s}`")))
        }
    };
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(Error::Format(format!("expected 4 columns in `{line}`")));
            }
            Ok(ConvergenceRow {
                n: cols[0].parse().map_err(|_| Error::Format(format!("bad N `{}`", cols[0])))?,
                e_energy: field(cols[1])?,
                superclose_energy: field(cols[2])?,
                rate: field(cols[3])?,
                failure: None,
            })
        })
        .collect()
}

//! Picard iteration `xₙ₊₁ = f(xₙ)` with residuals measured by the
//! quasi-metric `h_ε`, plus convergence certificates and uniqueness probes.

use serde::{Deserialize, Serialize};

use crate::contraction::{apply_map, ContractionReport, MapSpec, NcMode};
use crate::error::{Error, Result};
use crate::quasimetric::QuasiMetricFamily;
use crate::space::Point;

/// The `h_ε` search must resolve residuals well below the stopping tolerance.
const RESOLUTION_FACTOR: f64 = 0.01;
const MIN_CERTIFIED_RESIDUALS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Level of the quasi-metric used for residuals.
    pub epsilon: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Scale at which `(G, B, Y)` of consecutive iterates is logged.
    pub lambda_report: f64,
    /// Run even when the contraction check failed.
    #[serde(default)]
    pub acknowledge_non_nc: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { epsilon: 0.5, tol: 1e-8, max_iters: 200, lambda_report: 1.0, acknowledge_non_nc: false }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Domain(format!("epsilon = {} must lie in (0, 1)", self.epsilon)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!("tol = {} must be positive", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Domain("max_iters must be at least 1".into()));
        }
        if !(self.lambda_report > 0.0 && self.lambda_report.is_finite()) {
            return Err(Error::Domain(format!("lambda_report = {} must be positive", self.lambda_report)));
        }
        Ok(())
    }
}

/// One step `xₙ ↦ xₙ₊₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub iter: usize,
    pub h_residual: f64,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "Y")]
    pub y: f64,
}

/// Contraction constants carried into a solver result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NcConstants {
    pub k_g: f64,
    pub k_b: f64,
    pub k_y: f64,
    pub k_overall: f64,
    pub mode: NcMode,
    pub is_nc: bool,
    pub acknowledged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult {
    pub start: Point,
    pub point: Point,
    pub iterations: usize,
    pub converged: bool,
    pub epsilon: f64,
    pub tol: f64,
    pub residual_trace: Vec<ResidualRow>,
    /// Geometric ratio of residuals, fitted over the last half of the
    /// positive residuals; absent with fewer than two.
    pub rate_estimate: Option<f64>,
    pub final_residual: f64,
    /// `h_ε(x*, f(x*))` for the returned point.
    pub fixed_point_residual: f64,
    pub contraction: Option<NcConstants>,
}

/// Least-squares slope of `ln r` against the iteration index, as a ratio.
fn geometric_ratio(rows: &[ResidualRow]) -> Option<f64> {
    let positive: Vec<&ResidualRow> = rows.iter().filter(|r| r.h_residual > 0.0).collect();
    let tail = &positive[positive.len() / 2..];
    if tail.len() < 2 {
        return None;
    }
    let n = tail.len() as f64;
    let mx = tail.iter().map(|r| r.iter as f64).sum::<f64>() / n;
    let my = tail.iter().map(|r| r.h_residual.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for r in tail {
        let dx = r.iter as f64 - mx;
        sxy += dx * (r.h_residual.ln() - my);
        sxx += dx * dx;
    }
    Some((sxy / sxx).exp())
}

fn step(family: &QuasiMetricFamily, map: &MapSpec, x: &Point, iter: usize) -> Result<Point> {
    match apply_map(family.space(), map, x) {
        Err(Error::Divergence { .. }) => Err(Error::Divergence { iteration: iter }),
        other => other,
    }
}

/// Iterates `f` from `x0` until `h_ε(xₙ, xₙ₊₁) < tol` or `max_iters` steps.
/// The returned point is the last iterate `xₙ₊₁`.
pub fn picard(family: &QuasiMetricFamily, map: &MapSpec, x0: &Point, cfg: &SolverConfig) -> Result<FixedPointResult> {
    cfg.validate()?;
    if family.tol() > cfg.tol * RESOLUTION_FACTOR {
        return Err(Error::Precondition(format!(
            "h_eps resolution {} is too coarse for solver tol {}; use at most {}",
            family.tol(),
            cfg.tol,
            cfg.tol * RESOLUTION_FACTOR
        )));
    }
    let space = family.space();
    map.validate(space)?;
    space.check_point(x0)?;
    let metric = family.metric();

    let mut x = x0.clone();
    let mut trace = Vec::new();
    let mut converged = false;
    for iter in 1..=cfg.max_iters {
        let fx = step(family, map, &x, iter)?;
        let h = family.h_eps(&x, &fx, cfg.epsilon)?;
        let t = metric.eval_triple(&x, &fx, cfg.lambda_report)?;
        trace.push(ResidualRow { iter, h_residual: h, g: t.g, b: t.b, y: t.y });
        x = fx;
        if h < cfg.tol {
            converged = true;
            break;
        }
    }

    let fx = step(family, map, &x, trace.len() + 1)?;
    let fixed_point_residual = family.h_eps(&x, &fx, cfg.epsilon)?;
    Ok(FixedPointResult {
        start: x0.clone(),
        point: x,
        iterations: trace.len(),
        converged: converged && fixed_point_residual < cfg.tol,
        epsilon: cfg.epsilon,
        tol: cfg.tol,
        rate_estimate: geometric_ratio(&trace),
        final_residual: trace.last().map_or(0.0, |r| r.h_residual),
        residual_trace: trace,
        fixed_point_residual,
        contraction: None,
    })
}

/// [`picard`] behind the contraction check: refuses maps that fail it in
/// `mode` unless the config acknowledges that, and records the constants.
pub fn picard_checked(
    family: &QuasiMetricFamily,
    map: &MapSpec,
    x0: &Point,
    cfg: &SolverConfig,
    report: &ContractionReport,
    mode: NcMode,
) -> Result<FixedPointResult> {
    let is_nc = report.is_nc_in(mode);
    if !is_nc && !cfg.acknowledge_non_nc {
        return Err(Error::NotContraction(format!(
            "constant {} in {:?} mode; set acknowledge_non_nc to run anyway",
            report.constant(mode),
            mode
        )));
    }
    let mut result = picard(family, map, x0, cfg)?;
    result.contraction = Some(NcConstants {
        k_g: report.k_g,
        k_b: report.k_b,
        k_y: report.k_y,
        k_overall: report.k_overall,
        mode,
        is_nc,
        acknowledged: !is_nc,
    });
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessVerdict {
    Unique,
    NonUnique,
    /// Some run did not converge.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRun {
    pub start: Point,
    pub point: Point,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub runs: Vec<ProbeRun>,
    /// Largest `h_ε` between two limits, taken in both directions.
    pub max_pairwise_h: f64,
    pub threshold: f64,
    pub verdict: UniquenessVerdict,
    pub passed: bool,
}

/// Runs [`picard`] from every start; passes iff all runs converge and all
/// pairwise `h_ε` between the limits stay below `10·tol`.
pub fn uniqueness_probe(
    family: &QuasiMetricFamily,
    map: &MapSpec,
    starts: &[Point],
    cfg: &SolverConfig,
) -> Result<UniquenessReport> {
    if starts.len() < 2 {
        return Err(Error::Precondition(format!("need at least 2 starts, got {}", starts.len())));
    }
    let results = starts.iter().map(|s| picard(family, map, s, cfg)).collect::<Result<Vec<_>>>()?;
    let threshold = 10.0 * cfg.tol;
    let mut max_h: f64 = 0.0;
    for (i, p) in results.iter().enumerate() {
        for q in &results[i + 1..] {
            max_h = max_h.max(family.h_eps(&p.point, &q.point, cfg.epsilon)?);
            max_h = max_h.max(family.h_eps(&q.point, &p.point, cfg.epsilon)?);
        }
    }
    let verdict = if results.iter().any(|r| !r.converged) {
        UniquenessVerdict::Inconclusive
    } else if max_h < threshold {
        UniquenessVerdict::Unique
    } else {
        UniquenessVerdict::NonUnique
    };
    Ok(UniquenessReport {
        runs: results
            .into_iter()
            .map(|r| ProbeRun { start: r.start, point: r.point, iterations: r.iterations, converged: r.converged })
            .collect(),
        max_pairwise_h: max_h,
        threshold,
        verdict,
        passed: verdict == UniquenessVerdict::Unique,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerInvariance {
    pub n: usize,
    pub h: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCertificate {
    pub k_expected: f64,
    pub tol: f64,
    /// `None` when a residual hit exactly 0 and the fit was skipped.
    pub fitted_ratio: Option<f64>,
    pub ratio_passed: bool,
    pub invariance: Vec<PowerInvariance>,
    pub passed: bool,
}

/// Checks the fitted residual ratio against `k_expected` (within `tol`) and
/// that `fⁿ` for `n ∈ {2, 3}` moves the found point by less than the
/// solver tolerance.
pub fn convergence_certificate(
    family: &QuasiMetricFamily,
    map: &MapSpec,
    result: &FixedPointResult,
    k_expected: f64,
    tol: f64,
) -> Result<ConvergenceCertificate> {
    if !(k_expected > 0.0 && k_expected < 1.0) {
        return Err(Error::Precondition(format!("k_expected = {k_expected} must lie in (0, 1)")));
    }
    if !result.converged {
        return Err(Error::Precondition("certificate needs a converged run".into()));
    }
    let hit_zero = result.residual_trace.iter().any(|r| r.h_residual == 0.0);
    let got = result.residual_trace.len();
    if got < MIN_CERTIFIED_RESIDUALS && !hit_zero {
        return Err(Error::InsufficientData { needed: MIN_CERTIFIED_RESIDUALS, got });
    }

    let fitted_ratio = if hit_zero { None } else { geometric_ratio(&result.residual_trace) };
    let ratio_passed = match fitted_ratio {
        Some(r) => (r - k_expected).abs() <= tol,
        None => hit_zero,
    };
    let mut invariance = Vec::new();
    for n in [2, 3] {
        let moved = apply_map(family.space(), &map.clone().with_power(map.power * n), &result.point)?;
        let h = family.h_eps(&result.point, &moved, result.epsilon)?;
        invariance.push(PowerInvariance { n, h, passed: h < result.tol });
    }
    let passed = ratio_passed && invariance.iter().all(|p| p.passed);
    Ok(ConvergenceCertificate { k_expected, tol, fitted_ratio, ratio_passed, invariance, passed })
}

//! Command-line front end: one JSON experiment config, five analyses, one
//! report per run.
//!
//! Exit status: 0 when every check in scope passed, 1 when a check failed,
//! 2 for usage or config errors (no reports written), 3 for runtime errors
//! (the partial report is still written).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::contraction::{
    check_ball_invariance, check_power_contraction, estimate_k, BallInvarianceConfig, MapSpec, NcMode,
};
use crate::error::{Error, Result};
use crate::nms::{verify_axioms, AxiomCheckConfig, MetricTable, NeutroMetric};
use crate::norms::{check_norm_axioms, BinaryOperation, TriangularConorm, TriangularNorm};
use crate::quasimetric::{
    check_ball_open, check_quasi_family, check_topology_equivalence, OpenBall, QuasiMetricFamily, EPSILON_LEVELS,
};
use crate::solver::{convergence_certificate, picard_checked, uniqueness_probe, SolverConfig};
use crate::space::{GroundSpace, Point};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "neutrofix", version, about = "Neutrosophic metric checks and fixed-point solving")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Axiom checks for the built-in t-norms and t-conorms.
    NormsCheck(RunArgs),
    /// The eighteen metric axioms for the configured construction.
    VerifyAxioms(RunArgs),
    /// h_eps table plus quasi-metric and topology checks.
    QuasiMetric(RunArgs),
    /// Contraction constants, power and ball-invariance checks.
    CheckContraction(RunArgs),
    /// Picard iteration with uniqueness probe and certificate.
    Solve(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::NormsCheck(_) => "norms-check",
            Command::VerifyAxioms(_) => "verify-axioms",
            Command::QuasiMetric(_) => "quasi-metric",
            Command::CheckContraction(_) => "check-contraction",
            Command::Solve(_) => "solve",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::NormsCheck(a)
            | Command::VerifyAxioms(a)
            | Command::QuasiMetric(a)
            | Command::CheckContraction(a)
            | Command::Solve(a) => a,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the command's main sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Overrides the command's main tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Trace format.
    #[arg(long, value_enum)]
    pub format: Option<TraceFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TraceFormat {
    Json,
    #[default]
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceConfig {
    Euclidean {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Discrete {
        cardinality: usize,
    },
    /// Inline `matrix` or a headerless `matrix_csv`.
    FiniteTable {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix_csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormsConfig {
    pub tnorm: TriangularNorm,
    pub tconorm: TriangularConorm,
    pub samples: usize,
    pub tol: f64,
}

impl Default for NormsConfig {
    fn default() -> Self {
        NormsConfig {
            tnorm: TriangularNorm::default(),
            tconorm: TriangularConorm::default(),
            samples: 10_000,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricConfig {
    #[default]
    Induced,
    /// Explicit `(G, B, Y)` table, CSV columns `a_index, b_index, lambda, G, B, Y`.
    Table { csv: PathBuf },
}

fn default_grid() -> Vec<f64> {
    vec![0.01, 0.1, 1.0, 10.0, 100.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingConfig {
    pub samples: usize,
    pub lambda_grid: Vec<f64>,
    pub large_lambda: f64,
    pub tol: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        let d = AxiomCheckConfig::default();
        SamplingConfig { samples: d.sample_count, lambda_grid: d.lambda_grid, large_lambda: d.large_lambda, tol: d.tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenBallConfig {
    pub center: Point,
    pub epsilon: f64,
    pub lambda: f64,
    #[serde(default = "default_ball_probes")]
    pub probes: usize,
}

fn default_ball_probes() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuasiConfig {
    pub epsilons: Vec<f64>,
    /// Pairs in the `h_ε` table.
    pub pairs: usize,
    pub triples: usize,
    pub topology_samples: usize,
    pub lambda_max: f64,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ball: Option<OpenBallConfig>,
}

impl Default for QuasiConfig {
    fn default() -> Self {
        QuasiConfig {
            epsilons: EPSILON_LEVELS.to_vec(),
            pairs: 200,
            triples: 500,
            topology_samples: 500,
            lambda_max: 1e6,
            tol: 1e-6,
            ball: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvarianceConfig {
    pub center: Point,
    pub epsilon: f64,
    /// Defaults to the measured constant in the configured mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_invariance_probes")]
    pub probes: usize,
}

fn default_n_max() -> usize {
    3
}

fn default_invariance_probes() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContractionConfig {
    pub samples: usize,
    pub lambda_grid: Vec<f64>,
    pub mode: NcMode,
    pub power_n_max: usize,
    pub power_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ball: Option<InvarianceConfig>,
}

impl Default for ContractionConfig {
    fn default() -> Self {
        ContractionConfig {
            samples: 1000,
            lambda_grid: default_grid(),
            mode: NcMode::Full,
            power_n_max: 5,
            power_tol: 1e-3,
            ball: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniquenessConfig {
    pub starts: usize,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateConfig {
    pub k_expected: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub x0: Point,
    #[serde(default = "default_solver_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_solver_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_lambda_report")]
    pub lambda_report: f64,
    #[serde(default)]
    pub acknowledge_non_nc: bool,
    #[serde(default)]
    pub nc_mode: NcMode,
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
    /// Resolution of the `h_ε` search; defaults to `tol / 100`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniqueness: Option<UniquenessConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateConfig>,
}

fn default_solver_epsilon() -> f64 {
    SolverConfig::default().epsilon
}

fn default_solver_tol() -> f64 {
    SolverConfig::default().tol
}

fn default_max_iters() -> usize {
    SolverConfig::default().max_iters
}

fn default_lambda_report() -> f64 {
    SolverConfig::default().lambda_report
}

fn default_lambda_max() -> f64 {
    1e6
}

impl SolverSection {
    fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            epsilon: self.epsilon,
            tol: self.tol,
            max_iters: self.max_iters,
            lambda_report: self.lambda_report,
            acknowledge_non_nc: self.acknowledge_non_nc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub trace_format: TraceFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out"), trace_format: TraceFormat::Csv }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub space: SpaceConfig,
    #[serde(default)]
    pub norms: NormsConfig,
    #[serde(default)]
    pub metric: MetricConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub quasi: QuasiConfig,
    #[serde(default)]
    pub contraction: ContractionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    /// Parses a config document; errors carry serde's line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn apply_overrides(&mut self, command: &Command) {
        let args = command.args();
        if let Some(seed) = args.seed {
            self.seed = seed;
        }
        if let Some(dir) = &args.output {
            self.output.dir = dir.clone();
        }
        if let Some(format) = args.format {
            self.output.trace_format = format;
        }
        if let Some(n) = args.samples {
            match command {
                Command::NormsCheck(_) => self.norms.samples = n,
                Command::VerifyAxioms(_) => self.sampling.samples = n,
                Command::QuasiMetric(_) => self.quasi.pairs = n,
                Command::CheckContraction(_) | Command::Solve(_) => self.contraction.samples = n,
            }
        }
        if let Some(tol) = args.tol {
            match command {
                Command::NormsCheck(_) => self.norms.tol = tol,
                Command::VerifyAxioms(_) => self.sampling.tol = tol,
                Command::QuasiMetric(_) => self.quasi.tol = tol,
                Command::CheckContraction(_) => self.contraction.power_tol = tol,
                Command::Solve(_) => {
                    if let Some(s) = self.solver.as_mut() {
                        s.tol = tol;
                    }
                }
            }
        }
    }

    /// Builds the ground space, reading CSV paths relative to `base`.
    pub fn build_space(&self, base: &Path) -> Result<GroundSpace> {
        match &self.space {
            SpaceConfig::Euclidean { lower, upper } => GroundSpace::euclidean(lower.clone(), upper.clone()),
            SpaceConfig::Discrete { cardinality } => GroundSpace::discrete(*cardinality),
            SpaceConfig::FiniteTable { matrix: Some(m), matrix_csv: None } => GroundSpace::finite_table(m.clone()),
            SpaceConfig::FiniteTable { matrix: None, matrix_csv: Some(p) } => {
                GroundSpace::finite_table_from_csv(resolve(base, p)?)
            }
            SpaceConfig::FiniteTable { .. } => {
                Err(Error::Config("space.finite_table needs exactly one of `matrix` or `matrix_csv`".into()))
            }
        }
    }

    pub fn build_metric(&self, base: &Path) -> Result<NeutroMetric> {
        let space = self.build_space(base)?;
        let (t, s) = (self.norms.tnorm, self.norms.tconorm);
        match &self.metric {
            MetricConfig::Induced => NeutroMetric::induced_from_crisp(space, t, s),
            MetricConfig::Table { csv } => {
                let n = space.cardinality().ok_or_else(|| Error::Config("metric.table needs a finite space".into()))?;
                let table = MetricTable::from_csv(n, resolve(base, csv)?)?;
                NeutroMetric::from_table(space, t, s, table)
            }
        }
    }

    fn require_map(&self) -> Result<&MapSpec> {
        self.map.as_ref().ok_or_else(|| Error::Config("this command needs a `map` section".into()))
    }

    fn require_solver(&self) -> Result<&SolverSection> {
        self.solver.as_ref().ok_or_else(|| Error::Config("solve needs a `solver` section".into()))
    }
}

fn resolve(base: &Path, path: &Path) -> Result<PathBuf> {
    let full = if path.is_absolute() { path.to_path_buf() } else { base.join(path) };
    if !full.is_file() {
        return Err(Error::Config(format!("referenced file {} does not exist", full.display())));
    }
    Ok(full)
}

/// Report body and terminal summary lines of one command.
struct Run {
    report: Map<String, Value>,
    summary: Vec<String>,
}

impl Run {
    fn put<T: Serialize>(&mut self, key: &str, value: &T) -> Result<()> {
        self.report.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }
}

/// Entry point used by the binary; returns the process exit status.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    run(&cli.command)
}

pub fn run(command: &Command) -> i32 {
    let args = command.args();
    let mut cfg = match ExperimentConfig::load(&args.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    cfg.apply_overrides(command);
    let base = args.config.parent().map(Path::to_path_buf).unwrap_or_default();

    let metric = match prepare(command, &cfg, &base) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };

    let mut run = Run { report: Map::new(), summary: Vec::new() };
    run.report.insert("command".into(), Value::from(command.name()));
    run.report.insert("config".into(), serde_json::to_value(&cfg).expect("config serializes"));

    let outcome = match command {
        Command::NormsCheck(_) => norms_check(&cfg, &mut run),
        Command::VerifyAxioms(_) => axioms(&cfg, metric.as_ref().unwrap(), &mut run),
        Command::QuasiMetric(_) => quasi(&cfg, metric.as_ref().unwrap(), &mut run),
        Command::CheckContraction(_) => contraction(&cfg, metric.as_ref().unwrap(), &mut run),
        Command::Solve(_) => solve(&cfg, metric.as_ref().unwrap(), &mut run),
    };
    let (status, code) = match &outcome {
        Ok(true) => ("pass", EXIT_PASS),
        Ok(false) => ("fail", EXIT_CHECK_FAILED),
        Err(Error::NotContraction(_)) => ("fail", EXIT_CHECK_FAILED),
        Err(_) => ("runtime_error", EXIT_RUNTIME),
    };
    run.report.insert("status".into(), Value::from(status));
    if let Err(e) = &outcome {
        run.report.insert("error".into(), Value::from(e.to_string()));
    }

    let dir = &cfg.output.dir;
    let path = dir.join(format!("{}.report.json", command.name()));
    let written = fs::create_dir_all(dir).map_err(Error::from).and_then(|_| {
        let mut text = serde_json::to_string_pretty(&Value::Object(run.report))?;
        text.push('\n');
        fs::write(&path, text).map_err(Error::from)
    });
    for line in &run.summary {
        println!("{line}");
    }
    if let Err(e) = &outcome {
        eprintln!("error: {e}");
    }
    if let Err(e) = written {
        eprintln!("error: cannot write {}: {e}", path.display());
        return EXIT_RUNTIME;
    }
    println!("{}: {status} ({})", command.name(), path.display());
    code
}

/// Config-level validation; failures here exit with status 2 and no report.
fn prepare(command: &Command, cfg: &ExperimentConfig, base: &Path) -> Result<Option<NeutroMetric>> {
    match command {
        Command::NormsCheck(_) => Ok(None),
        Command::VerifyAxioms(_) | Command::QuasiMetric(_) => cfg.build_metric(base).map(Some),
        Command::CheckContraction(_) => {
            let m = cfg.build_metric(base)?;
            cfg.require_map()?.validate(m.space()).map_err(|e| Error::Config(format!("map: {e}")))?;
            Ok(Some(m))
        }
        Command::Solve(_) => {
            let s = cfg.require_solver()?;
            let m = cfg.build_metric(base)?;
            cfg.require_map()?.validate(m.space()).map_err(|e| Error::Config(format!("map: {e}")))?;
            s.solver_config().validate().map_err(|e| Error::Config(format!("solver: {e}")))?;
            m.space().check_point(&s.x0).map_err(|e| Error::Config(format!("solver.x0: {e}")))?;
            Ok(Some(m))
        }
    }
}

fn norms_check(cfg: &ExperimentConfig, run: &mut Run) -> Result<bool> {
    let n = &cfg.norms;
    let mut ops: Vec<&dyn BinaryOperation> = Vec::new();
    ops.extend(TriangularNorm::ALL.iter().map(|t| t as &dyn BinaryOperation));
    ops.extend(TriangularConorm::ALL.iter().map(|s| s as &dyn BinaryOperation));
    let mut reports = Vec::new();
    for op in ops {
        let r = check_norm_axioms(op, n.samples, cfg.seed, n.tol)?;
        run.summary.push(format!(
            "{:<12} {}",
            r.operation,
            if r.passed() { "pass".to_string() } else { format!("FAIL {:?}", r.failing()) }
        ));
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed());
    run.put("operations", &reports)?;
    Ok(passed)
}

fn axioms(cfg: &ExperimentConfig, metric: &NeutroMetric, run: &mut Run) -> Result<bool> {
    let s = &cfg.sampling;
    let check = AxiomCheckConfig {
        sample_count: s.samples,
        seed: cfg.seed,
        lambda_grid: s.lambda_grid.clone(),
        large_lambda: s.large_lambda,
        tol: s.tol,
    };
    let report = verify_axioms(metric, &check)?;
    let failing: Vec<&str> = report.failing().iter().map(|a| a.numeral()).collect();
    run.put("failing", &failing)?;
    run.put("axioms", &report)?;
    for axiom in report.failing() {
        let o = report.outcome(axiom);
        run.summary.push(format!(
            "axiom {} failed {}/{}: {}",
            axiom.numeral(),
            o.failures,
            o.checks,
            axiom.description()
        ));
    }
    Ok(report.passed())
}

#[derive(Serialize)]
struct HRow {
    a: String,
    b: String,
    epsilon: f64,
    h: f64,
}

fn quasi(cfg: &ExperimentConfig, metric: &NeutroMetric, run: &mut Run) -> Result<bool> {
    let q = &cfg.quasi;
    let family = QuasiMetricFamily::new(metric, q.lambda_max, q.tol)?;
    let space = metric.space();
    let pairs: Vec<(Point, Point)> = match space.points() {
        Some(all) => all
            .iter()
            .flat_map(|a| all.iter().filter(move |b| *b != a).map(move |b| (a.clone(), b.clone())))
            .take(q.pairs)
            .collect(),
        None => {
            space.sample_points(2 * q.pairs, cfg.seed).chunks_exact(2).map(|p| (p[0].clone(), p[1].clone())).collect()
        }
    };
    let mut rows = Vec::with_capacity(pairs.len() * q.epsilons.len());
    for (a, b) in &pairs {
        for &eps in &q.epsilons {
            let h = family.h_eps(a, b, eps)?;
            rows.push(HRow { a: a.to_string(), b: b.to_string(), epsilon: eps, h });
        }
    }
    let trace = write_trace(cfg, "quasi-metric", &rows)?;
    run.put("h_table", &serde_json::json!({ "rows": rows.len(), "path": trace }))?;

    let fam = check_quasi_family(&family, q.triples, cfg.seed)?;
    run.put("family", &fam)?;
    let topo = check_topology_equivalence(&family, q.topology_samples, cfg.seed)?;
    run.put("topology", &topo)?;
    run.summary.push(format!("quasi-metric axioms: {}", verdict(fam.passed)));
    run.summary.push(format!("topology equivalence: {}", verdict(topo.passed)));
    let mut passed = fam.passed && topo.passed;
    if let Some(b) = &q.ball {
        let ball = OpenBall::new(b.center.clone(), b.epsilon, b.lambda)?;
        let r = check_ball_open(metric, &ball, b.probes, cfg.seed)?;
        run.summary.push(format!("open ball: {}", verdict(r.passed)));
        passed &= r.passed;
        run.put("ball", &r)?;
    }
    Ok(passed)
}

fn contraction(cfg: &ExperimentConfig, metric: &NeutroMetric, run: &mut Run) -> Result<bool> {
    let c = &cfg.contraction;
    let map = cfg.require_map()?;
    let report = estimate_k(metric, map, c.samples, cfg.seed, &c.lambda_grid)?;
    run.put("contraction", &report)?;
    run.summary.push(report.summary_table().trim_end().to_string());
    let mut passed = report.is_nc_in(c.mode);

    if c.power_n_max >= 2 {
        let power =
            check_power_contraction(metric, map, c.power_n_max, c.samples, cfg.seed, &c.lambda_grid, c.power_tol)?;
        run.summary.push(format!("power contraction: {}", verdict(power.passed)));
        passed &= power.passed;
        run.put("power", &power)?;
    }

    if let Some(b) = &c.ball {
        let family = QuasiMetricFamily::new(metric, cfg.quasi.lambda_max, cfg.quasi.tol)?;
        let inv = BallInvarianceConfig {
            epsilon: b.epsilon,
            k: b.k.unwrap_or(report.constant(c.mode)),
            radius: b.radius,
            n_max: b.n_max,
            probe_count: b.probes,
            seed: cfg.seed,
        };
        let r = check_ball_invariance(&family, map, &b.center, &inv)?;
        run.summary.push(format!("ball invariance: {} (r0 = {})", verdict(r.passed), r.r0));
        passed &= r.passed;
        run.put("ball_invariance", &r)?;
    }
    Ok(passed)
}

fn solve(cfg: &ExperimentConfig, metric: &NeutroMetric, run: &mut Run) -> Result<bool> {
    let s = cfg.require_solver()?;
    let map = cfg.require_map()?;
    let solver = s.solver_config();
    let family = QuasiMetricFamily::new(metric, s.lambda_max, s.h_tol.unwrap_or(s.tol / 100.0))?;
    let c = &cfg.contraction;
    let report = estimate_k(metric, map, c.samples, cfg.seed, &c.lambda_grid)?;
    run.put("contraction", &report)?;

    let result = picard_checked(&family, map, &s.x0, &solver, &report, s.nc_mode)?;
    let trace = write_trace(cfg, "solve", &result.residual_trace)?;
    run.put("trace_path", &trace)?;
    run.put("result", &result)?;
    run.summary.push(format!(
        "point = {}  iterations = {}  converged = {}  residual = {:e}",
        result.point, result.iterations, result.converged, result.final_residual
    ));
    let mut passed = result.converged;

    if let Some(u) = &s.uniqueness {
        let space = metric.space();
        let starts = match space.dimension() {
            Some(d) => GroundSpace::euclidean(vec![u.lower; d], vec![u.upper; d])?.sample_points(u.starts, cfg.seed),
            None => space.sample_points(u.starts, cfg.seed),
        };
        let probe = uniqueness_probe(&family, map, &starts, &solver)?;
        run.summary.push(format!("uniqueness: {:?} (max pairwise h = {:e})", probe.verdict, probe.max_pairwise_h));
        passed &= probe.passed;
        run.put("uniqueness", &probe)?;
    }

    if let Some(k) = &s.certificate {
        if result.converged {
            let cert = convergence_certificate(&family, map, &result, k.k_expected, k.tol)?;
            run.summary.push(format!("certificate: {}", verdict(cert.passed)));
            passed &= cert.passed;
            run.put("certificate", &cert)?;
        } else {
            run.put("certificate", &serde_json::json!({ "skipped": "run did not converge" }))?;
        }
    }
    Ok(passed)
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "FAIL"
    }
}

/// Writes `<command>.trace.{csv,json}` and returns its file name.
fn write_trace<T: Serialize>(cfg: &ExperimentConfig, command: &str, rows: &[T]) -> Result<String> {
    fs::create_dir_all(&cfg.output.dir)?;
    let name = match cfg.output.trace_format {
        TraceFormat::Csv => format!("{command}.trace.csv"),
        TraceFormat::Json => format!("{command}.trace.json"),
    };
    let path = cfg.output.dir.join(&name);
    match cfg.output.trace_format {
        TraceFormat::Csv => {
            let mut w = csv::Writer::from_path(&path)?;
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        TraceFormat::Json => {
            let mut text = serde_json::to_string_pretty(rows)?;
            text.push('\n');
            fs::write(&path, text)?;
        }
    }
    Ok(name)
}

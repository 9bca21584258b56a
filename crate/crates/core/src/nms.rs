//! Neutrosophic metrics `(G, B, Y)` over a ground space, with a sampling
//! verifier for the eighteen defining axioms.
//!
//! Two constructions are available. The induced one lifts a crisp metric
//! `d` to
//!
//! ```text
//! G(a, b, λ) = λ / (λ + d(a, b))
//! B(a, b, λ) = Y(a, b, λ) = d(a, b) / (λ + d(a, b))
//! ```
//!
//! and the explicit one reads per-pair curves sampled on a λ grid, linearly
//! interpolated between knots and held constant outside them. For `λ ≤ 0`
//! both constructions return `(0, 1, 1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{TriangularConorm, TriangularNorm};
use crate::space::{verify_crisp_metric, GroundSpace, Point};

/// Perturbation of λ used by the continuity axioms.
pub const CONTINUITY_DELTA: f64 = 1e-6;

/// Values of the three membership functions at one `(a, b, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "Y")]
    pub y: f64,
}

impl Triple {
    pub const IDENTICAL: Triple = Triple { g: 1.0, b: 0.0, y: 0.0 };
    pub const NON_POSITIVE_SCALE: Triple = Triple { g: 0.0, b: 1.0, y: 1.0 };

    pub fn new(g: f64, b: f64, y: f64) -> Self {
        Triple { g, b, y }
    }

    fn lerp(self, other: Triple, w: f64) -> Triple {
        Triple {
            g: self.g + (other.g - self.g) * w,
            b: self.b + (other.b - self.b) * w,
            y: self.y + (other.y - self.y) * w,
        }
    }

    /// `G > 1 − ε`, `B < ε` and `Y < ε`.
    pub fn within(self, epsilon: f64) -> bool {
        self.g > 1.0 - epsilon && self.b < epsilon && self.y < epsilon
    }
}

/// One pair's curve: strictly increasing λ knots with a triple at each.
#[derive(Debug, Clone, PartialEq)]
struct Curve {
    lambdas: Vec<f64>,
    values: Vec<Triple>,
}

impl Curve {
    fn eval(&self, lambda: f64) -> Triple {
        let ls = &self.lambdas;
        if lambda <= ls[0] {
            return self.values[0];
        }
        let last = ls.len() - 1;
        if lambda >= ls[last] {
            return self.values[last];
        }
        let hi = ls.partition_point(|&l| l <= lambda);
        let lo = hi - 1;
        let w = (lambda - ls[lo]) / (ls[hi] - ls[lo]);
        self.values[lo].lerp(self.values[hi], w)
    }
}

/// Explicit metric over a finite space of `n` points.
///
/// Every ordered pair `a ≠ b` needs a curve; diagonal curves are optional
/// and default to `(1, 0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    n: usize,
    curves: Vec<Option<Curve>>,
}

impl MetricTable {
    /// Builds a table from `(a, b, λ, triple)` rows.
    pub fn from_rows(n: usize, rows: impl IntoIterator<Item = (usize, usize, f64, Triple)>) -> Result<Self> {
        let mut grouped: BTreeMap<(usize, usize), Vec<(f64, Triple)>> = BTreeMap::new();
        for (a, b, lambda, t) in rows {
            if a >= n || b >= n {
                return Err(Error::Construction(format!("row ({a}, {b}) out of range for {n} points")));
            }
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(Error::Construction(format!(
                    "row ({a}, {b}): lambda = {lambda} must be positive and finite"
                )));
            }
            if ![t.g, t.b, t.y].iter().all(|v| v.is_finite()) {
                return Err(Error::Construction(format!("row ({a}, {b}, {lambda}): non-finite value")));
            }
            grouped.entry((a, b)).or_default().push((lambda, t));
        }

        let mut curves = vec![None; n * n];
        for ((a, b), mut knots) in grouped {
            knots.sort_by(|x, y| x.0.total_cmp(&y.0));
            if knots.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Construction(format!("pair ({a}, {b}) has duplicate lambda knots")));
            }
            let (lambdas, values) = knots.into_iter().unzip();
            curves[a * n + b] = Some(Curve { lambdas, values });
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && curves[a * n + b].is_none() {
                    return Err(Error::Construction(format!("pair ({a}, {b}) has no rows")));
                }
            }
        }
        Ok(MetricTable { n, curves })
    }

    /// Tabulates `f` for every ordered pair (diagonal included) at `knots`.
    pub fn tabulate(n: usize, knots: &[f64], f: impl Fn(usize, usize, f64) -> Triple) -> Result<Self> {
        let rows = (0..n).flat_map(|a| {
            let f = &f;
            (0..n).flat_map(move |b| knots.iter().map(move |&l| (a, b, l, f(a, b, l))))
        });
        Self::from_rows(n, rows)
    }

    /// Reads CSV with columns `a_index, b_index, lambda, G, B, Y`. A leading
    /// header row is skipped if present.
    pub fn from_csv(n: usize, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
        let mut rows = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            if line == 0 && record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
                continue;
            }
            if record.len() != 6 {
                return Err(Error::Config(format!(
                    "{}: line {}: expected 6 columns (a_index, b_index, lambda, G, B, Y), got {}",
                    path.display(),
                    line + 1,
                    record.len()
                )));
            }
            let bad =
                |field: &str| Error::Config(format!("{}: line {}: cannot parse `{field}`", path.display(), line + 1));
            let a = record[0].parse::<usize>().map_err(|_| bad(&record[0]))?;
            let b = record[1].parse::<usize>().map_err(|_| bad(&record[1]))?;
            let mut nums = [0.0; 4];
            for (k, slot) in nums.iter_mut().enumerate() {
                *slot = record[k + 2].parse::<f64>().map_err(|_| bad(&record[k + 2]))?;
            }
            rows.push((a, b, nums[0], Triple::new(nums[1], nums[2], nums[3])));
        }
        Self::from_rows(n, rows)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["a_index", "b_index", "lambda", "G", "B", "Y"])?;
        for a in 0..self.n {
            for b in 0..self.n {
                if let Some(c) = &self.curves[a * self.n + b] {
                    for (l, t) in c.lambdas.iter().zip(&c.values) {
                        w.write_record(&[
                            a.to_string(),
                            b.to_string(),
                            l.to_string(),
                            t.g.to_string(),
                            t.b.to_string(),
                            t.y.to_string(),
                        ])?;
                    }
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn eval(&self, a: usize, b: usize, lambda: f64) -> Triple {
        match &self.curves[a * self.n + b] {
            Some(c) => c.eval(lambda),
            None => Triple::IDENTICAL,
        }
    }
}

/// λ knots at which a tabulated metric agrees exactly with the function it
/// was tabulated from, for every evaluation [`verify_axioms`] makes off the
/// continuity perturbation: the grid, all pairwise sums and `large_lambda`.
pub fn verification_knots(lambda_grid: &[f64], large_lambda: f64) -> Vec<f64> {
    let mut knots: Vec<f64> = lambda_grid.to_vec();
    for &l in lambda_grid {
        for &m in lambda_grid {
            knots.push(l + m);
        }
    }
    knots.push(large_lambda);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    knots
}

#[derive(Debug, Clone, PartialEq)]
pub enum Construction {
    InducedStandard,
    ExplicitTable(MetricTable),
}

impl Construction {
    pub fn kind(&self) -> &'static str {
        match self {
            Construction::InducedStandard => "induced_standard",
            Construction::ExplicitTable(_) => "explicit_table",
        }
    }
}

/// A neutrosophic metric with its t-norm / t-conorm pair.
#[derive(Debug, Clone, PartialEq)]
pub struct NeutroMetric {
    space: GroundSpace,
    tnorm: TriangularNorm,
    tconorm: TriangularConorm,
    construction: Construction,
}

impl NeutroMetric {
    /// Lifts the crisp metric of `space`. Fails if the crisp distance is not
    /// a metric (checked exhaustively for finite spaces, on 256 sampled
    /// triples otherwise).
    pub fn induced_from_crisp(space: GroundSpace, tnorm: TriangularNorm, tconorm: TriangularConorm) -> Result<Self> {
        let report = verify_crisp_metric(&space, 256, 0);
        if !report.passed {
            return Err(Error::Construction(format!(
                "ground distance is not a metric: {:?}",
                report.violations.first()
            )));
        }
        Ok(NeutroMetric { space, tnorm, tconorm, construction: Construction::InducedStandard })
    }

    pub fn from_table(
        space: GroundSpace,
        tnorm: TriangularNorm,
        tconorm: TriangularConorm,
        table: MetricTable,
    ) -> Result<Self> {
        match space.cardinality() {
            Some(n) if n == table.len() => {}
            Some(n) => return Err(Error::Construction(format!("table covers {} points, space has {n}", table.len()))),
            None => return Err(Error::Construction("explicit tables need a finite space".into())),
        }
        Ok(NeutroMetric { space, tnorm, tconorm, construction: Construction::ExplicitTable(table) })
    }

    pub fn space(&self) -> &GroundSpace {
        &self.space
    }

    pub fn tnorm(&self) -> TriangularNorm {
        self.tnorm
    }

    pub fn tconorm(&self) -> TriangularConorm {
        self.tconorm
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    /// `(G, B, Y)` at `(a, b, λ)`.
    pub fn eval_triple(&self, a: &Point, b: &Point, lambda: f64) -> Result<Triple> {
        if lambda.is_nan() || lambda.is_infinite() {
            return Err(Error::Domain(format!("lambda = {lambda} is not finite")));
        }
        match &self.construction {
            Construction::InducedStandard => {
                let d = self.space.distance(a, b)?;
                if lambda <= 0.0 {
                    Ok(Triple::NON_POSITIVE_SCALE)
                } else if d == 0.0 {
                    Ok(Triple::IDENTICAL)
                } else {
                    let denom = lambda + d;
                    Ok(Triple::new(lambda / denom, d / denom, d / denom))
                }
            }
            Construction::ExplicitTable(table) => {
                self.space.check_point(a)?;
                self.space.check_point(b)?;
                if lambda <= 0.0 {
                    return Ok(Triple::NON_POSITIVE_SCALE);
                }
                let (i, j) = (a.index().unwrap(), b.index().unwrap());
                Ok(table.eval(i, j, lambda))
            }
        }
    }
}

/// The eighteen axioms, numbered as in the usual definition of a
/// neutrosophic metric space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axiom {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
    Vii,
    Viii,
    Ix,
    X,
    Xi,
    Xii,
    Xiii,
    Xiv,
    Xv,
    Xvi,
    Xvii,
    Xviii,
}

impl Axiom {
    pub const ALL: [Axiom; 18] = [
        Axiom::I,
        Axiom::Ii,
        Axiom::Iii,
        Axiom::Iv,
        Axiom::V,
        Axiom::Vi,
        Axiom::Vii,
        Axiom::Viii,
        Axiom::Ix,
        Axiom::X,
        Axiom::Xi,
        Axiom::Xii,
        Axiom::Xiii,
        Axiom::Xiv,
        Axiom::Xv,
        Axiom::Xvi,
        Axiom::Xvii,
        Axiom::Xviii,
    ];

    pub fn numeral(self) -> &'static str {
        const NUMERALS: [&str; 18] = [
            "i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x", "xi", "xii", "xiii", "xiv", "xv", "xvi",
            "xvii", "xviii",
        ];
        NUMERALS[self as usize]
    }

    pub fn description(self) -> &'static str {
        match self {
            Axiom::I => "G, B, Y take values in [0, 1]",
            Axiom::Ii => "G + B + Y <= 3",
            Axiom::Iii => "G(a,b,l) = 1 iff a = b",
            Axiom::Iv => "G symmetric",
            Axiom::V => "G(a,b,l) tnorm G(b,c,m) <= G(a,c,l+m)",
            Axiom::Vi => "G continuous in l",
            Axiom::Vii => "G -> 1 as l -> inf",
            Axiom::Viii => "B(a,b,l) = 0 iff a = b",
            Axiom::Ix => "B symmetric",
            Axiom::X => "B(a,b,l) tconorm B(b,c,m) >= B(a,c,l+m)",
            Axiom::Xi => "B continuous in l",
            Axiom::Xii => "B -> 0 as l -> inf",
            Axiom::Xiii => "Y(a,b,l) = 0 iff a = b",
            Axiom::Xiv => "Y symmetric",
            Axiom::Xv => "Y(a,b,l) tconorm Y(b,c,m) >= Y(a,c,l+m)",
            Axiom::Xvi => "Y continuous in l",
            Axiom::Xvii => "Y -> 0 as l -> inf",
            Axiom::Xviii => "l <= 0 gives G = 0, B = 1, Y = 1",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.numeral())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomWitness {
    pub a: Point,
    pub b: Point,
    pub c: Option<Point>,
    pub lambda: f64,
    pub mu: Option<f64>,
    /// The evaluated quantities that violate the axiom.
    pub values: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomOutcome {
    pub axiom: Axiom,
    pub description: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    pub witness: Option<AxiomWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub construction: String,
    pub tnorm: TriangularNorm,
    pub tconorm: TriangularConorm,
    pub samples: usize,
    pub seed: u64,
    pub lambda_grid: Vec<f64>,
    pub large_lambda: f64,
    pub tol: f64,
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failing(&self) -> Vec<Axiom> {
        self.outcomes.iter().filter(|o| !o.passed).map(|o| o.axiom).collect()
    }

    pub fn outcome(&self, axiom: Axiom) -> &AxiomOutcome {
        &self.outcomes[axiom as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheckConfig {
    pub sample_count: usize,
    pub seed: u64,
    pub lambda_grid: Vec<f64>,
    pub large_lambda: f64,
    pub tol: f64,
}

impl Default for AxiomCheckConfig {
    fn default() -> Self {
        AxiomCheckConfig {
            sample_count: 1000,
            seed: 0,
            lambda_grid: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            large_lambda: 1e7,
            tol: 1e-5,
        }
    }
}

struct Ledger {
    tallies: Vec<(usize, usize, Option<AxiomWitness>)>,
}

impl Ledger {
    fn new() -> Self {
        Ledger { tallies: vec![(0, 0, None); Axiom::ALL.len()] }
    }

    fn record(&mut self, axiom: Axiom, ok: bool, witness: impl FnOnce() -> AxiomWitness) {
        let slot = &mut self.tallies[axiom as usize];
        slot.0 += 1;
        if !ok {
            slot.1 += 1;
            if slot.2.is_none() {
                slot.2 = Some(witness());
            }
        }
    }
}

fn pair_witness(a: &Point, b: &Point, lambda: f64, values: Vec<f64>, detail: &str) -> AxiomWitness {
    AxiomWitness { a: a.clone(), b: b.clone(), c: None, lambda, mu: None, values, detail: detail.to_string() }
}

/// Checks axioms i–xviii at seeded samples.
///
/// `sample_count` triples `(a, b, c)` are drawn from the space; each is
/// checked at every λ (and every pair `λ, μ`) of `lambda_grid`. On finite
/// spaces the identity axioms are additionally scanned over all pairs.
pub fn verify_axioms(metric: &NeutroMetric, cfg: &AxiomCheckConfig) -> Result<AxiomReport> {
    let grid = &cfg.lambda_grid;
    if grid.is_empty() {
        return Err(Error::Precondition("lambda grid is empty".into()));
    }
    if grid.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(Error::Precondition("lambda grid values must be positive and finite".into()));
    }
    let max_grid = grid.iter().cloned().fold(f64::MIN, f64::max);
    let min_grid = grid.iter().cloned().fold(f64::MAX, f64::min);
    if !(cfg.large_lambda >= max_grid && cfg.large_lambda.is_finite()) {
        return Err(Error::Precondition(format!(
            "large_lambda = {} must be finite and at least max(lambda_grid) = {max_grid}",
            cfg.large_lambda
        )));
    }
    if cfg.sample_count == 0 {
        return Err(Error::Precondition("sample_count must be at least 1".into()));
    }

    let tol = cfg.tol;
    let lipschitz = 1.0 / min_grid;
    let step_bound = lipschitz * CONTINUITY_DELTA * (1.0 + 1e-9) + 1e-15;
    let tn = metric.tnorm;
    let tc = metric.tconorm;
    let eval = |a: &Point, b: &Point, l: f64| metric.eval_triple(a, b, l).expect("sampled points belong to the space");

    let mut ledger = Ledger::new();

    let check_pair = |ledger: &mut Ledger, a: &Point, b: &Point| {
        let distinct = a != b;
        for &l in grid {
            let t = eval(a, b, l);
            let r = eval(b, a, l);
            let in_unit = [t.g, t.b, t.y].iter().all(|v| (0.0..=1.0).contains(v));
            ledger.record(Axiom::I, in_unit, || pair_witness(a, b, l, vec![t.g, t.b, t.y], "value outside [0, 1]"));
            let sum = t.g + t.b + t.y;
            ledger.record(Axiom::Ii, sum <= 3.0 + tol, || pair_witness(a, b, l, vec![sum], "G + B + Y > 3"));

            if distinct {
                ledger.record(Axiom::Iii, t.g != 1.0, || pair_witness(a, b, l, vec![t.g], "G = 1 for distinct points"));
                ledger
                    .record(Axiom::Viii, t.b != 0.0, || pair_witness(a, b, l, vec![t.b], "B = 0 for distinct points"));
                ledger
                    .record(Axiom::Xiii, t.y != 0.0, || pair_witness(a, b, l, vec![t.y], "Y = 0 for distinct points"));
            }

            ledger.record(Axiom::Iv, (t.g - r.g).abs() <= tol, || {
                pair_witness(a, b, l, vec![t.g, r.g], "G(a,b) != G(b,a)")
            });
            ledger.record(Axiom::Ix, (t.b - r.b).abs() <= tol, || {
                pair_witness(a, b, l, vec![t.b, r.b], "B(a,b) != B(b,a)")
            });
            ledger.record(Axiom::Xiv, (t.y - r.y).abs() <= tol, || {
                pair_witness(a, b, l, vec![t.y, r.y], "Y(a,b) != Y(b,a)")
            });

            let p = eval(a, b, l + CONTINUITY_DELTA);
            let dg = (p.g - t.g).abs();
            let db = (p.b - t.b).abs();
            let dy = (p.y - t.y).abs();
            ledger.record(Axiom::Vi, dg <= step_bound, || {
                pair_witness(a, b, l, vec![t.g, p.g], "G jumps under a lambda perturbation")
            });
            ledger.record(Axiom::Xi, db <= step_bound, || {
                pair_witness(a, b, l, vec![t.b, p.b], "B jumps under a lambda perturbation")
            });
            ledger.record(Axiom::Xvi, dy <= step_bound, || {
                pair_witness(a, b, l, vec![t.y, p.y], "Y jumps under a lambda perturbation")
            });

            for scale in [0.0, -l] {
                let z = eval(a, b, scale);
                let ok = z.g == 0.0 && z.b == 1.0 && z.y == 1.0;
                ledger.record(Axiom::Xviii, ok, || {
                    pair_witness(a, b, scale, vec![z.g, z.b, z.y], "non-positive lambda not (0, 1, 1)")
                });
            }
        }

        let big = eval(a, b, cfg.large_lambda);
        ledger.record(Axiom::Vii, (big.g - 1.0).abs() <= tol, || {
            pair_witness(a, b, cfg.large_lambda, vec![big.g], "G far from 1 at large lambda")
        });
        ledger.record(Axiom::Xii, big.b <= tol, || {
            pair_witness(a, b, cfg.large_lambda, vec![big.b], "B far from 0 at large lambda")
        });
        ledger.record(Axiom::Xvii, big.y <= tol, || {
            pair_witness(a, b, cfg.large_lambda, vec![big.y], "Y far from 0 at large lambda")
        });
    };

    let check_self = |ledger: &mut Ledger, a: &Point| {
        for &l in grid {
            let t = eval(a, a, l);
            ledger.record(Axiom::Iii, (t.g - 1.0).abs() <= tol, || pair_witness(a, a, l, vec![t.g], "G(a,a) != 1"));
            ledger.record(Axiom::Viii, t.b.abs() <= tol, || pair_witness(a, a, l, vec![t.b], "B(a,a) != 0"));
            ledger.record(Axiom::Xiii, t.y.abs() <= tol, || pair_witness(a, a, l, vec![t.y], "Y(a,a) != 0"));
        }
    };

    let points = metric.space.sample_points(3 * cfg.sample_count, cfg.seed);
    for tri in points.chunks_exact(3) {
        let (a, b, c) = (&tri[0], &tri[1], &tri[2]);
        check_self(&mut ledger, a);
        check_pair(&mut ledger, a, b);

        for &l in grid {
            let ab = eval(a, b, l);
            for &m in grid {
                let bc = eval(b, c, m);
                let ac = eval(a, c, l + m);
                let witness = |values: Vec<f64>, detail: &str| AxiomWitness {
                    a: a.clone(),
                    b: b.clone(),
                    c: Some(c.clone()),
                    lambda: l,
                    mu: Some(m),
                    values,
                    detail: detail.to_string(),
                };
                let g = tn.apply(ab.g, bc.g);
                ledger.record(Axiom::V, g <= ac.g + tol, || {
                    witness(vec![ab.g, bc.g, g, ac.g], "G(a,b,l) o G(b,c,m) > G(a,c,l+m)")
                });
                let bb = tc.apply(ab.b, bc.b);
                ledger.record(Axiom::X, bb >= ac.b - tol, || {
                    witness(vec![ab.b, bc.b, bb, ac.b], "B(a,b,l) * B(b,c,m) < B(a,c,l+m)")
                });
                let yy = tc.apply(ab.y, bc.y);
                ledger.record(Axiom::Xv, yy >= ac.y - tol, || {
                    witness(vec![ab.y, bc.y, yy, ac.y], "Y(a,b,l) * Y(b,c,m) < Y(a,c,l+m)")
                });
            }
        }
    }

    // Identity characterisations over every pair of a finite space.
    if let Some(all) = metric.space.points() {
        for a in &all {
            check_self(&mut ledger, a);
            for b in all.iter().filter(|b| *b != a) {
                for &l in grid {
                    let t = eval(a, b, l);
                    ledger.record(Axiom::Iii, t.g != 1.0, || {
                        pair_witness(a, b, l, vec![t.g], "G = 1 for distinct points")
                    });
                    ledger.record(Axiom::Viii, t.b != 0.0, || {
                        pair_witness(a, b, l, vec![t.b], "B = 0 for distinct points")
                    });
                    ledger.record(Axiom::Xiii, t.y != 0.0, || {
                        pair_witness(a, b, l, vec![t.y], "Y = 0 for distinct points")
                    });
                }
            }
        }
    }

    let outcomes = Axiom::ALL
        .iter()
        .zip(ledger.tallies)
        .map(|(&axiom, (checks, failures, witness))| AxiomOutcome {
            axiom,
            description: axiom.description().to_string(),
            passed: failures == 0,
            checks,
            failures,
            witness,
        })
        .collect();

    Ok(AxiomReport {
        construction: metric.construction.kind().to_string(),
        tnorm: tn,
        tconorm: tc,
        samples: cfg.sample_count,
        seed: cfg.seed,
        lambda_grid: grid.clone(),
        large_lambda: cfg.large_lambda,
        tol,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_line() -> NeutroMetric {
        NeutroMetric::induced_from_crisp(
            GroundSpace::euclidean_cube(1, -10.0, 10.0).unwrap(),
            TriangularNorm::Product,
            TriangularConorm::ProbabilisticSum,
        )
        .unwrap()
    }

    fn line_space(n: usize) -> GroundSpace {
        GroundSpace::finite_table((0..n).map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect()).collect())
            .unwrap()
    }

    #[test]
    fn induced_examples() {
        let m = real_line();
        let p = |x| Point::scalar(x);
        assert_eq!(m.eval_triple(&p(0.0), &p(1.0), 1.0).unwrap(), Triple::new(0.5, 0.5, 0.5));
        assert_eq!(m.eval_triple(&p(0.0), &p(1.0), 3.0).unwrap(), Triple::new(0.75, 0.25, 0.25));
        assert_eq!(m.eval_triple(&p(2.0), &p(2.0), 3.0).unwrap(), Triple::IDENTICAL);
        assert_eq!(m.eval_triple(&p(0.0), &p(1.0), -1.0).unwrap(), Triple::NON_POSITIVE_SCALE);
        assert_eq!(m.eval_triple(&p(0.0), &p(1.0), 0.0).unwrap(), Triple::NON_POSITIVE_SCALE);
        let far = m.eval_triple(&p(0.0), &p(1.0), 1e6).unwrap();
        assert!((far.g - 1.0).abs() <= 1e-5);
    }

    #[test]
    fn eval_domain_errors() {
        let m = real_line();
        assert!(matches!(m.eval_triple(&Point::Index(0), &Point::scalar(1.0), 1.0), Err(Error::Domain(_))));
        assert!(m.eval_triple(&Point::scalar(0.0), &Point::scalar(1.0), f64::NAN).is_err());
    }

    #[test]
    fn induced_rejects_non_metric() {
        let bad =
            GroundSpace::finite_table(vec![vec![0.0, 5.0, 1.0], vec![5.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]).unwrap();
        assert!(matches!(
            NeutroMetric::induced_from_crisp(bad, TriangularNorm::Product, TriangularConorm::ProbabilisticSum),
            Err(Error::Construction(_))
        ));
    }

    #[test]
    fn induced_line_passes_all_axioms() {
        let cfg = AxiomCheckConfig { sample_count: 300, seed: 5, ..Default::default() };
        let r = verify_axioms(&real_line(), &cfg).unwrap();
        assert!(r.passed(), "failing: {:?}", r.failing());
        assert_eq!(r.outcomes.len(), 18);
        assert!(r.outcomes.iter().all(|o| o.witness.is_none() && o.checks > 0));
    }

    #[test]
    fn induced_discrete_passes_all_axioms() {
        let m = NeutroMetric::induced_from_crisp(
            GroundSpace::discrete(4).unwrap(),
            TriangularNorm::Minimum,
            TriangularConorm::Maximum,
        )
        .unwrap();
        let r = verify_axioms(&m, &AxiomCheckConfig { sample_count: 200, ..Default::default() }).unwrap();
        assert!(r.passed(), "failing: {:?}", r.failing());
    }

    #[test]
    fn complement_b_breaks_identity() {
        // B' = 1 − d/(λ + d), so B'(a, a) = 1.
        let space = line_space(4);
        let cfg = AxiomCheckConfig { sample_count: 100, seed: 1, ..Default::default() };
        let knots = verification_knots(&cfg.lambda_grid, cfg.large_lambda);
        let table = MetricTable::tabulate(4, &knots, |a, b, l| {
            let d = (a as f64 - b as f64).abs();
            Triple::new(l / (l + d), 1.0 - d / (l + d), d / (l + d))
        })
        .unwrap();
        let m = NeutroMetric::from_table(space, TriangularNorm::Product, TriangularConorm::ProbabilisticSum, table)
            .unwrap();
        let r = verify_axioms(&m, &cfg).unwrap();
        assert!(r.failing().contains(&Axiom::Viii));
        let w = r.outcome(Axiom::Viii).witness.clone().unwrap();
        assert_eq!(w.a, w.b);
        assert_eq!(w.values, vec![1.0]);
    }

    #[test]
    fn tabulated_induced_matches_and_passes() {
        let cfg = AxiomCheckConfig { sample_count: 200, seed: 9, ..Default::default() };
        let knots = verification_knots(&cfg.lambda_grid, cfg.large_lambda);
        let table = MetricTable::tabulate(5, &knots, |a, b, l| {
            let d = (a as f64 - b as f64).abs();
            Triple::new(l / (l + d), d / (l + d), d / (l + d))
        })
        .unwrap();
        let tab =
            NeutroMetric::from_table(line_space(5), TriangularNorm::Product, TriangularConorm::ProbabilisticSum, table)
                .unwrap();
        let ind = NeutroMetric::induced_from_crisp(
            line_space(5),
            TriangularNorm::Product,
            TriangularConorm::ProbabilisticSum,
        )
        .unwrap();
        for &l in &knots {
            let (a, b) = (Point::Index(1), Point::Index(4));
            assert_eq!(tab.eval_triple(&a, &b, l).unwrap(), ind.eval_triple(&a, &b, l).unwrap());
        }
        let r = verify_axioms(&tab, &cfg).unwrap();
        assert!(r.passed(), "failing: {:?}", r.failing());
    }

    #[test]
    fn table_interpolates_and_clamps() {
        let table = MetricTable::from_rows(
            2,
            vec![
                (0, 1, 1.0, Triple::new(0.2, 0.8, 0.8)),
                (0, 1, 3.0, Triple::new(0.6, 0.4, 0.4)),
                (1, 0, 1.0, Triple::new(0.2, 0.8, 0.8)),
            ],
        )
        .unwrap();
        assert_eq!(table.eval(0, 1, 2.0), Triple::new(0.4, 0.6000000000000001, 0.6000000000000001));
        assert_eq!(table.eval(0, 1, 0.5), Triple::new(0.2, 0.8, 0.8));
        assert_eq!(table.eval(0, 1, 10.0), Triple::new(0.6, 0.4, 0.4));
        assert_eq!(table.eval(1, 1, 10.0), Triple::IDENTICAL);
    }

    #[test]
    fn table_validation() {
        assert!(MetricTable::from_rows(2, vec![(0, 1, 1.0, Triple::IDENTICAL)]).is_err());
        assert!(MetricTable::from_rows(2, vec![(0, 2, 1.0, Triple::IDENTICAL)]).is_err());
        assert!(MetricTable::from_rows(
            2,
            vec![(0, 1, 1.0, Triple::IDENTICAL), (0, 1, 1.0, Triple::IDENTICAL), (1, 0, 1.0, Triple::IDENTICAL)]
        )
        .is_err());
        assert!(
            MetricTable::from_rows(2, vec![(0, 1, -1.0, Triple::IDENTICAL), (1, 0, 1.0, Triple::IDENTICAL)]).is_err()
        );
        let t =
            MetricTable::from_rows(2, vec![(0, 1, 1.0, Triple::IDENTICAL), (1, 0, 1.0, Triple::IDENTICAL)]).unwrap();
        let euclid = GroundSpace::euclidean_cube(1, 0.0, 1.0).unwrap();
        assert!(
            NeutroMetric::from_table(euclid, TriangularNorm::Product, TriangularConorm::Maximum, t.clone()).is_err()
        );
        assert!(NeutroMetric::from_table(line_space(3), TriangularNorm::Product, TriangularConorm::Maximum, t).is_err());
    }

    #[test]
    fn table_csv_round_trip() {
        let knots = [0.5, 1.0, 2.0];
        let table = MetricTable::tabulate(3, &knots, |a, b, l| {
            let d = (a as f64 - b as f64).abs();
            Triple::new(l / (l + d), d / (l + d), d / (l + d))
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("metric.csv");
        table.write_csv(&path).unwrap();
        assert_eq!(MetricTable::from_csv(3, &path).unwrap(), table);
    }

    #[test]
    fn verify_preconditions() {
        let m = real_line();
        let mut cfg = AxiomCheckConfig { lambda_grid: vec![], ..Default::default() };
        assert!(verify_axioms(&m, &cfg).is_err());
        cfg.lambda_grid = vec![1.0, 10.0];
        cfg.large_lambda = 5.0;
        assert!(verify_axioms(&m, &cfg).is_err());
    }

    #[test]
    fn axiom_numerals() {
        assert_eq!(Axiom::Viii.numeral(), "viii");
        assert_eq!(serde_json::to_string(&Axiom::Xviii).unwrap(), "\"xviii\"");
        assert_eq!(Axiom::Xviii as usize, 17);
    }
}

//! Self-maps of the ground space and the neutrosophic contraction
//! conditions
//!
//! ```text
//! 1/G(fa, fb, λ) − 1 ≤ k·(1/G(a, b, λ) − 1)
//! B(fa, fb, λ) ≤ k·B(a, b, λ)
//! Y(fa, fb, λ) ≤ k·Y(a, b, λ)
//! ```
//!
//! The per-component constants are estimated as suprema of the three ratios
//! over a pair × λ scan. On induced metrics the `G` ratio equals the crisp
//! Lipschitz ratio, while the `B`/`Y` ratios tend to 1 as λ → 0 for every
//! strict crisp contraction, so reports carry both a full verdict and a
//! `G`-only verdict.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nms::NeutroMetric;
use crate::quasimetric::QuasiMetricFamily;
use crate::space::{GroundSpace, Point};

const MAX_REPORTED: usize = 16;

/// A sampled supremum only certifies contraction when it stays this far
/// below 1: limits as λ → 0⁺ are approached on the grid but never attained.
pub const NC_MARGIN: f64 = 1e-2;

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    /// `x ↦ A·x + c` on a Euclidean space.
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    /// `i ↦ targets[i]` on a finite space.
    Table { targets: Vec<usize> },
    /// Every point goes to `target`.
    Constant { target: Point },
}

/// A self-map `f`, evaluated as `f^power`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    #[serde(flatten)]
    pub kind: MapKind,
    #[serde(default = "one")]
    pub power: usize,
}

impl MapSpec {
    pub fn affine(matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> Self {
        MapSpec { kind: MapKind::Affine { matrix, offset }, power: 1 }
    }

    /// `x ↦ slope·x + intercept` on the real line.
    pub fn affine_scalar(slope: f64, intercept: f64) -> Self {
        Self::affine(vec![vec![slope]], vec![intercept])
    }

    pub fn table(targets: Vec<usize>) -> Self {
        MapSpec { kind: MapKind::Table { targets }, power: 1 }
    }

    pub fn constant(target: Point) -> Self {
        MapSpec { kind: MapKind::Constant { target }, power: 1 }
    }

    pub fn identity_on(space: &GroundSpace) -> Self {
        match space.cardinality() {
            Some(n) => Self::table((0..n).collect()),
            None => {
                let d = space.dimension().expect("euclidean");
                let matrix = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
                Self::affine(matrix, vec![0.0; d])
            }
        }
    }

    pub fn with_power(mut self, power: usize) -> Self {
        self.power = power;
        self
    }

    /// Checks that the map is a total self-map of `space`.
    pub fn validate(&self, space: &GroundSpace) -> Result<()> {
        if self.power == 0 {
            return Err(Error::Domain("map power must be at least 1".into()));
        }
        match (&self.kind, space) {
            (MapKind::Affine { matrix, offset }, GroundSpace::Euclidean { .. }) => {
                let d = space.dimension().unwrap();
                if matrix.len() != d || matrix.iter().any(|row| row.len() != d) || offset.len() != d {
                    return Err(Error::Domain(format!("affine map must be {d}×{d} with a length-{d} offset")));
                }
                if matrix.iter().flatten().chain(offset).any(|x| !x.is_finite()) {
                    return Err(Error::Domain("affine map has non-finite coefficients".into()));
                }
                Ok(())
            }
            (MapKind::Affine { .. }, _) => Err(Error::Domain("affine maps need a euclidean space".into())),
            (MapKind::Table { targets }, _) => {
                let n = space.cardinality().ok_or_else(|| Error::Domain("table maps need a finite space".into()))?;
                if targets.len() != n {
                    return Err(Error::Domain(format!(
                        "table map has {} entries, space has {n} points",
                        targets.len()
                    )));
                }
                if let Some(t) = targets.iter().find(|&&t| t >= n) {
                    return Err(Error::Domain(format!("table map target {t} out of range")));
                }
                Ok(())
            }
            (MapKind::Constant { target }, _) => space.check_point(target),
        }
    }

    fn apply_once(&self, a: &Point) -> Point {
        match (&self.kind, a) {
            (MapKind::Affine { matrix, offset }, Point::Coords(x)) => Point::Coords(
                matrix
                    .iter()
                    .zip(offset)
                    .map(|(row, c)| row.iter().zip(x).map(|(m, xi)| m * xi).sum::<f64>() + c)
                    .collect(),
            ),
            (MapKind::Table { targets }, Point::Index(i)) => Point::Index(targets[*i]),
            (MapKind::Constant { target }, _) => target.clone(),
            _ => unreachable!("map validated against the space"),
        }
    }
}

/// `f^power(a)`. Fails with [`Error::Divergence`] if an iterate leaves the
/// finite reals.
pub fn apply_map(space: &GroundSpace, map: &MapSpec, a: &Point) -> Result<Point> {
    map.validate(space)?;
    space.check_point(a)?;
    let mut x = a.clone();
    for step in 0..map.power {
        x = map.apply_once(&x);
        if !x.is_finite() {
            return Err(Error::Divergence { iteration: step + 1 });
        }
    }
    Ok(x)
}

/// The three contraction ratios at one `(a, b, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NcRatios {
    pub g: f64,
    pub b: f64,
    pub y: f64,
}

/// `num / den`, with `0/0 = 0` (vacuous) and `x/0 = +∞` for `x > 0`.
fn ratio(num: f64, den: f64) -> f64 {
    if num.is_infinite() && den.is_infinite() {
        1.0
    } else if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

/// `1/G − 1`, the nearness gap the first contraction inequality shrinks.
fn nearness_gap(g: f64) -> f64 {
    if g <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / g - 1.0
    }
}

pub fn nc_ratios(metric: &NeutroMetric, map: &MapSpec, a: &Point, b: &Point, lambda: f64) -> Result<NcRatios> {
    if a == b {
        return Err(Error::DegeneratePair);
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    let space = metric.space();
    let fa = apply_map(space, map, a)?;
    let fb = apply_map(space, map, b)?;
    let before = metric.eval_triple(a, b, lambda)?;
    let after = metric.eval_triple(&fa, &fb, lambda)?;
    Ok(NcRatios {
        g: ratio(nearness_gap(after.g), nearness_gap(before.g)),
        b: ratio(after.b, before.b),
        y: ratio(after.y, before.y),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioWitness {
    pub a: Point,
    pub b: Point,
    pub lambda: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComponentWitnesses {
    pub g: Option<RatioWitness>,
    pub b: Option<RatioWitness>,
    pub y: Option<RatioWitness>,
}

/// Suprema at one scale of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaRow {
    pub lambda: f64,
    pub k_g: f64,
    pub k_b: f64,
    pub k_y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NcMode {
    /// All three inequalities.
    #[default]
    Full,
    /// Only the nearness inequality on `G`.
    GOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub map: MapSpec,
    pub samples: usize,
    pub seed: u64,
    pub pairs_scanned: usize,
    pub lambda_grid: Vec<f64>,
    pub k_g: f64,
    pub k_b: f64,
    pub k_y: f64,
    pub k_overall: f64,
    pub nc_margin: f64,
    /// `k_overall < 1 − nc_margin`.
    pub is_nc: bool,
    /// `k_g < 1 − nc_margin`.
    pub is_nc_g_only: bool,
    pub witnesses: ComponentWitnesses,
    pub per_lambda: Vec<LambdaRow>,
}

impl ContractionReport {
    pub fn is_nc_in(&self, mode: NcMode) -> bool {
        match mode {
            NcMode::Full => self.is_nc,
            NcMode::GOnly => self.is_nc_g_only,
        }
    }

    pub fn constant(&self, mode: NcMode) -> f64 {
        match mode {
            NcMode::Full => self.k_overall,
            NcMode::GOnly => self.k_g,
        }
    }

    /// Fixed-width per-component summary for terminal output.
    pub fn summary_table(&self) -> String {
        let fmt_w = |w: &Option<RatioWitness>| match w {
            Some(w) => format!("a={} b={} lambda={}", w.a, w.b, w.lambda),
            None => "-".to_string(),
        };
        let mut out = String::new();
        out.push_str(&format!("{:<10} {:>14}  {}\n", "component", "k", "witness"));
        out.push_str(&format!("{:<10} {:>14.6}  {}\n", "G", self.k_g, fmt_w(&self.witnesses.g)));
        out.push_str(&format!("{:<10} {:>14.6}  {}\n", "B", self.k_b, fmt_w(&self.witnesses.b)));
        out.push_str(&format!("{:<10} {:>14.6}  {}\n", "Y", self.k_y, fmt_w(&self.witnesses.y)));
        out.push_str(&format!(
            "k_overall = {:.6}  nc(full) = {}  nc(G-only) = {}\n",
            self.k_overall, self.is_nc, self.is_nc_g_only
        ));
        out
    }
}

/// Distinct pairs to scan: every ordered pair of a finite space, or
/// `sample_count` seeded pairs otherwise (coincident draws dropped).
fn scan_pairs(space: &GroundSpace, sample_count: usize, seed: u64) -> Vec<(Point, Point)> {
    match space.points() {
        Some(all) => {
            all.iter().flat_map(|a| all.iter().filter(move |b| *b != a).map(move |b| (a.clone(), b.clone()))).collect()
        }
        None => space
            .sample_points(2 * sample_count, seed)
            .chunks_exact(2)
            .filter(|p| p[0] != p[1])
            .map(|p| (p[0].clone(), p[1].clone()))
            .collect(),
    }
}

fn bump(best: &mut f64, witness: &mut Option<RatioWitness>, r: f64, a: &Point, b: &Point, lambda: f64) {
    if witness.is_none() || r > *best {
        *best = r;
        *witness = Some(RatioWitness { a: a.clone(), b: b.clone(), lambda, ratio: r });
    }
}

/// Estimates `k_G`, `k_B`, `k_Y` as suprema of the contraction ratios over
/// the pair scan × `lambda_grid`.
pub fn estimate_k(
    metric: &NeutroMetric,
    map: &MapSpec,
    sample_count: usize,
    seed: u64,
    lambda_grid: &[f64],
) -> Result<ContractionReport> {
    if lambda_grid.is_empty() || lambda_grid.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::Precondition("lambda grid must be non-empty and positive".into()));
    }
    if sample_count == 0 {
        return Err(Error::Precondition("sample_count must be at least 1".into()));
    }
    let space = metric.space();
    map.validate(space)?;
    let pairs = scan_pairs(space, sample_count, seed);

    let mut w = ComponentWitnesses::default();
    let (mut k_g, mut k_b, mut k_y) = (0.0, 0.0, 0.0);
    let mut per_lambda: Vec<LambdaRow> =
        lambda_grid.iter().map(|&lambda| LambdaRow { lambda, k_g: 0.0, k_b: 0.0, k_y: 0.0 }).collect();

    for (a, b) in &pairs {
        let fa = apply_map(space, map, a)?;
        let fb = apply_map(space, map, b)?;
        for (row, &lambda) in per_lambda.iter_mut().zip(lambda_grid) {
            let before = metric.eval_triple(a, b, lambda)?;
            let after = metric.eval_triple(&fa, &fb, lambda)?;
            let r = NcRatios {
                g: ratio(nearness_gap(after.g), nearness_gap(before.g)),
                b: ratio(after.b, before.b),
                y: ratio(after.y, before.y),
            };
            bump(&mut k_g, &mut w.g, r.g, a, b, lambda);
            bump(&mut k_b, &mut w.b, r.b, a, b, lambda);
            bump(&mut k_y, &mut w.y, r.y, a, b, lambda);
            row.k_g = row.k_g.max(r.g);
            row.k_b = row.k_b.max(r.b);
            row.k_y = row.k_y.max(r.y);
        }
    }

    let k_overall = f64::max(k_g, f64::max(k_b, k_y));
    Ok(ContractionReport {
        map: map.clone(),
        samples: sample_count,
        seed,
        pairs_scanned: pairs.len(),
        lambda_grid: lambda_grid.to_vec(),
        k_g,
        k_b,
        k_y,
        k_overall,
        nc_margin: NC_MARGIN,
        is_nc: k_overall < 1.0 - NC_MARGIN,
        is_nc_g_only: k_g < 1.0 - NC_MARGIN,
        witnesses: w,
        per_lambda,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub n: usize,
    pub measured: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub base_k_g: f64,
    pub tol: f64,
    pub rows: Vec<PowerRow>,
    pub passed: bool,
}

/// For `n = 2..=n_max`, compares `k_G(fⁿ)` measured on the same scan with
/// the bound `k_G(f)ⁿ + tol`.
pub fn check_power_contraction(
    metric: &NeutroMetric,
    map: &MapSpec,
    n_max: usize,
    sample_count: usize,
    seed: u64,
    lambda_grid: &[f64],
    tol: f64,
) -> Result<PowerReport> {
    if n_max < 2 {
        return Err(Error::Precondition(format!("n_max = {n_max} must be at least 2")));
    }
    let base = estimate_k(metric, map, sample_count, seed, lambda_grid)?.k_g;
    let mut rows = Vec::with_capacity(n_max - 1);
    for n in 2..=n_max {
        let power = map.clone().with_power(map.power * n);
        let measured = estimate_k(metric, &power, sample_count, seed, lambda_grid)?.k_g;
        let bound = base.powi(n as i32);
        rows.push(PowerRow { n, measured, bound, passed: measured <= bound + tol });
    }
    let passed = rows.iter().all(|r| r.passed);
    Ok(PowerReport { base_k_g: base, tol, rows, passed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallInvarianceConfig {
    pub epsilon: f64,
    /// Contraction constant for `h_ε`, normally `k_G` from [`estimate_k`].
    pub k: f64,
    /// Radius `r` of the `h_ε`-ball; defaults to `1.5·r₀` (or 1 when
    /// `r₀ = 0`).
    pub radius: Option<f64>,
    /// Largest power checked for the image-ball inclusion.
    pub n_max: usize,
    pub probe_count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceViolation {
    pub n: usize,
    pub b: Point,
    pub h: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageBallRow {
    pub n: usize,
    pub bound: f64,
    pub max_h: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallInvarianceReport {
    pub center: Point,
    pub epsilon: f64,
    pub k: f64,
    /// `h_ε(a, f(a))`.
    pub center_displacement: f64,
    /// `h_ε(a, f(a)) / (1 − k)`.
    pub r0: f64,
    pub radius: f64,
    pub members: usize,
    /// Members `b` with `h_ε(a, f(b)) ≥ r`.
    pub self_map_violations: usize,
    pub image_balls: Vec<ImageBallRow>,
    pub examples: Vec<InvarianceViolation>,
    pub passed: bool,
}

/// Checks that the `h_ε`-ball `{b : h_ε(a, b) < r}` is mapped into itself
/// for `r > r₀ = h_ε(a, f(a))/(1 − k)`, and that `fⁿ` maps it into the
/// ball of radius `kⁿ·r` (+ tol) around `fⁿ(a)`.
pub fn check_ball_invariance(
    family: &QuasiMetricFamily,
    map: &MapSpec,
    a: &Point,
    cfg: &BallInvarianceConfig,
) -> Result<BallInvarianceReport> {
    if !(cfg.k > 0.0 && cfg.k < 1.0) {
        return Err(Error::Precondition(format!("contraction constant k = {} must lie in (0, 1)", cfg.k)));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(Error::Precondition(format!("epsilon = {} must lie in (0, 1)", cfg.epsilon)));
    }
    let space = family.space();
    let eps = cfg.epsilon;
    let tol = family.tol();
    let f = |p: &Point, n: usize| apply_map(space, &map.clone().with_power(map.power * n), p);

    let fa = f(a, 1)?;
    let displacement = family.h_eps(a, &fa, eps)?;
    let r0 = displacement / (1.0 - cfg.k);
    let radius = cfg.radius.unwrap_or(if r0 > 0.0 { 1.5 * r0 } else { 1.0 });
    if !(radius > r0) {
        return Err(Error::Precondition(format!("radius {radius} must exceed r0 = {r0}")));
    }

    // Members of the h_ε-ball: all qualifying points of a finite space, or
    // rejection samples drawn alternately from the space and from a cube
    // around the center.
    let mut members = vec![a.clone()];
    match space.points() {
        Some(all) => {
            for p in all {
                if &p != a && members.len() <= cfg.probe_count && family.h_eps(a, &p, eps)? < radius {
                    members.push(p);
                }
            }
        }
        None => {
            let center = a.coords().expect("euclidean").to_vec();
            let reach = {
                let mut hi = 1e-9;
                let along = |t: f64| {
                    let mut p = center.clone();
                    p[0] += t;
                    Point::Coords(p)
                };
                while hi < 1e12 && family.h_eps(a, &along(hi), eps)? < radius {
                    hi *= 2.0;
                }
                hi
            };
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut attempts = 0usize;
            while members.len() <= cfg.probe_count && attempts < 1000 * cfg.probe_count.max(1) {
                attempts += 1;
                let candidate = if attempts.is_multiple_of(2) {
                    space.sample_one(&mut rng)
                } else {
                    Point::Coords(center.iter().map(|c| c + reach * rng.gen_range(-1.0..=1.0)).collect())
                };
                if family.h_eps(a, &candidate, eps)? < radius {
                    members.push(candidate);
                }
            }
        }
    }

    let mut examples = Vec::new();
    let mut self_map_violations = 0;
    for b in &members {
        let h = family.h_eps(a, &f(b, 1)?, eps)?;
        if !(h < radius) {
            self_map_violations += 1;
            if examples.len() < MAX_REPORTED {
                examples.push(InvarianceViolation { n: 0, b: b.clone(), h, bound: radius });
            }
        }
    }

    let mut image_balls = Vec::with_capacity(cfg.n_max);
    for n in 1..=cfg.n_max {
        let fna = f(a, n)?;
        let bound = cfg.k.powi(n as i32) * radius + tol;
        let mut row = ImageBallRow { n, bound, max_h: 0.0, violations: 0 };
        for b in &members {
            let h = family.h_eps(&fna, &f(b, n)?, eps)?;
            row.max_h = row.max_h.max(h);
            if !(h < bound) {
                row.violations += 1;
                if examples.len() < MAX_REPORTED {
                    examples.push(InvarianceViolation { n, b: b.clone(), h, bound });
                }
            }
        }
        image_balls.push(row);
    }

    let passed = self_map_violations == 0 && image_balls.iter().all(|r| r.violations == 0);
    Ok(BallInvarianceReport {
        center: a.clone(),
        epsilon: eps,
        k: cfg.k,
        center_displacement: displacement,
        r0,
        radius,
        members: members.len(),
        self_map_violations,
        image_balls,
        examples,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{TriangularConorm, TriangularNorm};

    const GRID: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

    fn real_line() -> NeutroMetric {
        NeutroMetric::induced_from_crisp(
            GroundSpace::euclidean_cube(1, -10.0, 10.0).unwrap(),
            TriangularNorm::Product,
            TriangularConorm::ProbabilisticSum,
        )
        .unwrap()
    }

    #[test]
    fn apply_examples() {
        let s = GroundSpace::euclidean_cube(1, -10.0, 10.0).unwrap();
        let f = MapSpec::affine_scalar(0.5, 1.0);
        assert_eq!(apply_map(&s, &f, &Point::scalar(0.0)).unwrap(), Point::scalar(1.0));
        assert_eq!(apply_map(&s, &f.clone().with_power(2), &Point::scalar(0.0)).unwrap(), Point::scalar(1.5));
        let c = MapSpec::constant(Point::scalar(3.0));
        assert_eq!(apply_map(&s, &c, &Point::scalar(-7.0)).unwrap(), Point::scalar(3.0));
    }

    #[test]
    fn apply_validation() {
        let s = GroundSpace::euclidean_cube(1, -1.0, 1.0).unwrap();
        assert!(apply_map(&s, &MapSpec::table(vec![0]), &Point::scalar(0.0)).is_err());
        assert!(apply_map(&s, &MapSpec::affine_scalar(1.0, 0.0).with_power(0), &Point::scalar(0.0)).is_err());
        let d = GroundSpace::discrete(3).unwrap();
        assert!(apply_map(&d, &MapSpec::table(vec![0, 1]), &Point::Index(0)).is_err());
        assert!(apply_map(&d, &MapSpec::table(vec![0, 1, 3]), &Point::Index(0)).is_err());
        assert_eq!(apply_map(&d, &MapSpec::table(vec![2, 0, 1]), &Point::Index(0)).unwrap(), Point::Index(2));
        let blow_up = MapSpec::affine_scalar(1e300, 0.0).with_power(3);
        assert!(matches!(apply_map(&s, &blow_up, &Point::scalar(1.0)), Err(Error::Divergence { iteration: 2 })));
    }

    #[test]
    fn map_spec_json_shape() {
        let f = MapSpec::affine_scalar(0.5, 1.0);
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"kind":"affine","matrix":[[0.5]],"offset":[1.0],"power":1}"#);
        assert_eq!(serde_json::from_str::<MapSpec>(&json).unwrap(), f);
        let t: MapSpec = serde_json::from_str(r#"{"kind":"table","targets":[1,1]}"#).unwrap();
        assert_eq!(t, MapSpec::table(vec![1, 1]));
    }

    #[test]
    fn ratio_examples() {
        let m = real_line();
        let f = MapSpec::affine_scalar(0.5, 0.0);
        let r = nc_ratios(&m, &f, &Point::scalar(0.0), &Point::scalar(1.0), 1.0).unwrap();
        assert!((r.g - 0.5).abs() < 1e-12);
        assert!((r.b - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.y - 2.0 / 3.0).abs() < 1e-12);
        let c = MapSpec::constant(Point::scalar(4.0));
        let r = nc_ratios(&m, &c, &Point::scalar(0.0), &Point::scalar(1.0), 1.0).unwrap();
        assert_eq!((r.g, r.b, r.y), (0.0, 0.0, 0.0));
        assert!(matches!(nc_ratios(&m, &f, &Point::scalar(2.0), &Point::scalar(2.0), 1.0), Err(Error::DegeneratePair)));
    }

    #[test]
    fn ratio_sentinels() {
        assert_eq!(ratio(0.0, 0.0), 0.0);
        assert_eq!(ratio(0.3, 0.0), f64::INFINITY);
        assert_eq!(ratio(1.0, 4.0), 0.25);
    }

    #[test]
    fn halving_map_constants() {
        let m = real_line();
        let f = MapSpec::affine_scalar(0.5, 0.0);
        let r = estimate_k(&m, &f, 500, 3, &GRID).unwrap();
        assert!((r.k_g - 0.5).abs() <= 1e-3);
        assert!(r.k_b >= 0.99);
        assert!(!r.is_nc && r.is_nc_g_only);
        let wb = r.witnesses.b.as_ref().unwrap();
        assert_eq!(wb.lambda, 0.01);
        // Witnesses evaluate to their reported ratios.
        let again = nc_ratios(&m, &f, &wb.a, &wb.b, wb.lambda).unwrap();
        assert_eq!(again.b, wb.ratio);
        let wg = r.witnesses.g.as_ref().unwrap();
        assert_eq!(nc_ratios(&m, &f, &wg.a, &wg.b, wg.lambda).unwrap().g, wg.ratio);
        assert_eq!(r.per_lambda.len(), GRID.len());
        assert!(r.summary_table().contains("nc(G-only) = true"));
    }

    #[test]
    fn constant_map_is_nc() {
        let m = real_line();
        let r = estimate_k(&m, &MapSpec::constant(Point::scalar(1.0)), 100, 0, &GRID).unwrap();
        assert_eq!((r.k_g, r.k_b, r.k_y), (0.0, 0.0, 0.0));
        assert!(r.is_nc);
    }

    #[test]
    fn finite_scan_covers_all_pairs() {
        let m = NeutroMetric::induced_from_crisp(
            GroundSpace::discrete(4).unwrap(),
            TriangularNorm::Product,
            TriangularConorm::ProbabilisticSum,
        )
        .unwrap();
        let r = estimate_k(&m, &MapSpec::table(vec![0, 0, 1, 1]), 1, 0, &GRID).unwrap();
        assert_eq!(r.pairs_scanned, 12);
        // (1, 2) ↦ (0, 1) keeps the distance, so k_G = 1.
        assert_eq!(r.k_g, 1.0);
        assert!(!r.is_nc_g_only);
    }

    #[test]
    fn powers() {
        let m = real_line();
        let r = check_power_contraction(&m, &MapSpec::affine_scalar(0.5, 0.0), 3, 300, 1, &GRID, 1e-3).unwrap();
        assert!(r.passed);
        assert!((r.rows[1].measured - 0.125).abs() <= 1e-9);
        let r = check_power_contraction(&m, &MapSpec::affine_scalar(0.9, 0.0), 5, 300, 1, &GRID, 1e-3).unwrap();
        assert!(r.passed);
        assert!((r.rows[3].measured - 0.59049).abs() <= 1e-9);
        let r = check_power_contraction(&m, &MapSpec::constant(Point::scalar(0.0)), 4, 50, 1, &GRID, 1e-3).unwrap();
        assert!(r.passed && r.rows.iter().all(|row| row.measured == 0.0));
        assert!(check_power_contraction(&m, &MapSpec::constant(Point::scalar(0.0)), 1, 50, 1, &GRID, 1e-3).is_err());
    }

    #[test]
    fn ball_invariance_affine() {
        let m = real_line();
        let fam = QuasiMetricFamily::with_defaults(&m);
        let cfg = BallInvarianceConfig { epsilon: 0.5, k: 0.5, radius: Some(3.0), n_max: 3, probe_count: 100, seed: 2 };
        let r = check_ball_invariance(&fam, &MapSpec::affine_scalar(0.5, 1.0), &Point::scalar(0.0), &cfg).unwrap();
        assert!((r.r0 - 2.0).abs() <= 1e-5);
        assert!(r.passed, "{:?}", r.examples);
        assert!(r.members > 100);
        assert!((r.image_balls[1].bound - (0.75 + 1e-6)).abs() < 1e-12);
        assert!(r.image_balls[1].max_h < 0.75);
    }

    #[test]
    fn ball_invariance_fixed_center() {
        let m = real_line();
        let fam = QuasiMetricFamily::with_defaults(&m);
        let cfg = BallInvarianceConfig { epsilon: 0.5, k: 0.5, radius: None, n_max: 2, probe_count: 30, seed: 2 };
        let r = check_ball_invariance(&fam, &MapSpec::affine_scalar(0.5, 1.0), &Point::scalar(2.0), &cfg).unwrap();
        assert_eq!(r.r0, 0.0);
        assert!(r.passed);
        let bad = BallInvarianceConfig { k: 1.0, ..cfg };
        assert!(matches!(
            check_ball_invariance(&fam, &MapSpec::affine_scalar(0.5, 1.0), &Point::scalar(2.0), &bad),
            Err(Error::Precondition(_))
        ));
    }
}

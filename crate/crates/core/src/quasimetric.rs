//! The level-indexed quasi-metrics `h_ε` induced by a neutrosophic metric,
//! and open balls.
//!
//! `h_ε(a, b)` is the infimum of the scales λ > 0 at which the pair is
//! `ε`-close:
//!
//! ```text
//! P(λ) := G(a, b, λ) > 1 − ε  ∧  B(a, b, λ) < ε  ∧  Y(a, b, λ) < ε
//! h_ε(a, b) = inf { λ > 0 : P(λ) }
//! ```
//!
//! Nothing forces `P` to be monotone in λ, so the search first probes a
//! coarse log-spaced grid. When the probe sees a single false-to-true switch
//! it bisects inside that bracket; otherwise it scans a fine grid for the
//! first true point and bisects the bracket in front of it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nms::NeutroMetric;
use crate::space::{GroundSpace, Point};

pub const DEFAULT_LAMBDA_MAX: f64 = 1e6;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const MAX_BISECTION_ITERS: usize = 80;
/// Levels used by the sampled family and topology checks.
pub const EPSILON_LEVELS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

const COARSE_PROBES: usize = 64;
const FINE_PROBES: usize = 4096;
const MAX_REPORTED: usize = 16;

#[derive(Debug, Clone, Copy)]
pub struct QuasiMetricFamily<'a> {
    metric: &'a NeutroMetric,
    lambda_max: f64,
    tol: f64,
}

impl<'a> QuasiMetricFamily<'a> {
    pub fn new(metric: &'a NeutroMetric, lambda_max: f64, tol: f64) -> Result<Self> {
        if !(lambda_max > 0.0 && lambda_max.is_finite()) {
            return Err(Error::Precondition(format!("lambda_max = {lambda_max} must be positive and finite")));
        }
        if !(tol > 0.0 && tol < lambda_max) {
            return Err(Error::Precondition(format!("tol = {tol} must lie in (0, lambda_max)")));
        }
        Ok(QuasiMetricFamily { metric, lambda_max, tol })
    }

    pub fn with_defaults(metric: &'a NeutroMetric) -> Self {
        QuasiMetricFamily { metric, lambda_max: DEFAULT_LAMBDA_MAX, tol: DEFAULT_TOL }
    }

    pub fn metric(&self) -> &'a NeutroMetric {
        self.metric
    }

    pub fn space(&self) -> &'a GroundSpace {
        self.metric.space()
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// The feasibility predicate `P(λ)` at level `epsilon`.
    pub fn close_at(&self, a: &Point, b: &Point, epsilon: f64, lambda: f64) -> Result<bool> {
        Ok(self.metric.eval_triple(a, b, lambda)?.within(epsilon))
    }

    /// `h_ε(a, b)`, accurate to within `tol`.
    ///
    /// Returns 0 without searching when `a = b`, when `ε = 1`, or when the
    /// pair is already `ε`-close at `λ = tol / 2`.
    pub fn h_eps(&self, a: &Point, b: &Point, epsilon: f64) -> Result<f64> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Domain(format!("epsilon = {epsilon} must lie in (0, 1]")));
        }
        let space = self.metric.space();
        space.check_point(a)?;
        space.check_point(b)?;
        if a == b || epsilon == 1.0 {
            return Ok(0.0);
        }

        let p = |l: f64| -> bool { self.metric.eval_triple(a, b, l).expect("points already checked").within(epsilon) };
        if !p(self.lambda_max) {
            return Err(Error::CeilingTooSmall { lambda_max: self.lambda_max });
        }
        let floor = self.tol / 2.0;
        if p(floor) {
            return Ok(0.0);
        }

        let coarse = log_grid(floor, self.lambda_max, COARSE_PROBES);
        let states: Vec<bool> = coarse.iter().map(|&l| p(l)).collect();
        let first = states.iter().position(|&s| s).expect("P holds at lambda_max");
        let monotone = states[first..].iter().all(|&s| s);

        let (lo, hi) = if monotone {
            (coarse[first - 1], coarse[first])
        } else {
            let fine = log_grid(floor, self.lambda_max, FINE_PROBES);
            let j = fine.iter().position(|&l| p(l)).expect("P holds at lambda_max");
            (fine[j - 1], fine[j])
        };
        Ok(self.bisect(lo, hi, p))
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, p: impl Fn(f64) -> bool) -> f64 {
        let width = self.tol / 2.0;
        for _ in 0..MAX_BISECTION_ITERS {
            if hi - lo <= width {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if p(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// `count` log-spaced values from `lo` to `hi`, both included.
fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect();
    grid[0] = lo;
    grid[count - 1] = hi;
    grid
}

/// `O(center, ε, λ) = { b : G(center, b, λ) > 1 − ε, B < ε, Y < ε }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenBall {
    pub center: Point,
    pub epsilon: f64,
    pub lambda: f64,
}

impl OpenBall {
    pub fn new(center: Point, epsilon: f64, lambda: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!("ball radius epsilon = {epsilon} must lie in (0, 1)")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("ball scale lambda = {lambda} must be positive")));
        }
        Ok(OpenBall { center, epsilon, lambda })
    }
}

pub fn ball_contains(metric: &NeutroMetric, ball: &OpenBall, b: &Point) -> Result<bool> {
    Ok(metric.eval_triple(&ball.center, b, ball.lambda)?.within(ball.epsilon))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuasiViolation {
    /// `h_ε(a, a) ≠ 0`.
    SelfDistance { a: Point, epsilon: f64, h: f64 },
    /// `h_ε(a, b) = h_ε(b, a) = 0` although `a ≠ b`.
    Indiscernible { a: Point, b: Point, epsilon: f64 },
    /// `h_ε(a, c) > h_ε(a, b) + h_ε(b, c) + 2·tol`.
    Triangle { a: Point, b: Point, c: Point, epsilon: f64, direct: f64, via: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiFamilyReport {
    pub samples: usize,
    pub seed: u64,
    pub identity_checks: usize,
    pub triangle_checks: usize,
    /// Largest `|h_ε(a, b) − h_ε(b, a)|` seen. Informational: quasi-metrics
    /// need not be symmetric.
    pub max_asymmetry: f64,
    pub failures: usize,
    pub violations: Vec<QuasiViolation>,
    pub passed: bool,
}

/// Checks the quasi-metric axioms of `h_ε` at `sample_count` seeded triples,
/// cycling `ε` through [`EPSILON_LEVELS`]. Identity is checked over all
/// pairs on finite spaces.
pub fn check_quasi_family(family: &QuasiMetricFamily, sample_count: usize, seed: u64) -> Result<QuasiFamilyReport> {
    let space = family.space();
    let tol = family.tol();
    let mut violations = Vec::new();
    let mut failures = 0usize;
    let mut note = |v: QuasiViolation, violations: &mut Vec<QuasiViolation>| {
        failures += 1;
        if violations.len() < MAX_REPORTED {
            violations.push(v);
        }
    };
    let mut identity_checks = 0;
    let mut triangle_checks = 0;
    let mut max_asymmetry: f64 = 0.0;

    let mut identity = |a: &Point, b: &Point, eps: f64, violations: &mut Vec<QuasiViolation>| -> Result<()> {
        identity_checks += 1;
        let ab = family.h_eps(a, b, eps)?;
        let ba = family.h_eps(b, a, eps)?;
        max_asymmetry = max_asymmetry.max((ab - ba).abs());
        if a == b {
            if ab != 0.0 {
                note(QuasiViolation::SelfDistance { a: a.clone(), epsilon: eps, h: ab }, violations);
            }
        } else if ab == 0.0 && ba == 0.0 {
            note(QuasiViolation::Indiscernible { a: a.clone(), b: b.clone(), epsilon: eps }, violations);
        }
        Ok(())
    };

    if let Some(all) = space.points() {
        for a in &all {
            for b in &all {
                for eps in EPSILON_LEVELS {
                    identity(a, b, eps, &mut violations)?;
                }
            }
        }
    }

    let points = space.sample_points(3 * sample_count, seed);
    let mut triangles = Vec::with_capacity(sample_count);
    for (i, tri) in points.chunks_exact(3).enumerate() {
        let eps = EPSILON_LEVELS[i % EPSILON_LEVELS.len()];
        let (a, b, c) = (&tri[0], &tri[1], &tri[2]);
        if !space.is_finite() {
            identity(a, a, eps, &mut violations)?;
            identity(a, b, eps, &mut violations)?;
        }
        triangles.push((a, b, c, eps));
    }
    for (a, b, c, eps) in triangles {
        triangle_checks += 1;
        let direct = family.h_eps(a, c, eps)?;
        let via = family.h_eps(a, b, eps)? + family.h_eps(b, c, eps)?;
        if direct > via + 2.0 * tol {
            note(
                QuasiViolation::Triangle { a: a.clone(), b: b.clone(), c: c.clone(), epsilon: eps, direct, via },
                &mut violations,
            );
        }
    }

    Ok(QuasiFamilyReport {
        samples: sample_count,
        seed,
        identity_checks,
        triangle_checks,
        max_asymmetry,
        failures,
        passed: failures == 0,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "direction", rename_all = "snake_case")]
pub enum TopologyViolation {
    /// `h_ε(a, b) < λ` but the pair is not `ε`-close at λ.
    Forward { a: Point, b: Point, epsilon: f64, lambda: f64, h: f64 },
    /// The pair is `ε`-close at λ but `h_ε(a, b) > λ`.
    Converse { a: Point, b: Point, epsilon: f64, lambda: f64, h: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub samples: usize,
    pub seed: u64,
    pub forward_checks: usize,
    pub converse_checks: usize,
    /// Samples with `|h_ε(a, b) − λ| ≤ tol`, where neither direction is
    /// required.
    pub boundary_skips: usize,
    pub failures: usize,
    pub violations: Vec<TopologyViolation>,
    pub passed: bool,
}

/// Checks `h_ε(a, b) < λ ⟺ P(λ)` at sampled `(a, b, ε, λ)`, with `tol`
/// slack at the infimum boundary.
///
/// Half of the scales are drawn relative to `h_ε(a, b)` (uniform in
/// `(0, 2h)`) so both sides of the boundary are exercised; the rest are
/// log-uniform in `[1e−2, 1e3]`.
pub fn check_topology_equivalence(
    family: &QuasiMetricFamily,
    sample_count: usize,
    seed: u64,
) -> Result<TopologyReport> {
    let space = family.space();
    let tol = family.tol();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TopologyReport {
        samples: sample_count,
        seed,
        forward_checks: 0,
        converse_checks: 0,
        boundary_skips: 0,
        failures: 0,
        violations: Vec::new(),
        passed: true,
    };

    for i in 0..sample_count {
        let a = space.sample_one(&mut rng);
        let b = space.sample_one(&mut rng);
        let eps = EPSILON_LEVELS[i % EPSILON_LEVELS.len()];
        let h = family.h_eps(&a, &b, eps)?;
        let lambda =
            if i % 2 == 0 && h > 0.0 { rng.gen_range(0.0..2.0) * h } else { 10f64.powf(rng.gen_range(-2.0..3.0)) };
        if !(lambda > 0.0) {
            continue;
        }
        if (h - lambda).abs() <= tol {
            report.boundary_skips += 1;
            continue;
        }
        let close = family.close_at(&a, &b, eps, lambda)?;
        let mut fail = None;
        if h < lambda {
            report.forward_checks += 1;
            if !close {
                fail = Some(TopologyViolation::Forward { a: a.clone(), b: b.clone(), epsilon: eps, lambda, h });
            }
        }
        if close {
            report.converse_checks += 1;
            if h > lambda + tol {
                fail = Some(TopologyViolation::Converse { a, b, epsilon: eps, lambda, h });
            }
        }
        if let Some(v) = fail {
            report.failures += 1;
            if report.violations.len() < MAX_REPORTED {
                report.violations.push(v);
            }
        }
    }
    report.passed = report.failures == 0;
    Ok(report)
}

/// A smaller ball around a member that stays inside the original ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerBall {
    pub member: Point,
    pub epsilon: f64,
    pub lambda: f64,
    /// Probe points that fell inside the inner ball.
    pub probes_inside: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum MemberOutcome {
    NotMember,
    Witness(InnerBall),
    NoWitness { member: Point },
}

const INNER_SHRINK_STEPS: usize = 48;
const PROBE_DIRECTIONS: usize = 8;

/// Directions along which inner balls are probed: both signs of every axis
/// plus a few random unit vectors.
fn probe_directions<R: Rng>(dim: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut dirs = Vec::with_capacity(2 * dim + PROBE_DIRECTIONS);
    for axis in 0..dim {
        for sign in [-1.0, 1.0] {
            let mut u = vec![0.0; dim];
            u[axis] = sign;
            dirs.push(u);
        }
    }
    if dim > 1 {
        for _ in 0..PROBE_DIRECTIONS {
            let u: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                dirs.push(u.into_iter().map(|x| x / norm).collect());
            }
        }
    }
    dirs
}

/// Largest `t` (up to `cap`) with `origin + t·u` in `ball`, by doubling and
/// bisection.
fn extent_along(metric: &NeutroMetric, ball: &OpenBall, origin: &[f64], u: &[f64], cap: f64) -> Result<f64> {
    let at = |t: f64| Point::Coords(origin.iter().zip(u).map(|(o, d)| o + t * d).collect());
    let mut hi = 1e-12;
    while hi < cap && ball_contains(metric, ball, &at(hi))? {
        hi *= 2.0;
    }
    if hi >= cap {
        return Ok(cap);
    }
    let mut lo = hi / 2.0;
    if !ball_contains(metric, ball, &at(lo))? {
        return Ok(0.0);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ball_contains(metric, ball, &at(mid))? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Probe points inside `inner`: every finite point in it, or on Euclidean
/// spaces the points just inside its boundary and halfway out along each
/// probe direction.
fn inner_probes(metric: &NeutroMetric, inner: &OpenBall, dirs: &[Vec<f64>]) -> Result<Vec<Point>> {
    let space = metric.space();
    if let Some(all) = space.points() {
        let mut inside = Vec::new();
        for p in all {
            if ball_contains(metric, inner, &p)? {
                inside.push(p);
            }
        }
        return Ok(inside);
    }
    let origin = inner.center.coords().expect("euclidean point");
    let mut probes = Vec::with_capacity(2 * dirs.len());
    for u in dirs {
        let t = extent_along(metric, inner, origin, u, 1e12)?;
        for s in [t * (1.0 - 1e-9), 0.5 * t] {
            if s > 0.0 {
                let p = Point::Coords(origin.iter().zip(u).map(|(o, d)| o + s * d).collect());
                if ball_contains(metric, inner, &p)? {
                    probes.push(p);
                }
            }
        }
    }
    Ok(probes)
}

/// Searches for `(ε', λ)` with `ε' = ε·2^{−j}` such that every probe point
/// of `O(member, ε', λ)` lies in `ball`. On Euclidean spaces the inner ball
/// must contain at least one probe besides the member itself.
pub fn inner_ball_witness(metric: &NeutroMetric, ball: &OpenBall, member: &Point, seed: u64) -> Result<MemberOutcome> {
    if !ball_contains(metric, ball, member)? {
        return Ok(MemberOutcome::NotMember);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = metric.space();
    let dirs = probe_directions(space.dimension().unwrap_or(0), &mut rng);

    let mut eps = ball.epsilon;
    for _ in 0..INNER_SHRINK_STEPS {
        let inner = OpenBall { center: member.clone(), epsilon: eps, lambda: ball.lambda };
        let probes = inner_probes(metric, &inner, &dirs)?;
        let mut escaped = false;
        for p in &probes {
            if !ball_contains(metric, ball, p)? {
                escaped = true;
                break;
            }
        }
        let inside = probes.iter().filter(|p| *p != member).count();
        if !escaped && (space.is_finite() || inside > 0) {
            return Ok(MemberOutcome::Witness(InnerBall {
                member: member.clone(),
                epsilon: eps,
                lambda: ball.lambda,
                probes_inside: inside,
            }));
        }
        eps *= 0.5;
    }
    Ok(MemberOutcome::NoWitness { member: member.clone() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallOpenReport {
    pub ball: OpenBall,
    pub members_checked: usize,
    pub witnesses_found: usize,
    pub examples: Vec<InnerBall>,
    pub failures: Vec<Point>,
    pub passed: bool,
}

/// Samples up to `probe_count` members of `ball` (the center always
/// included) and looks for an inner-ball witness around each.
///
/// On Euclidean spaces members are drawn from a cube around the center
/// sized to the ball's extent along the first axis.
pub fn check_ball_open(
    metric: &NeutroMetric,
    ball: &OpenBall,
    probe_count: usize,
    seed: u64,
) -> Result<BallOpenReport> {
    let space = metric.space();
    space.check_point(&ball.center)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut members = vec![ball.center.clone()];
    match space.points() {
        Some(all) => members.extend(all.into_iter().filter(|p| *p != ball.center).take(probe_count)),
        None => {
            let center = ball.center.coords().expect("euclidean center").to_vec();
            let mut e1 = vec![0.0; center.len()];
            e1[0] = 1.0;
            let half_width = extent_along(metric, ball, &center, &e1, 1e12)?.max(1e-12);
            let mut attempts = 0;
            while members.len() <= probe_count && attempts < 50 * probe_count.max(1) {
                attempts += 1;
                let p = Point::Coords(center.iter().map(|c| c + half_width * rng.gen_range(-1.0..=1.0)).collect());
                if ball_contains(metric, ball, &p)? {
                    members.push(p);
                }
            }
        }
    }
    members.retain(|m| ball_contains(metric, ball, m).unwrap_or(false));

    let mut report = BallOpenReport {
        ball: ball.clone(),
        members_checked: 0,
        witnesses_found: 0,
        examples: Vec::new(),
        failures: Vec::new(),
        passed: true,
    };
    for m in &members {
        report.members_checked += 1;
        match inner_ball_witness(metric, ball, m, rng.gen())? {
            MemberOutcome::Witness(w) => {
                report.witnesses_found += 1;
                if report.examples.len() < MAX_REPORTED {
                    report.examples.push(w);
                }
            }
            MemberOutcome::NoWitness { member } => report.failures.push(member),
            MemberOutcome::NotMember => {}
        }
    }
    report.passed = report.failures.is_empty();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nms::{MetricTable, Triple};
    use crate::norms::{TriangularConorm, TriangularNorm};

    fn real_line() -> NeutroMetric {
        NeutroMetric::induced_from_crisp(
            GroundSpace::euclidean_cube(1, -10.0, 10.0).unwrap(),
            TriangularNorm::Product,
            TriangularConorm::ProbabilisticSum,
        )
        .unwrap()
    }

    /// Hierarchical grid scan for the first λ with `P(λ)`: step 0.1 on
    /// `[0, upper]`, then 1e−3, then 1e−5 inside the bracket found. Returns
    /// the midpoint of the final bracket.
    fn scan_oracle(family: &QuasiMetricFamily, a: &Point, b: &Point, eps: f64, upper: f64) -> f64 {
        let p = |l: f64| l > 0.0 && family.close_at(a, b, eps, l).unwrap();
        let mut lo = 0.0;
        let mut hi = upper;
        for step in [0.1, 1e-3, 1e-5] {
            let n = ((hi - lo) / step).ceil() as usize;
            let first = (0..=n).map(|i| lo + i as f64 * step).find(|&l| p(l)).unwrap();
            lo = (first - step).max(0.0);
            hi = first;
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn h_eps_examples() {
        let m = real_line();
        let fam = QuasiMetricFamily::with_defaults(&m);
        let (a, b) = (Point::scalar(0.0), Point::scalar(1.0));
        assert!((fam.h_eps(&a, &b, 0.5).unwrap() - 1.0).abs() <= 1e-6);
        assert!((fam.h_eps(&a, &b, 0.25).unwrap() - 3.0).abs() <= 1e-6);
        assert_eq!(fam.h_eps(&a, &a, 0.3).unwrap(), 0.0);
        assert_eq!(fam.h_eps(&a, &b, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn h_eps_agrees_with_scan_oracle() {
        let m = real_line();
        let fam = QuasiMetricFamily::with_defaults(&m);
        for (x, y) in [(0.0, 1.0), (-3.0, 2.5), (7.25, -1.0), (0.0, 0.001)] {
            let (a, b) = (Point::scalar(x), Point::scalar(y));
            for eps in EPSILON_LEVELS {
                let h = fam.h_eps(&a, &b, eps).unwrap();
                let oracle = scan_oracle(&fam, &a, &b, eps, 100.0);
                assert!((h - oracle).abs() <= 1e-5, "{x} {y} {eps}: {h} vs {oracle}");
            }
        }
    }

    #[test]
    fn h_eps_errors() {
        let m = real_line();
        let fam = QuasiMetricFamily::new(&m, 10.0, 1e-6).unwrap();
        let (a, b) = (Point::scalar(-10.0), Point::scalar(10.0));
        // h_0.1 = 20·9 = 180 > 10.
        assert!(matches!(fam.h_eps(&a, &b, 0.1), Err(Error::CeilingTooSmall { .. })));
        assert!(matches!(fam.h_eps(&a, &b, 0.0), Err(Error::Domain(_))));
        assert!(matches!(fam.h_eps(&a, &b, 1.5), Err(Error::Domain(_))));
        assert!(QuasiMetricFamily::new(&m, 0.0, 1e-6).is_err());
        assert!(QuasiMetricFamily::new(&m, 1.0, 0.0).is_err());
    }

    #[test]
    fn non_monotone_predicate_uses_fine_scan() {
        // G dips below 1 − ε again on [3, 5] before settling; the infimum is
        // still the first crossing near λ = 1.
        let knots = [0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 1e6];
        let g_at = |l: f64| match l {
            l if l <= 0.5 => 0.2,
            l if l <= 1.0 => 0.2,
            l if l <= 2.0 => 0.9,
            l if l <= 3.0 => 0.3,
            l if l <= 5.0 => 0.3,
            _ => 0.95,
        };
        let table = MetricTable::tabulate(2, &knots, |a, b, l| {
            if a == b {
                Triple::IDENTICAL
            } else {
                let g = g_at(l);
                Triple::new(g, 1.0 - g, 1.0 - g)
            }
        })
        .unwrap();
        let m = NeutroMetric::from_table(
            GroundSpace::discrete(2).unwrap(),
            TriangularNorm::Product,
            TriangularConorm::ProbabilisticSum,
            table,
        )
        .unwrap();
        let fam = QuasiMetricFamily::with_defaults(&m);
        let (a, b) = (Point::Index(0), Point::Index(1));
        // Interpolating 0.2 → 0.9 on [1, 2], G > 0.5 first at λ = 1 + 3/7.
        let h = fam.h_eps(&a, &b, 0.5).unwrap();
        assert!((h - (1.0 + 3.0 / 7.0)).abs() <= 1e-6, "{h}");
        assert!((h - scan_oracle(&fam, &a, &b, 0.5, 10.0)).abs() <= 1e-5);
    }

    #[test]
    fn family_checks_pass_on_induced() {
        let m = real_line();
        let fam = QuasiMetricFamily::with_defaults(&m);
        let r = check_quasi_family(&fam, 200, 4).unwrap();
        assert!(r.passed, "{:?}", r.violations);
        assert!(r.max_asymmetry <= 1e-6);
        let t = check_topology_equivalence(&fam, 300, 4).unwrap();
        assert!(t.passed, "{:?}", t.violations);
        assert!(t.forward_checks > 50 && t.converse_checks > 50);
    }

    #[test]
    fn family_identity_on_finite() {
        let m = NeutroMetric::induced_from_crisp(
            GroundSpace::discrete(3).unwrap(),
            TriangularNorm::Product,
            TriangularConorm::ProbabilisticSum,
        )
        .unwrap();
        let fam = QuasiMetricFamily::with_defaults(&m);
        let r = check_quasi_family(&fam, 20, 0).unwrap();
        assert!(r.passed);
        assert_eq!(r.identity_checks, 9 * EPSILON_LEVELS.len());
    }

    #[test]
    fn degenerate_triple() {
        let m = real_line();
        let fam = QuasiMetricFamily::with_defaults(&m);
        let a = Point::scalar(1.5);
        assert_eq!(fam.h_eps(&a, &a, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn topology_example() {
        let m = real_line();
        let fam = QuasiMetricFamily::with_defaults(&m);
        let (a, b) = (Point::scalar(0.0), Point::scalar(1.0));
        let h = fam.h_eps(&a, &b, 0.5).unwrap();
        assert!(h < 2.0);
        let t = m.eval_triple(&a, &b, 2.0).unwrap();
        assert!((t.g - 2.0 / 3.0).abs() < 1e-15 && (t.b - 1.0 / 3.0).abs() < 1e-15);
        assert!(fam.close_at(&a, &b, 0.5, 2.0).unwrap());
    }

    #[test]
    fn ball_membership() {
        let m = real_line();
        let ball = OpenBall::new(Point::scalar(0.0), 0.5, 1.0).unwrap();
        assert!(ball_contains(&m, &ball, &Point::scalar(0.0)).unwrap());
        assert!(ball_contains(&m, &ball, &Point::scalar(0.5)).unwrap());
        assert!(!ball_contains(&m, &ball, &Point::scalar(1.5)).unwrap());
        assert!(OpenBall::new(Point::scalar(0.0), 1.0, 1.0).is_err());
        assert!(OpenBall::new(Point::scalar(0.0), 0.5, 0.0).is_err());
    }

    #[test]
    fn inner_balls() {
        let m = real_line();
        let ball = OpenBall::new(Point::scalar(0.0), 0.5, 1.0).unwrap();
        match inner_ball_witness(&m, &ball, &Point::scalar(0.9), 1).unwrap() {
            MemberOutcome::Witness(w) => {
                // Crisp radius of the inner ball must be below 0.1.
                assert!(w.epsilon * w.lambda / (1.0 - w.epsilon) < 0.1);
                assert!(w.probes_inside > 0);
            }
            other => panic!("{other:?}"),
        }
        match inner_ball_witness(&m, &ball, &Point::scalar(0.0), 1).unwrap() {
            MemberOutcome::Witness(w) => assert_eq!(w.epsilon, 0.5),
            other => panic!("{other:?}"),
        }
        assert_eq!(inner_ball_witness(&m, &ball, &Point::scalar(3.0), 1).unwrap(), MemberOutcome::NotMember);
    }

    #[test]
    fn balls_are_open() {
        let m = real_line();
        let ball = OpenBall::new(Point::scalar(0.0), 0.5, 1.0).unwrap();
        let r = check_ball_open(&m, &ball, 50, 2).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert!(r.members_checked > 40);

        let disc = NeutroMetric::induced_from_crisp(
            GroundSpace::discrete(4).unwrap(),
            TriangularNorm::Product,
            TriangularConorm::ProbabilisticSum,
        )
        .unwrap();
        let ball = OpenBall::new(Point::Index(1), 0.6, 2.0).unwrap();
        let r = check_ball_open(&disc, &ball, 10, 2).unwrap();
        assert!(r.passed);
        assert_eq!(r.members_checked, 4);
    }
}

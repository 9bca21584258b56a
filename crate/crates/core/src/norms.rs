//! Continuous triangular norms and conorms on the unit interval.
//!
//! The built-in set is the three classic t-norms (minimum, product,
//! Łukasiewicz) and their De Morgan duals (maximum, probabilistic sum,
//! bounded sum). Each operation can be checked against the defining axioms
//! by seeded sampling, and the two existence statements that the metric
//! machinery leans on (a lower solver `s ∘ u ≥ t` and the diagonal solver
//! `t ∘ t ≥ s`, `p • p ≤ s`) are provided as grid searches.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Perturbation used by the continuity check.
pub const CONTINUITY_DELTA: f64 = 1e-6;
/// Lipschitz bound accepted by the continuity check. Every built-in
/// operation is Lipschitz with constant at most 2.
pub const CONTINUITY_LIPSCHITZ: f64 = 2.0;
/// Default step for the grid solvers.
pub const DEFAULT_GRID_STEP: f64 = 1e-4;

/// A continuous t-norm (the `∘` operation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum TriangularNorm {
    #[serde(rename = "min")]
    Minimum,
    #[serde(rename = "product")]
    #[default]
    Product,
    #[serde(rename = "lukasiewicz")]
    Lukasiewicz,
}

/// A continuous t-conorm (the `•` operation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum TriangularConorm {
    #[serde(rename = "max")]
    Maximum,
    #[serde(rename = "probsum")]
    #[default]
    ProbabilisticSum,
    #[serde(rename = "boundedsum")]
    BoundedSum,
}

fn check_unit(label: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{label} = {x} is outside [0, 1]")))
    }
}

impl TriangularNorm {
    pub const ALL: [TriangularNorm; 3] =
        [TriangularNorm::Minimum, TriangularNorm::Product, TriangularNorm::Lukasiewicz];

    /// Config identifier.
    pub fn id(self) -> &'static str {
        match self {
            TriangularNorm::Minimum => "min",
            TriangularNorm::Product => "product",
            TriangularNorm::Lukasiewicz => "lukasiewicz",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TriangularNorm::Minimum => "minimum",
            TriangularNorm::Product => "product",
            TriangularNorm::Lukasiewicz => "lukasiewicz",
        }
    }

    /// Evaluates `s ∘ t` without range checks.
    #[inline]
    pub fn apply(self, s: f64, t: f64) -> f64 {
        match self {
            TriangularNorm::Minimum => s.min(t),
            TriangularNorm::Product => s * t,
            TriangularNorm::Lukasiewicz => (s + t - 1.0).max(0.0),
        }
    }

    /// Evaluates `s ∘ t`, rejecting arguments outside `[0, 1]`.
    pub fn eval(self, s: f64, t: f64) -> Result<f64> {
        check_unit("s", s)?;
        check_unit("t", t)?;
        Ok(self.apply(s, t))
    }
}

impl TriangularConorm {
    pub const ALL: [TriangularConorm; 3] =
        [TriangularConorm::Maximum, TriangularConorm::ProbabilisticSum, TriangularConorm::BoundedSum];

    pub fn id(self) -> &'static str {
        match self {
            TriangularConorm::Maximum => "max",
            TriangularConorm::ProbabilisticSum => "probsum",
            TriangularConorm::BoundedSum => "boundedsum",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TriangularConorm::Maximum => "maximum",
            TriangularConorm::ProbabilisticSum => "probabilistic_sum",
            TriangularConorm::BoundedSum => "bounded_sum",
        }
    }

    #[inline]
    pub fn apply(self, s: f64, t: f64) -> f64 {
        match self {
            TriangularConorm::Maximum => s.max(t),
            TriangularConorm::ProbabilisticSum => s + t - s * t,
            TriangularConorm::BoundedSum => (s + t).min(1.0),
        }
    }

    pub fn eval(self, s: f64, t: f64) -> Result<f64> {
        check_unit("s", s)?;
        check_unit("t", t)?;
        Ok(self.apply(s, t))
    }

    /// The t-norm this conorm is De Morgan dual to.
    pub fn dual(self) -> TriangularNorm {
        match self {
            TriangularConorm::Maximum => TriangularNorm::Minimum,
            TriangularConorm::ProbabilisticSum => TriangularNorm::Product,
            TriangularConorm::BoundedSum => TriangularNorm::Lukasiewicz,
        }
    }
}

impl FromStr for TriangularNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TriangularNorm::ALL
            .into_iter()
            .find(|n| n.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown t-norm `{s}` (expected min, product, lukasiewicz)")))
    }
}

impl FromStr for TriangularConorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TriangularConorm::ALL
            .into_iter()
            .find(|n| n.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown t-conorm `{s}` (expected max, probsum, boundedsum)")))
    }
}

impl fmt::Display for TriangularNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl fmt::Display for TriangularConorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Whether an operation is checked as a t-norm (identity 1) or a t-conorm
/// (identity 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperationClass {
    Norm,
    Conorm,
}

impl OperationClass {
    pub fn identity(self) -> f64 {
        match self {
            OperationClass::Norm => 1.0,
            OperationClass::Conorm => 0.0,
        }
    }
}

/// A binary operation on `[0, 1]` that can be fed to [`check_norm_axioms`].
pub trait BinaryOperation {
    fn class(&self) -> OperationClass;
    fn label(&self) -> String;
    fn apply(&self, s: f64, t: f64) -> f64;
}

impl BinaryOperation for TriangularNorm {
    fn class(&self) -> OperationClass {
        OperationClass::Norm
    }
    fn label(&self) -> String {
        self.name().to_string()
    }
    fn apply(&self, s: f64, t: f64) -> f64 {
        TriangularNorm::apply(*self, s, t)
    }
}

impl BinaryOperation for TriangularConorm {
    fn class(&self) -> OperationClass {
        OperationClass::Conorm
    }
    fn label(&self) -> String {
        self.name().to_string()
    }
    fn apply(&self, s: f64, t: f64) -> f64 {
        TriangularConorm::apply(*self, s, t)
    }
}

/// An arbitrary closure presented as a norm or conorm candidate, mostly for
/// mutation tests.
pub struct CustomOperation<F> {
    pub label: String,
    pub class: OperationClass,
    pub op: F,
}

impl<F: Fn(f64, f64) -> f64> BinaryOperation for CustomOperation<F> {
    fn class(&self) -> OperationClass {
        self.class
    }
    fn label(&self) -> String {
        self.label.clone()
    }
    fn apply(&self, s: f64, t: f64) -> f64 {
        (self.op)(s, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormAxiom {
    Boundary,
    Range,
    Monotone,
    Commutative,
    Associative,
    Continuity,
}

impl NormAxiom {
    pub const ALL: [NormAxiom; 6] = [
        NormAxiom::Boundary,
        NormAxiom::Range,
        NormAxiom::Monotone,
        NormAxiom::Commutative,
        NormAxiom::Associative,
        NormAxiom::Continuity,
    ];
}

/// Sampled arguments that violate an axiom, with both sides of the failed
/// comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormWitness {
    pub s: f64,
    pub t: f64,
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormAxiomOutcome {
    pub axiom: NormAxiom,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    pub witness: Option<NormWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormAxiomReport {
    pub operation: String,
    pub class: OperationClass,
    pub samples: usize,
    pub seed: u64,
    pub outcomes: Vec<NormAxiomOutcome>,
}

impl NormAxiomReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn outcome(&self, axiom: NormAxiom) -> &NormAxiomOutcome {
        self.outcomes.iter().find(|o| o.axiom == axiom).expect("every axiom has an outcome")
    }

    pub fn failing(&self) -> Vec<NormAxiom> {
        self.outcomes.iter().filter(|o| !o.passed).map(|o| o.axiom).collect()
    }
}

struct Tally {
    axiom: NormAxiom,
    checks: usize,
    failures: usize,
    witness: Option<NormWitness>,
}

impl Tally {
    fn new(axiom: NormAxiom) -> Self {
        Tally { axiom, checks: 0, failures: 0, witness: None }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> NormWitness) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    fn finish(self) -> NormAxiomOutcome {
        NormAxiomOutcome {
            axiom: self.axiom,
            passed: self.failures == 0,
            checks: self.checks,
            failures: self.failures,
            witness: self.witness,
        }
    }
}

/// Checks boundary, range, monotonicity, commutativity, associativity and
/// continuity of `op` at `sample_count` seeded tuples `(s, t, u, v)`.
///
/// Equalities are compared with tolerance `tol`. Continuity is checked as
/// `|op(s + δ, t) − op(s, t)| ≤ L·δ` (and the same in `t`) with
/// `δ = 1e−6`, `L = 2`.
pub fn check_norm_axioms<O: BinaryOperation + ?Sized>(
    op: &O,
    sample_count: usize,
    seed: u64,
    tol: f64,
) -> Result<NormAxiomReport> {
    if sample_count == 0 {
        return Err(Error::Precondition("sample_count must be at least 1".into()));
    }
    let identity = op.class().identity();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut boundary = Tally::new(NormAxiom::Boundary);
    let mut range = Tally::new(NormAxiom::Range);
    let mut monotone = Tally::new(NormAxiom::Monotone);
    let mut commutative = Tally::new(NormAxiom::Commutative);
    let mut associative = Tally::new(NormAxiom::Associative);
    let mut continuity = Tally::new(NormAxiom::Continuity);

    // Endpoints first so boundary behaviour at 0 and 1 is always covered.
    for s in [0.0, 1.0] {
        let r = op.apply(s, identity);
        boundary.record((r - s).abs() <= tol, || NormWitness { s, t: identity, u: None, v: None, lhs: r, rhs: s });
    }

    let bound = CONTINUITY_LIPSCHITZ * CONTINUITY_DELTA * (1.0 + 1e-9);
    for _ in 0..sample_count {
        let s: f64 = rng.gen();
        let t: f64 = rng.gen();
        let u: f64 = rng.gen();
        let v: f64 = rng.gen();

        let st = op.apply(s, t);
        let ts = op.apply(t, s);

        let r = op.apply(s, identity);
        boundary.record((r - s).abs() <= tol, || NormWitness { s, t: identity, u: None, v: None, lhs: r, rhs: s });

        range.record(st.is_finite() && (0.0..=1.0).contains(&st), || NormWitness {
            s,
            t,
            u: None,
            v: None,
            lhs: st,
            rhs: if st < 0.0 { 0.0 } else { 1.0 },
        });

        let (s_lo, s_hi) = if s <= u { (s, u) } else { (u, s) };
        let (t_lo, t_hi) = if t <= v { (t, v) } else { (v, t) };
        let lo = op.apply(s_lo, t_lo);
        let hi = op.apply(s_hi, t_hi);
        monotone.record(lo <= hi + tol, || NormWitness {
            s: s_lo,
            t: t_lo,
            u: Some(s_hi),
            v: Some(t_hi),
            lhs: lo,
            rhs: hi,
        });

        commutative.record((st - ts).abs() <= tol, || NormWitness { s, t, u: None, v: None, lhs: st, rhs: ts });

        let left = op.apply(st, u);
        let right = op.apply(s, op.apply(t, u));
        associative.record((left - right).abs() <= tol, || NormWitness {
            s,
            t,
            u: Some(u),
            v: None,
            lhs: left,
            rhs: right,
        });

        let sc = s.min(1.0 - CONTINUITY_DELTA);
        let tc = t.min(1.0 - CONTINUITY_DELTA);
        let dx = (op.apply(sc + CONTINUITY_DELTA, t) - op.apply(sc, t)).abs();
        let dy = (op.apply(s, tc + CONTINUITY_DELTA) - op.apply(s, tc)).abs();
        continuity.record(dx <= bound && dy <= bound, || NormWitness {
            s: sc,
            t: tc,
            u: None,
            v: None,
            lhs: dx.max(dy),
            rhs: CONTINUITY_LIPSCHITZ * CONTINUITY_DELTA,
        });
    }

    Ok(NormAxiomReport {
        operation: op.label(),
        class: op.class(),
        samples: sample_count,
        seed,
        outcomes: [boundary, range, monotone, commutative, associative, continuity]
            .into_iter()
            .map(Tally::finish)
            .collect(),
    })
}

fn grid_size(grid_step: f64) -> Result<usize> {
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(Error::Precondition(format!("grid_step = {grid_step} must lie in (0, 1]")));
    }
    Ok(((1.0 / grid_step).round() as usize).max(1))
}

/// Smallest index in `0..=n` where `pred` holds, assuming `pred` is
/// monotone (false then true) and `pred(n)` holds.
fn first_true(n: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    hi
}

/// Returns the smallest grid value `u` with `s ∘ u ≥ t`.
///
/// Requires `s > t`. The grid is `{i / n}` with `n = round(1 / grid_step)`.
pub fn solve_norm_lower(norm: TriangularNorm, s: f64, t: f64, grid_step: f64) -> Result<f64> {
    check_unit("s", s)?;
    check_unit("t", t)?;
    if s <= t {
        return Err(Error::Precondition(format!("need s > t, got s = {s}, t = {t}")));
    }
    let n = grid_size(grid_step)?;
    let at = |i: usize| i as f64 / n as f64;
    let holds = |i: usize| norm.apply(s, at(i)) >= t;
    if !holds(n) {
        return Err(Error::SearchFailure(format!("no grid u with {} ∘ u ≥ {t} at s = {s}", norm.name())));
    }
    Ok(at(first_true(n, holds)))
}

/// Diagonal witnesses: the smallest grid `t` with `t ∘ t ≥ s` and the
/// largest grid `p` with `p • p ≤ s`.
pub fn solve_diagonal(norm: TriangularNorm, conorm: TriangularConorm, s: f64, grid_step: f64) -> Result<(f64, f64)> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Precondition(format!("s = {s} must lie in (0, 1)")));
    }
    let n = grid_size(grid_step)?;
    let at = |i: usize| i as f64 / n as f64;

    let t_holds = |i: usize| norm.apply(at(i), at(i)) >= s;
    if !t_holds(n) {
        return Err(Error::SearchFailure(format!("no grid t with t ∘ t ≥ {s}")));
    }
    let t = at(first_true(n, t_holds));

    // p • p ≤ s is true then false along the grid.
    let p_fails = |i: usize| conorm.apply(at(i), at(i)) > s;
    if p_fails(0) {
        return Err(Error::SearchFailure(format!("no grid p with p • p ≤ {s}")));
    }
    let p = if p_fails(n) { at(first_true(n, p_fails) - 1) } else { 1.0 };
    Ok((t, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Exhaustive scan oracles, independent of the bisection used above.
    fn scan_lower(norm: TriangularNorm, s: f64, t: f64, n: usize) -> Option<f64> {
        (0..=n).map(|i| i as f64 / n as f64).find(|&u| norm.apply(s, u) >= t)
    }

    fn scan_diag_t(norm: TriangularNorm, s: f64, n: usize) -> Option<f64> {
        (0..=n).map(|i| i as f64 / n as f64).find(|&t| norm.apply(t, t) >= s)
    }

    fn scan_diag_p(conorm: TriangularConorm, s: f64, n: usize) -> Option<f64> {
        (0..=n).rev().map(|i| i as f64 / n as f64).find(|&p| conorm.apply(p, p) <= s)
    }

    #[test]
    fn tnorm_examples() {
        assert_eq!(TriangularNorm::Product.eval(0.8, 1.0).unwrap(), 0.8);
        assert_eq!(TriangularNorm::Minimum.eval(0.3, 0.7).unwrap(), 0.3);
        assert_eq!(TriangularNorm::Lukasiewicz.eval(0.5, 0.4).unwrap(), 0.0);
    }

    #[test]
    fn tconorm_examples() {
        let p = TriangularConorm::ProbabilisticSum.eval(0.5, 0.4).unwrap();
        assert!((p - 0.7).abs() < 1e-15);
        assert_eq!(TriangularConorm::Maximum.eval(0.6, 0.0).unwrap(), 0.6);
        assert_eq!(TriangularConorm::BoundedSum.eval(0.8, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn out_of_range_is_domain_error() {
        assert!(matches!(TriangularNorm::Product.eval(1.2, 0.5), Err(Error::Domain(_))));
        assert!(matches!(TriangularConorm::Maximum.eval(0.5, -0.1), Err(Error::Domain(_))));
        assert!(matches!(TriangularNorm::Minimum.eval(f64::NAN, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn identifiers_round_trip() {
        for n in TriangularNorm::ALL {
            assert_eq!(n.id().parse::<TriangularNorm>().unwrap(), n);
        }
        for c in TriangularConorm::ALL {
            assert_eq!(c.id().parse::<TriangularConorm>().unwrap(), c);
        }
        assert!("prod".parse::<TriangularNorm>().is_err());
    }

    #[test]
    fn builtins_pass_axioms() {
        let product = check_norm_axioms(&TriangularNorm::Product, 10_000, 1, 1e-12).unwrap();
        assert!(product.passed(), "{product:?}");
        let max = check_norm_axioms(&TriangularConorm::Maximum, 10_000, 1, 1e-12).unwrap();
        assert!(max.passed(), "{max:?}");
    }

    #[test]
    fn unclamped_sum_fails_boundary_and_range() {
        let sum =
            CustomOperation { label: "unclamped_sum".into(), class: OperationClass::Norm, op: |s: f64, t: f64| s + t };
        let report = check_norm_axioms(&sum, 1_000, 3, 1e-12).unwrap();
        assert_eq!(report.failing(), vec![NormAxiom::Boundary, NormAxiom::Range]);
        let w = report.outcome(NormAxiom::Boundary).witness.clone().unwrap();
        assert_eq!(w.t, 1.0);
        assert!((w.lhs - (w.s + 1.0)).abs() < 1e-15);
        let w = report.outcome(NormAxiom::Range).witness.clone().unwrap();
        assert!(w.s + w.t > 1.0);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(check_norm_axioms(&TriangularNorm::Product, 0, 1, 0.0).is_err());
    }

    #[test]
    fn lower_solver_matches_scan() {
        let u = solve_norm_lower(TriangularNorm::Product, 0.8, 0.4, 1e-4).unwrap();
        assert_eq!(Some(u), scan_lower(TriangularNorm::Product, 0.8, 0.4, 10_000));
        assert_eq!(u, 0.5);
        let u = solve_norm_lower(TriangularNorm::Minimum, 0.8, 0.4, 1e-4).unwrap();
        assert_eq!(u, 0.4);
        for norm in TriangularNorm::ALL {
            for &(s, t) in &[(0.9, 0.1), (0.55, 0.5), (0.3, 0.01), (1.0, 0.999)] {
                let u = solve_norm_lower(norm, s, t, 1e-3).unwrap();
                assert_eq!(Some(u), scan_lower(norm, s, t, 1000), "{norm} {s} {t}");
                assert!(norm.apply(s, u) >= t);
            }
        }
    }

    #[test]
    fn lower_solver_requires_strict_order() {
        assert!(matches!(solve_norm_lower(TriangularNorm::Product, 0.5, 0.5, 1e-4), Err(Error::Precondition(_))));
    }

    #[test]
    fn diagonal_solver_matches_scan() {
        let (t, p) = solve_diagonal(TriangularNorm::Product, TriangularConorm::ProbabilisticSum, 0.25, 1e-4).unwrap();
        assert_eq!(t, 0.5);
        assert_eq!(Some(p), scan_diag_p(TriangularConorm::ProbabilisticSum, 0.25, 10_000));
        assert!((p - (1.0 - 0.75f64.sqrt())).abs() < 1e-4);

        let (t, p) = solve_diagonal(TriangularNorm::Minimum, TriangularConorm::Maximum, 0.25, 1e-4).unwrap();
        assert_eq!((t, p), (0.25, 0.25));

        let (t, _) = solve_diagonal(TriangularNorm::Product, TriangularConorm::ProbabilisticSum, 0.81, 1e-4).unwrap();
        assert_eq!(Some(t), scan_diag_t(TriangularNorm::Product, 0.81, 10_000));
        assert!((t - 0.9).abs() <= 1e-4);

        for norm in TriangularNorm::ALL {
            for conorm in TriangularConorm::ALL {
                for s in [0.05, 0.3, 0.5, 0.77, 0.99] {
                    let (t, p) = solve_diagonal(norm, conorm, s, 1e-3).unwrap();
                    assert_eq!(Some(t), scan_diag_t(norm, s, 1000));
                    assert_eq!(Some(p), scan_diag_p(conorm, s, 1000));
                }
            }
        }
    }

    #[test]
    fn diagonal_solver_rejects_endpoints() {
        assert!(solve_diagonal(TriangularNorm::Product, TriangularConorm::Maximum, 1.0, 1e-4).is_err());
        assert!(solve_diagonal(TriangularNorm::Product, TriangularConorm::Maximum, 0.0, 1e-4).is_err());
    }
}

//! Carrier sets with a crisp distance.
//!
//! Three backends are supported: a finite set described by its distance
//! table, a Euclidean space with a bounding box used for sampling, and a
//! finite set carrying the discrete metric.

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack for the triangle inequality on tabulated distances.
const TRIANGLE_SLACK: f64 = 1e-12;

/// A point of the carrier set: an index for finite backends, coordinates for
/// Euclidean ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Index(usize),
    Coords(Vec<f64>),
}

impl Point {
    pub fn scalar(x: f64) -> Self {
        Point::Coords(vec![x])
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Coords(c) => Some(c),
            Point::Index(_) => None,
        }
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            Point::Index(i) => Some(*i),
            Point::Coords(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Point::Index(_) => true,
            Point::Coords(c) => c.iter().all(|x| x.is_finite()),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Index(i) => write!(f, "{i}"),
            Point::Coords(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(";"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum GroundSpace {
    /// Finite set with an explicit `n × n` distance matrix.
    FiniteTable { matrix: Vec<Vec<f64>> },
    /// `ℝ^dim`; the box `[lower, upper]` only bounds sampling.
    Euclidean { lower: Vec<f64>, upper: Vec<f64> },
    /// Finite set of the given size with `d(a, b) = 1` for `a ≠ b`.
    Discrete { cardinality: usize },
}

impl GroundSpace {
    /// Builds a finite space from a square, finite, non-negative matrix.
    ///
    /// Metric axioms are not enforced here; use [`verify_crisp_metric`].
    pub fn finite_table(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::Domain("distance matrix is empty".into()));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Domain(format!("distance matrix row {i} has {} entries, expected {n}", row.len())));
            }
            if let Some(j) = row.iter().position(|d| !d.is_finite() || *d < 0.0) {
                return Err(Error::Domain(format!(
                    "distance matrix entry ({i}, {j}) = {} is not a finite non-negative real",
                    row[j]
                )));
            }
        }
        Ok(GroundSpace::FiniteTable { matrix })
    }

    /// Loads a finite distance matrix from CSV: one row per point,
    /// comma-separated reals, no header.
    pub fn finite_table_from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path.as_ref())?;
        let mut matrix = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            let row = record
                .iter()
                .map(|field| {
                    field.parse::<f64>().map_err(|_| {
                        Error::Config(format!(
                            "{}: line {}: `{field}` is not a number",
                            path.as_ref().display(),
                            line + 1
                        ))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            matrix.push(row);
        }
        Self::finite_table(matrix)
    }

    pub fn euclidean(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Domain(format!(
                "bounding box corners have dimensions {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        for (k, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Domain(format!(
                    "bounding box coordinate {k}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(GroundSpace::Euclidean { lower, upper })
    }

    /// The box `[lower, upper]^dim`.
    pub fn euclidean_cube(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::euclidean(vec![lower; dim], vec![upper; dim])
    }

    pub fn discrete(cardinality: usize) -> Result<Self> {
        if cardinality == 0 {
            return Err(Error::Domain("discrete space needs at least one point".into()));
        }
        Ok(GroundSpace::Discrete { cardinality })
    }

    /// Number of points for finite backends, `None` for Euclidean spaces.
    pub fn cardinality(&self) -> Option<usize> {
        match self {
            GroundSpace::FiniteTable { matrix } => Some(matrix.len()),
            GroundSpace::Discrete { cardinality } => Some(*cardinality),
            GroundSpace::Euclidean { .. } => None,
        }
    }

    pub fn dimension(&self) -> Option<usize> {
        match self {
            GroundSpace::Euclidean { lower, .. } => Some(lower.len()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.cardinality().is_some()
    }

    /// All points of a finite backend.
    pub fn points(&self) -> Option<Vec<Point>> {
        self.cardinality().map(|n| (0..n).map(Point::Index).collect())
    }

    /// Validates that `p` belongs to this space.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        match (self, p) {
            (GroundSpace::Euclidean { lower, .. }, Point::Coords(c)) => {
                if c.len() != lower.len() {
                    Err(Error::Domain(format!("point has dimension {}, space has dimension {}", c.len(), lower.len())))
                } else if !p.is_finite() {
                    Err(Error::Domain(format!("point {p} has non-finite coordinates")))
                } else {
                    Ok(())
                }
            }
            (GroundSpace::Euclidean { .. }, Point::Index(i)) => {
                Err(Error::Domain(format!("index point {i} given for a euclidean space")))
            }
            (_, Point::Index(i)) => {
                let n = self.cardinality().unwrap_or(0);
                if *i < n {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("index {i} out of range for a space of {n} points")))
                }
            }
            (_, Point::Coords(_)) => Err(Error::Domain(format!("coordinate point {p} given for a finite space"))),
        }
    }

    /// Crisp distance between two points of the space.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.check_point(a)?;
        self.check_point(b)?;
        Ok(match (self, a, b) {
            (GroundSpace::FiniteTable { matrix }, Point::Index(i), Point::Index(j)) => matrix[*i][*j],
            (GroundSpace::Discrete { .. }, Point::Index(i), Point::Index(j)) => {
                if i == j {
                    0.0
                } else {
                    1.0
                }
            }
            (GroundSpace::Euclidean { .. }, Point::Coords(x), Point::Coords(y)) => {
                x.iter().zip(y).fold(0.0, |acc: f64, (p, q)| acc.hypot(p - q))
            }
            _ => unreachable!("points were checked against the backend"),
        })
    }

    /// Draws `count` points, deterministically in `seed`.
    ///
    /// Draws are sequential, so a longer sample extends a shorter one with
    /// the same seed.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, count)
    }

    pub(crate) fn sample_with<R: Rng>(&self, rng: &mut R, count: usize) -> Vec<Point> {
        (0..count).map(|_| self.sample_one(rng)).collect()
    }

    pub(crate) fn sample_one<R: Rng>(&self, rng: &mut R) -> Point {
        match self {
            GroundSpace::Euclidean { lower, upper } => {
                Point::Coords(lower.iter().zip(upper).map(|(lo, hi)| rng.gen_range(*lo..=*hi)).collect())
            }
            _ => {
                let n = self.cardinality().expect("finite backend");
                Point::Index(rng.gen_range(0..n))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrispViolation {
    /// `d(a, a) ≠ 0`.
    NonZeroDiagonal { a: Point, value: f64 },
    /// `d(a, b) ≠ d(b, a)`.
    Asymmetric { a: Point, b: Point, forward: f64, backward: f64 },
    /// `d(a, c) > d(a, b) + d(b, c)`; the witness is `(a, b, c)`.
    Triangle { a: Point, b: Point, c: Point, direct: f64, via: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrispMetricReport {
    pub passed: bool,
    pub exhaustive: bool,
    pub triples_checked: usize,
    pub violations: Vec<CrispViolation>,
}

/// Cap on the number of witnesses kept in a report.
const MAX_WITNESSES: usize = 16;

/// Checks zero diagonal, symmetry and the triangle inequality. Finite
/// backends are checked on all `n³` triples; Euclidean spaces on
/// `sample_count` seeded triples.
pub fn verify_crisp_metric(space: &GroundSpace, sample_count: usize, seed: u64) -> CrispMetricReport {
    let mut violations = Vec::new();
    let mut total_violations = 0usize;
    let mut push = |v: CrispViolation, violations: &mut Vec<CrispViolation>| {
        total_violations += 1;
        if violations.len() < MAX_WITNESSES {
            violations.push(v);
        }
    };

    let d = |a: &Point, b: &Point| space.distance(a, b).expect("sampled points belong to the space");

    let mut triples_checked = 0;
    let exhaustive = space.is_finite();
    if let Some(points) = space.points() {
        for a in &points {
            let daa = d(a, a);
            if daa != 0.0 {
                push(CrispViolation::NonZeroDiagonal { a: a.clone(), value: daa }, &mut violations);
            }
            for b in &points {
                let (fwd, bwd) = (d(a, b), d(b, a));
                if fwd != bwd && a.index() < b.index() {
                    push(
                        CrispViolation::Asymmetric { a: a.clone(), b: b.clone(), forward: fwd, backward: bwd },
                        &mut violations,
                    );
                }
                for c in &points {
                    triples_checked += 1;
                    let direct = d(a, c);
                    let via = fwd + d(b, c);
                    if direct > via * (1.0 + TRIANGLE_SLACK) {
                        push(
                            CrispViolation::Triangle { a: a.clone(), b: b.clone(), c: c.clone(), direct, via },
                            &mut violations,
                        );
                    }
                }
            }
        }
    } else {
        let pts = space.sample_points(3 * sample_count, seed);
        for tri in pts.chunks_exact(3) {
            let (a, b, c) = (&tri[0], &tri[1], &tri[2]);
            triples_checked += 1;
            if d(a, a) != 0.0 {
                push(CrispViolation::NonZeroDiagonal { a: a.clone(), value: d(a, a) }, &mut violations);
            }
            let (fwd, bwd) = (d(a, b), d(b, a));
            if fwd != bwd {
                push(
                    CrispViolation::Asymmetric { a: a.clone(), b: b.clone(), forward: fwd, backward: bwd },
                    &mut violations,
                );
            }
            let direct = d(a, c);
            let via = fwd + d(b, c);
            if direct > via * (1.0 + TRIANGLE_SLACK) + f64::EPSILON {
                push(
                    CrispViolation::Triangle { a: a.clone(), b: b.clone(), c: c.clone(), direct, via },
                    &mut violations,
                );
            }
        }
    }

    CrispMetricReport { passed: total_violations == 0, exhaustive, triples_checked, violations }
}

#![allow(dead_code)]

use neutrofix::nms::{verification_knots, AxiomCheckConfig, MetricTable, NeutroMetric, Triple};
use neutrofix::norms::{TriangularConorm, TriangularNorm};
use neutrofix::space::GroundSpace;

pub const GRID: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

/// Points `0..n` on a line, `d(i, j) = |i − j|`.
pub fn line_space(n: usize) -> GroundSpace {
    GroundSpace::finite_table((0..n).map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect()).collect()).unwrap()
}

pub fn real_line(lo: f64, hi: f64) -> NeutroMetric {
    NeutroMetric::induced_from_crisp(
        GroundSpace::euclidean_cube(1, lo, hi).unwrap(),
        TriangularNorm::Product,
        TriangularConorm::ProbabilisticSum,
    )
    .unwrap()
}

/// Which way the `B` component is broken.
#[derive(Debug, Clone, Copy)]
pub enum Sabotage {
    /// `B ≡ 0`: distinct points look non-neutral at every scale.
    Zero,
    /// `B` built from the asymmetric quasi-metric `max(b − a, 2(a − b))`.
    Asymmetric,
    /// `B = d³/(λ + d³)`: the cube of a metric is not a metric.
    Cubed,
}

pub const SABOTAGE_POINTS: usize = 5;

/// Table metric on [`line_space`] that agrees with the induced metric except
/// for its `B` component.
pub fn sabotage_table(kind: Sabotage) -> MetricTable {
    let cfg = AxiomCheckConfig::default();
    let knots = verification_knots(&cfg.lambda_grid, cfg.large_lambda);
    MetricTable::tabulate(SABOTAGE_POINTS, &knots, |a, b, l| {
        let (x, y) = (a as f64, b as f64);
        let d = (x - y).abs();
        let induced = d / (l + d);
        let neutral = match kind {
            Sabotage::Zero => 0.0,
            Sabotage::Asymmetric => {
                let q = f64::max(y - x, 2.0 * (x - y));
                q / (l + q)
            }
            Sabotage::Cubed => {
                let c = d * d * d;
                c / (l + c)
            }
        };
        Triple::new(l / (l + d), neutral, induced)
    })
    .unwrap()
}

pub fn sabotage_metric(kind: Sabotage) -> NeutroMetric {
    NeutroMetric::from_table(
        line_space(SABOTAGE_POINTS),
        TriangularNorm::Product,
        TriangularConorm::ProbabilisticSum,
        sabotage_table(kind),
    )
    .unwrap()
}

/// Infimum of `{λ ∈ (0, hi] : pred(λ)}` for a predicate that flips once,
/// by successively finer uniform scans. Returns the midpoint of the final
/// bracket of width `resolution`.
pub fn scan_infimum(pred: impl Fn(f64) -> bool, hi: f64, resolution: f64) -> f64 {
    let mut lo = 0.0;
    let mut step = 1.0;
    let mut upper = hi;
    loop {
        let mut k = 1.0;
        while lo + k * step < upper && !pred(lo + k * step) {
            k += 1.0;
        }
        upper = f64::min(lo + k * step, upper);
        lo += (k - 1.0) * step;
        if step <= resolution {
            return 0.5 * (lo + upper);
        }
        step /= 10.0;
    }
}

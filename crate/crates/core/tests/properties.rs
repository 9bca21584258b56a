mod common;

use common::real_line;
use neutrofix::contraction::{apply_map, estimate_k, MapSpec};
use neutrofix::norms::{TriangularConorm, TriangularNorm};
use neutrofix::quasimetric::QuasiMetricFamily;
use neutrofix::solver::{picard, SolverConfig};
use neutrofix::space::Point;
use proptest::prelude::*;

fn tnorm() -> impl Strategy<Value = TriangularNorm> {
    prop::sample::select(TriangularNorm::ALL.to_vec())
}

fn tconorm() -> impl Strategy<Value = TriangularConorm> {
    prop::sample::select(TriangularConorm::ALL.to_vec())
}

proptest! {
    #[test]
    fn norms_commute_and_associate(t in tnorm(), s in tconorm(), x in 0.0..=1.0f64, y in 0.0..=1.0f64, z in 0.0..=1.0f64) {
        prop_assert!((t.apply(x, y) - t.apply(y, x)).abs() <= 1e-12);
        prop_assert!((s.apply(x, y) - s.apply(y, x)).abs() <= 1e-12);
        prop_assert!((t.apply(t.apply(x, y), z) - t.apply(x, t.apply(y, z))).abs() <= 1e-12);
        prop_assert!((s.apply(s.apply(x, y), z) - s.apply(x, s.apply(y, z))).abs() <= 1e-12);
    }

    #[test]
    fn conorms_are_dual(s in tconorm(), x in 0.0..=1.0f64, y in 0.0..=1.0f64) {
        let t = s.dual();
        prop_assert!((s.apply(x, y) - (1.0 - t.apply(1.0 - x, 1.0 - y))).abs() <= 1e-12);
    }

    #[test]
    fn norms_are_monotone(t in tnorm(), s in tconorm(), x in 0.0..=1.0f64, y in 0.0..=1.0f64, dy in 0.0..=1.0f64) {
        let y2 = (y + dy).min(1.0);
        prop_assert!(t.apply(x, y) <= t.apply(x, y2));
        prop_assert!(s.apply(x, y) <= s.apply(x, y2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn h_eps_is_antitone_in_level(a in -10.0..10.0f64, b in -10.0..10.0f64, e1 in 0.05..0.95f64, e2 in 0.05..0.95f64) {
        let m = real_line(-10.0, 10.0);
        let fam = QuasiMetricFamily::with_defaults(&m);
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let (pa, pb) = (Point::scalar(a), Point::scalar(b));
        let h_lo = fam.h_eps(&pa, &pb, lo).unwrap();
        let h_hi = fam.h_eps(&pa, &pb, hi).unwrap();
        prop_assert!(h_lo + fam.tol() >= h_hi);
    }

    #[test]
    fn refining_the_scan_never_lowers_k(alpha in 0.05..0.95f64, n in 5usize..60, extra in 1usize..60, seed in any::<u64>()) {
        let m = real_line(-10.0, 10.0);
        let f = MapSpec::affine_scalar(alpha, 0.3);
        let grid = [0.01, 1.0, 100.0];
        let coarse = estimate_k(&m, &f, n, seed, &grid).unwrap();
        let fine = estimate_k(&m, &f, n + extra, seed, &grid).unwrap();
        prop_assert!(fine.k_g >= coarse.k_g);
        prop_assert!(fine.k_b >= coarse.k_b);
        prop_assert!(fine.k_y >= coarse.k_y);
    }

    #[test]
    fn map_power_is_composition(a in -2.0..2.0f64, c in -3.0..3.0f64, x in -10.0..10.0f64, p in 1usize..6) {
        let m = real_line(-10.0, 10.0);
        let f = MapSpec::affine_scalar(a, c);
        let mut composed = Point::scalar(x);
        for _ in 0..p {
            composed = apply_map(m.space(), &f, &composed).unwrap();
        }
        prop_assert_eq!(apply_map(m.space(), &f.clone().with_power(p), &Point::scalar(x)).unwrap(), composed);
    }

    #[test]
    fn affine_residuals_decay(alpha in 0.05..0.9f64, c in -5.0..5.0f64, x0 in -10.0..10.0f64, eps in 0.1..0.9f64) {
        let m = real_line(-10.0, 10.0);
        let fam = QuasiMetricFamily::new(&m, 1e6, 1e-10).unwrap();
        let f = MapSpec::affine_scalar(alpha, c);
        let cfg = SolverConfig { epsilon: eps, tol: 1e-8, max_iters: 1000, ..SolverConfig::default() };
        let r = picard(&fam, &f, &Point::scalar(x0), &cfg).unwrap();
        prop_assert!(r.converged);
        for w in r.residual_trace.windows(2) {
            prop_assert!(w[1].h_residual <= w[0].h_residual + fam.tol());
        }
        // h < tol converts to a crisp step below tol·ε/(1 − ε).
        let fx = apply_map(m.space(), &f, &r.point).unwrap();
        let g = m.eval_triple(&r.point, &fx, cfg.lambda_report).unwrap().g;
        let d_bound = cfg.tol * eps / (1.0 - eps);
        prop_assert!(g > 1.0 - d_bound / cfg.lambda_report);
        let again = picard(&fam, &f, &Point::scalar(x0), &cfg).unwrap();
        prop_assert_eq!(again, r);
    }
}

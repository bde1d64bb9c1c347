//! Fits of the sampled performance curves against their error budgets, and
//! properties of the piecewise-linear models.

mod common;

use henopt::pwl::{build_simplex_surface, fit_convex_planes, fit_pwl_1d, tensor_samples, EnvelopeOptions, Pwl1D};
use proptest::prelude::*;

fn columns() -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(common::data("performance_samples.csv")).unwrap();
    let names = r.headers().unwrap().iter().map(String::from).collect::<Vec<_>>();
    let mut cols = vec![Vec::new(); names.len()];
    for rec in r.records() {
        for (k, v) in rec.unwrap().iter().enumerate() {
            cols[k].push(v.parse::<f64>().unwrap());
        }
    }
    (names, cols)
}

/// Range-normalised RMSE computed directly from the samples.
fn plain_rmse(p: &Pwl1D, xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sq: f64 = xs.iter().zip(ys).map(|(x, y)| (p.eval(*x) - y).powi(2)).sum();
    let range = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max) - ys.iter().copied().fold(f64::INFINITY, f64::min);
    (sq / n).sqrt() / range
}

fn fit(xs: &[f64], ys: &[f64], budget: f64) -> Pwl1D {
    let samples: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    fit_pwl_1d(&samples, budget).unwrap()
}

#[test]
fn sampled_curves_fit_within_their_budgets() {
    let (names, cols) = columns();
    let col = |n: &str| &cols[names.iter().position(|x| x == n).unwrap()];
    let u = col("u");
    for feed in ["h2o", "co2", "air"] {
        let p = fit(u, col(feed), 0.0075);
        assert!(p.segments() <= 2, "{feed}: {} segments", p.segments());
        assert!(plain_rmse(&p, u, col(feed)) <= 0.0075, "{feed}");
    }
    let p = fit(u, col("p_sys"), 0.0043);
    assert!(p.segments() <= 3, "p_sys: {} segments", p.segments());
    assert!(plain_rmse(&p, u, col("p_sys")) <= 0.0043);
    let total: Vec<f64> = (0..u.len()).map(|i| col("m_wax")[i] + col("m_diesel")[i] + col("m_naphtha")[i]).collect();
    let p = fit(u, &total, 0.0019);
    assert_eq!(p.segments(), 1);
    assert!(plain_rmse(&p, u, &total) <= 0.0019);
}

#[test]
fn the_case_file_carries_the_same_fits() {
    let c = common::reference_case();
    let (names, cols) = columns();
    let col = |n: &str| &cols[names.iter().position(|x| x == n).unwrap()];
    let u = col("u");
    assert!(c.performance.p_sys.segments() <= 3);
    assert!(plain_rmse(&c.performance.p_sys, u, col("p_sys")) <= 0.0043);
    for f in &c.performance.feed_flows {
        assert!(f.segments() <= 2);
    }
}

fn arb_curve() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec(-10.0..10.0f64, 4..12).prop_map(|ys| ys.into_iter().enumerate().map(|(i, y)| (i as f64, y)).collect())
}

proptest! {
    #[test]
    fn stored_values_are_returned_at_breakpoints(s in arb_curve()) {
        let xs: Vec<f64> = s.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = s.iter().map(|p| p.1).collect();
        let p = Pwl1D::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            prop_assert_eq!(p.eval(*x).to_bits(), y.to_bits());
        }
    }

    #[test]
    fn tighter_targets_never_fit_worse(s in arb_curve()) {
        let xs: Vec<f64> = s.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = s.iter().map(|p| p.1).collect();
        let mut last = f64::INFINITY;
        for target in [0.3, 0.1, 0.03, 0.0] {
            let p = fit(&xs, &ys, target);
            let e = plain_rmse(&p, &xs, &ys);
            prop_assert!(e <= target + 1e-9);
            prop_assert!(e <= last + 1e-12);
            last = e;
        }
    }

    #[test]
    fn surfaces_are_exact_at_nodes_and_affine_inside(a in -3.0..3.0f64, b in -3.0..3.0f64, k in 0.1..2.0f64,
                                                      t in 0.0..1.0f64, w in 0.0..1.0f64) {
        let f = |x: f64, y: f64| a * x * x + b * y + k * x * y;
        let s = build_simplex_surface(f, (0.0, 2.0), (1.0, 3.0), 4, 3).unwrap();
        for i in 0..s.nx() {
            for j in 0..s.ny() {
                let (x, y, v) = s.node(s.node_index(i, j));
                prop_assert_eq!(s.eval(x, y).to_bits(), v.to_bits());
            }
        }
        // a point inside the first simplex as a convex combination of its corners
        let tri = s.triangulation[0];
        let (p0, p1, p2) = (s.node(tri[0]), s.node(tri[1]), s.node(tri[2]));
        let (l1, l2) = (t * (1.0 - w), t * w);
        let l0 = 1.0 - l1 - l2;
        let x = l0 * p0.0 + l1 * p1.0 + l2 * p2.0;
        let y = l0 * p0.1 + l1 * p1.1 + l2 * p2.1;
        let want = l0 * p0.2 + l1 * p1.2 + l2 * p2.2;
        prop_assert!((s.eval(x, y) - want).abs() <= 1e-9 * want.abs().max(1.0));
    }

    #[test]
    fn more_planes_never_fit_worse(a in 0.2..2.0f64, b in 0.2..2.0f64, beta in 0.5..0.95f64) {
        let (pts, vals) = tensor_samples(|x| a * x[0].powf(beta) * (1.0 + b / x[1]), &[(0.1, 1.0, 6), (0.5, 2.0, 6)], &[false, false]);
        let mut last = f64::INFINITY;
        for n in 1..=4 {
            let e = fit_convex_planes(&pts, &vals, n, EnvelopeOptions::default()).unwrap();
            prop_assert!(e.max_underestimate_gap <= last + 1e-9, "{} planes: {} after {}", n, e.max_underestimate_gap, last);
            last = e.max_underestimate_gap;
        }
    }
}

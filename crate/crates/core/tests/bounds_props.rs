use hs2_core::bounds::{bernoulli_kl, kl_lower_bound, q_star, solve_min_m, BoundInputs, Constraint, SampleSizeInputs};
use proptest::prelude::*;

fn inputs() -> BoundInputs {
    BoundInputs { n: 100, k: 2, beta: 0.5, m: 1, kappa: 3, c_min: 2, delta: 0.1, p: 0.0 }
}

#[test]
fn q_star_monotone_on_grid() {
    let base = inputs();
    let q = |i: BoundInputs| q_star(&i).unwrap();
    for beta in [0.1, 0.2, 0.3, 0.4] {
        assert!(q(BoundInputs { beta, ..base }) >= q(BoundInputs { beta: beta + 0.1, ..base }));
    }
    for n in [10, 20, 50, 100, 200] {
        assert!(q(BoundInputs { n, ..base }) <= q(BoundInputs { n: n + 7, ..base }));
    }
    for m in 0..5 {
        assert!(q(BoundInputs { m, ..base }) <= q(BoundInputs { m: m + 1, ..base }));
    }
    for c_min in 0..5 {
        assert!(q(BoundInputs { c_min, ..base }) <= q(BoundInputs { c_min: c_min + 1, ..base }));
    }
    for kappa in 1..10 {
        let a = BoundInputs { kappa, m: 0, ..base };
        let b = BoundInputs { kappa: kappa + 1, m: 0, ..base };
        assert!(q(a) <= q(b));
    }
}

#[test]
fn kl_min_denominator_bound_has_counterexamples() {
    // D(0.05||0.10) ≈ 0.0167 while (y−x)²/(2·min) = 0.025.
    assert!(bernoulli_kl(0.05, 0.1) < kl_lower_bound(0.05, 0.1).unwrap());
    assert!(bernoulli_kl(0.9, 0.1) < kl_lower_bound(0.9, 0.1).unwrap());
}

#[test]
fn kl_max_denominator_bound_on_dense_grid() {
    for i in 1..100 {
        for j in 1..100 {
            let (x, y) = (i as f64 / 100.0, j as f64 / 100.0);
            let bound = (y - x).powi(2) / (2.0 * x.max(y));
            assert!(bernoulli_kl(x, y) >= bound - 1e-15, "x={x} y={y}");
        }
    }
}

proptest! {
    #[test]
    fn min_m_is_first_feasible(k in 1usize..4, beta in 0.05f64..0.34, p in 0.05f64..0.2, delta in 0.05f64..0.5, q4 in 1.0f64..200.0) {
        let s = SampleSizeInputs { k, beta, p, delta, q_star_quarter: q4 };
        let m = solve_min_m(&s).unwrap();
        let ok = |m: u64| s.check(m).unwrap().iter().all(Constraint::satisfied);
        prop_assert!(m >= 3);
        prop_assert!(ok(m));
        prop_assert!(m == 3 || !ok(m - 1));
    }

    #[test]
    fn min_m_grows_with_noise(k in 1usize..4, p in 0.05f64..0.4, dp in 0.0f64..0.09) {
        let s = SampleSizeInputs { k, beta: 0.25, p, delta: 0.1, q_star_quarter: 30.0 };
        let noisier = SampleSizeInputs { p: p + dp, ..s };
        prop_assert!(solve_min_m(&s).unwrap() <= solve_min_m(&noisier).unwrap());
    }
}

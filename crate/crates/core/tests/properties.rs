//! Property tests over randomized parameters.

use critical_hawkes::harness::{empirical_laplace, hill_estimator};
use critical_hawkes::kernels::KernelSpec;
use critical_hawkes::marks::MarkDistribution;
use critical_hawkes::renewal::{build_resolvent, solve_g, Grid, Nonlinearity, TestFunction};
use critical_hawkes::simulator::SibuyaTable;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_tails_are_survival_functions(alpha in 0.05f64..0.95, t in 0.0f64..1e3, dt in 0.0f64..10.0) {
        for k in [KernelSpec::pareto(alpha).unwrap(), KernelSpec::stable(alpha).unwrap()] {
            let (a, b) = (k.tail(t).unwrap(), k.tail(t + dt).unwrap());
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(b <= a + 1e-14);
        }
    }

    #[test]
    fn nonlinearity_is_nonnegative_and_increasing(beta in 0.05f64..0.95, x in 0.0f64..0.9, dx in 1e-6f64..0.1) {
        for m in [MarkDistribution::ParetoMean1 { beta }, MarkDistribution::ExponentialMean1, MarkDistribution::GammaMean1 { shape: 1.0 + beta }] {
            let (a, b) = (m.h(x).unwrap(), m.h(x + dx).unwrap());
            prop_assert!(a >= 0.0 && b >= a - 1e-15, "{m:?}: H({x})={a}, H({})={b}", x + dx);
            prop_assert!(Nonlinearity::h(&m, x) >= 0.0);
        }
    }

    #[test]
    fn resolvent_is_nonnegative_and_monotone(alpha in 0.1f64..0.9, dt in 0.05f64..2.0) {
        let t = build_resolvent(&KernelSpec::pareto(alpha).unwrap(), Grid::new(dt, 300).unwrap()).unwrap();
        prop_assert!(t.r.iter().all(|&r| r >= 0.0));
        prop_assert!(t.i_r.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(t.renewal_residual() < 1e-10);
    }

    #[test]
    fn laplace_functionals_are_ordered(scale in 0.05f64..2.0, u in 0.5f64..5.0, beta in 0.2f64..0.9) {
        // 0 ≤ g ≤ h, ∫g increasing in the weight, centered functional nonnegative
        let k = KernelSpec::pareto(0.5).unwrap();
        let m = MarkDistribution::ParetoMean1 { beta };
        let grid = Grid::covering(u, 200).unwrap();
        let a = solve_g(&TestFunction::indicator(scale, u), &k, &m, grid).unwrap();
        let b = solve_g(&TestFunction::indicator(1.5 * scale, u), &k, &m, grid).unwrap();
        prop_assert!(a.g.iter().zip(&a.h).all(|(g, h)| *g >= 0.0 && g <= h));
        prop_assert!(b.int_g > a.int_g);
        prop_assert!(a.int_w >= 0.0);
    }

    #[test]
    fn sibuya_pmf_is_a_probability(beta in 0.01f64..0.99) {
        let t = SibuyaTable::new(beta).unwrap();
        let p = t.pmf(2000);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() + t.tail(2000) - 1.0).abs() < 1e-12);
        let mean: f64 = p.iter().enumerate().map(|(k, x)| k as f64 * x).sum();
        prop_assert!(mean <= 1.0 + 1e-12);
    }

    #[test]
    fn hill_is_scale_invariant(xs in prop::collection::vec(0.01f64..1e3, 50..200), c in 0.1f64..100.0) {
        let ys: Vec<f64> = xs.iter().map(|x| c * x).collect();
        match (hill_estimator(&xs, 10), hill_estimator(&ys, 10)) {
            (Ok(a), Ok(b)) => prop_assert!((a / b - 1.0).abs() < 1e-9),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn empirical_laplace_is_bounded_for_nonnegative_samples(xs in prop::collection::vec(0.0f64..50.0, 1..100), l in 0.0f64..5.0) {
        let e = empirical_laplace(&xs, &[0.0, l]);
        prop_assert_eq!(e[0].mean, 1.0);
        prop_assert!(e[1].mean > 0.0 && e[1].mean <= 1.0);
    }
}

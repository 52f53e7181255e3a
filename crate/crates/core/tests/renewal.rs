//! Resolvent tables and the Laplace-functional solver, cross-checked against
//! each other and against exact identities.

use approx::assert_relative_eq;
use critical_hawkes::kernels::KernelSpec;
use critical_hawkes::marks::MarkDistribution;
use critical_hawkes::renewal::{build_resolvent, exact_mean_n, solve_g, Grid, SibuyaNonlinearity, TestFunction};
use critical_hawkes::stable::LimitModel;

#[test]
fn solver_mean_matches_resolvent_mean() {
    // two independent discretizations of E N([0,u]) = μ(u + ∫_0^u I_R); the
    // table is first order in dt, so compare against its Richardson limit
    let k = KernelSpec::pareto(0.5).unwrap();
    let u = 20.0;
    let table_mean = |n| exact_mean_n(&build_resolvent(&k, Grid::covering(u, n).unwrap()).unwrap(), 1.0, u).unwrap();
    let extrapolated = 2.0 * table_mean(8000) - table_mean(4000);
    let state = solve_g(&TestFunction::indicator(1.0, u), &k, &MarkDistribution::DiracOne, Grid::covering(u, 4000).unwrap()).unwrap();
    assert_relative_eq!(state.mean(1.0), extrapolated, max_relative = 1e-5);
}

#[test]
fn pareto_resolvent_constant() {
    // α = 1/2, c_φ = 1: I_R(T) ~ (2/π) T^{1/2}
    let table = build_resolvent(&KernelSpec::pareto(0.5).unwrap(), Grid::new(1.0, 10_000).unwrap()).unwrap();
    assert_relative_eq!(table.c_alpha_estimate, std::f64::consts::FRAC_2_PI, max_relative = 0.05);
}

#[test]
fn grid_refinement_is_stable() {
    let k = KernelSpec::pareto(0.3).unwrap();
    let f = TestFunction::indicator(1.0, 10.0);
    let marks = MarkDistribution::ParetoMean1 { beta: 0.6 };
    let a = solve_g(&f, &k, &marks, Grid::covering(10.0, 1000).unwrap()).unwrap();
    let b = solve_g(&f, &k, &marks, Grid::covering(10.0, 2000).unwrap()).unwrap();
    assert!((a.log_laplace(1.0) / b.log_laplace(1.0) - 1.0).abs() < 0.01);
    assert!((a.centered_log_laplace(1.0) / b.centered_log_laplace(1.0) - 1.0).abs() < 0.01);
}

#[test]
fn centered_functional_is_mean_minus_log_laplace() {
    // μ∫w = μ∫h - μ∫g up to discretization
    let k = KernelSpec::stable(0.4).unwrap();
    let s = solve_g(&TestFunction::indicator(0.7, 5.0), &k, &MarkDistribution::ExponentialMean1, Grid::covering(5.0, 2000).unwrap()).unwrap();
    assert_relative_eq!(s.int_w, s.int_h - s.int_g, max_relative = 1e-6);
}

#[test]
fn marked_and_branching_limits_differ_by_k_ratio() {
    let k = KernelSpec::pareto(0.3).unwrap();
    let marked = LimitModel::heavy_tailed(&k, &MarkDistribution::ParetoMean1 { beta: 0.6 }, 1.0).unwrap();
    let beta = LimitModel::beta_offspring(&k, 0.6, 1.0).unwrap();
    let ratio = marked.k / beta.k;
    let t = 1e3;
    let ft = TestFunction::indicator(1.0, 1.0).rescaled(t, marked.norming(t)).unwrap();
    let g = Grid::covering(t, 4000).unwrap();
    let a = solve_g(&ft, &k, &MarkDistribution::ParetoMean1 { beta: 0.6 }, g).unwrap().int_w;
    let b = solve_g(&ft, &k, &SibuyaNonlinearity { beta: 0.6 }, g).unwrap().int_w;
    assert!((a / b / ratio - 1.0).abs() < 0.1, "{} vs {ratio}", a / b);
}

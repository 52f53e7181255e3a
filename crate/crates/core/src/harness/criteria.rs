//! The acceptance criteria as runnable checks, one record per criterion.
//!
//! Multi-part criteria report the worst part normalized by its own tolerance
//! (`measured = max_i |dev_i| / tol_i`, `target = 0`, `tol = 1`) and list the
//! raw numbers in `detail`.

use std::time::Instant;

use serde_json::json;

use crate::error::Result;
use crate::harness::estimators::{empirical_laplace, hill_estimator, hill_k, iqr, mean_stderr, ols_slope};
use crate::harness::experiments::{self_similarity_error, simulate_scaled_limit, SELF_SIMILARITY_LEVELS};
use crate::harness::report::{Check, Report};
use crate::kernels::KernelSpec;
use crate::marks::MarkDistribution;
use crate::renewal::{
    build_resolvent, check_tightness, exact_mean_n, solve_g, solve_with_weights, CellWeights, Grid, SibuyaNonlinearity,
    TestFunction,
};
use crate::simulator::{normalize_paths, run_replicas, simulate_hawkes, OffspringLaw, SibuyaTable, SimOptions};
use crate::stable::{LimitModel, PositiveStable, SkewedStable};

pub type Criterion = fn(u64) -> Result<Check>;

/// (number, short name, runner)
pub const CRITERIA: [(u32, &str, Criterion); 11] = [
    (1, "stable samplers", stable_samplers),
    (2, "resolvent asymptotics", resolvent_asymptotics),
    (3, "exact mean identity", exact_mean_identity),
    (4, "finite-T Laplace exactness", finite_t_laplace),
    (5, "deterministic CLT convergence", deterministic_convergence),
    (6, "norming exponent", norming_exponent),
    (7, "tail index", tail_index),
    (8, "limit self-similarity", limit_self_similarity),
    (9, "beta-offspring law", beta_offspring_law),
    (10, "beta-branching consistency", beta_branching_consistency),
    (11, "tightness checker", tightness),
];

/// Run one criterion; errors become failed records.
pub fn run_criterion(number: u32, seed: u64) -> Option<Check> {
    let &(n, name, run) = CRITERIA.iter().find(|c| c.0 == number)?;
    let started = Instant::now();
    let mut check = run(seed).unwrap_or_else(|e| Check {
        name: String::new(),
        measured: f64::NAN,
        target: f64::NAN,
        tol: f64::NAN,
        pass: false,
        seconds: started.elapsed().as_secs_f64(),
        detail: Some(format!("error: {e}")),
    });
    check.name = format!("criterion {n}: {name}");
    Some(check)
}

/// All criteria in order.
pub fn run_all(seed: u64) -> Report {
    let mut report = Report::new(json!({ "suite": "acceptance", "seed": seed }));
    for (n, _, _) in CRITERIA {
        report.push(run_criterion(n, seed).expect("listed criterion"));
    }
    report
}

fn normalized(name: &str, parts: &[(f64, f64)], started: Instant) -> Check {
    let worst = parts.iter().map(|&(dev, tol)| dev.abs() / tol).fold(0.0, f64::max);
    let worst = if parts.iter().any(|p| !p.0.is_finite()) { f64::NAN } else { worst };
    Check::absolute(name, worst, 0.0, 1.0, started)
}

fn chunked_samples<F>(seed: u64, total: usize, draw: F) -> Result<Vec<f64>>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync,
{
    const CHUNK: usize = 10_000;
    let chunks = total.div_ceil(CHUNK);
    let parts = run_replicas(seed, chunks, |i, rng| {
        let len = CHUNK.min(total - i as usize * CHUNK);
        Ok((0..len).map(|_| draw(rng)).collect::<Vec<_>>())
    })?;
    Ok(parts.concat())
}

/// E e^{-λL_α(1)} = e^{-λ^α} and E e^{-λL_{1+β}(1)} = e^{λ^{1+β}} within
/// 3 standard errors, λ ∈ {0.25, 0.5, 1, 2}, 10⁶ samples each.
pub fn stable_samplers(seed: u64) -> Result<Check> {
    let started = Instant::now();
    let (alpha, a) = (0.3, 1.6);
    let lambdas = [0.25, 0.5, 1.0, 2.0];
    let pos = PositiveStable::new(alpha)?;
    let skew = SkewedStable::new(a)?;
    let xs = chunked_samples(seed, 1_000_000, |rng| pos.sample(rng))?;
    let ys = chunked_samples(seed ^ 1, 1_000_000, |rng| skew.sample(rng))?;
    let mut parts = Vec::new();
    let mut detail = Vec::new();
    for (e, l) in empirical_laplace(&xs, &lambdas).iter().zip(lambdas) {
        let d = (e.mean - (-l.powf(alpha)).exp()) / e.stderr;
        parts.push((d, 3.0));
        detail.push(format!("L_{alpha} l={l}: {d:+.2}se"));
    }
    for (e, l) in empirical_laplace(&ys, &lambdas).iter().zip(lambdas) {
        let d = (e.mean - l.powf(a).exp()) / e.stderr;
        parts.push((d, 3.0));
        detail.push(format!("L_{a} l={l}: {d:+.2}se"));
    }
    Ok(normalized("", &parts, started).with_detail(detail.join(", ")).within(30.0))
}

/// Pareto α=0.5: I_R(10⁴)/10² within 5% of 2/π; Mittag-Leffler α=0.5:
/// log-log slope of r_k over the last decade within α-1 ± 0.05.
pub fn resolvent_asymptotics(_seed: u64) -> Result<Check> {
    let started = Instant::now();
    let grid = Grid::new(1.0, 10_000)?;
    let pareto = build_resolvent(&KernelSpec::pareto(0.5)?, grid)?;
    let ratio = pareto.i_r_at(1e4)? / 1e2;
    let c = std::f64::consts::FRAC_2_PI;
    let alpha = 0.5;
    let ml = build_resolvent(&KernelSpec::mittag_leffler(alpha, 1.0)?, grid)?;
    let ks: Vec<usize> = (0..=60).map(|i| (1e3 * 10f64.powf(i as f64 / 60.0)).round() as usize - 1).collect();
    let x: Vec<f64> = ks.iter().map(|&k| ((k as f64 + 0.5) * grid.dt).ln()).collect();
    let y: Vec<f64> = ks.iter().map(|&k| ml.r[k].ln()).collect();
    let slope = ols_slope(&x, &y);
    let parts = [(ratio / c - 1.0, 0.05), (slope - (alpha - 1.0), 0.05)];
    Ok(normalized("", &parts, started)
        .with_detail(format!("I_R(1e4)/1e2 = {ratio:.5} vs 2/pi = {c:.5}; ML slope = {slope:.4} vs {}", alpha - 1.0))
        .within(60.0))
}

/// MC mean of N([0,u]) vs μ(u + ∫_0^u I_R) within 3 SE at u ∈ {10, 50, 200}.
pub fn exact_mean_identity(seed: u64) -> Result<Check> {
    let started = Instant::now();
    let mu = 1.0;
    let kernel = KernelSpec::pareto(0.5)?;
    let us = [10.0, 50.0, 200.0];
    let table = build_resolvent(&kernel, Grid::new(0.01, 20_000)?)?;
    let opts = SimOptions {
        grid: us.to_vec(),
        ..Default::default()
    };
    let outs = run_replicas(seed, 10_000, |_, rng| {
        simulate_hawkes(mu, 200.0, &kernel, &MarkDistribution::DiracOne, &OffspringLaw::PoissonOfMark, &opts, rng)
    })?;
    let mut parts = Vec::new();
    let mut detail = Vec::new();
    for (j, &u) in us.iter().enumerate() {
        let counts: Vec<f64> = outs.iter().map(|o| o.counts[j] as f64).collect();
        let (m, se) = mean_stderr(&counts);
        let exact = exact_mean_n(&table, mu, u)?;
        parts.push(((m - exact) / se, 3.0));
        detail.push(format!("u={u}: MC {m:.3} ± {se:.3} vs {exact:.3}"));
    }
    Ok(normalized("", &parts, started).with_detail(detail.join("; ")).within(300.0))
}

/// MC E e^{-⟨N,f⟩} vs exp(-μ∫g_f), f = 0.5·1_{[0,10]}, Dirac and Pareto marks.
pub fn finite_t_laplace(seed: u64) -> Result<Check> {
    let started = Instant::now();
    let mu = 1.0;
    let kernel = KernelSpec::pareto(0.5)?;
    let f = TestFunction::Indicators { terms: vec![(0.5, 10.0)] };
    let grid = Grid::covering(10.0, 4000)?;
    let law = OffspringLaw::PoissonOfMark;
    let mut parts = Vec::new();
    let mut detail = Vec::new();
    for (i, marks) in [MarkDistribution::DiracOne, MarkDistribution::ParetoMean1 { beta: 0.6 }].into_iter().enumerate() {
        let exact = solve_g(&f, &kernel, &marks, grid)?.log_laplace(mu).exp();
        let xs = run_replicas(seed.wrapping_add(i as u64), 100_000, |_, rng| {
            let o = simulate_hawkes(mu, 10.0, &kernel, &marks, &law, &SimOptions::default(), rng)?;
            Ok(f.pair(&o.times))
        })?;
        let e = empirical_laplace(&xs, &[1.0])[0];
        parts.push(((e.mean - exact) / e.stderr, 3.0));
        detail.push(format!("{marks:?}: MC {:.5} ± {:.5} vs {exact:.5}", e.mean, e.stderr));
    }
    Ok(normalized("", &parts, started).with_detail(detail.join("; ")).within(300.0))
}

fn heavy_model(kernel: &KernelSpec) -> Result<LimitModel> {
    LimitModel::heavy_tailed(kernel, &MarkDistribution::ParetoMean1 { beta: 0.6 }, 1.0)
}

/// μ∫w_{f_T} at T ∈ {10², 10³, 10⁴} for the Pareto kernel, α=0.3, β=0.6,
/// f = 1_{[0,1]}: monotonically decreasing relative error, below 15% at 10⁴.
pub fn deterministic_convergence(_seed: u64) -> Result<Check> {
    let started = Instant::now();
    let kernel = KernelSpec::pareto(0.3)?;
    let model = heavy_model(&kernel)?;
    let marks = MarkDistribution::ParetoMean1 { beta: 0.6 };
    let f = TestFunction::indicator(1.0, 1.0);
    let target = model.indicator_log_laplace(1.0);
    let mut errs = Vec::new();
    for t in [1e2, 1e3, 1e4] {
        let weights = CellWeights::new(&kernel, Grid::covering(t, 10_000)?)?;
        let ft = f.rescaled(t, model.norming(t))?;
        let w = solve_with_weights(&ft, &weights, &marks)?.int_w;
        errs.push(model.mu * w / target - 1.0);
    }
    let monotone = errs.windows(2).all(|e| e[1].abs() < e[0].abs());
    let mut c = Check::absolute("", errs[2].abs(), 0.0, 0.15, started);
    c.pass &= monotone;
    Ok(c.with_detail(format!(
        "relative errors at T=1e2,1e3,1e4: {:+.4}, {:+.4}, {:+.4}; monotone = {monotone}; target = {target:.6}",
        errs[0], errs[1], errs[2]
    ))
    .within(600.0))
}

/// Regression slope of ln IQR(N(T)) on ln T.
fn iqr_slope(seed: u64, kernel: &KernelSpec, marks: &MarkDistribution, ts: &[f64]) -> Result<f64> {
    let opts = SimOptions {
        grid: ts.to_vec(),
        ..Default::default()
    };
    let horizon = ts.iter().cloned().fold(0.0, f64::max);
    let outs = run_replicas(seed, 10_000, |_, rng| simulate_hawkes(1.0, horizon, kernel, marks, &OffspringLaw::PoissonOfMark, &opts, rng))?;
    let x: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = (0..ts.len())
        .map(|j| iqr(&outs.iter().map(|o| o.counts[j] as f64).collect::<Vec<_>>()).ln())
        .collect();
    Ok(ols_slope(&x, &y))
}

/// IQR regression slope over T ∈ {10², 10^2.5, 10³, 10^3.5}: heavy-tailed
/// (α=0.3, β=0.6) and finite-variance (α=0.4, exponential marks).
pub fn norming_exponent(seed: u64) -> Result<Check> {
    let started = Instant::now();
    let ts: Vec<f64> = [2.0, 2.5, 3.0, 3.5].iter().map(|e| 10f64.powf(*e)).collect();
    let heavy_k = KernelSpec::pareto(0.3)?;
    let heavy_m = MarkDistribution::ParetoMean1 { beta: 0.6 };
    let h_heavy = heavy_model(&heavy_k)?.hurst();
    let s_heavy = iqr_slope(seed, &heavy_k, &heavy_m, &ts)?;
    let gauss_k = KernelSpec::pareto(0.4)?;
    let gauss_m = MarkDistribution::ExponentialMean1;
    let h_gauss = LimitModel::gaussian(&gauss_k, &gauss_m, 1.0)?.hurst();
    let s_gauss = iqr_slope(seed ^ 2, &gauss_k, &gauss_m, &ts)?;
    let worst = (s_heavy - h_heavy).abs().max((s_gauss - h_gauss).abs());
    Ok(Check::absolute("", worst, 0.0, 0.1, started)
        .with_detail(format!("heavy slope {s_heavy:.4} vs {h_heavy:.4}; finite-variance slope {s_gauss:.4} vs {h_gauss:.4}"))
        .within(1800.0))
}

/// Hill estimate of the upper tail of X_T(1) at T = 10³, α=0.3, β=0.6.
pub fn tail_index(seed: u64) -> Result<Check> {
    let started = Instant::now();
    let kernel = KernelSpec::pareto(0.3)?;
    let marks = MarkDistribution::ParetoMean1 { beta: 0.6 };
    let model = heavy_model(&kernel)?;
    let t = 1e3;
    let opts = SimOptions {
        grid: vec![t],
        ..Default::default()
    };
    let outs = run_replicas(seed, 10_000, |_, rng| simulate_hawkes(1.0, t, &kernel, &marks, &OffspringLaw::PoissonOfMark, &opts, rng))?;
    let table = build_resolvent(&kernel, Grid::covering(t, 20_000)?)?;
    let xs: Vec<f64> = normalize_paths(&outs, &model, t, &table)?.iter().map(|p| p[0]).collect();
    let n_pos = xs.iter().filter(|&&x| x > 0.0).count();
    let est = |e: f64| hill_estimator(&xs, hill_k(n_pos, e));
    let main = est(0.6)?;
    let (lo, hi) = (est(0.5)?, est(0.7)?);
    Ok(Check::absolute("", main, 1.6, 0.15, started).with_detail(format!("k=n^0.5: {lo:.4}, k=n^0.6: {main:.4}, k=n^0.7: {hi:.4}")))
}

/// Quantiles of ζ(2) vs 2^H ζ(1), 10⁴ paths, 512 cells on [0, 2].
pub fn limit_self_similarity(seed: u64) -> Result<Check> {
    let started = Instant::now();
    let model = heavy_model(&KernelSpec::pareto(0.3)?)?;
    let zz = simulate_scaled_limit(&model, 1.0 / 256.0, 2.0, &[1.0, 2.0], 10_000, seed)?;
    let z1: Vec<f64> = zz.iter().map(|r| r[0]).collect();
    let z2: Vec<f64> = zz.iter().map(|r| r[1]).collect();
    let (worst, detail) = self_similarity_error(&z1, &z2, model.hurst(), &SELF_SIMILARITY_LEVELS);
    Ok(Check::absolute("", worst, 0.0, 0.1, started).with_detail(format!("H = {:.4}; {detail}", model.hurst())))
}

/// Sibuya-type offspring law: normalization with the exact tail, the
/// analytic tail asymptote, p_0, p_1, p_2, and the empirical mean.
pub fn beta_offspring_law(seed: u64) -> Result<Check> {
    let started = Instant::now();
    let beta = 0.6;
    let table = SibuyaTable::new(beta)?;
    let k_max = 1_000_000;
    let p = table.pmf(k_max);
    let total = p.iter().sum::<f64>() + table.tail(k_max);
    let asym = table.tail(k_max) / table.tail_asymptote(k_max as f64) - 1.0;
    let exact = [1.0 / (1.0 + beta), 0.0, beta / 2.0];
    let pmf_dev = exact.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let xs = chunked_samples(seed, 10_000_000, |rng| table.sample(rng) as f64)?;
    let (mean, _) = mean_stderr(&xs);
    // infinite variance: the sample mean converges like n^{-β/(1+β)}, so a
    // fixed tolerance replaces a standard-error band
    let parts = [(total - 1.0, 1e-10), (asym, 0.01), (pmf_dev, 1e-15), (mean - 1.0, 0.02)];
    Ok(normalized("", &parts, started).with_detail(format!(
        "sum p + tail - 1 = {:.2e}; tail/asymptote - 1 at 1e6 = {asym:.2e}; max |p_k - exact|, k<=2 = {pmf_dev:.1e}; mean over 1e7 = {mean:.4}",
        total - 1.0
    )))
}

/// Ratio of marked to β-offspring w-integrals at T = 10⁴ vs K_marked/K_beta.
pub fn beta_branching_consistency(_seed: u64) -> Result<Check> {
    let started = Instant::now();
    let kernel = KernelSpec::pareto(0.3)?;
    let marks = MarkDistribution::ParetoMean1 { beta: 0.6 };
    let marked = heavy_model(&kernel)?;
    let branching = LimitModel::beta_offspring(&kernel, 0.6, 1.0)?;
    let t = 1e4;
    let weights = CellWeights::new(&kernel, Grid::covering(t, 10_000)?)?;
    let ft = TestFunction::indicator(1.0, 1.0).rescaled(t, marked.norming(t))?;
    let a = solve_with_weights(&ft, &weights, &marks)?.int_w;
    let b = solve_with_weights(&ft, &weights, &SibuyaNonlinearity { beta: 0.6 })?.int_w;
    Ok(Check::relative("", a / b, marked.k / branching.k, 0.1, started))
}

/// sup_{s<t≤1} (I_R(Tt) - I_R(Ts)) / (T^α (t-s)^α) at T ∈ {10², 10³, 10⁴}
/// for the Mittag-Leffler and stable-density kernels (α = 0.5). Bounded
/// means finite with max/min across T at most 1.5.
pub fn tightness(_seed: u64) -> Result<Check> {
    let started = Instant::now();
    let alpha = 0.5;
    let grid = Grid::new(1.0, 10_000)?;
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for kernel in [KernelSpec::mittag_leffler(alpha, 1.0)?, KernelSpec::stable(alpha)?] {
        let table = build_resolvent(&kernel, grid)?;
        let sups = [1e2, 1e3, 1e4]
            .iter()
            .map(|&t| check_tightness(&table, t, 1.0, alpha).map(|r| r.sup_ratio))
            .collect::<Result<Vec<_>>>()?;
        let (lo, hi) = sups.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &s| (l.min(s), h.max(s)));
        let spread = if sups.iter().all(|s| s.is_finite() && *s > 0.0) { hi / lo } else { f64::INFINITY };
        worst = worst.max(spread);
        detail.push(format!("{:?}: sups [{:.4}, {:.4}, {:.4}]", kernel.variant(), sups[0], sups[1], sups[2]));
    }
    Ok(Check::absolute("", worst, 1.0, 0.5, started).with_detail(detail.join("; ")).within(600.0))
}

//! Deterministic solver for the Laplace functional of the cluster process.
//!
//! For f ≥ 0 supported in `[0, a]` and `S(t) = ∫ g(t+s) φ(s) ds`,
//!
//! ```text
//! g(t) = 1 - e^{-f(t)} L(S(t))              E e^{-⟨N,f⟩}     = exp(-μ ∫ g)
//! h(t) = f(t) + ∫ h(t+s) φ(s) ds            E ⟨N,f⟩          = μ ∫ h
//! w    = h - g                              E e^{-⟨N-EN,f⟩}  = exp(μ ∫ w)
//! ```
//!
//! where `L(S) = 1 - S + H(S)` is the offspring generating function evaluated
//! at `1 - S`. Displacements are positive, so all three vanish beyond `a` and
//! can be computed by marching backward from `a` to 0.
//!
//! Discretization: node values at `t_j = j·dt`, `j = 0..=n`, `n·dt ≥ a`,
//! piecewise-linear in between, with node `n` holding the left limit at the
//! end of the grid. Convolutions against φ use the exact hat-function weights
//! `q_k = (m_k - d_k) + d_{k-1}` where `m_k` is the kernel mass of cell `k` and
//! `d_k = ∫_{cell k} φ(s)(s/dt - k) ds`; the last (half) hat only gets `d`.
//! `w` is marched directly from its own equation
//! `w = ∫ w(t+s)φ(s)ds + (f - 1 + e^{-f}) + (1 - e^{-f}) S + e^{-f} H(S)`,
//! so no large-minus-large cancellation occurs when f is tiny.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::marks::MarkDistribution;
use crate::numeric::special::exp_neg_minus_one_plus;
use crate::renewal::resolvent::{cell_masses, Grid};
use crate::renewal::test_function::TestFunction;

/// `H(S) = L(S) - 1 + S` for an offspring law with mean one.
pub trait Nonlinearity: Sync {
    fn h(&self, s: f64) -> f64;
}

/// Poisson(mark) offspring: `L` is the mark Laplace transform.
impl Nonlinearity for MarkDistribution {
    fn h(&self, s: f64) -> f64 {
        MarkDistribution::h(self, s.max(0.0)).unwrap_or(f64::NAN)
    }
}

/// Offspring generating function `s + (1-s)^{1+β}/(1+β)`: `H(S) = S^{1+β}/(1+β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SibuyaNonlinearity {
    pub beta: f64,
}

impl Nonlinearity for SibuyaNonlinearity {
    fn h(&self, s: f64) -> f64 {
        let p = 1.0 + self.beta;
        s.max(0.0).powf(p) / p
    }
}

/// Hat-function weights of φ on a uniform grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellWeights {
    pub grid: Grid,
    pub m: Vec<f64>,
    pub d: Vec<f64>,
}

impl CellWeights {
    pub fn new(kernel: &KernelSpec, grid: Grid) -> Result<Self> {
        let (m, _) = cell_masses(kernel, grid)?;
        let dt = grid.dt;
        let d = (0..grid.n)
            .map(|k| Ok(kernel.cell_moment(k as f64 * dt, (k + 1) as f64 * dt)? / dt))
            .collect::<Result<Vec<_>>>()?;
        if m[0] - d[0] >= 1.0 {
            return Err(Error::GridTooCoarse(m[0] - d[0]));
        }
        Ok(Self { grid, m, d })
    }

    /// Full-hat weight q_k.
    fn q(&self) -> Vec<f64> {
        (0..self.grid.n)
            .map(|k| self.m[k] - self.d[k] + if k > 0 { self.d[k - 1] } else { 0.0 })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverState {
    pub dt: f64,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub w: Vec<f64>,
    pub int_g: f64,
    pub int_h: f64,
    pub int_w: f64,
}

impl SolverState {
    /// ln E e^{-⟨N,f⟩} = -μ ∫ g.
    pub fn log_laplace(&self, mu: f64) -> f64 {
        -mu * self.int_g
    }

    /// E ⟨N,f⟩ = μ ∫ h.
    pub fn mean(&self, mu: f64) -> f64 {
        mu * self.int_h
    }

    /// ln E e^{-⟨N - EN, f⟩} = μ ∫ w.
    pub fn centered_log_laplace(&self, mu: f64) -> f64 {
        mu * self.int_w
    }

    /// max_j |h_j - f_j - Σ_k q_k h_{j+k}| relative to max h.
    pub fn renewal_residual(&self, f: &TestFunction, weights: &CellWeights) -> f64 {
        let n = weights.grid.n;
        let q = weights.q();
        let hmax = self.h.iter().cloned().fold(0.0, f64::max);
        let mut worst: f64 = 0.0;
        for j in 0..=n {
            let fj = node_value(f, j, n, self.dt);
            let mut conv = 0.0;
            for k in 0..n - j {
                conv += q[k] * self.h[j + k];
            }
            if j < n {
                conv += weights.d[n - j - 1] * self.h[n];
            }
            worst = worst.max((self.h[j] - fj - conv).abs());
        }
        if hmax > 0.0 {
            worst / hmax
        } else {
            worst
        }
    }
}

fn node_value(f: &TestFunction, j: usize, n: usize, dt: f64) -> f64 {
    if j == n {
        f.eval_left(n as f64 * dt)
    } else {
        f.eval(j as f64 * dt)
    }
}

fn trapezoid(v: &[f64], dt: f64) -> f64 {
    let n = v.len() - 1;
    dt * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[n]))
}

const FIXED_POINT_MAX: usize = 200;

/// Solve for g, h, w with precomputed weights.
pub fn solve_with_weights(f: &TestFunction, weights: &CellWeights, nl: &dyn Nonlinearity) -> Result<SolverState> {
    f.validate()?;
    if !f.is_nonnegative() {
        return Err(Error::InvalidParameter(format!("test function {f} is not nonnegative")));
    }
    let grid = weights.grid;
    let Some(end) = f.support_end() else {
        return Err(Error::InvalidParameter("solver needs a compactly supported f".into()));
    };
    if end > grid.horizon() * (1.0 + 1e-12) {
        return Err(Error::SupportExceedsHorizon {
            support: end,
            horizon: grid.horizon(),
        });
    }
    let (n, dt) = (grid.n, grid.dt);
    let q = weights.q();
    let c = q[0];
    let mut g = vec![0.0; n + 1];
    let mut h = vec![0.0; n + 1];
    let mut w = vec![0.0; n + 1];

    let fn_ = node_value(f, n, n, dt);
    g[n] = -(-fn_).exp_m1();
    h[n] = fn_;
    w[n] = exp_neg_minus_one_plus(fn_);

    for j in (0..n).rev() {
        let fj = node_value(f, j, n, dt);
        // contributions from nodes strictly to the right
        let tail_w = weights.d[n - j - 1];
        let (mut rg, mut rh, mut rw) = (tail_w * g[n], tail_w * h[n], tail_w * w[n]);
        for k in 1..n - j {
            let qk = q[k];
            rg += qk * g[j + k];
            rh += qk * h[j + k];
            rw += qk * w[j + k];
        }
        let e = (-fj).exp();
        let mut x = g[j + 1];
        for _ in 0..FIXED_POINT_MAX {
            let s = rg + c * x;
            let next = 1.0 - e * (1.0 - s + nl.h(s));
            let done = (next - x).abs() <= 1e-16 * next.abs();
            x = next;
            if done {
                break;
            }
        }
        g[j] = x;
        let s = rg + c * x;
        h[j] = (fj + rh) / (1.0 - c);
        let source = exp_neg_minus_one_plus(fj) - (-fj).exp_m1() * s + e * nl.h(s);
        w[j] = (rw + source) / (1.0 - c);
    }
    if g.iter().chain(&w).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("nonlinearity produced non-finite values".into()));
    }
    Ok(SolverState {
        dt,
        int_g: trapezoid(&g, dt),
        int_h: trapezoid(&h, dt),
        int_w: trapezoid(&w, dt),
        g,
        h,
        w,
    })
}

/// Solve on `grid`, building the kernel weights.
pub fn solve_g(f: &TestFunction, kernel: &KernelSpec, nl: &dyn Nonlinearity, grid: Grid) -> Result<SolverState> {
    let weights = CellWeights::new(kernel, grid)?;
    solve_with_weights(f, &weights, nl)
}

/// ∫_0^∞ w_{f_T}(t) dt for `f_T(t) = f(t/T)/F_T`, on `cells` cells covering
/// the rescaled support.
pub fn scaled_w_integral(
    f: &TestFunction,
    kernel: &KernelSpec,
    nl: &dyn Nonlinearity,
    scale: f64,
    norm: f64,
    cells: usize,
) -> Result<f64> {
    let ft = f.rescaled(scale, norm)?;
    let end = ft.support_end().unwrap_or(0.0);
    if end == 0.0 || f.is_zero() {
        return Ok(0.0);
    }
    let grid = Grid::covering(end, cells)?;
    Ok(solve_g(&ft, kernel, nl, grid)?.int_w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renewal::resolvent::{build_resolvent, exact_mean_n};
    use crate::stable::LimitModel;

    fn pareto() -> KernelSpec {
        KernelSpec::pareto(0.5).unwrap()
    }

    #[test]
    fn zero_input_gives_zero() {
        let s = solve_g(&TestFunction::zero(), &pareto(), &MarkDistribution::DiracOne, Grid::new(0.1, 10).unwrap()).unwrap();
        assert!(s.g.iter().chain(&s.h).chain(&s.w).all(|&v| v == 0.0));
        let v = scaled_w_integral(&TestFunction::zero(), &pareto(), &MarkDistribution::DiracOne, 10.0, 2.0, 10).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn ordering_and_residual() {
        let f = TestFunction::Indicators {
            terms: vec![(0.5, 10.0), (1.5, 4.0)],
        };
        for nl in [
            &MarkDistribution::DiracOne as &dyn Nonlinearity,
            &MarkDistribution::ParetoMean1 { beta: 0.6 },
            &SibuyaNonlinearity { beta: 0.6 },
        ] {
            let weights = CellWeights::new(&pareto(), Grid::covering(10.0, 500).unwrap()).unwrap();
            let s = solve_with_weights(&f, &weights, nl).unwrap();
            for j in 0..s.g.len() {
                assert!(s.g[j] >= 0.0 && s.g[j] <= s.h[j] + 1e-15);
                assert!(s.w[j] >= 0.0 && s.w[j] <= s.h[j] + 1e-15);
                assert!((s.h[j] - s.g[j] - s.w[j]).abs() < 1e-12);
            }
            assert!(s.renewal_residual(&f, &weights) < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let k = pareto();
        let grid = Grid::new(0.1, 10).unwrap();
        let neg = TestFunction::indicator(-1.0, 0.5);
        assert!(solve_g(&neg, &k, &MarkDistribution::DiracOne, grid).is_err());
        let wide = TestFunction::indicator(1.0, 5.0);
        assert!(matches!(
            solve_g(&wide, &k, &MarkDistribution::DiracOne, grid),
            Err(Error::SupportExceedsHorizon { .. })
        ));
    }

    #[test]
    fn mean_matches_resolvent() {
        // ∫h = u + ∫_0^u I_R for f = 1_{[0,u]}
        let k = pareto();
        let u = 20.0;
        let s = solve_g(&TestFunction::indicator(1.0, u), &k, &MarkDistribution::DiracOne, Grid::covering(u, 2000).unwrap()).unwrap();
        let t = build_resolvent(&k, Grid::covering(u, 2000).unwrap()).unwrap();
        let m = exact_mean_n(&t, 1.0, u).unwrap();
        assert!((s.mean(1.0) / m - 1.0).abs() < 2e-3, "{} vs {m}", s.mean(1.0));
    }

    #[test]
    fn grid_refinement() {
        let k = pareto();
        let f = TestFunction::indicator(0.5, 10.0);
        let coarse = solve_g(&f, &k, &MarkDistribution::DiracOne, Grid::covering(10.0, 200).unwrap()).unwrap();
        let fine = solve_g(&f, &k, &MarkDistribution::DiracOne, Grid::covering(10.0, 400).unwrap()).unwrap();
        assert!((coarse.int_g / fine.int_g - 1.0).abs() < 1e-2);
        assert!((coarse.int_g / fine.int_g - 1.0).abs() < 1e-4, "second order expected");
    }

    #[test]
    fn scaled_integral_moves_toward_target() {
        let k = KernelSpec::pareto(0.3).unwrap();
        let marks = MarkDistribution::ParetoMean1 { beta: 0.6 };
        let model = LimitModel::heavy_tailed(&k, &marks, 1.0).unwrap();
        let target = model.indicator_log_laplace(1.0);
        let f = TestFunction::indicator(1.0, 1.0);
        let err = |t: f64| {
            let v = scaled_w_integral(&f, &k, &marks, t, model.norming(t), 1000).unwrap();
            (v / target - 1.0).abs()
        };
        assert!(err(1e3) < err(1e2));
    }
}

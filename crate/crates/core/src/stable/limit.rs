//! Constants of the scaling limit and simulation of the limit processes
//!
//! ```text
//! ζ_t = ∫_{[0,t]} u^{α/(1+β)} (t-u)^α L_{1+β}(du)      (heavy-tailed marks)
//! ζ_t = ∫_{[0,t]} u^{α/2}     (t-u)^α B(du)            (finite variance)
//! ```
//!
//! Both are self-similar with index `H`, equal to the exponent of the norming
//! `F_T = T^H`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernels::KernelSpec;
use crate::marks::MarkDistribution;
use crate::numeric::special::{beta_fn, gamma};
use crate::stable::SkewedStable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime")]
pub enum Regime {
    /// (1+β)-stable limit; `h_constant` is lim H(x)/x^{1+β}.
    Stable { beta: f64, h_constant: f64 },
    /// Gaussian limit; `second_moment` is ∫x²ν(dx).
    Gaussian { second_moment: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitModel {
    pub alpha: f64,
    pub regime: Regime,
    pub mu: f64,
    pub c_alpha: f64,
    /// constant in the limiting log-Laplace functional
    pub k: f64,
}

/// c_α = 1/(c_φ Γ(1+α) Γ(1-α)), the constant in I_R(T) ~ c_α T^α.
pub fn c_alpha(alpha: f64, c_phi: f64) -> f64 {
    1.0 / (c_phi * gamma(1.0 + alpha) * gamma(1.0 - alpha))
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(domain("mu", mu, "immigration rate must be positive"))
    }
}

impl LimitModel {
    /// Poisson offspring with heavy-tailed marks; requires α < β.
    pub fn heavy_tailed(kernel: &KernelSpec, marks: &MarkDistribution, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        let (Some(beta), Some(h_constant)) = (marks.beta(), marks.h_constant()) else {
            return Err(Error::InvalidParameter(format!("{marks:?} has no heavy tail")));
        };
        let alpha = kernel.alpha();
        if alpha >= beta {
            return Err(Error::InvalidParameter(format!(
                "heavy-tailed regime needs alpha < beta, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(Self::stable(alpha, kernel.c_phi(), beta, h_constant, mu))
    }

    /// Offspring generating function s + (1-s)^{1+β}/(1+β), no marks:
    /// the nonlinearity is exactly x^{1+β}/(1+β).
    pub fn beta_offspring(kernel: &KernelSpec, beta: f64, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        if !(beta > 0.0 && beta < 1.0) {
            return Err(domain("beta", beta, "must lie in (0, 1)"));
        }
        Ok(Self::stable(kernel.alpha(), kernel.c_phi(), beta, 1.0 / (1.0 + beta), mu))
    }

    /// Poisson offspring with finite-variance marks.
    pub fn gaussian(kernel: &KernelSpec, marks: &MarkDistribution, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        let Some(m2) = marks.second_moment() else {
            return Err(Error::InvalidParameter(format!("{marks:?} has infinite variance")));
        };
        let alpha = kernel.alpha();
        let ca = c_alpha(alpha, kernel.c_phi());
        Ok(Self {
            alpha,
            regime: Regime::Gaussian { second_moment: m2 },
            mu,
            c_alpha: ca,
            k: 0.5 * m2 * ca.powi(3) * alpha * alpha,
        })
    }

    fn stable(alpha: f64, c_phi: f64, beta: f64, h_constant: f64, mu: f64) -> Self {
        let ca = c_alpha(alpha, c_phi);
        Self {
            alpha,
            regime: Regime::Stable { beta, h_constant },
            mu,
            c_alpha: ca,
            k: h_constant * ca.powf(2.0 + beta) * alpha.powf(1.0 + beta),
        }
    }

    /// Stability index of the limit: 1+β, or 2 in the Gaussian case.
    pub fn index(&self) -> f64 {
        match self.regime {
            Regime::Stable { beta, .. } => 1.0 + beta,
            Regime::Gaussian { .. } => 2.0,
        }
    }

    /// Self-similarity index H = (1 + α(1 + index)) / index, i.e.
    /// (1+α(2+β))/(1+β) or (1+3α)/2.
    pub fn hurst(&self) -> f64 {
        let p = self.index();
        (1.0 + self.alpha * (1.0 + p)) / p
    }

    /// F_T = T^H.
    pub fn norming(&self, t: f64) -> f64 {
        t.powf(self.hurst())
    }

    /// Factor c with X_T(t) → c ζ_t in finite-dimensional distributions,
    /// fixed by matching Laplace transforms: (μK)^{1/(1+β)}/α against
    /// E e^{-λL(1)} = e^{λ^{1+β}}, and √(2μK)/α against E e^{-λB(1)} = e^{λ²/2}.
    pub fn prefactor(&self) -> f64 {
        match self.regime {
            Regime::Stable { .. } => (self.mu * self.k).powf(1.0 / self.index()) / self.alpha,
            Regime::Gaussian { .. } => (2.0 * self.mu * self.k).sqrt() / self.alpha,
        }
    }

    /// μ K ∫_0^∞ (G^{(α)} 1_{[0,u]}(t))^p t^α dt
    /// = μ K α^{-p} u^{1+α+αp} B(α+1, αp+1).
    pub fn indicator_log_laplace(&self, u: f64) -> f64 {
        let (a, p) = (self.alpha, self.index());
        self.mu * self.k * a.powf(-p) * u.powf(1.0 + a + a * p) * beta_fn(a + 1.0, a * p + 1.0)
    }
}

/// Uniform time grid `t_j = j·dt`, `j = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathGrid {
    pub dt: f64,
    pub n: usize,
}

impl PathGrid {
    pub fn new(dt: f64, n: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) || n == 0 {
            return Err(Error::InvalidParameter(format!("path grid needs dt > 0 and n > 0, got {dt}, {n}")));
        }
        Ok(Self { dt, n })
    }

    pub fn covering(t_max: f64, n: usize) -> Result<Self> {
        Self::new(t_max / n as f64, n)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |j| j as f64 * self.dt)
    }
}

/// ζ(t_j) = Σ_{i<j} u_i^{e} (t_j - u_i)^α ΔL_i with midpoints u_i = (i+½)dt.
fn riemann_path(alpha: f64, e: f64, grid: PathGrid, increments: &[f64]) -> Vec<f64> {
    let dt = grid.dt;
    let weighted: Vec<f64> = increments
        .iter()
        .enumerate()
        .map(|(i, dl)| ((i as f64 + 0.5) * dt).powf(e) * dl)
        .collect();
    // (t_j - u_i)^α depends only on j - i
    let lag: Vec<f64> = (0..=grid.n).map(|m| ((m as f64 - 0.5) * dt).max(0.0).powf(alpha)).collect();
    let mut path = vec![0.0; grid.n + 1];
    for j in 1..=grid.n {
        path[j] = weighted[..j].iter().enumerate().map(|(i, w)| w * lag[j - i]).sum();
    }
    path
}

/// One path of the stable limit process (without the prefactor).
pub fn simulate_limit_process<R: Rng + ?Sized>(model: &LimitModel, grid: PathGrid, rng: &mut R) -> Result<Vec<f64>> {
    let Regime::Stable { beta, .. } = model.regime else {
        return Ok(simulate_gaussian_limit(model.alpha, grid, rng));
    };
    let p = 1.0 + beta;
    let law = SkewedStable::new(p)?;
    let scale = grid.dt.powf(1.0 / p);
    let dl: Vec<f64> = (0..grid.n).map(|_| scale * law.sample(rng)).collect();
    Ok(riemann_path(model.alpha, model.alpha / p, grid, &dl))
}

/// One path of ∫ u^{α/2}(t-u)^α B(du).
pub fn simulate_gaussian_limit<R: Rng + ?Sized>(alpha: f64, grid: PathGrid, rng: &mut R) -> Vec<f64> {
    let sd = grid.dt.sqrt();
    let db: Vec<f64> = (0..grid.n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            sd * z
        })
        .collect();
    riemann_path(alpha, alpha / 2.0, grid, &db)
}

/// Var ζ^{BM}(t) = t^{1+3α} B(α+1, 2α+1).
pub fn gaussian_limit_variance(alpha: f64, t: f64) -> f64 {
    t.powf(1.0 + 3.0 * alpha) * beta_fn(alpha + 1.0, 2.0 * alpha + 1.0)
}

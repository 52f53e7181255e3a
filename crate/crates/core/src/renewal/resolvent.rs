//! Mass-based discretization of the renewal measure `R = Σ_{k≥1} φ^{*k}`.
//!
//! Cell `k` covers `[k·dt, (k+1)·dt)`. Kernel masses `m_k = Φ(k·dt) - Φ((k+1)·dt)`
//! are exact cell probabilities, so the integrable singularity of the
//! Mittag-Leffler density at 0 costs nothing and `Σ m_k + Φ(n·dt) = 1`.
//! The resolvent masses solve the discrete renewal equation
//! `r_k = m_k + Σ_{j=0}^{k} m_j r_{k-j}` by forward recursion.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernels::KernelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dt: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(dt: f64, n: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(domain("dt", dt, "cell width must be positive"));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("grid needs at least one cell".into()));
        }
        Ok(Self { dt, n })
    }

    /// `n` cells covering `[0, horizon]`.
    pub fn covering(horizon: f64, n: usize) -> Result<Self> {
        Self::new(horizon / n as f64, n)
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.n as f64
    }
}

/// Cell probabilities of φ on `grid`, differencing whichever of Φ or 1-Φ is
/// small to keep relative accuracy.
pub fn cell_masses(kernel: &KernelSpec, grid: Grid) -> Result<(Vec<f64>, f64)> {
    let mut tails = Vec::with_capacity(grid.n + 1);
    let mut cdfs = Vec::with_capacity(grid.n + 1);
    for k in 0..=grid.n {
        let t = k as f64 * grid.dt;
        let tail = kernel.tail(t)?;
        tails.push(tail);
        cdfs.push(if tail > 0.5 { kernel.cdf(t)? } else { 1.0 - tail });
    }
    let m = (0..grid.n)
        .map(|k| {
            if tails[k + 1] > 0.5 {
                cdfs[k + 1] - cdfs[k]
            } else {
                tails[k] - tails[k + 1]
            }
        })
        .collect();
    Ok((m, tails[grid.n]))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolventTable {
    pub grid: Grid,
    pub alpha: f64,
    /// kernel mass of each cell
    pub m: Vec<f64>,
    /// Φ(n·dt): kernel mass beyond the horizon
    pub tail_beyond: f64,
    /// resolvent mass of each cell
    pub r: Vec<f64>,
    /// I_R at the cell edges, `i_r[0] = 0`
    pub i_r: Vec<f64>,
    /// I_R(horizon) / horizon^α
    pub c_alpha_estimate: f64,
}

/// Resolvent table for `kernel` on `grid`. O(n²).
pub fn build_resolvent(kernel: &KernelSpec, grid: Grid) -> Result<ResolventTable> {
    let (m, tail_beyond) = cell_masses(kernel, grid)?;
    ResolventTable::from_masses(grid, kernel.alpha(), m, tail_beyond)
}

impl ResolventTable {
    /// Table from explicit cell masses (`tail_beyond` is the missing mass).
    pub fn from_masses(grid: Grid, alpha: f64, m: Vec<f64>, tail_beyond: f64) -> Result<Self> {
        if m.len() != grid.n {
            return Err(Error::InvalidParameter(format!("{} masses for {} cells", m.len(), grid.n)));
        }
        let m0 = m[0];
        if m0 >= 1.0 {
            return Err(Error::GridTooCoarse(m0));
        }
        let n = grid.n;
        let mut r = vec![0.0; n];
        let scale = 1.0 / (1.0 - m0);
        for k in 0..n {
            let conv: f64 = (1..=k).map(|j| m[j] * r[k - j]).sum();
            r[k] = (m[k] + conv) * scale;
        }
        let mut i_r = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        i_r.push(0.0);
        for &rk in &r {
            acc += rk;
            i_r.push(acc);
        }
        let c_alpha_estimate = acc / grid.horizon().powf(alpha);
        Ok(Self {
            grid,
            alpha,
            m,
            tail_beyond,
            r,
            i_r,
            c_alpha_estimate,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.grid.horizon()
    }

    fn check_horizon(&self, t: f64) -> Result<()> {
        if t > self.horizon() * (1.0 + 1e-12) {
            Err(Error::HorizonExceeded {
                requested: t,
                available: self.horizon(),
            })
        } else {
            Ok(())
        }
    }

    /// I_R(t), linear between cell edges.
    pub fn i_r_at(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(domain("t", t, "must be nonnegative"));
        }
        self.check_horizon(t)?;
        let x = t / self.grid.dt;
        let k = (x.floor() as usize).min(self.grid.n - 1);
        let frac = x - k as f64;
        Ok(self.i_r[k] + frac * (self.i_r[k + 1] - self.i_r[k]))
    }

    /// ∫_0^u I_R(t) dt (trapezoid on the edge values; exact for the linear
    /// interpolant).
    pub fn integrated_i_r(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return Err(domain("u", u, "must be nonnegative"));
        }
        self.check_horizon(u)?;
        let dt = self.grid.dt;
        let x = u / dt;
        let k = (x.floor() as usize).min(self.grid.n);
        let mut acc = 0.0;
        for i in 0..k {
            acc += 0.5 * (self.i_r[i] + self.i_r[i + 1]) * dt;
        }
        let rest = u - k as f64 * dt;
        if rest > 0.0 {
            acc += 0.5 * (self.i_r[k] + self.i_r_at(u)?) * rest;
        }
        Ok(acc)
    }

    /// Largest |r_k - m_k - Σ_{j≤k} m_j r_{k-j}|.
    pub fn renewal_residual(&self) -> f64 {
        (0..self.grid.n)
            .map(|k| {
                let conv: f64 = (0..=k).map(|j| self.m[j] * self.r[k - j]).sum();
                (self.r[k] - self.m[k] - conv).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// E N([0,u]) = μ (u + ∫_0^u I_R(t) dt).
pub fn exact_mean_n(table: &ResolventTable, mu: f64, u: f64) -> Result<f64> {
    if !(mu >= 0.0) {
        return Err(domain("mu", mu, "must be nonnegative"));
    }
    Ok(mu * (u + table.integrated_i_r(u)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TightnessReport {
    pub scale: f64,
    pub sup_ratio: f64,
    pub argmax_s: f64,
    pub argmax_t: f64,
    pub pairs: usize,
}

/// Points per unit of `m_max` used for the pair grid.
const TIGHTNESS_POINTS: usize = 200;

/// sup_{0≤s<t≤M} (I_R(Tt) - I_R(Ts)) / (T^α (t-s)^ε) over a uniform pair
/// grid; pairs closer than one cell (`T(t-s) < dt`) are skipped.
pub fn check_tightness(table: &ResolventTable, scale: f64, m_max: f64, eps: f64) -> Result<TightnessReport> {
    if !(eps > 0.0 && eps <= table.alpha) {
        return Err(domain("eps", eps, "must lie in (0, alpha]"));
    }
    if !(scale > 0.0 && m_max > 0.0) {
        return Err(Error::InvalidParameter("T and M must be positive".into()));
    }
    table.check_horizon(scale * m_max)?;
    let pts: Vec<f64> = (0..=TIGHTNESS_POINTS).map(|i| m_max * i as f64 / TIGHTNESS_POINTS as f64).collect();
    let vals = pts.iter().map(|&s| table.i_r_at(scale * s)).collect::<Result<Vec<_>>>()?;
    let norm = scale.powf(table.alpha);
    let mut best = TightnessReport {
        scale,
        sup_ratio: 0.0,
        argmax_s: 0.0,
        argmax_t: 0.0,
        pairs: 0,
    };
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let gap = pts[j] - pts[i];
            if scale * gap < table.grid.dt {
                continue;
            }
            best.pairs += 1;
            let ratio = (vals[j] - vals[i]) / (norm * gap.powf(eps));
            if ratio > best.sup_ratio {
                best.sup_ratio = ratio;
                best.argmax_s = pts[i];
                best.argmax_t = pts[j];
            }
        }
    }
    Ok(best)
}

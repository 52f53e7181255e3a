//! Offspring laws of the critical branching structure (mean exactly one).

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::marks::MarkDistribution;
use crate::renewal::{Nonlinearity, SibuyaNonlinearity};

/// Largest count sampled from the table; beyond it the exact power tail is inverted.
pub const SIBUYA_TABLE_MAX: usize = 1_000_000;

/// Offspring law with generating function `G(s) = s + (1-s)^{1+β}/(1+β)`.
///
/// `p_0 = 1/(1+β)`, `p_1 = 0`, `p_2 = β/2`, `p_{k+1} = p_k (k-1-β)/(k+1)`;
/// the tails `P(K > k) = |C(β, k)|/(1+β)` obey `t_{k+1} = t_k (k-β)/(k+1)`
/// and decay like `k^{-(1+β)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SibuyaTable {
    beta: f64,
    /// P(K > k) for k = 0..=SIBUYA_TABLE_MAX
    tails: Vec<f64>,
}

impl SibuyaTable {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(domain("beta", beta, "must lie in (0, 1)"));
        }
        let p = 1.0 + beta;
        let mut tails = Vec::with_capacity(SIBUYA_TABLE_MAX + 1);
        tails.push(beta / p); // P(K > 0) = 1 - p_0
        let mut t = beta / p; // P(K > 1), since p_1 = 0
        for k in 1..=SIBUYA_TABLE_MAX {
            tails.push(t);
            t *= (k as f64 - beta) / (k as f64 + 1.0);
        }
        Ok(Self { beta, tails })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// p_0, p_1, ..., p_{k_max} from the forward recurrence.
    pub fn pmf(&self, k_max: usize) -> Vec<f64> {
        let b = self.beta;
        let mut p = vec![0.0; k_max + 1];
        p[0] = 1.0 / (1.0 + b);
        if k_max >= 2 {
            p[2] = b / 2.0;
        }
        for k in 2..k_max {
            p[k + 1] = p[k] * (k as f64 - 1.0 - b) / (k as f64 + 1.0);
        }
        p
    }

    /// P(K > k) exactly (k ≤ table size).
    pub fn tail(&self, k: usize) -> f64 {
        self.tails[k]
    }

    /// Leading-order tail `k^{-(1+β)} / ((1+β) |Γ(-β)|)`, accurate to `O(1/k)`.
    pub fn tail_asymptote(&self, k: f64) -> f64 {
        let b = self.beta;
        k.powf(-(1.0 + b)) / ((1.0 + b) * crate::numeric::special::gamma(-b).abs())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        // tail level v ∈ (0, 1]; K = min{k : P(K > k) < v}
        let v = 1.0 - rng.random::<f64>();
        let last = self.tails.len() - 1;
        if v <= self.tails[last] {
            // invert t_k ≈ t_K (K/k)^{1+β} beyond the table
            let k = last as f64 * (self.tails[last] / v).powf(1.0 / (1.0 + self.beta));
            return k.ceil().max(last as f64 + 1.0) as u64;
        }
        self.tails.partition_point(|&t| t >= v) as u64
    }
}

#[derive(Debug, Clone)]
pub enum OffspringLaw {
    /// Poisson with parameter equal to the parent's mark.
    PoissonOfMark,
    /// Generating function `s + (1-s)^{1+β}/(1+β)`, independent of marks.
    BetaSibuya(Arc<SibuyaTable>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum OffspringSpec {
    PoissonOfMark,
    BetaSibuya { beta: f64 },
}

impl OffspringLaw {
    pub fn from_spec(spec: OffspringSpec) -> Result<Self> {
        Ok(match spec {
            OffspringSpec::PoissonOfMark => Self::PoissonOfMark,
            OffspringSpec::BetaSibuya { beta } => Self::BetaSibuya(Arc::new(SibuyaTable::new(beta)?)),
        })
    }

    pub fn beta_sibuya(beta: f64) -> Result<Self> {
        Self::from_spec(OffspringSpec::BetaSibuya { beta })
    }

    pub fn sample_count<R: Rng + ?Sized>(&self, mark: f64, rng: &mut R) -> u64 {
        match self {
            Self::PoissonOfMark => {
                if mark <= 0.0 {
                    return 0;
                }
                let d: f64 = Poisson::new(mark).expect("finite positive mark").sample(rng);
                d as u64
            }
            Self::BetaSibuya(table) => table.sample(rng),
        }
    }

    /// Nonlinearity of the Laplace-functional equation for this law.
    pub fn nonlinearity<'a>(&'a self, marks: &'a MarkDistribution) -> Box<dyn Nonlinearity + 'a> {
        match self {
            Self::PoissonOfMark => Box::new(*marks),
            Self::BetaSibuya(t) => Box::new(SibuyaNonlinearity { beta: t.beta() }),
        }
    }
}

/// One draw of the offspring count of a particle with mark `mark`.
pub fn sample_offspring_count<R: Rng + ?Sized>(law: &OffspringLaw, mark: f64, rng: &mut R) -> u64 {
    law.sample_count(mark, rng)
}

//! Mark laws ν on (0, ∞) with mean exactly 1, their Laplace transforms, and
//! the nonlinearity `H(x) = ∫ (e^{-ux} - 1 + ux) ν(du) = L_ν(x) - 1 + x`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{domain, require_nonneg, Result};
use crate::numeric::special::{exp_neg_minus_one_plus, gamma, ln_gamma, upper_gamma_cf};

/// Pareto Laplace transform: power series below this `x_m z`, continued fraction above.
const PARETO_SERIES_MAX: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum MarkDistribution {
    DiracOne,
    /// Pareto with shape `1+β` and scale `x_m = β/(1+β)`.
    ParetoMean1 { beta: f64 },
    ExponentialMean1,
    /// Gamma with the given shape and scale `1/shape`.
    GammaMean1 { shape: f64 },
}

impl MarkDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::ParetoMean1 { beta } if !(beta > 0.0 && beta < 1.0) => {
                Err(domain("beta", beta, "Pareto mark exponent must lie in (0, 1)"))
            }
            Self::GammaMean1 { shape } if !(shape > 0.0 && shape.is_finite()) => {
                Err(domain("shape", shape, "must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Tail exponent β of the heavy-tailed variant.
    pub fn beta(&self) -> Option<f64> {
        match *self {
            Self::ParetoMean1 { beta } => Some(beta),
            _ => None,
        }
    }

    /// Pareto scale `x_m = β/(1+β)`.
    pub fn scale(&self) -> Option<f64> {
        self.beta().map(|b| b / (1.0 + b))
    }

    /// lim x^{1+β} ν((x, ∞)) = x_m^{1+β}.
    pub fn c_nu(&self) -> Option<f64> {
        match *self {
            Self::ParetoMean1 { beta } => Some((beta / (1.0 + beta)).powf(1.0 + beta)),
            _ => None,
        }
    }

    /// ∫ x² ν(dx) when finite.
    pub fn second_moment(&self) -> Option<f64> {
        match *self {
            Self::DiracOne => Some(1.0),
            Self::ExponentialMean1 => Some(2.0),
            Self::GammaMean1 { shape } => Some(1.0 + 1.0 / shape),
            Self::ParetoMean1 { .. } => None,
        }
    }

    /// lim_{x↓0} H(x)/x^{1+β} = (c_ν/β) Γ(1-β) for the heavy-tailed law.
    pub fn h_constant(&self) -> Option<f64> {
        match *self {
            Self::ParetoMean1 { beta } => Some(self.c_nu()? / beta * gamma(1.0 - beta)),
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::DiracOne => 1.0,
            Self::ParetoMean1 { beta } => {
                let v = 1.0 - rng.random::<f64>();
                beta / (1.0 + beta) * v.powf(-1.0 / (1.0 + beta))
            }
            Self::ExponentialMean1 => Exp1.sample(rng),
            Self::GammaMean1 { shape } => Gamma::new(shape, 1.0 / shape)
                .expect("validated shape")
                .sample(rng),
        }
    }

    /// ν((x, ∞)).
    pub fn tail(&self, x: f64) -> Result<f64> {
        require_nonneg("x", x)?;
        Ok(match *self {
            Self::DiracOne => {
                if x < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::ParetoMean1 { beta } => {
                let xm = beta / (1.0 + beta);
                if x <= xm {
                    1.0
                } else {
                    (xm / x).powf(1.0 + beta)
                }
            }
            Self::ExponentialMean1 => (-x).exp(),
            Self::GammaMean1 { shape } => {
                let y = shape * x;
                if y == 0.0 {
                    1.0
                } else {
                    upper_gamma(shape, y)
                }
            }
        })
    }

    /// L_ν(z) = ∫ e^{-uz} ν(du).
    pub fn laplace(&self, z: f64) -> Result<f64> {
        require_nonneg("z", z)?;
        Ok(match *self {
            Self::DiracOne => (-z).exp(),
            Self::ExponentialMean1 => 1.0 / (1.0 + z),
            Self::GammaMean1 { shape } => (-shape * (z / shape).ln_1p()).exp(),
            Self::ParetoMean1 { .. } => {
                let y = self.scale().unwrap() * z;
                if y <= PARETO_SERIES_MAX {
                    1.0 - z + self.h(z)?
                } else {
                    pareto_laplace_cf(self.beta().unwrap(), y)
                }
            }
        })
    }

    /// H(x) = L_ν(x) - 1 + x, evaluated without cancellation near 0.
    pub fn h(&self, x: f64) -> Result<f64> {
        require_nonneg("x", x)?;
        Ok(match *self {
            Self::DiracOne => exp_neg_minus_one_plus(x),
            Self::ExponentialMean1 => x * x / (1.0 + x),
            Self::GammaMean1 { shape } => gamma_h(shape, x),
            Self::ParetoMean1 { beta } => {
                let xm = beta / (1.0 + beta);
                let y = xm * x;
                if y <= PARETO_SERIES_MAX {
                    pareto_h_series(beta, x)
                } else {
                    pareto_laplace_cf(beta, y) - 1.0 + x
                }
            }
        })
    }
}

/// Regularized upper incomplete gamma Q(s, y).
fn upper_gamma(s: f64, y: f64) -> f64 {
    if y > s + 1.0 {
        upper_gamma_cf(s, y) / gamma(s)
    } else {
        // lower series P(s, y) = y^s e^{-y} Σ y^k / Γ(s+k+1)
        let mut term = (s * y.ln() - y - ln_gamma(s + 1.0)).exp();
        let mut sum = term;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= y / (s + k);
            sum += term;
            k += 1.0;
        }
        1.0 - sum
    }
}

/// p y^p Γ(-p, y) with p = 1+β.
fn pareto_laplace_cf(beta: f64, y: f64) -> f64 {
    let p = 1.0 + beta;
    p * y.powf(p) * upper_gamma_cf(-p, y)
}

/// H(z) = A z^p - p Σ_{k≥2} (-y)^k / (k! (k - p)), y = x_m z, A = (c_ν/β)Γ(1-β).
///
/// Obtained from `Γ(-p, y) = Γ(-p) - γ(-p, y)` with the lower incomplete gamma
/// expanded termwise; the k = 0, 1 terms cancel the `1 - z` exactly.
fn pareto_h_series(beta: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let p = 1.0 + beta;
    let xm = beta / p;
    let y = xm * z;
    let a = xm.powf(p) / beta * gamma(1.0 - beta);
    let mut sum = 0.0;
    let mut pow = y; // (-y)^k / k!, starting at k = 1
    let mut k = 1.0;
    loop {
        k += 1.0;
        pow *= -y / k;
        let term = pow / (k - p);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() || k > 200.0 {
            break;
        }
    }
    // pow started at y instead of -y, flip the overall sign
    a * z.powf(p) + p * sum
}

/// H for the mean-one Gamma law: binomial series in x/k for small x.
fn gamma_h(k: f64, x: f64) -> f64 {
    let y = x / k;
    if y < 0.5 {
        // (1+y)^{-k} - 1 + x = Σ_{j≥2} C(-k, j) y^j
        let mut c = -k * y; // j = 1 coefficient times y
        let mut sum = 0.0;
        let mut j = 1.0;
        loop {
            c *= (-k - j) / (j + 1.0) * y;
            j += 1.0;
            sum += c;
            if c.abs() < 1e-18 * sum.abs() || j > 400.0 {
                break;
            }
        }
        sum
    } else {
        (-k * y.ln_1p()).exp() - 1.0 + x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::quad::integrate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const PARETO: MarkDistribution = MarkDistribution::ParetoMean1 { beta: 0.6 };

    fn all() -> [MarkDistribution; 4] {
        [
            MarkDistribution::DiracOne,
            PARETO,
            MarkDistribution::ExponentialMean1,
            MarkDistribution::GammaMean1 { shape: 2.5 },
        ]
    }

    fn pareto_laplace_quadrature(z: f64) -> f64 {
        // substitute u = x_m v^{-1/p}: ∫_0^1 exp(-x_m z v^{-1/p}) dv
        let xm = 0.375;
        integrate(|v| (-xm * z * v.powf(-1.0 / 1.6)).exp(), 0.0, 1.0, 1e-15, 1e-13).unwrap()
    }

    #[test]
    fn documented_constants() {
        assert!((PARETO.scale().unwrap() - 0.375).abs() < 1e-15);
        assert!((PARETO.c_nu().unwrap() - 0.2082).abs() < 1e-4);
        assert_eq!(PARETO.tail(PARETO.scale().unwrap()).unwrap(), 1.0);
        assert_eq!(MarkDistribution::DiracOne.tail(0.5).unwrap(), 1.0);
        assert_eq!(MarkDistribution::DiracOne.tail(1.5).unwrap(), 0.0);
        assert!((MarkDistribution::DiracOne.laplace(1.0).unwrap() - (-1f64).exp()).abs() < 1e-15);
        assert!((MarkDistribution::DiracOne.h(1.0).unwrap() - (-1f64).exp()).abs() < 1e-15);
        for m in all() {
            assert_eq!(m.laplace(0.0).unwrap(), 1.0);
            assert_eq!(m.h(0.0).unwrap(), 0.0);
            assert!(m.laplace(-1.0).is_err());
        }
        assert!(MarkDistribution::ParetoMean1 { beta: 1.2 }.validate().is_err());
    }

    #[test]
    fn pareto_laplace_matches_quadrature_on_both_branches() {
        for z in [1e-3, 0.1, 1.0, 5.0, 5.33, 5.34, 10.0, 40.0] {
            let v = PARETO.laplace(z).unwrap();
            let q = pareto_laplace_quadrature(z);
            assert!((v - q).abs() < 1e-10, "z={z}: {v} vs {q}");
        }
    }

    #[test]
    fn monte_carlo_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 1_000_000;
        for m in all() {
            let xs: Vec<f64> = (0..n).map(|_| m.sample(&mut rng)).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let tail10 = xs.iter().filter(|&&x| x > 10.0).count() as f64 / n as f64;
            let lap: Vec<f64> = xs.iter().map(|x| (-x).exp()).collect();
            let lm = lap.iter().sum::<f64>() / n as f64;
            let lsd = (lap.iter().map(|v| (v - lm).powi(2)).sum::<f64>() / n as f64).sqrt();
            let exact = m.laplace(1.0).unwrap();
            assert!((lm - exact).abs() < 3.0 * lsd / (n as f64).sqrt() + 1e-10, "{m:?}: {lm} vs {exact}");
            let p = m.tail(10.0).unwrap();
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((tail10 - p).abs() <= 3.0 * se + 1e-12, "{m:?}: tail {tail10} vs {p}");
            if m != PARETO {
                assert!((mean - 1.0).abs() < 0.01, "{m:?}: mean {mean}");
            }
        }
        assert!((PARETO.tail(10.0).unwrap() - (0.0375f64).powf(1.6)).abs() < 1e-15);
    }

    #[test]
    fn h_heavy_tail_asymptotics() {
        let limit = PARETO.h_constant().unwrap();
        assert!((limit - 0.2082 / 0.6 * 2.21816).abs() < 1e-3);
        let mut prev = f64::INFINITY;
        for x in [1e-1, 1e-2, 1e-3, 1e-4, 1e-6] {
            let dev = (PARETO.h(x).unwrap() / x.powf(1.6) / limit - 1.0).abs();
            assert!(dev < prev);
            prev = dev;
        }
        let dev = |x: f64| (PARETO.h(x).unwrap() / x.powf(1.6) / limit - 1.0).abs();
        assert!(dev(1e-4) < 0.02);
        // the leading correction is p x_m² x^{1-β} / (2(1-β) A): ≈ 2.3% at 1e-3
        let predicted = 1.6 * 0.375f64.powi(2) * 1e-3f64.powf(0.4) / (2.0 * 0.4 * limit);
        assert!((dev(1e-3) / predicted - 1.0).abs() < 0.02, "{} vs {predicted}", dev(1e-3));
    }

    #[test]
    fn h_finite_variance_asymptotics() {
        for m in [MarkDistribution::ExponentialMean1, MarkDistribution::DiracOne, MarkDistribution::GammaMean1 { shape: 2.5 }] {
            let half_m2 = m.second_moment().unwrap() / 2.0;
            let x = 1e-5;
            assert!((m.h(x).unwrap() / (x * x) / half_m2 - 1.0).abs() < 1e-4, "{m:?}");
        }
    }

    #[test]
    fn h_is_monotone_and_branches_agree() {
        for m in all() {
            let mut prev = 0.0;
            for i in 1..4000 {
                let x = 1e-8 * 1.01f64.powi(i);
                let h = m.h(x).unwrap();
                assert!(h >= prev && h >= 0.0, "{m:?} at {x}");
                prev = h;
            }
        }
        // series/direct switch for the Gamma law
        let m = MarkDistribution::GammaMean1 { shape: 2.5 };
        let x = 1.25;
        let series = gamma_h(2.5, x * (1.0 - 1e-12));
        let direct = (-2.5 * (x / 2.5f64).ln_1p()).exp() - 1.0 + x;
        assert!((series - direct).abs() < 1e-12 && (m.h(x).unwrap() - direct).abs() < 1e-12);
        let y = PARETO_SERIES_MAX / 0.375;
        let a = pareto_h_series(0.6, y);
        let b = pareto_laplace_cf(0.6, PARETO_SERIES_MAX) - 1.0 + y;
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn h_increment_bound() {
        // H(y) - H(x) <= C (y - x) y^β with a finite fitted C
        let grid: Vec<f64> = (0..200).map(|i| 1e-6 * 1.08f64.powi(i)).collect();
        let mut c: f64 = 0.0;
        for (i, &x) in grid.iter().enumerate() {
            for &y in &grid[i + 1..] {
                let r = (PARETO.h(y).unwrap() - PARETO.h(x).unwrap()) / ((y - x) * y.powf(0.6));
                c = c.max(r);
            }
        }
        assert!(c.is_finite() && c < 2.0, "C = {c}");
    }
}

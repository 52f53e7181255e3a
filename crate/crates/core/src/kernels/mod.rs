//! Displacement densities φ on ℝ₊ with `∫φ = 1` and regularly varying tail
//! `Φ(t) = ∫_t^∞ φ ~ c_φ t^{-α}`.
//!
//! | variant         | Φ(t)                 | c_φ              |
//! |-----------------|----------------------|------------------|
//! | `ParetoTail`    | `(1+t)^{-α}`         | 1                |
//! | `MittagLeffler` | `E_α(-θ t^α)`        | `1/(θ Γ(1-α))`   |
//! | `StableDensity` | positive α-stable    | `1/Γ(1-α)`       |
//!
//! A `KernelSpec` is immutable once built (the Mittag-Leffler quantile table
//! is computed eagerly) and can be shared freely between threads.

pub mod mittag_leffler;
mod stable_law;
pub mod table;

use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, require_nonneg, Error, Result};
use crate::numeric::quad::integrate;
use crate::numeric::special::{gamma, rgamma};
use crate::stable::PositiveStable;

pub use mittag_leffler::{mittag_leffler, mittag_leffler_complement};
pub use table::InverseTail;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum KernelVariant {
    ParetoTail,
    MittagLeffler { theta: f64 },
    StableDensity,
}

#[derive(Debug, Clone)]
enum Repr {
    Pareto,
    MittagLeffler { theta: f64, quantiles: Arc<InverseTail> },
    Stable(PositiveStable),
}

#[derive(Debug, Clone)]
pub struct KernelSpec {
    variant: KernelVariant,
    alpha: f64,
    c_phi: f64,
    repr: Repr,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(domain("alpha", alpha, "tail exponent must lie in (0, 1)"))
    }
}

impl KernelSpec {
    pub fn new(variant: KernelVariant, alpha: f64) -> Result<Self> {
        match variant {
            KernelVariant::ParetoTail => Self::pareto(alpha),
            KernelVariant::MittagLeffler { theta } => Self::mittag_leffler(alpha, theta),
            KernelVariant::StableDensity => Self::stable(alpha),
        }
    }

    /// φ(t) = α(1+t)^{-1-α}.
    pub fn pareto(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            variant: KernelVariant::ParetoTail,
            alpha,
            c_phi: 1.0,
            repr: Repr::Pareto,
        })
    }

    /// φ(t) = θ t^{α-1} E_{α,α}(-θ t^α).
    pub fn mittag_leffler(alpha: f64, theta: f64) -> Result<Self> {
        let (c_phi, head) = Self::ml_constants(alpha, theta)?;
        let quantiles = InverseTail::build(|t| mittag_leffler(alpha, 1.0, -theta * t.powf(alpha)), alpha, head, c_phi)?;
        Ok(Self::ml_from_table(alpha, theta, c_phi, quantiles))
    }

    /// As [`KernelSpec::mittag_leffler`], reusing a tabulation stored under `dir`
    /// when one exists for the same parameters and writing it otherwise.
    pub fn mittag_leffler_cached(alpha: f64, theta: f64, dir: &Path) -> Result<Self> {
        let (c_phi, head) = Self::ml_constants(alpha, theta)?;
        let key = format!("mittag-leffler|{:016x}|{:016x}", alpha.to_bits(), theta.to_bits());
        let path = table::cache_path(dir, &key);
        let quantiles = if path.exists() {
            InverseTail::load(&path, alpha, head, c_phi)?
        } else {
            let q = InverseTail::build(|t| mittag_leffler(alpha, 1.0, -theta * t.powf(alpha)), alpha, head, c_phi)?;
            std::fs::create_dir_all(dir)?;
            q.save(&path)?;
            q
        };
        Ok(Self::ml_from_table(alpha, theta, c_phi, quantiles))
    }

    fn ml_constants(alpha: f64, theta: f64) -> Result<(f64, f64)> {
        check_alpha(alpha)?;
        if alpha > mittag_leffler::MAX_ALPHA {
            return Err(domain("alpha", alpha, "Mittag-Leffler kernel supports alpha <= 0.98"));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(domain("theta", theta, "must be positive"));
        }
        Ok((1.0 / (theta * gamma(1.0 - alpha)), theta * rgamma(1.0 + alpha)))
    }

    fn ml_from_table(alpha: f64, theta: f64, c_phi: f64, quantiles: InverseTail) -> Self {
        Self {
            variant: KernelVariant::MittagLeffler { theta },
            alpha,
            c_phi,
            repr: Repr::MittagLeffler {
                theta,
                quantiles: Arc::new(quantiles),
            },
        }
    }

    /// Density of the positive α-stable law with Laplace transform e^{-λ^α}.
    pub fn stable(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            variant: KernelVariant::StableDensity,
            alpha,
            c_phi: rgamma(1.0 - alpha),
            repr: Repr::Stable(PositiveStable::new(alpha)?),
        })
    }

    pub fn variant(&self) -> KernelVariant {
        self.variant
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// lim t^α Φ(t).
    pub fn c_phi(&self) -> f64 {
        self.c_phi
    }

    /// φ(t). The Mittag-Leffler density is infinite at 0 for every α < 1;
    /// `f64::INFINITY` is returned there as a sentinel.
    pub fn density(&self, t: f64) -> Result<f64> {
        require_nonneg("t", t)?;
        let a = self.alpha;
        match &self.repr {
            Repr::Pareto => Ok(a * (1.0 + t).powf(-1.0 - a)),
            Repr::MittagLeffler { theta, .. } => {
                if t == 0.0 {
                    return Ok(f64::INFINITY);
                }
                Ok(theta * t.powf(a - 1.0) * mittag_leffler(a, a, -theta * t.powf(a))?)
            }
            Repr::Stable(_) => stable_law::density(a, t),
        }
    }

    /// Φ(t) = ∫_t^∞ φ. Closed form for Pareto; `1e-13` absolute otherwise.
    pub fn tail(&self, t: f64) -> Result<f64> {
        require_nonneg("t", t)?;
        let a = self.alpha;
        match &self.repr {
            Repr::Pareto => Ok((1.0 + t).powf(-a)),
            Repr::MittagLeffler { theta, .. } => {
                if t == 0.0 {
                    return Ok(1.0);
                }
                mittag_leffler(a, 1.0, -theta * t.powf(a))
            }
            Repr::Stable(_) => stable_law::tail(a, t),
        }
    }

    /// 1 - Φ(t), without cancellation for small t.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        require_nonneg("t", t)?;
        let a = self.alpha;
        match &self.repr {
            Repr::Pareto => Ok(-(-a * t.ln_1p()).exp_m1()),
            Repr::MittagLeffler { theta, .. } => mittag_leffler_complement(a, theta * t.powf(a)),
            Repr::Stable(_) => Ok(1.0 - stable_law::tail(a, t)?),
        }
    }

    /// Ψ(t) = ∫_0^t Φ(s) ds = E min(ξ, t).
    pub fn integrated_tail(&self, t: f64) -> Result<f64> {
        require_nonneg("t", t)?;
        let a = self.alpha;
        match &self.repr {
            Repr::Pareto => Ok(((1.0 - a) * t.ln_1p()).exp_m1() / (1.0 - a)),
            Repr::MittagLeffler { theta, .. } => {
                if t == 0.0 {
                    return Ok(0.0);
                }
                Ok(t * mittag_leffler(a, 2.0, -theta * t.powf(a))?)
            }
            Repr::Stable(_) => {
                // split geometrically so each piece sees a smooth integrand
                let mut lo = 0.0;
                let mut hi = t.min(1.0);
                let mut acc = 0.0;
                while lo < t {
                    acc += integrate(|s| stable_law::tail(a, s).unwrap_or(f64::NAN), lo, hi, 1e-14, 1e-12)?;
                    lo = hi;
                    hi = (hi * 10.0).min(t);
                }
                Ok(acc)
            }
        }
    }

    /// ∫_a^b φ(s) (s - a) ds, the first moment of φ over a cell relative to
    /// its left end. Together with Φ(a) - Φ(b) this gives the exact weights
    /// of a piecewise-linear function against φ.
    pub fn cell_moment(&self, a: f64, b: f64) -> Result<f64> {
        require_nonneg("a", a)?;
        if !(b > a) {
            return Err(domain("b", b, "cell must have positive width"));
        }
        let failed = std::cell::Cell::new(false);
        let f = |s: f64| {
            if s <= a {
                return 0.0;
            }
            match self.density(s) {
                Ok(d) => d * (s - a),
                Err(_) => {
                    failed.set(true);
                    0.0
                }
            }
        };
        let v = integrate(f, a, b, 0.0, 1e-11)?;
        if failed.get() {
            return Err(Error::Quadrature { tol: 1e-11, err: f64::NAN });
        }
        Ok(v)
    }

    /// One displacement ξ ~ φ.
    pub fn sample_displacement<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.repr {
            Repr::Pareto => {
                // tail level v = 1 - u ∈ (0, 1]
                let v = 1.0 - rng.random::<f64>();
                (-v.ln() / self.alpha).exp_m1()
            }
            Repr::MittagLeffler { quantiles, .. } => loop {
                let v = 1.0 - rng.random::<f64>();
                let t = quantiles.quantile(v);
                if t > 0.0 {
                    return t;
                }
            },
            Repr::Stable(law) => law.sample(rng),
        }
    }

    /// Whether φ is bounded and nonincreasing, so a piecewise-constant
    /// dominating intensity exists between events.
    pub fn is_bounded_monotone(&self) -> bool {
        matches!(self.repr, Repr::Pareto)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::special::erfc;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn all_kernels() -> Vec<KernelSpec> {
        vec![
            KernelSpec::pareto(0.5).unwrap(),
            KernelSpec::pareto(0.3).unwrap(),
            KernelSpec::mittag_leffler(0.5, 1.0).unwrap(),
            KernelSpec::mittag_leffler(0.3, 2.0).unwrap(),
            KernelSpec::stable(0.5).unwrap(),
            KernelSpec::stable(0.3).unwrap(),
        ]
    }

    #[test]
    fn documented_examples() {
        let p = KernelSpec::pareto(0.5).unwrap();
        assert_eq!(p.density(0.0).unwrap(), 0.5);
        assert_eq!(p.tail(3.0).unwrap(), 0.5);
        let s = KernelSpec::stable(0.5).unwrap();
        let exact = (-0.25f64).exp() / (2.0 * PI.sqrt());
        assert!((s.density(1.0).unwrap() - exact).abs() < 1e-12);
        for k in all_kernels() {
            assert!(k.density(-1.0).is_err());
            assert!(k.tail(-1.0).is_err());
            assert_eq!(k.tail(0.0).unwrap(), 1.0);
        }
        let ml = KernelSpec::mittag_leffler(0.5, 1.0).unwrap();
        assert_eq!(ml.density(0.0).unwrap(), f64::INFINITY);
        // E_{1/2}(-√t) = e^t erfc(√t)
        let t: f64 = 2.0;
        assert!((ml.tail(t * t).unwrap() - (t * t).exp() * erfc(t)).abs() < 1e-12);
    }

    #[test]
    fn normalization() {
        for k in all_kernels() {
            let mut mass = 0.0;
            let mut lo = 0.0;
            for hi in [1e-3, 1e-1, 1.0, 10.0, 100.0, 1e3] {
                mass += integrate(|s| k.density(s).unwrap(), lo, hi, 1e-12, 1e-10).unwrap();
                lo = hi;
            }
            mass += k.tail(1e3).unwrap();
            assert!((mass - 1.0).abs() < 1e-6, "{:?}: {mass}", k.variant());
        }
    }

    #[test]
    fn tail_density_consistency() {
        for k in all_kernels() {
            for (t, h) in [(0.05, 0.1), (0.7, 0.5), (3.0, 2.0), (40.0, 25.0)] {
                let lhs = k.tail(t).unwrap() - k.tail(t + h).unwrap();
                let rhs = integrate(|s| k.density(s).unwrap(), t, t + h, 1e-14, 1e-11).unwrap();
                assert!((lhs - rhs).abs() < 1e-10, "{:?} t={t}: {lhs} vs {rhs}", k.variant());
                let c = k.cdf(t).unwrap();
                assert!((c + k.tail(t).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn integrated_tail_and_cell_moment() {
        for k in all_kernels() {
            for (a, b) in [(0.0, 0.5), (2.0, 3.0), (100.0, 101.0)] {
                let quad = integrate(|s| k.tail(s).unwrap(), a, b, 1e-14, 1e-12).unwrap();
                let psi = k.integrated_tail(b).unwrap() - k.integrated_tail(a).unwrap();
                assert!((quad - psi).abs() < 1e-9 * b, "{:?} [{a},{b}]: {quad} vs {psi}", k.variant());
                let moment = k.cell_moment(a, b).unwrap();
                let via_psi = quad - (b - a) * k.tail(b).unwrap();
                assert!((moment - via_psi).abs() < 1e-9, "{:?} [{a},{b}]: {moment} vs {via_psi}", k.variant());
            }
        }
    }

    #[test]
    fn regular_variation_constant() {
        for k in all_kernels() {
            let mut prev = f64::INFINITY;
            for e in 1..=6 {
                let t = 10f64.powi(e);
                let dev = (t.powf(k.alpha()) * k.tail(t).unwrap() / k.c_phi() - 1.0).abs();
                assert!(dev <= prev, "{:?}: deviation grew at t=1e{e}", k.variant());
                prev = dev;
            }
            assert!(prev < 0.1, "{:?}: {prev}", k.variant());
            // log-log slope over the last decade
            let slope = (k.tail(1e6).unwrap().ln() - k.tail(1e5).unwrap().ln()) / 10f64.ln();
            assert!((slope + k.alpha()).abs() < 0.03, "{:?}: slope {slope}", k.variant());
        }
    }

    #[test]
    fn theta_preserves_criticality() {
        for theta in [0.3, 1.0, 4.0] {
            let k = KernelSpec::mittag_leffler(0.6, theta).unwrap();
            let mut mass = 0.0;
            let mut lo = 0.0;
            for hi in [1e-4, 1e-2, 1.0, 100.0, 1e4] {
                mass += integrate(|s| k.density(s).unwrap(), lo, hi, 1e-12, 1e-10).unwrap();
                lo = hi;
            }
            mass += k.tail(1e4).unwrap();
            assert!((mass - 1.0).abs() < 1e-6, "θ={theta}: {mass}");
        }
    }

    fn ks_distance(k: &KernelSpec, n: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut xs: Vec<f64> = (0..n).map(|_| k.sample_displacement(&mut rng)).collect();
        assert!(xs.iter().all(|&x| x > 0.0));
        xs.sort_by(f64::total_cmp);
        let nf = n as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = k.cdf(x).unwrap();
                (f - i as f64 / nf).abs().max(((i + 1) as f64 / nf - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn samplers_follow_their_laws() {
        let n = 100_000;
        for k in all_kernels() {
            let d = ks_distance(&k, n, 17);
            assert!(d < 2.0 * 1.36 / (n as f64).sqrt(), "{:?}: KS {d}", k.variant());
        }
    }

    #[test]
    fn pareto_inverse_cdf_formula() {
        // u ↦ (1-u)^{-1/α} - 1
        let k = KernelSpec::pareto(0.5).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(2);
        let mut b = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let x = k.sample_displacement(&mut a);
            let u: f64 = b.random();
            let expected = (1.0 - u).powf(-2.0) - 1.0;
            assert!((x / expected - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cache_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let fresh = KernelSpec::mittag_leffler_cached(0.4, 1.5, dir.path()).unwrap();
        let loaded = KernelSpec::mittag_leffler_cached(0.4, 1.5, dir.path()).unwrap();
        let (Repr::MittagLeffler { quantiles: q1, .. }, Repr::MittagLeffler { quantiles: q2, .. }) =
            (&fresh.repr, &loaded.repr)
        else {
            unreachable!()
        };
        let bits = |s: &[f64]| s.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(q1.knots().0), bits(q2.knots().0));
        assert_eq!(bits(q1.knots().1), bits(q2.knots().1));
        assert_eq!(q1, q2);
        // corrupt file is reported, not silently rebuilt
        let path = std::fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
        std::fs::write(&path, b"junk").unwrap();
        assert!(matches!(
            KernelSpec::mittag_leffler_cached(0.4, 1.5, dir.path()),
            Err(Error::Cache(_))
        ));
    }
}

//! Totally skewed stable samplers.
//!
//! Conventions are fixed by Laplace transforms, never characteristic functions:
//! `E e^{-λX} = e^{-λ^α}` for the positive law with `α < 1`, and
//! `E e^{-λX} = e^{+λ^a}` for the mean-zero, skewness `+1` law with `a ∈ (1, 2)`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{domain, Result};

/// Index of a positive stable law, validated once so the hot loop is free of checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositiveStable {
    alpha: f64,
}

impl PositiveStable {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain("alpha", alpha, "positive stable index must lie in (0, 1)"));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Kanter's representation:
    /// `X = sin(απU) / sin(πU)^{1/α} · (sin((1-α)πU) / E)^{(1-α)/α}`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let a = self.alpha;
        loop {
            let u: f64 = PI * rng.random::<f64>();
            let e: f64 = Exp1.sample(rng);
            if u == 0.0 || e == 0.0 {
                continue;
            }
            let x = (a * u).sin() / u.sin().powf(1.0 / a)
                * ((1.0 - a) * u).sin().powf((1.0 - a) / a)
                / e.powf((1.0 - a) / a);
            if x.is_finite() && x > 0.0 {
                return x;
            }
        }
    }
}

impl Distribution<f64> for PositiveStable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        PositiveStable::sample(self, rng)
    }
}

/// Spectrally positive stable law of index `a ∈ (1, 2)`, mean zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewedStable {
    a: f64,
    b: f64,
}

impl SkewedStable {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 1.0 && a < 2.0) {
            return Err(domain("a", a, "skewed stable index must lie in (1, 2)"));
        }
        // arctan(tan(πa/2)) / a for πa/2 in (π/2, π)
        let b = FRAC_PI_2 - PI / a;
        Ok(Self { a, b })
    }

    pub fn index(&self) -> f64 {
        self.a
    }

    /// Chambers–Mallows–Stuck with skewness +1, *without* the usual
    /// `(1 + tan²(πa/2))^{1/(2a)}` scale factor. Dropping it leaves
    /// `ln E e^{-λX} = λ^a`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (a, b) = (self.a, self.b);
        loop {
            let v: f64 = PI * (rng.random::<f64>() - 0.5);
            let w: f64 = Exp1.sample(rng);
            if w == 0.0 || v.abs() >= FRAC_PI_2 {
                continue;
            }
            let ab = a * (v + b);
            let x = ab.sin() / v.cos().powf(1.0 / a) * ((v - ab).cos() / w).powf((1.0 - a) / a);
            if x.is_finite() {
                return x;
            }
        }
    }
}

impl Distribution<f64> for SkewedStable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        SkewedStable::sample(self, rng)
    }
}

/// One draw with `E e^{-λX} = e^{-λ^α}`.
pub fn sample_positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<f64> {
    Ok(PositiveStable::new(alpha)?.sample(rng))
}

/// One draw with `E e^{-λX} = e^{λ^a}` and `E X = 0`.
pub fn sample_skewed_stable<R: Rng + ?Sized>(a: f64, rng: &mut R) -> Result<f64> {
    Ok(SkewedStable::new(a)?.sample(rng))
}

//! Two-parameter Mittag-Leffler function E_{a,b}(z) = Σ_k z^k / Γ(b + a k)
//! on the negative half-line.
//!
//! Three regimes for `x = -z`, `0 < a < 1`:
//!
//! * `x <= SERIES_MAX`: the defining power series in `f64`. Terms are bounded
//!   by `1/min Γ ≈ 1.13`, so cancellation costs at most a few ulps.
//! * `x^{1/a} >= ASYMPTOTIC_EXPONENT`: the algebraic expansion
//!   `-Σ_{k≥1} z^{-k}/Γ(b - a k)`, cut at its smallest term. The truncation
//!   error is of order `exp(-x^{1/a})`, below `1e-17` at the switch.
//! * otherwise: the contour-integral representation of Gorenflo, Loutchko and
//!   Luchko with `ε = 1`, integrated by adaptive Gauss–Kronrod to `1e-13`.
//!
//! `a = 1` is handled separately (exponential and Euler-integral forms).
//! The combined absolute error is below `1e-10`, comfortably inside the `1e-8`
//! budget the kernels need. Accuracy degrades as `a → 1⁻` (the contour
//! integrand becomes nearly singular); parameters above `MAX_ALPHA` are
//! rejected.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::numeric::quad::integrate;
use crate::numeric::special::{ln_gamma, rgamma};

pub const SERIES_MAX: f64 = 1.0;
pub const ASYMPTOTIC_EXPONENT: f64 = 40.0;
pub const MAX_ALPHA: f64 = 0.98;
const INTEGRAL_TOL: f64 = 1e-13;

/// E_{a,b}(z) for `a ∈ (0, MAX_ALPHA] ∪ {1}`, `b > 0`, `z ≤ 0`.
pub fn mittag_leffler(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(a > 0.0 && (a <= MAX_ALPHA || a == 1.0)) {
        return Err(domain("a", a, "must lie in (0, 0.98] or equal 1"));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(domain("b", b, "must be positive"));
    }
    if !(z <= 0.0) || !z.is_finite() {
        return Err(domain("z", z, "only finite nonpositive arguments are supported"));
    }
    let x = -z;
    if x == 0.0 {
        return Ok(rgamma(b));
    }
    if a == 1.0 {
        return unit_order(b, z);
    }
    if x <= SERIES_MAX {
        return Ok(series(a, b, z));
    }
    if x.powf(1.0 / a) >= ASYMPTOTIC_EXPONENT {
        return Ok(asymptotic(a, b, z));
    }
    contour(a, b, x)
}

/// 1 − E_{a,1}(−x), accurate also when the result is tiny.
pub fn mittag_leffler_complement(a: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain("x", x, "must be nonnegative"));
    }
    if x <= SERIES_MAX {
        // -Σ_{k≥1} (-x)^k / Γ(1 + a k)
        let mut sum = 0.0;
        let mut pow = 1.0;
        for k in 1..400 {
            pow *= -x;
            let term = pow * rgamma(1.0 + a * k as f64);
            sum -= term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        Ok(sum)
    } else {
        Ok(1.0 - mittag_leffler(a, 1.0, -x)?)
    }
}

fn series(a: f64, b: f64, z: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = 1.0;
    for k in 0..1000 {
        let term = pow * rgamma(b + a * k as f64);
        sum += term;
        if k > 4 && term.abs() < 1e-18 {
            break;
        }
        pow *= z;
    }
    sum
}

fn asymptotic(a: f64, b: f64, z: f64) -> f64 {
    // Stop on the envelope |z|^{-k} Γ(1 - b + a k) / π rather than on the
    // terms themselves: the sin factor from the reflection makes individual
    // terms dip spuriously.
    let x = -z;
    let inv = 1.0 / z;
    let mut pow = 1.0;
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for k in 1..400 {
        let kf = k as f64;
        pow *= inv;
        sum -= pow * rgamma(b - a * kf);
        let g = 1.0 - b + a * kf;
        if g <= 1.0 {
            // envelope not yet monotone in k (and Γ has poles here)
            continue;
        }
        let envelope = (ln_gamma(g) - kf * x.ln()).exp();
        if envelope > last {
            // undo: the series has started to diverge
            sum += pow * rgamma(b - a * kf);
            break;
        }
        last = envelope;
        if envelope < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Contour representation for |arg z| = π > aπ with ε = 1.
fn contour(a: f64, b: f64, x: f64) -> Result<f64> {
    let p = (1.0 - b) / a;
    let (s1, s2) = ((PI * (1.0 - b)).sin(), (PI * (1.0 - b + a)).sin());
    let cos_api = (a * PI).cos();
    let kernel = |chi: f64| {
        let num = chi * s1 + x * s2;
        let den = chi * chi + 2.0 * chi * x * cos_api + x * x;
        chi.powf(p) * (-chi.powf(1.0 / a)).exp() * num / den / (a * PI)
    };
    let chi_max = 60f64.powf(a);
    let k_part = integrate(kernel, 1.0, chi_max, INTEGRAL_TOL, 0.0)?;

    let arc = |phi: f64| {
        let omega = (phi / a).sin() + phi * (1.0 + p);
        let re = ((omega - phi).cos() + x * omega.cos()) / (1.0 + 2.0 * x * phi.cos() + x * x);
        (phi / a).cos().exp() * re / (2.0 * a * PI)
    };
    // integrand is even in φ
    let p_part = 2.0 * integrate(arc, 0.0, a * PI, INTEGRAL_TOL, 0.0)?;
    Ok(k_part + p_part)
}

/// a = 1: E_{1,1} = exp, E_{1,b} for b > 1 via the Euler integral,
/// and b < 1 through E_{1,b}(z) = 1/Γ(b) + z E_{1,b+1}(z).
fn unit_order(b: f64, z: f64) -> Result<f64> {
    if b == 1.0 {
        return Ok(z.exp());
    }
    if b < 1.0 {
        return Ok(rgamma(b) + z * unit_order(b + 1.0, z)?);
    }
    // Γ(b) E_{1,b}(z) = ∫_0^1 exp(z (1 - s^{1/(b-1)})) ds
    let e = 1.0 / (b - 1.0);
    let v = integrate(|s: f64| (z * (1.0 - s.powf(e))).exp(), 0.0, 1.0, 1e-15, 1e-13)?;
    Ok(v * rgamma(b))
}

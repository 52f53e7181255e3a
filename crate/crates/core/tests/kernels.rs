//! Kernel families against closed-form oracles.

use approx::assert_relative_eq;
use critical_hawkes::kernels::{KernelSpec, KernelVariant};
use critical_hawkes::numeric::special::erfc;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn pareto_tail_closed_form() {
    let k = KernelSpec::pareto(0.3).unwrap();
    for t in [0.0, 0.5, 3.0, 1e4] {
        assert_relative_eq!(k.tail(t).unwrap(), (1.0 + t).powf(-0.3), max_relative = 1e-14);
    }
}

#[test]
fn half_order_mittag_leffler_tail_is_scaled_erfc() {
    // Φ(t) = E_{1/2}(-θ√t) = e^{θ²t} erfc(θ√t)
    for theta in [0.5, 1.0, 2.0] {
        let k = KernelSpec::mittag_leffler(0.5, theta).unwrap();
        for t in [0.01f64, 0.3, 2.0, 9.0, 40.0] {
            let x: f64 = theta * t.sqrt();
            let exact = (x * x).exp() * erfc(x);
            assert_relative_eq!(k.tail(t).unwrap(), exact, max_relative = 1e-9);
        }
    }
}

#[test]
fn half_order_stable_tail_is_erf() {
    // L_{1/2} with E e^{-λL} = e^{-√λ}: P(L > t) = erf(1/(2√t))
    let k = KernelSpec::stable(0.5).unwrap();
    for t in [0.05, 0.5, 1.0, 4.0, 100.0] {
        let exact = 1.0 - erfc(0.5 / f64::sqrt(t));
        assert_relative_eq!(k.tail(t).unwrap(), exact, max_relative = 1e-9);
    }
}

#[test]
fn sampled_displacements_follow_the_tail() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in [KernelSpec::pareto(0.4).unwrap(), KernelSpec::mittag_leffler(0.4, 1.0).unwrap(), KernelSpec::stable(0.4).unwrap()] {
        let n = 200_000;
        let t = 3.0;
        let hits = (0..n).filter(|_| k.sample_displacement(&mut rng) > t).count() as f64 / n as f64;
        let p = k.tail(t).unwrap();
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits - p).abs() < 4.0 * se, "{:?}: {hits} vs {p}", k.variant());
    }
}

#[test]
fn variant_round_trips_through_serde() {
    let k = KernelSpec::mittag_leffler(0.3, 2.0).unwrap();
    let json = serde_json::to_string(&k.variant()).unwrap();
    let back: KernelVariant = serde_json::from_str(&json).unwrap();
    assert_eq!(back, k.variant());
}

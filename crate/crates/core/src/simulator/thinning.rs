//! Ogata thinning for the intensity `λ(t) = μ + Σ_{τ_i < t} η_i φ(t - τ_i)`.
//!
//! Needs a bounded nonincreasing φ: between events the intensity only
//! decays, so its value just after the current time dominates the future.
//! Quadratic in the number of events; meant as an independent oracle on
//! short horizons, not as a production simulator.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{domain, Error, Result};
use crate::kernels::{KernelSpec, KernelVariant};
use crate::marks::MarkDistribution;
use crate::simulator::cluster::{EventRecord, SimOutput};

pub fn simulate_thinning<R: Rng + ?Sized>(
    mu: f64,
    horizon: f64,
    kernel: &KernelSpec,
    marks: &MarkDistribution,
    grid: &[f64],
    rng: &mut R,
) -> Result<SimOutput> {
    if !kernel.is_bounded_monotone() {
        return Err(Error::NonMonotoneKernel(match kernel.variant() {
            KernelVariant::ParetoTail => "ParetoTail",
            KernelVariant::MittagLeffler { .. } => "MittagLeffler",
            KernelVariant::StableDensity => "StableDensity",
        }));
    }
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(domain("mu", mu, "must be finite and nonnegative"));
    }
    let intensity = |t: f64, events: &[(f64, f64)]| -> Result<f64> {
        let mut l = mu;
        for &(tau, eta) in events {
            l += eta * kernel.density(t - tau)?;
        }
        Ok(l)
    };
    let mut events: Vec<(f64, f64)> = Vec::new();
    let mut t = 0.0;
    loop {
        let bound = intensity(t, &events)?;
        if bound <= 0.0 {
            break;
        }
        let wait: f64 = Exp1.sample(rng);
        t += wait / bound;
        if t > horizon {
            break;
        }
        let accept = intensity(t, &events)? / bound;
        if rng.random::<f64>() <= accept {
            events.push((t, marks.sample(rng)));
        }
    }
    let records = events
        .iter()
        .enumerate()
        .map(|(i, &(time, mark))| EventRecord {
            id: i as u64,
            time,
            mark,
            generation: 0,
            parent: None,
        })
        .collect();
    let times = events.iter().map(|e| e.0).collect();
    Ok(SimOutput::from_times(times, Some(records), grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_rate_has_no_events() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let k = KernelSpec::pareto(0.5).unwrap();
        let out = simulate_thinning(0.0, 100.0, &k, &MarkDistribution::DiracOne, &[], &mut rng).unwrap();
        assert!(out.times.is_empty());
    }

    #[test]
    fn rejects_unbounded_kernels() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let k = KernelSpec::stable(0.5).unwrap();
        assert!(matches!(
            simulate_thinning(1.0, 1.0, &k, &MarkDistribution::DiracOne, &[], &mut rng),
            Err(Error::NonMonotoneKernel(_))
        ));
    }

    #[test]
    fn first_event_is_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = KernelSpec::pareto(0.5).unwrap();
        let mu = 2.0;
        let n = 20_000;
        let mut xs: Vec<f64> = (0..n)
            .filter_map(|_| {
                let out = simulate_thinning(mu, 50.0, &k, &MarkDistribution::DiracOne, &[], &mut rng).unwrap();
                out.times.first().copied()
            })
            .collect();
        xs.sort_by(f64::total_cmp);
        let nf = xs.len() as f64;
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = 1.0 - (-mu * x).exp();
                (f - i as f64 / nf).abs().max(((i + 1) as f64 / nf - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.36 / nf.sqrt(), "KS {d}");
    }
}

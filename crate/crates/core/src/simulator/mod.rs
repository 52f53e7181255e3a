//! Event-level simulation of the critical marked Hawkes process.

pub mod cluster;
pub mod offspring;
pub mod thinning;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::renewal::{exact_mean_n, ResolventTable};
use crate::stable::LimitModel;

pub use cluster::{simulate_cluster, simulate_hawkes, EventRecord, SimOptions, SimOutput, DEFAULT_EVENT_CAP};
pub use offspring::{sample_offspring_count, OffspringLaw, OffspringSpec, SibuyaTable};
pub use thinning::simulate_thinning;

/// Independent stream for replica `replica` under master seed `seed`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Run `job` for replicas `0..count` in parallel. Each replica owns its
/// stream, and results come back in replica order, so the output does not
/// depend on the number of worker threads.
pub fn run_replicas<T, F>(seed: u64, count: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    (0..count as u64)
        .into_par_iter()
        .map(|i| job(i, &mut replica_rng(seed, i)))
        .collect()
}

/// X_T(t_j) = (N(T t_j) - E N(T t_j)) / F_T for each replica; `outputs` must
/// carry counts on the absolute grid `T t_j`. Centering uses the exact mean.
pub fn normalize_paths(
    outputs: &[SimOutput],
    model: &LimitModel,
    scale: f64,
    table: &ResolventTable,
) -> Result<Vec<Vec<f64>>> {
    let Some(first) = outputs.first() else {
        return Ok(Vec::new());
    };
    let norm = model.norming(scale);
    let means = first
        .grid
        .iter()
        .map(|&t| exact_mean_n(table, model.mu, t))
        .collect::<Result<Vec<_>>>()?;
    outputs
        .iter()
        .map(|o| {
            if o.grid != first.grid {
                return Err(Error::InvalidParameter("replicas use different count grids".into()));
            }
            Ok(o.counts.iter().zip(&means).map(|(&c, m)| (c as f64 - m) / norm).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;
    use crate::marks::MarkDistribution;
    use crate::renewal::{build_resolvent, Grid};

    #[test]
    fn replicas_are_deterministic() {
        let k = KernelSpec::pareto(0.5).unwrap();
        let run = || {
            run_replicas(99, 50, |_, rng| {
                let o = simulate_hawkes(1.0, 50.0, &k, &MarkDistribution::ParetoMean1 { beta: 0.6 }, &OffspringLaw::PoissonOfMark, &SimOptions::default(), rng)?;
                Ok(o.times.iter().map(|t| t.to_bits()).collect::<Vec<_>>())
            })
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn normalized_paths_start_at_zero_and_center() {
        let k = KernelSpec::pareto(0.3).unwrap();
        let marks = MarkDistribution::ParetoMean1 { beta: 0.6 };
        let model = LimitModel::heavy_tailed(&k, &marks, 1.0).unwrap();
        let t = 100.0;
        let table = build_resolvent(&k, Grid::new(0.05, 2000).unwrap()).unwrap();
        let opts = SimOptions {
            grid: vec![0.0, t],
            ..Default::default()
        };
        let outs = run_replicas(3, 4000, |_, rng| simulate_hawkes(1.0, t, &k, &marks, &OffspringLaw::PoissonOfMark, &opts, rng)).unwrap();
        let paths = normalize_paths(&outs, &model, t, &table).unwrap();
        assert!(paths.iter().all(|p| p[0] == 0.0));
        let x1: Vec<f64> = paths.iter().map(|p| p[1]).collect();
        let m = x1.iter().sum::<f64>() / x1.len() as f64;
        let se = (x1.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (x1.len() * (x1.len() - 1)) as f64).sqrt();
        assert!(m.abs() < 3.0 * se, "mean {m} se {se}");
        let short = build_resolvent(&k, Grid::new(0.05, 100).unwrap()).unwrap();
        assert!(normalize_paths(&outs, &model, t, &short).is_err());
    }
}
